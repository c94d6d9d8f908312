//! Sparse multiindex polynomials, polynomial-valued matrices, the group action ρ and the
//! Hilbert–Schmidt norm ‖P‖² = Σ α!·c²_{ijα}.

mod group;
pub mod json;
mod matrix;
mod multiindex;
mod poly;

pub use group::{act_group, GroupElement};
pub use matrix::{PolyMatrix, SupportSet, SupportTriple};
pub use multiindex::Multiindex;
pub use poly::{default_names, poly_is_one, Poly};

use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Σ c_α·x^α in double precision.
pub fn eval_poly<T: Scalar>(p: &Poly<T>, point: &[f64]) -> crate::Result<f64> {
    p.eval(point)
}

pub fn partial_derivative<T: Scalar>(p: &Poly<T>, alpha: &Multiindex) -> Poly<T> {
    p.partial_derivative(alpha)
}

pub fn substitute_linear<T: Scalar>(p: &Poly<T>, c: &Mat<T>) -> Poly<T> {
    p.substitute_linear(c)
}

pub fn diagonal_shift<T: Scalar>(p: &Poly<T>, s0: &[T]) -> Poly<T> {
    p.diagonal_shift(s0)
}

pub fn hs_norm<T: Scalar>(p: &PolyMatrix<T>) -> f64 {
    p.hs_norm()
}

pub fn support_set<T: Scalar>(p: &PolyMatrix<T>) -> SupportSet {
    p.support_set()
}
