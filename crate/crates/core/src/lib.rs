//! Semistability certificates for polynomial-valued matrices under
//! SL(p) × SL(q) × GL(d), block decompositions of incidence matrices, tile plans,
//! sublevel-set integral estimates and a Radon-like transform frontend.

pub mod blockdecomp;
pub mod error;
pub mod gitnorm;
pub mod linalg;
pub mod lp;
pub mod polycore;
pub mod radon;
pub mod scalar;
pub mod sublevel;
pub mod tileplan;

pub use error::{Error, Result};
pub use linalg::Mat;
pub use polycore::{act_group, GroupElement, Multiindex, Poly, PolyMatrix, SupportSet};
pub use scalar::{rat, rat_int, Rat, Real, Scalar};

/// Exact rational polynomial.
pub type RatPoly = Poly<Rat>;
/// Double-precision polynomial.
pub type FloatPoly = Poly<f64>;
/// Single-precision polynomial.
pub type F32Poly = Poly<f32>;
/// Exact rational polynomial matrix.
pub type RatMatrix = PolyMatrix<Rat>;
/// Double-precision polynomial matrix.
pub type FloatMatrix = PolyMatrix<f64>;
/// Exact dense matrix.
pub type RatMat = Mat<Rat>;
/// Exact group element.
pub type RatGroupElement = GroupElement<Rat>;
/// Double-precision group element.
pub type FloatGroupElement = GroupElement<f64>;
