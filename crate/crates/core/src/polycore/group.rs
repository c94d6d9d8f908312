use super::{Poly, PolyMatrix};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// (A, B, C) ∈ GL(p) × GL(q) × GL(d) acting by ρ: P ↦ A·P(Cᵀz)·Bᵀ.
#[derive(Clone, PartialEq)]
pub struct GroupElement<T> {
    pub a: Mat<T>,
    pub b: Mat<T>,
    pub c: Mat<T>,
}

impl<T: Scalar> GroupElement<T> {
    pub fn new(a: Mat<T>, b: Mat<T>, c: Mat<T>) -> Result<Self> {
        if !a.is_square() || !b.is_square() || !c.is_square() {
            return Err(Error::Shape("group components must be square".into()));
        }
        Ok(GroupElement { a, b, c })
    }

    pub fn identity(p: usize, q: usize, d: usize) -> Self {
        GroupElement { a: Mat::identity(p), b: Mat::identity(q), c: Mat::identity(d) }
    }

    /// Diagonal element (e^{w_p}, e^{w_q}, e^{w_d}) for floating scalars given log-weights.
    pub fn diag_exp(w_p: &[f64], w_q: &[f64], w_d: &[f64]) -> GroupElement<f64> {
        let e = |v: &[f64]| Mat::diag(&v.iter().map(|x| x.exp()).collect::<Vec<_>>());
        GroupElement { a: e(w_p), b: e(w_q), c: e(w_d) }
    }

    /// g₁g₂, so that ρ_{g₁}ρ_{g₂} = ρ_{g₁g₂}.
    pub fn compose(&self, other: &Self) -> Self {
        GroupElement { a: &self.a * &other.a, b: &self.b * &other.b, c: &self.c * &other.c }
    }

    pub fn inverse(&self) -> Option<Self> {
        Some(GroupElement { a: self.a.inverse()?, b: self.b.inverse()?, c: self.c.inverse()? })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.a.rows(), self.b.rows(), self.c.rows())
    }

    /// |det A| = |det B| = 1 (to 1e-9 in floats) and C invertible.
    pub fn is_volume_preserving(&self) -> bool {
        let near_unit = |m: &Mat<T>| (m.det().to_f64().abs() - 1.0).abs() <= 1e-9;
        near_unit(&self.a) && near_unit(&self.b) && self.c.det().to_f64().abs() > 1e-12
    }

    pub fn to_f64(&self) -> GroupElement<f64> {
        GroupElement { a: self.a.to_f64(), b: self.b.to_f64(), c: self.c.to_f64() }
    }
}

impl<T: Scalar> std::fmt::Debug for GroupElement<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupElement").field("a", &self.a).field("b", &self.b).field("c", &self.c).finish()
    }
}

/// ρ_{(A,B,C)}P: rows mixed by A, columns by B, variables substituted z ↦ Cᵀz.
pub fn act_group<T: Scalar>(p: &PolyMatrix<T>, g: &GroupElement<T>) -> Result<PolyMatrix<T>> {
    let (gp, gq, gd) = g.dims();
    if (gp, gq, gd) != (p.p(), p.q(), p.d()) {
        return Err(Error::Shape(format!("group element is ({gp},{gq},{gd}), matrix is ({},{},{})", p.p(), p.q(), p.d())));
    }
    let subbed: Vec<Poly<T>> = p.entries().iter().map(|e| e.substitute_linear(&g.c)).collect();
    let d = p.d();
    let q = p.q();
    // columns first: X = S·Bᵀ, then rows: A·X
    let mut cols_mixed = vec![Poly::zero(d); p.p() * q];
    for i in 0..p.p() {
        for b in 0..q {
            let mut acc = Poly::zero(d);
            for j in 0..q {
                let coef = &g.b[(b, j)];
                let e = &subbed[i * q + j];
                if coef.is_zero() || e.is_zero() {
                    continue;
                }
                acc = &acc + &e.scale(coef);
            }
            cols_mixed[i * q + b] = acc;
        }
    }
    let out = PolyMatrix::from_fn(p.p(), q, d, |a, b| {
        let mut acc = Poly::zero(d);
        for i in 0..p.p() {
            let coef = &g.a[(a, i)];
            let e = &cols_mixed[i * q + b];
            if coef.is_zero() || e.is_zero() {
                continue;
            }
            acc = &acc + &e.scale(coef);
        }
        acc
    });
    out.with_cap(p.cap())
}
