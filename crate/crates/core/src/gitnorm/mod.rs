//! The GIT functional |||P|||_σ = inf |det C|^{−σ}‖ρ_{(A,B,C)}P‖ over SL(p)×SL(q)×GL(d):
//! diagonal (Kempf–Ness) minimisation, orthogonal frame search, criticality residuals,
//! Newton-polytope membership, destabilisers and the sparse positivity criterion.

mod critical;
mod diagonal;
mod frames;
mod polytope;

pub use critical::criticality_residual;
pub use diagonal::{minimize_diagonal, scaled_norm, traceless_basis, DiagonalProblem, DiagonalResult};
pub use frames::{git_norm, git_norm_with, rescaled_at, Frame, GitEstimate, GitOptions};
pub use polytope::{
    find_destabilizer, pairing, polytope_membership, sigma_interval, sparse_criterion, Destabilizer, Membership, SparseVerdict,
    ThetaEntry,
};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Log-weights w = (w_p; w_q; w_d) of a diagonal element (e^{w_p}, e^{w_q}, e^{w_d}).
#[derive(Clone, Debug, PartialEq)]
pub struct LogWeights<T> {
    pub w_p: Vec<T>,
    pub w_q: Vec<T>,
    pub w_d: Vec<T>,
}

impl<T: Scalar> LogWeights<T> {
    pub fn zeros(p: usize, q: usize, d: usize) -> Self {
        LogWeights { w_p: vec![T::zero(); p], w_q: vec![T::zero(); q], w_d: vec![T::zero(); d] }
    }

    /// Concatenation (w_p; w_q; w_d).
    pub fn flat(&self) -> Vec<T> {
        self.w_p.iter().chain(&self.w_q).chain(&self.w_d).cloned().collect()
    }

    pub fn from_flat(v: &[T], p: usize, q: usize, d: usize) -> Self {
        assert_eq!(v.len(), p + q + d);
        LogWeights { w_p: v[..p].to_vec(), w_q: v[p..p + q].to_vec(), w_d: v[p + q..].to_vec() }
    }

    pub fn inf_norm(&self) -> f64 {
        self.flat().iter().map(|x| x.abs_f64()).fold(0.0, f64::max)
    }

    /// Σw_p = Σw_q = 0 (exactly for rationals, to 1e-12 otherwise).
    pub fn is_traceless(&self) -> bool {
        let sum = |v: &[T]| v.iter().cloned().fold(T::zero(), |a, b| a + b);
        if T::EXACT {
            sum(&self.w_p).is_zero() && sum(&self.w_q).is_zero()
        } else {
            sum(&self.w_p).abs_f64() <= 1e-12 && sum(&self.w_q).abs_f64() <= 1e-12
        }
    }

    pub fn to_f64(&self) -> LogWeights<f64> {
        let c = |v: &[T]| v.iter().map(|x| x.to_f64()).collect();
        LogWeights { w_p: c(&self.w_p), w_q: c(&self.w_q), w_d: c(&self.w_d) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagonalStatus {
    Converged,
    DriftToZero,
    BudgetExhausted,
}

impl DiagonalStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiagonalStatus::Converged => "converged",
            DiagonalStatus::DriftToZero => "drift-to-zero",
            DiagonalStatus::BudgetExhausted => "budget-exhausted",
        }
    }
}
