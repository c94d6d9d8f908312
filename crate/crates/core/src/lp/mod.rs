//! Exact linear and quadratic programming over rationals.

mod qp;
mod simplex;

pub use qp::min_norm_point;
pub use simplex::{Lp, LpOutcome, Relation};
