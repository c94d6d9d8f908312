//! First-order criticality of the identity in the orbit: balanced row and column Grams and the
//! derivative pairing tensor equal to σ‖P‖²·I.

use num_bigint::BigInt;

use crate::polycore::{Multiindex, PolyMatrix};
use crate::scalar::{Rat, Scalar};

fn int<T: Scalar>(n: &BigInt) -> T {
    T::from_rat(&Rat::from_integer(n.clone()))
}

/// Frobenius norm of the stacked residuals
/// (G_row − ‖P‖²/p·I, G_col − ‖P‖²/q·I, T − σ‖P‖²·I), evaluated in T and rounded at the end.
///
/// G_row[i][i'] = Σ α!c_{ijα}c_{i'jα}, G_col[j][j'] = Σ α!c_{ijα}c_{ij'α},
/// T[k][k'] = Σ_β (β+e_k)!(β+e_k')!/β! · c_{β+e_k}c_{β+e_k'} (summed over entries).
pub fn criticality_residual<T: Scalar>(pm: &PolyMatrix<T>, sigma: &T) -> f64 {
    let (p, q, d) = (pm.p(), pm.q(), pm.d());
    let norm2 = pm.hs_norm_sq_exact();
    let mut g_row = vec![vec![T::zero(); p]; p];
    let mut g_col = vec![vec![T::zero(); q]; q];
    let mut t = vec![vec![T::zero(); d]; d];
    for i in 0..p {
        for j in 0..q {
            for (alpha, c) in pm.get(i, j).terms() {
                let fact: T = int(&alpha.factorial());
                for i2 in 0..p {
                    let c2 = pm.get(i2, j).coeff(alpha);
                    if !c2.is_zero() {
                        g_row[i][i2] = g_row[i][i2].clone() + fact.clone() * c.clone() * c2;
                    }
                }
                for j2 in 0..q {
                    let c2 = pm.get(i, j2).coeff(alpha);
                    if !c2.is_zero() {
                        g_col[j][j2] = g_col[j][j2].clone() + fact.clone() * c.clone() * c2;
                    }
                }
            }
            let entry = pm.get(i, j);
            for (alpha, c) in entry.terms() {
                // α = β + e_k
                for k in 0..d {
                    let Some(beta) = alpha.checked_sub(&Multiindex::unit(d, k)) else { continue };
                    for k2 in 0..d {
                        let other = beta.add(&Multiindex::unit(d, k2));
                        let c2 = entry.coeff(&other);
                        if c2.is_zero() {
                            continue;
                        }
                        let w = alpha.factorial() * other.factorial() / beta.factorial();
                        t[k][k2] = t[k][k2].clone() + int::<T>(&w) * c.clone() * c2;
                    }
                }
            }
        }
    }
    let mut acc = T::zero();
    let mut add_block = |m: &Vec<Vec<T>>, diag: T| {
        for (a, row) in m.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                let r = if a == b { v.clone() - diag.clone() } else { v.clone() };
                acc = acc.clone() + r.clone() * r;
            }
        }
    };
    if p > 0 {
        add_block(&g_row, norm2.clone() / T::from_i64(p as i64));
    }
    if q > 0 {
        add_block(&g_col, norm2.clone() / T::from_i64(q as i64));
    }
    add_block(&t, sigma.clone() * norm2);
    acc.to_f64().max(0.0).sqrt()
}
