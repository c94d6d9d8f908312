//! Orders of vanishing in z and the consecutive grouping they induce.

use crate::polycore::{Multiindex, Poly, PolyMatrix};
use crate::scalar::Rat;

/// Least total z-degree among the terms of a polynomial in (s, z) with d s-variables;
/// `None` for the zero polynomial.
pub fn z_order(p: &Poly<Rat>, d: usize) -> Option<u32> {
    p.terms().map(|(a, _)| a.entries()[d..].iter().sum::<u32>()).min()
}

fn z_degree(p: &Poly<Rat>, d: usize) -> Option<u32> {
    p.terms().map(|(a, _)| a.entries()[d..].iter().sum::<u32>()).max()
}

/// The z-monomials of lowest order with their (nonzero) coefficient polynomials in s.
pub fn lowest_z_terms(p: &Poly<Rat>, d: usize) -> Vec<(Multiindex, Poly<Rat>)> {
    let Some(o) = z_order(p, d) else { return Vec::new() };
    p.split_vars(d).into_iter().filter(|(b, _)| b.order() == o).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VanishingDegrees {
    pub degrees: Vec<Vec<u32>>,
    /// Identically-zero blocks that received the default degree.
    pub flagged: Vec<(usize, usize)>,
}

fn ranges(groups: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut o = 0;
    for &g in groups {
        out.push(o..o + g);
        o += g;
    }
    out
}

/// D_ij = least z-order over the (i, j) block of R(s, z). Identically-zero blocks get
/// 1 + the largest z-degree found in their block row and block column, and are flagged.
pub fn vanishing_degrees(r: &PolyMatrix<Rat>, row_groups: &[usize], col_groups: &[usize]) -> VanishingDegrees {
    let d = r.d() / 2;
    let (rows, cols) = (ranges(row_groups), ranges(col_groups));
    let block_min = |ri: &std::ops::Range<usize>, cj: &std::ops::Range<usize>| {
        ri.clone().flat_map(|a| cj.clone().filter_map(move |b| z_order(r.get(a, b), d))).min()
    };
    let mut degrees = vec![vec![0; cols.len()]; rows.len()];
    let mut flagged = Vec::new();
    for (i, ri) in rows.iter().enumerate() {
        for (j, cj) in cols.iter().enumerate() {
            match block_min(ri, cj) {
                Some(o) => degrees[i][j] = o,
                None => {
                    let in_row = ri.clone().flat_map(|a| (0..r.q()).filter_map(move |b| z_degree(r.get(a, b), d)));
                    let in_col = cj.clone().flat_map(|b| (0..r.p()).filter_map(move |a| z_degree(r.get(a, b), d)));
                    degrees[i][j] = 1 + in_row.chain(in_col).max().unwrap_or(0);
                    flagged.push((i, j));
                }
            }
        }
    }
    VanishingDegrees { degrees, flagged }
}

fn runs<K: PartialEq>(keys: &[K]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for (idx, k) in keys.iter().enumerate() {
        if idx > 0 && keys[idx - 1] == *k {
            *out.last_mut().expect("run started") += 1;
        } else {
            out.push(1);
        }
    }
    out
}

/// Column groups are runs of equal column z-order; row groups are runs of rows with equal
/// per-column-group order profiles.
pub fn infer_groups(r: &PolyMatrix<Rat>) -> (Vec<usize>, Vec<usize>) {
    let d = r.d() / 2;
    let col_order: Vec<Option<u32>> = (0..r.q()).map(|j| (0..r.p()).filter_map(|i| z_order(r.get(i, j), d)).min()).collect();
    let col_groups = runs(&col_order);
    let cr = ranges(&col_groups);
    let profiles: Vec<Vec<Option<u32>>> =
        (0..r.p()).map(|i| cr.iter().map(|c| c.clone().filter_map(|j| z_order(r.get(i, j), d)).min()).collect()).collect();
    (runs(&profiles), col_groups)
}
