//! Exact verification of a claimed block decomposition.

use rayon::prelude::*;
use serde::Serialize;

use super::degrees::z_order;
use super::{embed_s, reduced_product, BlockDecomposition};
use crate::error::{Error, Result};
use crate::polycore::{default_names, poly_is_one, Multiindex, Poly, PolyMatrix};
use crate::scalar::Rat;

/// A nonvanishing derivative ∂_s^α∂_t^β of entry `entry` (global indices) of block `block`
/// on the diagonal; `term` is the lowest-order z-part of that entry of A(s)M(s)B(s + z).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub block: [usize; 2],
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub entry: [usize; 2],
    pub term: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub det_a: bool,
    pub det_b: bool,
    pub monotone: bool,
    #[serde(rename = "D")]
    pub degrees: Vec<Vec<u32>>,
    /// Adjacent pairs ((i, j), (i', j')) with D_{i'j'} < D_ij.
    pub monotonicity: Vec<[[usize; 2]; 2]>,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Checks det A ≡ det B ≡ 1, monotonicity of D, and that every derivative of total order
/// below D_ij of every entry of block (i, j) of A(s)M(s)B(t) vanishes identically on t = s.
pub fn verify_block_decomposition(m: &PolyMatrix<Rat>, dec: &BlockDecomposition) -> Result<VerifyReport> {
    let (p, q, d) = (m.p(), m.q(), m.d());
    if dec.p() != p || dec.q() != q {
        return Err(Error::Shape(format!("decomposition is {}x{}, matrix is {p}x{q}", dec.p(), dec.q())));
    }
    if dec.d() != d {
        return Err(Error::Dimension(format!("decomposition has d = {}, matrix has d = {d}", dec.d())));
    }
    let det_a = poly_is_one(&dec.a.det()?);
    let det_b = poly_is_one(&dec.b.det()?);
    let monotonicity: Vec<[[usize; 2]; 2]> = dec.monotonicity_failures().into_iter().map(|(a, b)| [[a.0, a.1], [b.0, b.1]]).collect();

    // F(s, t) with variables (s, t); t = s is the substitution (s, t) ↦ (s, s)
    let am = dec.a.matmul(m)?.map_entries(|_, _, e| embed_s(e));
    let bt = dec.b.map_entries(|_, _, e| e.embed(2 * d, d));
    let f = am.matmul(&bt)?;
    let r = reduced_product(m, &dec.a, &dec.b)?;
    let diag: Vec<Poly<Rat>> = (0..2 * d).map(|k| Poly::var(d, k % d)).collect();
    let mut names = default_names("s", d);
    names.extend(default_names("z", d));

    let cells: Vec<(usize, usize)> = (0..p).flat_map(|a| (0..q).map(move |b| (a, b))).collect();
    let mut violations: Vec<Violation> = cells
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            let (i, j) = (dec.row_group_of(a), dec.col_group_of(b));
            let bound = dec.degrees[i][j];
            let entry = f.get(a, b);
            let mut out = Vec::new();
            if bound == 0 || entry.is_zero() {
                return out.into_iter();
            }
            let lowest = {
                let re = r.get(a, b);
                let o = z_order(re, d).unwrap_or(0);
                re.filter_terms(|al| al.entries()[d..].iter().sum::<u32>() == o).render_with(&names)
            };
            for ab in Multiindex::all_up_to(2 * d, bound - 1) {
                if !entry.partial_derivative(&ab).compose(&diag).is_zero() {
                    let (alpha, beta) = ab.split(d);
                    out.push(Violation {
                        block: [i, j],
                        alpha: alpha.entries().to_vec(),
                        beta: beta.entries().to_vec(),
                        entry: [a, b],
                        term: lowest.clone(),
                    });
                }
            }
            out.into_iter()
        })
        .collect();
    violations.sort_by(|x, y| (x.block, x.entry, x.alpha.iter().sum::<u32>() + x.beta.iter().sum::<u32>(), &x.alpha, &x.beta).cmp(&(
        y.block,
        y.entry,
        y.alpha.iter().sum::<u32>() + y.beta.iter().sum::<u32>(),
        &y.alpha,
        &y.beta,
    )));
    let monotone = monotonicity.is_empty();
    Ok(VerifyReport {
        pass: det_a && det_b && monotone && violations.is_empty(),
        det_a,
        det_b,
        monotone,
        degrees: dec.degrees.clone(),
        monotonicity,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockdecomp::decompose;
    use crate::blockdecomp::fixtures::*;
    use crate::scalar::rat_int;

    #[test]
    fn intro_passes() {
        let rep = verify_block_decomposition(&intro_m(), &intro_decomposition()).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn tampered_degree_fails_at_known_term() {
        let dec = intro_decomposition().with_degrees(vec![vec![0, 1, 1], vec![0, 3, 3]]).unwrap();
        let rep = verify_block_decomposition(&intro_m(), &dec).unwrap();
        assert!(!rep.pass);
        assert!(rep.det_a && rep.det_b && rep.monotone);
        assert!(!rep.violations.is_empty());
        assert!(rep.violations.iter().all(|v| v.block == [1, 1] && v.entry == [2, 3]));
        assert!(rep.violations.iter().all(|v| v.alpha.iter().sum::<u32>() + v.beta.iter().sum::<u32>() == 2));
        assert_eq!(rep.violations[0].term, "-1/2*z1^2");
    }

    #[test]
    fn scaled_witness_fails_determinant() {
        let mut dec = intro_decomposition();
        dec.a = dec.a.scale(&rat_int(2));
        let rep = verify_block_decomposition(&intro_m(), &dec).unwrap();
        assert!(!rep.det_a);
        assert!(!rep.pass);
    }

    #[test]
    fn non_monotone_table_reported() {
        let dec = intro_decomposition().with_degrees(vec![vec![0, 1, 0], vec![0, 2, 3]]).unwrap();
        let rep = verify_block_decomposition(&intro_m(), &dec).unwrap();
        assert!(!rep.monotone);
        assert_eq!(rep.monotonicity, vec![[[0, 1], [0, 2]]]);
    }

    #[test]
    fn constructed_decompositions_verify() {
        for m in [concrete_m(), degenerate_m(), intro_m()] {
            let (dec, _, _) = decompose(&m).unwrap();
            let rep = verify_block_decomposition(&m, &dec).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }
}
