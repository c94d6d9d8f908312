//! Kernel parametrisation by a maximal minor and Cramer's rule.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{float, Mat};

/// Kernel basis x¹..x^{q−r} of M restricted to span(basis), in basis coordinates and ambient
/// coordinates, together with the selected r×r minor.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelParam {
    pub rank: usize,
    pub minor_rows: Vec<usize>,
    pub minor_cols: Vec<usize>,
    pub minor_det: f64,
    /// Coefficients of each kernel vector with respect to the basis.
    pub coefficients: Vec<Vec<f64>>,
    /// The same vectors in ambient coordinates.
    pub vectors: Vec<Vec<f64>>,
    /// σ_r/σ_{r+1} (infinite when σ_{r+1} = 0 or r = q).
    pub gap: f64,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Sign of the permutation listed as a sequence of distinct indices 0..n.
fn permutation_sign(perm: &[usize]) -> f64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1.0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

fn basis_matrix(m: &Mat<f64>, basis: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = m.cols();
    if let Some(b) = basis.iter().find(|b| b.len() != n) {
        return Err(Error::Dimension(format!("basis vector of length {}, expected {n}", b.len())));
    }
    let w = DMatrix::from_fn(n, basis.len(), |i, j| basis[j][i]);
    Ok(m.to_nalgebra() * w)
}

/// Rank at the largest relative drop of the singular values, where values below
/// ε·max(p, q)·σ₁ count as zero; the drop must exceed 10⁶.
fn numeric_rank(mb: &DMatrix<f64>) -> Result<(usize, f64)> {
    let sv = float::singular_values(mb);
    let s0 = sv.first().copied().unwrap_or(0.0);
    if s0 == 0.0 {
        return Ok((0, f64::INFINITY));
    }
    let floor = f64::EPSILON * mb.nrows().max(mb.ncols()) as f64 * s0;
    let mut padded: Vec<f64> = sv.iter().map(|&s| s.max(floor)).collect();
    padded.push(floor);
    let (mut rank, mut gap) = (0, 0.0);
    for i in 1..padded.len() {
        let ratio = padded[i - 1] / padded[i];
        if ratio > gap {
            (rank, gap) = (i, ratio);
        }
    }
    if gap <= 1e6 {
        return Err(Error::AmbiguousRank { gap });
    }
    let exact = sv.get(rank).map_or(f64::INFINITY, |&next| if next > 0.0 { sv[rank - 1] / next } else { f64::INFINITY });
    Ok((rank, exact))
}

/// Builds x^k = e^{σ_k} − Σ c_{k'}^k e^{j_{k'}} from the given minor (rows, cols); the first
/// vector is negated when (j₁..j_r, σ₁..σ_{q−r}) is an odd permutation, so that
/// e^{j₁}∧…∧e^{j_r}∧x¹∧…∧x^{q−r} = e¹∧…∧e^q.
pub fn parametrize_kernel_with_minor(m: &Mat<f64>, basis: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> Result<KernelParam> {
    let mb = basis_matrix(m, basis)?;
    let (rank, gap) = numeric_rank(&mb)?;
    if rows.len() != rank || cols.len() != rank {
        return Err(Error::Shape(format!("minor of size {}x{} for rank {rank}", rows.len(), cols.len())));
    }
    build(&mb, basis, rows, cols, rank, gap)
}

fn build(mb: &DMatrix<f64>, basis: &[Vec<f64>], rows: &[usize], cols: &[usize], rank: usize, gap: f64) -> Result<KernelParam> {
    let q = mb.ncols();
    let minor = mb.select_rows(rows).select_columns(cols);
    let det = if rank == 0 { 1.0 } else { minor.determinant() };
    if det == 0.0 {
        return Err(Error::Constraint("selected minor is singular".into()));
    }
    let free: Vec<usize> = (0..q).filter(|c| !cols.contains(c)).collect();
    let mut coefficients = Vec::with_capacity(free.len());
    for &f in &free {
        let mut x = vec![0.0; q];
        x[f] = 1.0;
        for (l, &jl) in cols.iter().enumerate() {
            // Cramer: c_l = det(minor with column l replaced by column f) / det(minor)
            let mut repl = minor.clone();
            for (a, &ra) in rows.iter().enumerate() {
                repl[(a, l)] = mb[(ra, f)];
            }
            x[jl] = -repl.determinant() / det;
        }
        coefficients.push(x);
    }
    let order: Vec<usize> = cols.iter().chain(&free).copied().collect();
    if permutation_sign(&order) < 0.0 {
        if let Some(first) = coefficients.first_mut() {
            first.iter_mut().for_each(|v| *v = -*v);
        }
    }
    let n = basis.first().map_or(0, |b| b.len());
    let vectors = coefficients.iter().map(|c| (0..n).map(|i| c.iter().zip(basis).map(|(ck, b)| ck * b[i]).sum()).collect()).collect();
    Ok(KernelParam { rank, minor_rows: rows.to_vec(), minor_cols: cols.to_vec(), minor_det: det, coefficients, vectors, gap })
}

/// Kernel of M on span(basis): numerical rank with a 10⁶ singular-value separation, the r×r
/// minor of largest |det| (first in lexicographic order on ties), and Cramer coefficients, which
/// are then bounded by 1 in magnitude.
pub fn parametrize_kernel(m: &Mat<f64>, basis: &[Vec<f64>]) -> Result<KernelParam> {
    let mb = basis_matrix(m, basis)?;
    let (rank, gap) = numeric_rank(&mb)?;
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    for rows in subsets(mb.nrows(), rank) {
        for cols in subsets(mb.ncols(), rank) {
            let v = if rank == 0 { 1.0 } else { mb.select_rows(&rows).select_columns(&cols).determinant().abs() };
            if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                best = Some((v, rows.clone(), cols));
            }
        }
    }
    let (_, rows, cols) = best.expect("at least the empty minor");
    build(&mb, basis, &rows, &cols, rank, gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_basis(q: usize) -> Vec<Vec<f64>> {
        (0..q).map(|i| (0..q).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
    }

    fn mat(rows: Vec<Vec<f64>>) -> Mat<f64> {
        Mat::from_rows(rows)
    }

    /// det[e^{j₁} … e^{j_r} x¹ … x^{q−r}] in basis coordinates.
    fn wedge(k: &KernelParam, q: usize) -> f64 {
        let mut cols: Vec<Vec<f64>> = k.minor_cols.iter().map(|&j| (0..q).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        cols.extend(k.coefficients.iter().cloned());
        DMatrix::from_fn(q, q, |i, j| cols[j][i]).determinant()
    }

    #[test]
    fn cramer_by_hand() {
        let m = mat(vec![vec![1.0, 0.0, 2.0], vec![0.0, 1.0, 3.0]]);
        // the leading minor gives exactly (−2, −3, 1)
        let k = parametrize_kernel_with_minor(&m, &std_basis(3), &[0, 1], &[0, 1]).unwrap();
        assert_eq!(k.coefficients, vec![vec![-2.0, -3.0, 1.0]]);
        // the maximal minor is columns {0, 2} (|det| = 3); same line, coefficients bounded by 1
        let k = parametrize_kernel(&m, &std_basis(3)).unwrap();
        assert_eq!(k.minor_cols, vec![0, 2]);
        let x = &k.coefficients[0];
        assert!((x[0] + 2.0 / 3.0).abs() < 1e-12 && (x[1] + 1.0).abs() < 1e-12 && (x[2] - 1.0 / 3.0).abs() < 1e-12, "{x:?}");
        assert!((wedge(&k, 3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_case() {
        let m = mat(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let k = parametrize_kernel(&m, &std_basis(3)).unwrap();
        assert_eq!(k.coefficients, vec![vec![0.0, 0.0, 1.0]]);
        assert_eq!(k.minor_cols, vec![0, 1]);
    }

    #[test]
    fn wedge_sign_fixed() {
        let m = mat(vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let k = parametrize_kernel(&m, &std_basis(3)).unwrap();
        assert_eq!(k.coefficients, vec![vec![1.0, 0.0, 0.0]]);
        assert!((wedge(&k, 3) - 1.0).abs() < 1e-12);
        // an odd arrangement: kernel e₁ with minor columns {0, 2} needs the flip
        let m = mat(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let k = parametrize_kernel(&m, &std_basis(3)).unwrap();
        assert_eq!(k.coefficients, vec![vec![0.0, -1.0, 0.0]]);
        assert!((wedge(&k, 3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ambiguous_rank_rejected() {
        let m = Mat::diag(&[1.0, 1e-4, 1e-8, 1e-12]);
        match parametrize_kernel(&m, &std_basis(4)) {
            Err(Error::AmbiguousRank { gap }) => assert!((gap / 1e4 - 1.0).abs() < 1e-6, "{gap}"),
            other => panic!("{other:?}"),
        }
        let m = Mat::diag(&[1.0, 0.5, 0.0]);
        let k = parametrize_kernel(&m, &std_basis(3)).unwrap();
        assert_eq!(k.rank, 2);
        assert!(k.gap.is_infinite());
    }

    #[test]
    fn non_standard_basis() {
        // M = [1 1 0] on span{(1,0,0), (0,1,0), (0,0,1)+(1,0,0)}
        let m = mat(vec![vec![1.0, 1.0, 0.0]]);
        let basis = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]];
        let k = parametrize_kernel(&m, &basis).unwrap();
        for v in &k.vectors {
            let r: f64 = v[0] + v[1];
            assert!(r.abs() < 1e-12);
        }
        assert_eq!(k.vectors.len(), 2);
    }
}
