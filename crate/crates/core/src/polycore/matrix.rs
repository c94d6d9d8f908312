use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Multiindex, Poly};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{Rat, Scalar};

/// p×q matrix of polynomials in d variables with a declared degree cap.
#[derive(Clone, PartialEq)]
pub struct PolyMatrix<T> {
    p: usize,
    q: usize,
    d: usize,
    cap: i32,
    entries: Vec<Poly<T>>,
}

/// One nonzero Taylor coefficient (i, j, α) and its weight point (e^i; e^j; α).
#[derive(Clone, Debug, PartialEq)]
pub struct SupportTriple {
    pub i: usize,
    pub j: usize,
    pub alpha: Multiindex,
    /// |∂^α P_ij(0)|²/α! = α!·c², in double precision.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportSet {
    pub p: usize,
    pub q: usize,
    pub d: usize,
    pub triples: Vec<SupportTriple>,
}

impl SupportSet {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Weight point (e^i; e^j; α) of triple `idx` as exact rationals.
    pub fn point(&self, idx: usize) -> Vec<Rat> {
        let t = &self.triples[idx];
        let mut v = vec![Rat::zero(); self.p + self.q + self.d];
        v[t.i] = Rat::one();
        v[self.p + t.j] = Rat::one();
        for (k, &a) in t.alpha.entries().iter().enumerate() {
            v[self.p + self.q + k] = Rat::from_integer(BigInt::from(a));
        }
        v
    }

    /// Builds a support set from explicit triples (weights set to 1).
    pub fn from_triples(p: usize, q: usize, d: usize, triples: impl IntoIterator<Item = (usize, usize, Multiindex)>) -> Self {
        SupportSet { p, q, d, triples: triples.into_iter().map(|(i, j, alpha)| SupportTriple { i, j, alpha, weight: 1.0 }).collect() }
    }
}

impl<T: Scalar> PolyMatrix<T> {
    /// Builds from row-major entries; the cap is the maximum entry degree.
    pub fn new(p: usize, q: usize, d: usize, entries: Vec<Poly<T>>) -> Result<Self> {
        if entries.len() != p * q {
            return Err(Error::Shape(format!("expected {} entries for a {p}×{q} matrix, got {}", p * q, entries.len())));
        }
        if let Some(e) = entries.iter().find(|e| e.dim() != d) {
            return Err(Error::Dimension(format!("entry has {} variables, matrix declares {d}", e.dim())));
        }
        let cap = entries.iter().map(|e| e.degree()).max().unwrap_or(-1).max(0);
        Ok(PolyMatrix { p, q, d, cap, entries })
    }

    pub fn from_fn(p: usize, q: usize, d: usize, f: impl Fn(usize, usize) -> Poly<T>) -> Self {
        let mut entries = Vec::with_capacity(p * q);
        for i in 0..p {
            for j in 0..q {
                entries.push(f(i, j));
            }
        }
        Self::new(p, q, d, entries).expect("generator respects the declared shape")
    }

    pub fn from_rows(d: usize, rows: Vec<Vec<Poly<T>>>) -> Result<Self> {
        let p = rows.len();
        let q = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != q) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(p, q, d, rows.into_iter().flatten().collect())
    }

    pub fn zeros(p: usize, q: usize, d: usize) -> Self {
        Self::from_fn(p, q, d, |_, _| Poly::zero(d))
    }

    pub fn identity(n: usize, d: usize) -> Self {
        Self::from_fn(n, n, d, |i, j| if i == j { Poly::one(d) } else { Poly::zero(d) })
    }

    /// Constant matrix.
    pub fn from_const(m: &Mat<T>, d: usize) -> Self {
        Self::from_fn(m.rows(), m.cols(), d, |i, j| Poly::constant(d, m[(i, j)].clone()))
    }

    /// Declares a larger degree cap; fails if an entry already exceeds it.
    pub fn with_cap(mut self, cap: i32) -> Result<Self> {
        if self.entries.iter().any(|e| e.degree() > cap) {
            return Err(Error::Constraint(format!("entry degree exceeds the declared cap {cap}")));
        }
        self.cap = cap;
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.p
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn cap(&self) -> i32 {
        self.cap
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly<T> {
        &self.entries[i * self.q + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Poly<T>) {
        assert_eq!(v.dim(), self.d);
        self.cap = self.cap.max(v.degree());
        self.entries[i * self.q + j] = v;
    }

    pub fn entries(&self) -> &[Poly<T>] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Poly<T>] {
        &self.entries[i * self.q..(i + 1) * self.q]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn max_degree(&self) -> i32 {
        self.entries.iter().map(|e| e.degree()).max().unwrap_or(-1)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.q, self.p, self.d, |i, j| self.get(j, i).clone())
    }

    pub fn map_entries(&self, f: impl Fn(usize, usize, &Poly<T>) -> Poly<T>) -> Self {
        let entries: Vec<Poly<T>> = (0..self.p * self.q).map(|k| f(k / self.q, k % self.q, &self.entries[k])).collect();
        let d = entries.first().map(|e| e.dim()).unwrap_or(self.d);
        Self::new(self.p, self.q, d, entries).expect("mapped entries share one variable count")
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PolyMatrix<U> {
        PolyMatrix { p: self.p, q: self.q, d: self.d, cap: self.cap, entries: self.entries.iter().map(|e| e.map(&f)).collect() }
    }

    pub fn to_f64(&self) -> PolyMatrix<f64> {
        self.map(|c| c.to_f64())
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Self::from_fn(rows.len(), cols.len(), self.d, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn matmul(&self, rhs: &PolyMatrix<T>) -> Result<PolyMatrix<T>> {
        if self.q != rhs.p || self.d != rhs.d {
            return Err(Error::Shape(format!("cannot multiply {}×{} (d={}) by {}×{} (d={})", self.p, self.q, self.d, rhs.p, rhs.q, rhs.d)));
        }
        let mut entries = Vec::with_capacity(self.p * rhs.q);
        for i in 0..self.p {
            for j in 0..rhs.q {
                let mut acc = Poly::zero(self.d);
                for k in 0..self.q {
                    let a = self.get(i, k);
                    let b = rhs.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                entries.push(acc);
            }
        }
        PolyMatrix::new(self.p, rhs.q, self.d, entries)
    }

    pub fn add(&self, rhs: &PolyMatrix<T>) -> Result<PolyMatrix<T>> {
        if (self.p, self.q, self.d) != (rhs.p, rhs.q, rhs.d) {
            return Err(Error::Shape("addition of differently shaped matrices".into()));
        }
        Ok(Self::from_fn(self.p, self.q, self.d, |i, j| self.get(i, j) + rhs.get(i, j)))
    }

    pub fn sub(&self, rhs: &PolyMatrix<T>) -> Result<PolyMatrix<T>> {
        if (self.p, self.q, self.d) != (rhs.p, rhs.q, rhs.d) {
            return Err(Error::Shape("subtraction of differently shaped matrices".into()));
        }
        Ok(Self::from_fn(self.p, self.q, self.d, |i, j| self.get(i, j) - rhs.get(i, j)))
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_fn(self.p, self.q, self.d, |i, j| self.get(i, j).scale(c))
    }

    /// Applies the same variable substitution to every entry.
    pub fn compose(&self, subs: &[Poly<T>]) -> Self {
        let d = subs.first().map(|s| s.dim()).unwrap_or(0);
        Self::from_fn(self.p, self.q, d, |i, j| self.get(i, j).compose(subs))
    }

    /// Evaluates every entry at a point of the coefficient field.
    pub fn eval_exact(&self, point: &[T]) -> Mat<T> {
        Mat::from_fn(self.p, self.q, |i, j| self.get(i, j).eval_exact(point))
    }

    pub fn eval(&self, point: &[f64]) -> Result<Mat<f64>> {
        let mut out = Mat::zeros(self.p, self.q);
        for i in 0..self.p {
            for j in 0..self.q {
                out[(i, j)] = self.get(i, j).eval(point)?;
            }
        }
        Ok(out)
    }

    /// Σ α!·c² computed in the coefficient field.
    pub fn hs_norm_sq_exact(&self) -> T {
        let mut acc = T::zero();
        for e in &self.entries {
            for (a, c) in e.terms() {
                acc = acc + c.clone() * c.clone() * T::from_rat(&Rat::from_integer(a.factorial()));
            }
        }
        acc
    }

    /// ‖P‖ = (Σ α!·c²)^{1/2}.
    pub fn hs_norm(&self) -> f64 {
        let mut acc = 0.0;
        for e in &self.entries {
            for (a, c) in e.terms() {
                let v = c.to_f64();
                acc += a.factorial_f64() * v * v;
            }
        }
        acc.sqrt()
    }

    pub fn support_set(&self) -> SupportSet {
        let mut triples = Vec::new();
        for i in 0..self.p {
            for j in 0..self.q {
                for (a, c) in self.get(i, j).terms() {
                    let v = c.to_f64();
                    triples.push(SupportTriple { i, j, alpha: a.clone(), weight: a.factorial_f64() * v * v });
                }
            }
        }
        SupportSet { p: self.p, q: self.q, d: self.d, triples }
    }

    /// Exact determinant of a square polynomial matrix (fraction-free Bareiss elimination).
    pub fn det(&self) -> Result<Poly<T>> {
        if self.p != self.q {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.p;
        if n == 0 {
            return Ok(Poly::one(self.d));
        }
        let mut a: Vec<Vec<Poly<T>>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = false;
        let mut prev = Poly::one(self.d);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else { return Ok(Poly::zero(self.d)) };
                a.swap(k, r);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.div_exact(&prev).ok_or_else(|| Error::Constraint("inexact Bareiss division".into()))?;
                }
                a[i][k] = Poly::zero(self.d);
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        Ok(if sign { -det } else { det })
    }

    /// Human-readable grid.
    pub fn render(&self, names: &[String]) -> String {
        let cells: Vec<Vec<String>> = (0..self.p).map(|i| (0..self.q).map(|j| self.get(i, j).render_with(names)).collect()).collect();
        let widths: Vec<usize> = (0..self.q).map(|j| cells.iter().map(|r| r[j].len()).max().unwrap_or(1)).collect();
        cells
            .iter()
            .map(|r| {
                let padded: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}", w = *w)).collect();
                format!("[ {} ]", padded.join("  "))
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl<T: Scalar> fmt::Debug for PolyMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix {}x{} d={}", self.p, self.q, self.d)?;
        write!(f, "{}", self.render(&super::poly::default_names("z", self.d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_int, Rat};

    fn z(d: usize, k: usize) -> Poly<Rat> {
        Poly::var(d, k)
    }

    pub(crate) fn t2() -> PolyMatrix<Rat> {
        PolyMatrix::from_rows(2, vec![vec![z(2, 0).pow(2)], vec![z(2, 1).pow(2)]]).unwrap()
    }

    #[test]
    fn hs_norm_examples() {
        assert_eq!(t2().hs_norm(), 2.0);
        assert_eq!(t2().hs_norm_sq_exact(), rat_int(4));
        let one = PolyMatrix::from_rows(1, vec![vec![z(1, 0)]]).unwrap();
        assert_eq!(one.hs_norm(), 1.0);
        assert!((PolyMatrix::<Rat>::identity(2, 1).hs_norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn support_examples() {
        let s = t2().support_set();
        let got: Vec<_> = s.triples.iter().map(|t| (t.i, t.j, t.alpha.clone())).collect();
        assert_eq!(got, vec![(0, 0, Multiindex::from([2, 0])), (1, 0, Multiindex::from([0, 2]))]);
        assert!(PolyMatrix::<Rat>::zeros(3, 2, 2).support_set().is_empty());
    }

    #[test]
    fn polynomial_determinant() {
        // [[1, s], [s, s^2 + 1]] has det 1.
        let s = z(1, 0);
        let m = PolyMatrix::from_rows(1, vec![vec![Poly::one(1), s.clone()], vec![s.clone(), &s.pow(2) + &Poly::one(1)]]).unwrap();
        assert_eq!(m.det().unwrap(), Poly::one(1));
        // a zero leading pivot forces a row swap
        let m2 = PolyMatrix::from_rows(1, vec![vec![Poly::zero(1), Poly::one(1)], vec![Poly::one(1), s.clone()]]).unwrap();
        assert_eq!(m2.det().unwrap(), -Poly::one(1));
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(t2().cap(), 2);
        assert!(t2().with_cap(1).is_err());
        assert_eq!(t2().with_cap(5).unwrap().cap(), 5);
    }
}
