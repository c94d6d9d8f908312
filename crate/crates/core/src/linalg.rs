//! Dense matrices over a `Scalar` field: elimination, determinants, kernels.
//!
//! Exact scalars pivot on the first nonzero entry; floats use partial pivoting with a
//! relative threshold.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;

use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Row echelon data: `transform · input = reduced`.
#[derive(Clone)]
pub struct Rref<T> {
    pub reduced: Mat<T>,
    pub transform: Mat<T>,
    pub pivots: Vec<usize>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn diag(v: &[T]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| if i == j { v[i].clone() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Mat<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs_f64()).fold(0.0, f64::max)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)].clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])].clone())
    }

    fn tiny(x: &T, scale: f64) -> bool {
        if T::EXACT {
            x.is_zero()
        } else {
            x.abs_f64() <= 1e-12 * scale.max(f64::MIN_POSITIVE)
        }
    }

    fn pick_pivot(&self, col: usize, from: usize, scale: f64) -> Option<usize> {
        if T::EXACT {
            (from..self.rows).find(|&r| !self[(r, col)].is_zero())
        } else {
            let best = (from..self.rows).max_by(|&a, &b| self[(a, col)].abs_f64().partial_cmp(&self[(b, col)].abs_f64()).unwrap())?;
            if Self::tiny(&self[(best, col)], scale) {
                None
            } else {
                Some(best)
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form; `col_order` fixes the order in which columns are tried as pivots.
    pub fn rref_ordered(&self, col_order: &[usize]) -> Rref<T> {
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut u: Mat<T> = Mat::identity(self.rows);
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in col_order {
            if r == a.rows {
                break;
            }
            let Some(pr) = a.pick_pivot(c, r, scale) else { continue };
            a.swap_rows(r, pr);
            u.swap_rows(r, pr);
            let inv = T::one() / a[(r, c)].clone();
            for j in 0..a.cols {
                a[(r, j)] = a[(r, j)].clone() * inv.clone();
            }
            for j in 0..u.cols {
                u[(r, j)] = u[(r, j)].clone() * inv.clone();
            }
            for i in 0..a.rows {
                if i == r {
                    continue;
                }
                let f = a[(i, c)].clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..a.cols {
                    let v = a[(r, j)].clone();
                    a[(i, j)] = a[(i, j)].clone() - f.clone() * v;
                }
                for j in 0..u.cols {
                    let v = u[(r, j)].clone();
                    u[(i, j)] = u[(i, j)].clone() - f.clone() * v;
                }
                if !T::EXACT {
                    a[(i, c)] = T::zero();
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { reduced: a, transform: u, pivots }
    }

    pub fn rref(&self) -> Rref<T> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_ordered(&order)
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right kernel, one vector per free column (free entry = 1).
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let rr = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !rr.pivots.contains(c)) {
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (row, &pc) in rr.pivots.iter().enumerate() {
                v[pc] = -rr.reduced[(row, free)].clone();
            }
            out.push(v);
        }
        out
    }

    /// Some solution of `self · x = b`, if consistent.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let aug = Mat::from_fn(self.rows, self.cols + 1, |i, j| if j < self.cols { self[(i, j)].clone() } else { b[i].clone() });
        let order: Vec<usize> = (0..self.cols).collect();
        let rr = aug.rref_ordered(&order);
        let scale = aug.max_abs();
        for i in rr.pivots.len()..self.rows {
            if !Self::tiny(&rr.reduced[(i, self.cols)], scale) {
                return None;
            }
        }
        let mut x = vec![T::zero(); self.cols];
        for (row, &pc) in rr.pivots.iter().enumerate() {
            x[pc] = rr.reduced[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut det = T::one();
        for c in 0..a.cols {
            let Some(pr) = a.pick_pivot(c, c, scale) else { return T::zero() };
            if pr != c {
                a.swap_rows(c, pr);
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..a.rows {
                let f = a[(i, c)].clone() / piv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..a.cols {
                    let v = a[(c, j)].clone();
                    a[(i, j)] = a[(i, j)].clone() - f.clone() * v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let rr = self.rref();
        if rr.pivots.len() < self.rows {
            return None;
        }
        Some(rr.transform)
    }
}

impl Mat<f64> {
    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out: Mat<T> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                }
            }
        }
        out
    }
}

impl<T: Scalar> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|x| x.render()).collect();
            writeln!(f, "  {}", r.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Unitary-invariant helpers in double precision.
pub mod float {
    use nalgebra::DMatrix;
    use rand::Rng;
    use rand_distr::StandardNormal;

    /// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with R's diagonal made positive.
    pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
        let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..n {
            if r[(j, j)] < 0.0 {
                for i in 0..n {
                    q[(i, j)] = -q[(i, j)];
                }
            }
        }
        q
    }

    /// Cayley transform (I − K)⁻¹(I + K) of a skew matrix: orthogonal with det 1.
    pub fn cayley(k: &DMatrix<f64>) -> DMatrix<f64> {
        let n = k.nrows();
        let id = DMatrix::<f64>::identity(n, n);
        let lhs = &id - k;
        let rhs = &id + k;
        lhs.lu().solve(&rhs).expect("I - K is invertible for skew K")
    }

    pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
        m.clone().svd(false, false).singular_values.iter().copied().collect()
    }
}
