//! The diagonal problem: minimise w ↦ Σ_E e^{2w·(e^i;e^j;α−σ1)}·α!c² over traceless w.

use nalgebra::{DMatrix, DVector};

use super::{DiagonalStatus, LogWeights};
use crate::error::{Error, Result};
use crate::polycore::PolyMatrix;
use crate::scalar::{Real, Scalar};

/// Precomputed log-sum-exp form in reduced coordinates x (orthonormal traceless bases for rows
/// and columns, free variable block): f(x) = log Σ_e exp(c_e + 2 g_e·x).
#[derive(Clone, Debug)]
pub struct DiagonalProblem {
    p: usize,
    q: usize,
    d: usize,
    basis_p: DMatrix<f64>,
    basis_q: DMatrix<f64>,
    g: Vec<DVector<f64>>,
    c: Vec<f64>,
}

/// Orthonormal basis (n × (n−1)) of {v : Σv = 0} (Helmert construction).
pub fn traceless_basis(n: usize) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(n, n.saturating_sub(1));
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            b[(i, k - 1)] = 1.0 / norm;
        }
        b[(k, k - 1)] = -(k as f64) / norm;
    }
    b
}

impl DiagonalProblem {
    pub fn new<T: Scalar>(pm: &PolyMatrix<T>, sigma: f64) -> Self {
        let (p, q, d) = (pm.p(), pm.q(), pm.d());
        let basis_p = traceless_basis(p);
        let basis_q = traceless_basis(q);
        let n = (p.max(1) - 1) + (q.max(1) - 1) + d;
        let mut g = Vec::new();
        let mut c = Vec::new();
        for t in pm.support_set().triples {
            if t.weight <= 0.0 {
                continue;
            }
            let mut v = DVector::zeros(n);
            let mut off = 0;
            for k in 0..basis_p.ncols() {
                v[off + k] = basis_p[(t.i, k)];
            }
            off += basis_p.ncols();
            for k in 0..basis_q.ncols() {
                v[off + k] = basis_q[(t.j, k)];
            }
            off += basis_q.ncols();
            for (k, &a) in t.alpha.entries().iter().enumerate() {
                v[off + k] = a as f64 - sigma;
            }
            g.push(v);
            c.push(t.weight.ln());
        }
        DiagonalProblem { p, q, d, basis_p, basis_q, g, c }
    }

    pub fn dim(&self) -> usize {
        self.basis_p.ncols() + self.basis_q.ncols() + self.d
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// Log of the squared scaled norm.
    pub fn log_objective(&self, x: &DVector<f64>) -> f64 {
        let e: Vec<f64> = self.g.iter().zip(&self.c).map(|(g, c)| c + 2.0 * g.dot(x)).collect();
        log_sum_exp(&e)
    }

    /// (f, ∇f, ∇²f) of the log objective.
    pub fn derivatives(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = self.dim();
        let e: Vec<f64> = self.g.iter().zip(&self.c).map(|(g, c)| c + 2.0 * g.dot(x)).collect();
        let f = log_sum_exp(&e);
        let mut mean = DVector::zeros(n);
        let mut second = DMatrix::zeros(n, n);
        for (g, ei) in self.g.iter().zip(&e) {
            let pi = (ei - f).exp();
            mean.axpy(pi, g, 1.0);
            second.ger(pi, g, g, 1.0);
        }
        let grad = &mean * 2.0;
        let hess = (second - &mean * mean.transpose()) * 4.0;
        (f, grad, hess)
    }

    pub fn to_weights(&self, x: &DVector<f64>) -> LogWeights<f64> {
        let np = self.basis_p.ncols();
        let nq = self.basis_q.ncols();
        let xp = x.rows(0, np).into_owned();
        let xq = x.rows(np, nq).into_owned();
        let wp = if self.p > 0 { (&self.basis_p * xp).iter().copied().collect() } else { vec![] };
        let wq = if self.q > 0 { (&self.basis_q * xq).iter().copied().collect() } else { vec![] };
        let wd = x.rows(np + nq, self.d).iter().copied().collect();
        LogWeights { w_p: wp, w_q: wq, w_d: wd }
    }

    pub fn from_weights(&self, w: &LogWeights<f64>) -> DVector<f64> {
        let np = self.basis_p.ncols();
        let nq = self.basis_q.ncols();
        let mut x = DVector::zeros(self.dim());
        let wp = DVector::from_vec(w.w_p.clone());
        let wq = DVector::from_vec(w.w_q.clone());
        if np > 0 {
            x.rows_mut(0, np).copy_from(&(self.basis_p.transpose() * wp));
        }
        if nq > 0 {
            x.rows_mut(np, nq).copy_from(&(self.basis_q.transpose() * wq));
        }
        for k in 0..self.d {
            x[np + nq + k] = w.w_d[k];
        }
        x
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// (Σ_E e^{2w·(e^i;e^j;α−σ1)}·α!c²)^{1/2}.
pub fn scaled_norm<T: Scalar, F: Real>(pm: &PolyMatrix<T>, w: &LogWeights<F>, sigma: F) -> Result<F> {
    if w.w_p.len() != pm.p() || w.w_q.len() != pm.q() || w.w_d.len() != pm.d() {
        return Err(Error::Dimension(format!(
            "weights ({},{},{}) do not match matrix ({},{},{})",
            w.w_p.len(),
            w.w_q.len(),
            w.w_d.len(),
            pm.p(),
            pm.q(),
            pm.d()
        )));
    }
    let two = F::one() + F::one();
    let mut exps: Vec<F> = Vec::new();
    for t in pm.support_set().triples {
        let mut s = w.w_p[t.i] + w.w_q[t.j];
        for (k, &a) in t.alpha.entries().iter().enumerate() {
            s = s + w.w_d[k] * (F::from(a).unwrap() - sigma);
        }
        exps.push(F::from(t.weight).unwrap().ln() + two * s);
    }
    if exps.is_empty() {
        return Ok(F::zero());
    }
    let m = exps.iter().copied().fold(F::neg_infinity(), F::max);
    let sum = exps.iter().fold(F::zero(), |acc, &x| acc + (x - m).exp());
    Ok(((m + sum.ln()) / two).exp())
}

/// Result of the inner convex minimisation.
#[derive(Clone, Debug)]
pub struct DiagonalResult<F> {
    pub value: F,
    pub w: LogWeights<F>,
    pub status: DiagonalStatus,
    pub iterations: usize,
}

/// Damped Newton on the log objective (scale-invariant gradient test ‖∇ log f‖∞ ≤ tol),
/// Levenberg regularisation, Armijo backtracking, step cap 5, drift detection at ‖w‖∞ > 50.
pub fn minimize_diagonal<T: Scalar, F: Real>(pm: &PolyMatrix<T>, sigma: F, tol: F, max_iter: usize) -> DiagonalResult<F> {
    let (p, q, d) = (pm.p(), pm.q(), pm.d());
    let cast = |w: &LogWeights<f64>| LogWeights {
        w_p: w.w_p.iter().map(|&x| F::from(x).unwrap()).collect(),
        w_q: w.w_q.iter().map(|&x| F::from(x).unwrap()).collect(),
        w_d: w.w_d.iter().map(|&x| F::from(x).unwrap()).collect(),
    };
    let prob = DiagonalProblem::new(pm, Scalar::to_f64(&sigma));
    if prob.is_empty() {
        return DiagonalResult { value: F::zero(), w: LogWeights::zeros(p, q, d), status: DiagonalStatus::Converged, iterations: 0 };
    }
    let tol = Scalar::to_f64(&tol);
    let n = prob.dim();
    let mut x = DVector::zeros(n);
    let mut status = DiagonalStatus::BudgetExhausted;
    let mut iterations = 0;
    let mut monotone = true;
    let (mut f, mut grad, mut hess) = prob.derivatives(&x);
    for it in 0..max_iter {
        iterations = it;
        if n == 0 || grad.amax() <= tol {
            status = DiagonalStatus::Converged;
            break;
        }
        let w_inf = prob.to_weights(&x).inf_norm();
        if w_inf > 50.0 && monotone {
            status = DiagonalStatus::DriftToZero;
            break;
        }
        let reg = 1e-12 * (1.0 + hess.trace().abs()) + 1e-3 * grad.norm().min(1.0) * 1e-6;
        let mut step = newton_step(&hess, &grad, reg);
        let cap = step.amax();
        if cap > 5.0 {
            step *= 5.0 / cap;
        }
        let slope = grad.dot(&step);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = &x + &step * t;
            let ft = prob.log_objective(&trial);
            if ft <= f + 1e-4 * t * slope {
                x = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no descent possible at machine precision: accept as stationary
            status = if grad.amax() <= tol.max(1e-8) { DiagonalStatus::Converged } else { DiagonalStatus::BudgetExhausted };
            monotone = false;
            break;
        }
        let (f2, g2, h2) = prob.derivatives(&x);
        if f2 > f {
            monotone = false;
        }
        f = f2;
        grad = g2;
        hess = h2;
        iterations = it + 1;
    }
    if status == DiagonalStatus::BudgetExhausted && prob.to_weights(&x).inf_norm() > 50.0 && monotone {
        status = DiagonalStatus::DriftToZero;
    }
    let w = prob.to_weights(&x);
    let value = F::from((f / 2.0).exp()).unwrap();
    DiagonalResult { value, w: cast(&w), status, iterations }
}

fn newton_step(hess: &DMatrix<f64>, grad: &DVector<f64>, reg: f64) -> DVector<f64> {
    let n = grad.len();
    let mut lambda = reg.max(1e-14);
    for _ in 0..30 {
        let m = hess + DMatrix::identity(n, n) * lambda;
        if let Some(ch) = m.cholesky() {
            return -ch.solve(grad);
        }
        lambda *= 10.0;
    }
    -grad.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::Poly;
    use crate::scalar::Rat;

    fn t2() -> PolyMatrix<Rat> {
        PolyMatrix::from_rows(2, vec![vec![Poly::var(2, 0).pow(2)], vec![Poly::var(2, 1).pow(2)]]).unwrap()
    }

    #[test]
    fn scaled_norm_hand_values() {
        let w0 = LogWeights::zeros(2, 1, 2);
        assert!((scaled_norm(&t2(), &w0, 1.0f64).unwrap() - 2.0).abs() < 1e-12);
        let w = LogWeights { w_p: vec![1.0, -1.0], w_q: vec![0.0], w_d: vec![0.0, 0.0] };
        let e = std::f64::consts::E;
        let want = (2.0 * e * e + 2.0 / (e * e)).sqrt();
        assert!((scaled_norm(&t2(), &w, 1.0).unwrap() - want).abs() < 1e-12 * want);
        let z1 = PolyMatrix::<Rat>::from_rows(1, vec![vec![Poly::var(1, 0)]]).unwrap();
        for b in [-3.0, 0.5, 7.0] {
            let w = LogWeights { w_p: vec![0.0], w_q: vec![0.0], w_d: vec![b] };
            assert!((scaled_norm(&z1, &w, 1.0f64).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(scaled_norm(&t2(), &LogWeights::<f64>::zeros(1, 1, 2), 1.0).is_err());
    }

    #[test]
    fn scaled_norm_in_single_precision() {
        let w = LogWeights::<f32>::zeros(2, 1, 2);
        assert!((scaled_norm(&t2(), &w, 1.0f32).unwrap() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn diagonal_minimum_examples() {
        let r: DiagonalResult<f64> = minimize_diagonal(&t2(), 1.0, 1e-10, 200);
        assert_eq!(r.status, DiagonalStatus::Converged);
        assert!((r.value - 2.0).abs() < 1e-9);
        let id = PolyMatrix::<Rat>::identity(2, 1);
        let r = minimize_diagonal(&id, 0.0, 1e-10, 200);
        assert!((r.value - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn drift_off_the_balanced_sigma() {
        let z2 = PolyMatrix::<Rat>::from_rows(1, vec![vec![Poly::var(1, 0).pow(2)]]).unwrap();
        for sigma in [1.0, 3.0] {
            let r = minimize_diagonal(&z2, sigma, 1e-10, 200);
            assert_eq!(r.status, DiagonalStatus::DriftToZero);
            assert!(r.value < 1e-6 * 2f64.sqrt());
        }
        let r = minimize_diagonal(&z2, 2.0, 1e-10, 200);
        assert_eq!(r.status, DiagonalStatus::Converged);
    }

    #[test]
    fn anisotropic_minimum() {
        // P = diag-free 2×2 [[1, 0],[0, 4]] at σ = 0: the minimum over SL₂×SL₂ diagonals is 2·√(1·4)^{1/1}… = 2√(4)/… → √(2·|det|) = √8
        let m = PolyMatrix::<Rat>::from_rows(
            1,
            vec![vec![Poly::constant(1, Rat::from_integer(1.into())), Poly::zero(1)], vec![Poly::zero(1), Poly::constant(1, Rat::from_integer(4.into()))]],
        )
        .unwrap();
        let r = minimize_diagonal(&m, 0.0, 1e-10, 200);
        assert_eq!(r.status, DiagonalStatus::Converged);
        assert!((r.value - 8f64.sqrt()).abs() < 1e-8, "{}", r.value);
    }
}
