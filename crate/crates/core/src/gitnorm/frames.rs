//! Two-step evaluation of |||P|||_σ: an outer search over orthogonal frames (Haar restarts plus
//! Cayley coordinate descent) around the convex diagonal problem.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::diagonal::{minimize_diagonal, DiagonalResult};
use super::{criticality_residual, DiagonalStatus, LogWeights};
use crate::linalg::{float, Mat};
use crate::polycore::{act_group, GroupElement, PolyMatrix};
use crate::scalar::Scalar;

/// Orthogonal frame (O₁, O₂, O₃).
pub type Frame = GroupElement<f64>;

#[derive(Clone, Debug)]
pub struct GitOptions {
    pub restarts: usize,
    /// Inner evaluations per restart.
    pub budget: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GitOptions {
    fn default() -> Self {
        GitOptions { restarts: 64, budget: 400, seed: 0, tol: 1e-10, max_iter: 200 }
    }
}

/// Best value found; always an upper bound for |||P|||_σ.
#[derive(Clone, Debug)]
pub struct GitEstimate {
    pub value: f64,
    pub status: DiagonalStatus,
    pub w: LogWeights<f64>,
    pub frame: Frame,
    /// Criticality residual of the rescaled matrix at the minimiser.
    pub foc_residual: f64,
    pub restart: usize,
    pub evaluations: usize,
}

/// e^{−σΣw_d}·ρ_{diag(e^w)}ρ_{frame}P, whose norm is the scaled value.
pub fn rescaled_at<T: Scalar>(pm: &PolyMatrix<T>, frame: &Frame, w: &LogWeights<f64>, sigma: f64) -> PolyMatrix<f64> {
    let framed = act_group(&pm.to_f64(), frame).expect("frame matches matrix shape");
    let diag = GroupElement::<f64>::diag_exp(&w.w_p, &w.w_q, &w.w_d);
    let scaled = act_group(&framed, &diag).expect("diagonal matches matrix shape");
    scaled.scale(&(-sigma * w.w_d.iter().sum::<f64>()).exp())
}

fn to_mat(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_nalgebra(m)
}

fn identity_frame(p: usize, q: usize, d: usize) -> [DMatrix<f64>; 3] {
    [DMatrix::identity(p, p), DMatrix::identity(q, q), DMatrix::identity(d, d)]
}

fn frame_of(f: &[DMatrix<f64>; 3]) -> Frame {
    GroupElement { a: to_mat(&f[0]), b: to_mat(&f[1]), c: to_mat(&f[2]) }
}

struct RestartResult {
    value: f64,
    inner: DiagonalResult<f64>,
    frame: [DMatrix<f64>; 3],
    restart: usize,
    evaluations: usize,
}

fn run_restart(pm: &PolyMatrix<f64>, sigma: f64, opts: &GitOptions, restart: usize) -> RestartResult {
    let (p, q, d) = (pm.p(), pm.q(), pm.d());
    let mut frame = if restart == 0 {
        identity_frame(p, q, d)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(restart as u64);
        [float::haar_orthogonal(p, &mut rng), float::haar_orthogonal(q, &mut rng), float::haar_orthogonal(d, &mut rng)]
    };
    let eval = |f: &[DMatrix<f64>; 3]| {
        let framed = act_group(pm, &frame_of(f)).expect("frame matches matrix shape");
        minimize_diagonal(&framed, sigma, opts.tol, opts.max_iter)
    };
    let mut inner = eval(&frame);
    let mut evaluations = 1;
    let floor = 1e-6 * pm.hs_norm();
    let mut h = 0.5;
    while evaluations < opts.budget && h > 1e-4 && inner.status != DiagonalStatus::DriftToZero && inner.value > floor {
        let mut improved = false;
        for slot in 0..3 {
            let n = frame[slot].nrows();
            for a in 0..n {
                for b in a + 1..n {
                    for sign in [1.0, -1.0] {
                        if evaluations >= opts.budget {
                            break;
                        }
                        let mut k = DMatrix::zeros(n, n);
                        k[(a, b)] = sign * h;
                        k[(b, a)] = -sign * h;
                        let mut trial = frame.clone();
                        trial[slot] = float::cayley(&k) * &frame[slot];
                        let r = eval(&trial);
                        evaluations += 1;
                        if r.value < inner.value * (1.0 - 1e-12) {
                            frame = trial;
                            inner = r;
                            improved = true;
                        }
                    }
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    RestartResult { value: inner.value, inner, frame, restart, evaluations }
}

/// git_norm with default options (64 restarts, seed 0) and the given per-restart budget.
pub fn git_norm<T: Scalar>(pm: &PolyMatrix<T>, sigma: f64, restarts: usize, budget: usize) -> GitEstimate {
    git_norm_with(pm, sigma, &GitOptions { restarts, budget, ..GitOptions::default() })
}

/// Restart 0 is the identity frame; restarts 1.. start from Haar frames drawn from independent
/// ChaCha streams of `seed`. Results merge by minimum value, ties by restart index.
pub fn git_norm_with<T: Scalar>(pm: &PolyMatrix<T>, sigma: f64, opts: &GitOptions) -> GitEstimate {
    let pf = pm.to_f64();
    let floor = 1e-6 * pf.hs_norm();
    let first = run_restart(&pf, sigma, opts, 0);
    let best = if first.inner.status == DiagonalStatus::DriftToZero || first.value <= floor {
        first
    } else {
        let others: Vec<RestartResult> = (1..opts.restarts.max(1)).into_par_iter().map(|r| run_restart(&pf, sigma, opts, r)).collect();
        std::iter::once(first)
            .chain(others)
            .min_by(|a, b| a.value.total_cmp(&b.value).then(a.restart.cmp(&b.restart)))
            .expect("at least one restart")
    };
    let frame = frame_of(&best.frame);
    let status = if best.value <= floor && !pf.is_zero() { DiagonalStatus::DriftToZero } else { best.inner.status };
    let foc_residual = if status == DiagonalStatus::DriftToZero {
        f64::NAN
    } else {
        criticality_residual(&rescaled_at(&pf, &frame, &best.inner.w, sigma), &sigma)
    };
    GitEstimate {
        value: best.value,
        status,
        w: best.inner.w,
        frame,
        foc_residual,
        restart: best.restart,
        evaluations: best.evaluations,
    }
}
