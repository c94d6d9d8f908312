//! The p-form norm ‖u(t)‖_ω, volume-one bases, Monte-Carlo estimates of
//! ∫ w(t)‖u(t)‖_ω^{−τ} dt and a numerical probe of the pointwise nondegeneracy inequality.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blockdecomp::{Tile, TileMapper};
use crate::error::{Error, Result};
use crate::gitnorm::{git_norm_with, GitOptions};
use crate::linalg::{float, Mat};
use crate::polycore::PolyMatrix;
use crate::scalar::{rat_to_f64, Rat};
use crate::tileplan::TilePlan;

/// Volume-one basis ω¹..ω^q of V, stored as the columns of a q×q matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaBasis {
    pub columns: DMatrix<f64>,
    /// Diagonal exponents w of the generating O₁·diag(e^w)·O₂ (zero for hand-made bases).
    pub log_scale: Vec<f64>,
}

impl OmegaBasis {
    pub fn standard(q: usize) -> Self {
        OmegaBasis { columns: DMatrix::identity(q, q), log_scale: vec![0.0; q] }
    }

    /// Columns as given; |det| must be 1 to within 10⁻⁸.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let q = cols.len();
        if let Some(c) = cols.iter().find(|c| c.len() != q) {
            return Err(Error::Dimension(format!("basis vector of length {}, expected {q}", c.len())));
        }
        let columns = DMatrix::from_fn(q, q, |i, j| cols[j][i]);
        let det = columns.determinant();
        if (det.abs() - 1.0).abs() > 1e-8 {
            return Err(Error::Constraint(format!("basis has |det| = {det}, expected 1")));
        }
        Ok(OmegaBasis { columns, log_scale: vec![0.0; q] })
    }

    pub fn q(&self) -> usize {
        self.columns.ncols()
    }

    pub fn condition_number(&self) -> f64 {
        let sv = float::singular_values(&self.columns);
        sv[0] / sv[sv.len() - 1]
    }
}

fn pairing_matrix(rows: &[Vec<f64>], omega: &OmegaBasis) -> Result<DMatrix<f64>> {
    let (p, q) = (rows.len(), omega.q());
    if p > q {
        return Err(Error::Dimension(format!("{p} rows exceed dimension {q}")));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != q) {
        return Err(Error::Dimension(format!("row of length {}, expected {q}", r.len())));
    }
    Ok(DMatrix::from_fn(p, q, |i, j| rows[i].iter().enumerate().map(|(k, u)| u * omega.columns[(k, j)]).sum()))
}

/// Increasing p-tuples of 0..q.
pub(crate) fn combinations(q: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..p).collect();
    if p > q {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..p).rev().find(|&i| cur[i] < q - p + i) else { return out };
        cur[i] += 1;
        for k in i + 1..p {
            cur[k] = cur[k - 1] + 1;
        }
    }
}

/// Σ over increasing column tuples of the squared p×p minors of a p×q matrix.
pub fn minor_square_sum(pm: &DMatrix<f64>) -> f64 {
    let p = pm.nrows();
    combinations(pm.ncols(), p).iter().map(|cols| pm.select_columns(cols).determinant().powi(2)).sum()
}

/// ‖u¹∧…∧u^p‖_ω: square root of the sum of squared maximal minors of (u^i·ω^j).
pub fn wedge_norm(rows: &[Vec<f64>], omega: &OmegaBasis) -> Result<f64> {
    Ok(minor_square_sum(&pairing_matrix(rows, omega)?).sqrt())
}

/// The same norm through the Gram determinant det(PPᵀ), used on the sampling hot path.
fn gram_norm(pm: &DMatrix<f64>) -> f64 {
    (pm * pm.transpose()).determinant().max(0.0).sqrt()
}

/// O₁·diag(e^w)·O₂ with Haar orthogonal factors and w uniform on
/// {Σw = 0, ‖w‖∞ ≤ scale_max} (rejection from the first q−1 coordinates), |det| renormalised to 1.
pub fn sample_omega(q: usize, seed: u64, scale_max: f64) -> OmegaBasis {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let o1 = float::haar_orthogonal(q, &mut rng);
    let o2 = float::haar_orthogonal(q, &mut rng);
    let w: Vec<f64> = if scale_max > 0.0 && q > 1 {
        loop {
            let mut w: Vec<f64> = (0..q - 1).map(|_| rng.random_range(-scale_max..=scale_max)).collect();
            let last = -w.iter().sum::<f64>();
            if last.abs() <= scale_max {
                w.push(last);
                break w;
            }
        }
    } else {
        vec![0.0; q]
    };
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(q, w.iter().map(|x| x.exp())));
    let mut columns = o1 * diag * o2;
    let det = columns.determinant().abs();
    columns /= det.powf(1.0 / q as f64);
    OmegaBasis { columns, log_scale: w }
}

/// Axis-aligned integration box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Dimension(format!("box corners of dimension {} and {}", lo.len(), hi.len())));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::Constraint("box must have lo < hi in every coordinate".into()));
        }
        Ok(BoxDomain { lo, hi })
    }

    /// [−r, r]^d.
    pub fn cube(d: usize, r: f64) -> Self {
        BoxDomain { lo: vec![-r; d], hi: vec![r; d] }
    }

    pub fn from_rats(lo: &[Rat], hi: &[Rat]) -> Result<Self> {
        Self::new(lo.iter().map(rat_to_f64).collect(), hi.iter().map(rat_to_f64).collect())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect()
    }

    fn split(&self) -> (usize, BoxDomain, BoxDomain) {
        let axis = (0..self.dim()).max_by(|&a, &b| (self.hi[a] - self.lo[a]).total_cmp(&(self.hi[b] - self.lo[b]))).unwrap_or(0);
        let mid = 0.5 * (self.lo[axis] + self.hi[axis]);
        let (mut left, mut right) = (self.clone(), self.clone());
        left.hi[axis] = mid;
        right.lo[axis] = mid;
        (axis, left, right)
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Flattened polynomial matrix for fast repeated evaluation.
struct Compiled {
    p: usize,
    q: usize,
    terms: Vec<(usize, f64, Vec<i32>)>,
}

impl Compiled {
    fn new(m: &PolyMatrix<f64>) -> Self {
        let mut terms = Vec::new();
        for i in 0..m.p() {
            for j in 0..m.q() {
                for (a, c) in m.get(i, j).terms() {
                    terms.push((i * m.q() + j, *c, a.entries().iter().map(|&e| e as i32).collect()));
                }
            }
        }
        Compiled { p: m.p(), q: m.q(), terms }
    }

    fn eval(&self, t: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.p, self.q);
        for (idx, c, e) in &self.terms {
            let v = e.iter().zip(t).fold(*c, |acc, (&k, &x)| acc * x.powi(k));
            out[(idx / self.q, idx % self.q)] += v;
        }
        out
    }
}

/// Evaluator for w(t)/‖u(t)‖_ω^τ.
struct Integrand<'a> {
    m: Compiled,
    omega: &'a DMatrix<f64>,
    tau: f64,
    weight: &'a (dyn Fn(&[f64]) -> f64 + Sync),
}

impl Integrand<'_> {
    /// `None` for a non-finite sample (vanishing norm under positive weight).
    fn at(&self, t: &[f64]) -> Option<f64> {
        let w = (self.weight)(t);
        if w == 0.0 {
            return Some(0.0);
        }
        let norm = gram_norm(&(self.m.eval(t) * self.omega));
        let v = w / norm.powf(self.tau);
        v.is_finite().then_some(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleOptions {
    pub samples: usize,
    pub seed: u64,
    /// Adaptive stratification instead of plain sampling.
    pub stratified: bool,
    /// Stop stratifying once std_error/value falls below this.
    pub target_rel: f64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { samples: 100_000, seed: 0, stratified: false, target_rel: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Samples excluded because the integrand was not finite.
    pub flagged: usize,
    pub strata: usize,
    pub domain: BoxDomain,
    pub seed: u64,
}

const CHUNK: usize = 4096;
const STRATUM_FILL: usize = 32;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Monte-Carlo estimate of ∫_box w(t)‖u(t)‖_ω^{−τ} dt where u is the row wedge of `m`.
/// Chunks draw from independent ChaCha streams of the master seed, so the result depends only on
/// (seed, samples, domain, ω), never on the thread count.
pub fn estimate_integral(
    m: &PolyMatrix<f64>,
    weight: &(dyn Fn(&[f64]) -> f64 + Sync),
    tau: f64,
    domain: &BoxDomain,
    omega: &OmegaBasis,
    opts: &SampleOptions,
) -> Result<IntegralEstimate> {
    if !(tau > 0.0) {
        return Err(Error::Constraint(format!("tau must be positive, got {tau}")));
    }
    if domain.dim() != m.d() {
        return Err(Error::Dimension(format!("box of dimension {}, matrix in {} variables", domain.dim(), m.d())));
    }
    if m.q() != omega.q() || m.p() > m.q() {
        return Err(Error::Dimension(format!("{}x{} matrix against a basis of R^{}", m.p(), m.q(), omega.q())));
    }
    if opts.samples < 2 {
        return Err(Error::Constraint("at least two samples are required".into()));
    }
    let f = Integrand { m: Compiled::new(m), omega: &omega.columns, tau, weight };
    if opts.stratified {
        stratified(&f, domain, opts)
    } else {
        plain(&f, domain, opts)
    }
}

fn plain(f: &Integrand<'_>, domain: &BoxDomain, opts: &SampleOptions) -> Result<IntegralEstimate> {
    let chunks = opts.samples.div_ceil(CHUNK);
    let parts: Vec<(Compensated, Compensated, usize, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(opts.seed, c as u64);
            let n = CHUNK.min(opts.samples - c * CHUNK);
            let (mut s, mut s2, mut kept, mut flagged) = (Compensated::default(), Compensated::default(), 0, 0);
            for _ in 0..n {
                match f.at(&domain.sample(&mut rng)) {
                    Some(v) => {
                        s.add(v);
                        s2.add(v * v);
                        kept += 1;
                    }
                    None => flagged += 1,
                }
            }
            (s, s2, kept, flagged)
        })
        .collect();
    let (mut s, mut s2, mut kept, mut flagged) = (Compensated::default(), Compensated::default(), 0, 0);
    for (a, b, k, fl) in parts {
        s.add(a.value());
        s2.add(b.value());
        kept += k;
        flagged += fl;
    }
    if kept < 2 {
        return Err(Error::Constraint("every sample was flagged".into()));
    }
    let n = kept as f64;
    let mean = s.value() / n;
    let var = ((s2.value() / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let vol = domain.volume();
    Ok(IntegralEstimate {
        value: vol * mean,
        std_error: vol * (var / n).sqrt(),
        samples: opts.samples,
        flagged,
        strata: 1,
        domain: domain.clone(),
        seed: opts.seed,
    })
}

struct Stratum {
    cell: BoxDomain,
    points: Vec<(Vec<f64>, f64)>,
    flagged: usize,
}

impl Stratum {
    fn stats(&self) -> (f64, f64) {
        let n = self.points.len() as f64;
        let mut s = Compensated::default();
        self.points.iter().for_each(|(_, v)| s.add(*v));
        let mean = s.value() / n;
        let mut ss = Compensated::default();
        self.points.iter().for_each(|(_, v)| ss.add((v - mean).powi(2)));
        let vol = self.cell.volume();
        (vol * mean, vol * vol * ss.value() / (n - 1.0) / n)
    }

    fn fill(&mut self, f: &Integrand<'_>, seed: u64, stream: u64) {
        let mut rng = stream_rng(seed, stream);
        while self.points.len() < STRATUM_FILL {
            let t = self.cell.sample(&mut rng);
            match f.at(&t) {
                Some(v) => self.points.push((t, v)),
                None => {
                    self.flagged += 1;
                    if self.flagged > 64 * STRATUM_FILL {
                        break;
                    }
                }
            }
        }
    }
}

/// Adaptive stratification: each round halves (along the longest side) every stratum whose
/// variance contribution is at least the mean contribution, so the stratum count at most doubles;
/// parent samples are reused and each child is topped up from its own stream. The relative-error
/// stop is honoured only after a quarter of the budget, since early variance estimates miss
/// unresolved peaks.
fn stratified(f: &Integrand<'_>, domain: &BoxDomain, opts: &SampleOptions) -> Result<IntegralEstimate> {
    let mut next_stream = 0u64;
    let mut root = Stratum { cell: domain.clone(), points: Vec::new(), flagged: 0 };
    root.fill(f, opts.seed, next_stream);
    next_stream += 1;
    let mut strata = vec![root];
    let mut drawn = STRATUM_FILL;
    loop {
        let stats: Vec<(f64, f64)> = strata.iter().map(Stratum::stats).collect();
        let mut value = Compensated::default();
        let mut var = Compensated::default();
        for (v, s2) in &stats {
            value.add(*v);
            var.add(*s2);
        }
        let (value, var) = (value.value(), var.value());
        let converged = 4 * drawn >= opts.samples && var.sqrt() <= opts.target_rel * value.abs();
        if converged || drawn >= opts.samples || var == 0.0 {
            let flagged = strata.iter().map(|s| s.flagged).sum();
            if strata.iter().any(|s| s.points.len() < 2) {
                return Err(Error::Constraint("a stratum has fewer than two finite samples".into()));
            }
            return Ok(IntegralEstimate {
                value,
                std_error: var.sqrt(),
                samples: drawn,
                flagged,
                strata: strata.len(),
                domain: domain.clone(),
                seed: opts.seed,
            });
        }
        let mean_contrib = var / strata.len() as f64;
        let mut next = Vec::with_capacity(2 * strata.len());
        let mut to_fill = Vec::new();
        for (s, (_, s2)) in strata.into_iter().zip(&stats) {
            if *s2 >= mean_contrib && *s2 > 0.0 {
                let (axis, l, r) = s.cell.split();
                let mid = l.hi[axis];
                let (lp, rp): (Vec<_>, Vec<_>) = s.points.into_iter().partition(|(t, _)| t[axis] < mid);
                for (cell, points) in [(l, lp), (r, rp)] {
                    to_fill.push(next.len());
                    next.push((Stratum { cell, points, flagged: 0 }, next_stream));
                    next_stream += 1;
                }
            } else {
                next.push((s, 0));
            }
        }
        let before: usize = next.iter().map(|(s, _)| s.points.len() + s.flagged).sum();
        next.par_iter_mut().enumerate().for_each(|(k, (s, stream))| {
            if to_fill.binary_search(&k).is_ok() {
                s.fill(f, opts.seed, *stream);
            }
        });
        let after: usize = next.iter().map(|(s, _)| s.points.len() + s.flagged).sum();
        drawn += after - before;
        strata = next.into_iter().map(|(s, _)| s).collect();
    }
}

/// Seed of the k-th member of a family derived from a master seed.
pub fn derived_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaEntry {
    pub log_scale: Vec<f64>,
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SublevelReport {
    pub tau: f64,
    pub omegas: Vec<OmegaEntry>,
    pub max_estimate: f64,
}

impl SublevelReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Estimates the integral for `count` random volume-one bases; basis k and its sampling stream
/// are both derived from `opts.seed` and k.
pub fn survey(
    m: &PolyMatrix<f64>,
    weight: &(dyn Fn(&[f64]) -> f64 + Sync),
    tau: f64,
    domain: &BoxDomain,
    count: usize,
    scale_max: f64,
    opts: &SampleOptions,
) -> Result<SublevelReport> {
    let mut omegas = Vec::with_capacity(count);
    for k in 0..count as u64 {
        let omega = sample_omega(m.q(), derived_seed(opts.seed, 2 * k), scale_max);
        let o = SampleOptions { seed: derived_seed(opts.seed, 2 * k + 1), ..opts.clone() };
        let est = estimate_integral(m, weight, tau, domain, &omega, &o)?;
        omegas.push(OmegaEntry { log_scale: omega.log_scale, estimate: est.value, stderr: est.std_error });
    }
    let max_estimate = omegas.iter().map(|e| e.estimate).fold(f64::NEG_INFINITY, f64::max);
    Ok(SublevelReport { tau, omegas, max_estimate })
}

/// w = Π_i |||P_{𝒯_i,t}|||_{σ_i}^{θ_i/σ} for a tile plan, provided every tile with θ_i > 0 carries
/// a row-invariance certificate (so the weight does not depend on t); `None` otherwise.
pub fn constant_tile_weight(mapper: &TileMapper, plan: &TilePlan, opts: &GitOptions) -> Result<Option<f64>> {
    let sigma = rat_to_f64(&plan.sigma);
    let origin = vec![Rat::from_integer(0.into()); mapper.d()];
    let mut log_w = 0.0;
    for (pt, theta) in plan.points.iter().zip(&plan.theta) {
        let th = rat_to_f64(theta);
        if th == 0.0 {
            continue;
        }
        let sym = mapper.symbolic(&pt.tile)?;
        if crate::blockdecomp::invariance_certificate(&sym).is_none() {
            return Ok(None);
        }
        let p0 = mapper.at(&pt.tile, &origin)?;
        let g = git_norm_with(&p0, rat_to_f64(&pt.sigma), opts);
        log_w += th / sigma * g.value.ln();
    }
    Ok(Some(log_w.exp()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NondegeneracyProbe {
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
}

/// Ratio of the right side of the nondegeneracy inequality, evaluated through the exact tile map
/// at t₀ (Σ_α |coefficient of z^α in P(Mᵀz)|²·α! = ‖P∘Mᵀ‖²), to |det M|^σ·w^σ, for each M.
pub fn probe_nondegeneracy(mapper: &TileMapper, tile: &Tile, t0: &[Rat], sigma: f64, w_value: f64, ms: &[Mat<f64>]) -> Result<NondegeneracyProbe> {
    let p = mapper.at(tile, t0)?.to_f64();
    let d = mapper.d();
    let mut ratios = Vec::with_capacity(ms.len());
    for m in ms {
        if m.rows() != d || m.cols() != d {
            return Err(Error::Dimension(format!("direction matrix is {}x{}, expected {d}x{d}", m.rows(), m.cols())));
        }
        let det = m.to_nalgebra().determinant().abs();
        if det == 0.0 {
            return Err(Error::Constraint("direction matrix is singular".into()));
        }
        let lhs = det.powf(sigma) * w_value.powf(sigma);
        if lhs == 0.0 {
            ratios.push(f64::INFINITY);
            continue;
        }
        let rhs = p.map_entries(|_, _, e| e.substitute_linear(m)).hs_norm();
        ratios.push(rhs / lhs);
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(NondegeneracyProbe { ratios, min_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::Poly;

    fn row_1t() -> PolyMatrix<f64> {
        PolyMatrix::from_rows(1, vec![vec![Poly::one(1), Poly::var(1, 0)]]).unwrap()
    }

    fn aniso(c: f64) -> OmegaBasis {
        OmegaBasis::from_columns(&[vec![c, 0.0], vec![0.0, 1.0 / c]]).unwrap()
    }

    #[test]
    fn wedge_norm_examples() {
        let t: f64 = 0.7;
        let n = wedge_norm(&[vec![1.0, t]], &OmegaBasis::standard(2)).unwrap();
        assert!((n - (1.0 + t * t).sqrt()).abs() < 1e-15);
        assert!((wedge_norm(&[vec![1.0, 0.0]], &aniso(3.0)).unwrap() - 3.0).abs() < 1e-15);
        let rows = vec![vec![1.0, 2.0], vec![3.0, 5.0]];
        assert!((wedge_norm(&rows, &OmegaBasis::standard(2)).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(wedge_norm(&[vec![1.0], vec![2.0]], &OmegaBasis::standard(1)), Err(Error::Dimension(_))));
    }

    #[test]
    fn gram_route_agrees_with_minors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let pm = DMatrix::from_fn(3, 6, |_, _| rng.random_range(-2.0..2.0));
            let (a, b) = (minor_square_sum(&pm).sqrt(), gram_norm(&pm));
            assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        }
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn omega_generator() {
        let o = sample_omega(4, 9, 0.0);
        let ot = &o.columns * o.columns.transpose();
        assert!((ot - DMatrix::<f64>::identity(4, 4)).amax() < 1e-12);
        assert_eq!(sample_omega(5, 11, 3.0), sample_omega(5, 11, 3.0));
        let mut wide = 0;
        for seed in 0..40 {
            let o = sample_omega(9, seed, 8.0);
            assert!((o.columns.determinant().abs() - 1.0).abs() < 1e-8);
            assert!(o.log_scale.iter().sum::<f64>().abs() < 1e-9);
            assert!(o.log_scale.iter().all(|w| w.abs() <= 8.0));
            if o.condition_number() >= 8f64.exp() {
                wide += 1;
            }
        }
        assert!(wide >= 20, "{wide}");
    }

    #[test]
    fn plain_estimate_is_deterministic() {
        let one = |_: &[f64]| 1.0;
        let dom = BoxDomain::cube(1, 10.0);
        let opts = SampleOptions { samples: 20_000, seed: 4, ..Default::default() };
        let a = estimate_integral(&row_1t(), &one, 2.0, &dom, &aniso(1.0), &opts).unwrap();
        let b = estimate_integral(&row_1t(), &one, 2.0, &dom, &aniso(1.0), &opts).unwrap();
        assert_eq!(a, b);
        let exact = 2.0 * 10f64.atan();
        assert!((a.value - exact).abs() < 4.0 * a.std_error, "{a:?}");
    }

    #[test]
    fn stratified_reaches_closed_form() {
        let one = |_: &[f64]| 1.0;
        let dom = BoxDomain::cube(1, 1000.0);
        let opts = SampleOptions { samples: 100_000, seed: 0, stratified: true, ..Default::default() };
        for c in [0.1, 1.0, 10.0] {
            let est = estimate_integral(&row_1t(), &one, 2.0, &dom, &aniso(c), &opts).unwrap();
            let exact = 2.0 * (1000.0 / (c * c)).atan();
            assert!((est.value - exact).abs() < 0.1 * exact, "c = {c}: {est:?}");
            assert_eq!(est.flagged, 0);
        }
    }

    #[test]
    fn zero_norm_is_flagged() {
        // a zero row has norm 0 everywhere: every sample is flagged unless the weight vanishes
        let m = PolyMatrix::from_rows(1, vec![vec![Poly::zero(1), Poly::zero(1)]]).unwrap();
        let one = |_: &[f64]| 1.0;
        let opts = SampleOptions { samples: 100, ..Default::default() };
        let r = estimate_integral(&m, &one, 1.0, &BoxDomain::cube(1, 1.0), &OmegaBasis::standard(2), &opts);
        assert!(matches!(r, Err(Error::Constraint(_))));
        let zero_w = |_: &[f64]| 0.0;
        let est = estimate_integral(&m, &zero_w, 1.0, &BoxDomain::cube(1, 1.0), &OmegaBasis::standard(2), &opts).unwrap();
        assert_eq!((est.value, est.flagged), (0.0, 0));
    }

    #[test]
    fn bad_arguments() {
        let one = |_: &[f64]| 1.0;
        let opts = SampleOptions::default();
        let dom = BoxDomain::cube(1, 1.0);
        assert!(estimate_integral(&row_1t(), &one, 0.0, &dom, &OmegaBasis::standard(2), &opts).is_err());
        assert!(estimate_integral(&row_1t(), &one, 1.0, &BoxDomain::cube(2, 1.0), &OmegaBasis::standard(2), &opts).is_err());
        assert!(BoxDomain::new(vec![1.0], vec![0.0]).is_err());
        assert!(OmegaBasis::from_columns(&[vec![2.0, 0.0], vec![0.0, 1.0]]).is_err());
    }
}
