//! Radon-like transforms in graph form (π₂ = x, π₁ = (t, φ(x, t))): incidence matrices, the
//! Lie-bracket curvature form Q, semistability verdicts with certificates, L^p-improving exponents,
//! balanced multiindex sets and their explicit block decompositions.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gitnorm::{git_norm_with, polytope_membership, sparse_criterion, Destabilizer, DiagonalStatus, GitOptions, ThetaEntry};
use crate::linalg::Mat;
use crate::polycore::json::{poly_from_json, poly_to_json, rat_to_json, RatJson, TermJson};
use crate::polycore::{act_group, default_names, poly_is_one, GroupElement, Multiindex, Poly, PolyMatrix};
use crate::scalar::{fmt_rat, rat, rat_int, rat_to_f64, Rat};

/// φ: R^n × R^{n1−k} → R^k, with variables ordered (x₁..x_n, t₁..t_{n1−k}).
#[derive(Clone, Debug, PartialEq)]
pub struct RadonProblem {
    pub n: usize,
    pub n1: usize,
    pub k: usize,
    pub phi: Vec<Poly<Rat>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadonProblemJson {
    pub n: usize,
    pub n1: usize,
    pub k: usize,
    pub phi: Vec<Vec<TermJson>>,
}

/// Fixed rational probe points with distinct coordinates for generic-rank checks.
fn probe_point(dim: usize, salt: i64) -> Vec<Rat> {
    (0..dim as i64).map(|i| rat(3 + 2 * i + 7 * salt, 5 + i + salt)).collect()
}

impl RadonProblem {
    pub fn new(n: usize, n1: usize, k: usize, phi: Vec<Poly<Rat>>) -> Result<Self> {
        if k == 0 || k >= n.min(n1) {
            return Err(Error::Constraint(format!("need 0 < k < min(n, n1), got k = {k}, n = {n}, n1 = {n1}")));
        }
        if phi.len() != k {
            return Err(Error::Dimension(format!("{} components of phi, expected {k}", phi.len())));
        }
        let dim = n + n1 - k;
        if let Some(p) = phi.iter().find(|p| p.dim() != dim) {
            return Err(Error::Dimension(format!("phi component in {} variables, expected {dim}", p.dim())));
        }
        let prob = RadonProblem { n, n1, k, phi };
        let jac = prob.jacobian_x();
        let generic = (0..4).map(|salt| jac.eval_exact(&probe_point(dim, salt)).rank()).max().unwrap_or(0);
        if generic < k {
            return Err(Error::NonTransverse { rank: generic, k });
        }
        Ok(prob)
    }

    /// Dimension n1 − k of the t-variables.
    pub fn d(&self) -> usize {
        self.n1 - self.k
    }

    fn jacobian_x(&self) -> PolyMatrix<Rat> {
        PolyMatrix::from_fn(self.k, self.n, self.n + self.d(), |i, j| self.phi[i].derivative(j))
    }

    pub fn to_json_value(&self) -> Result<RadonProblemJson> {
        Ok(RadonProblemJson { n: self.n, n1: self.n1, k: self.k, phi: self.phi.iter().map(poly_to_json).collect::<Result<_>>()? })
    }

    pub fn from_json_value(v: &RadonProblemJson) -> Result<Self> {
        if v.k >= v.n.min(v.n1) {
            return Err(invalid("$.k", format!("k = {} must be below min(n, n1) = {}", v.k, v.n.min(v.n1))));
        }
        let dim = v.n + v.n1 - v.k;
        let phi = v.phi.iter().enumerate().map(|(i, t)| poly_from_json(t, dim, &format!("$.phi[{i}]"))).collect::<Result<Vec<_>>>()?;
        RadonProblem::new(v.n, v.n1, v.k, phi)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value()?)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(s)?)
    }
}

/// M(x, s)_ij = ∂φ^i/∂x_j, a k×n matrix in the n + (n1−k) variables (x, s).
pub fn build_incidence(prob: &RadonProblem) -> PolyMatrix<Rat> {
    prob.jacobian_x()
}

/// M(x₀, s) in the s-variables only, after checking that M(x₀, t₀) has rank k.
pub fn incidence_at(prob: &RadonProblem, x0: &[Rat], t0: &[Rat]) -> Result<PolyMatrix<Rat>> {
    let d = prob.d();
    if x0.len() != prob.n || t0.len() != d {
        return Err(Error::Dimension(format!("base point ({}, {}), expected ({}, {d})", x0.len(), t0.len(), prob.n)));
    }
    let m = build_incidence(prob);
    let point: Vec<Rat> = x0.iter().chain(t0).cloned().collect();
    let rank = m.eval_exact(&point).rank();
    if rank < prob.k {
        return Err(Error::NonTransverse { rank, k: prob.k });
    }
    let subs: Vec<Poly<Rat>> =
        x0.iter().map(|c| Poly::constant(d, c.clone())).chain((0..d).map(|l| Poly::var(d, l))).collect();
    Ok(m.compose(&subs))
}

/// Bilinear Q: R^b × R^c → R^a stored as tensor[i][j][ℓ] (output i, ker dπ₁ index j, ker dπ₂ index ℓ).
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureForm {
    pub tensor: Vec<Vec<Vec<Rat>>>,
    /// Basis X^j of ker dπ₁ in x-coordinates (empty for hand-made forms).
    pub kernel: Vec<Vec<Rat>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvatureFormJson {
    pub shape: [usize; 3],
    pub tensor: Vec<Vec<Vec<RatJson>>>,
}

impl CurvatureForm {
    pub fn from_tensor(tensor: Vec<Vec<Vec<Rat>>>) -> Result<Self> {
        let b = tensor.first().map_or(0, |r| r.len());
        let c = tensor.first().and_then(|r| r.first()).map_or(0, |v| v.len());
        if tensor.is_empty() || b == 0 || c == 0 {
            return Err(Error::Shape("curvature form needs positive dimensions".into()));
        }
        if tensor.iter().any(|r| r.len() != b || r.iter().any(|v| v.len() != c)) {
            return Err(Error::Shape("ragged curvature tensor".into()));
        }
        Ok(CurvatureForm { tensor, kernel: Vec::new() })
    }

    pub fn zeros(a: usize, b: usize, c: usize) -> Self {
        CurvatureForm { tensor: vec![vec![vec![Rat::zero(); c]; b]; a], kernel: Vec::new() }
    }

    /// (a, b, c) = (k, n − k, n1 − k).
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.tensor.len(), self.tensor[0].len(), self.tensor[0][0].len())
    }

    /// Rows = output index, columns = ker dπ₁ index, linear in z ∈ R^c.
    pub fn to_poly_matrix(&self) -> PolyMatrix<Rat> {
        let (a, b, c) = self.shape();
        PolyMatrix::from_fn(a, b, c, |i, j| Poly::from_terms(c, (0..c).map(|l| (Multiindex::unit(c, l), self.tensor[i][j][l].clone()))))
    }

    pub fn to_json_value(&self) -> Result<CurvatureFormJson> {
        let (a, b, c) = self.shape();
        let tensor = self.tensor.iter().map(|r| r.iter().map(|v| v.iter().map(rat_to_json).collect::<Result<Vec<_>>>()).collect()).collect::<Result<_>>()?;
        Ok(CurvatureFormJson { shape: [a, b, c], tensor })
    }
}

/// g^{j,ℓ}_i = X^j ∂_{t_ℓ} φ^i at (x₀, t₀) for a basis X^j of ker ∂φ/∂x(x₀, t₀), which equals
/// [X^j, ∂_{t_ℓ}]φ^i there because X^jφ ≡ 0; the target identification is the identity.
pub fn curvature_form(prob: &RadonProblem, x0: &[Rat], t0: &[Rat]) -> Result<CurvatureForm> {
    let (n, k, d) = (prob.n, prob.k, prob.d());
    if x0.len() != n || t0.len() != d {
        return Err(Error::Dimension(format!("base point ({}, {}), expected ({n}, {d})", x0.len(), t0.len())));
    }
    let point: Vec<Rat> = x0.iter().chain(t0).cloned().collect();
    let jac = build_incidence(prob).eval_exact(&point);
    let rank = jac.rank();
    if rank < k {
        return Err(Error::NonTransverse { rank, k });
    }
    let kernel = jac.kernel();
    let tensor = (0..k)
        .map(|i| {
            kernel
                .iter()
                .map(|xi| {
                    (0..d)
                        .map(|l| {
                            let dt = prob.phi[i].derivative(n + l);
                            (0..n).fold(Rat::zero(), |acc, m| acc + &xi[m] * dt.derivative(m).eval_exact(&point))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(CurvatureForm { tensor, kernel })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictState {
    Positive,
    Unstable,
    Undetermined,
}

impl VerdictState {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictState::Positive => "positive",
            VerdictState::Unstable => "unstable",
            VerdictState::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// Sparse support with barycentric weights θ.
    Sparse { theta: Vec<ThetaEntry> },
    /// A frame g ∈ GL(a)×GL(b)×GL(c) and a destabiliser of the support of ρ_g P.
    Destabilizing { frame: GroupElement<Rat>, destabilizer: Destabilizer },
    /// A converged minimiser of the GIT functional with small criticality residual.
    Critical { value: f64, residual: f64 },
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemistabilityVerdict {
    pub state: VerdictState,
    pub sigma: Rat,
    pub certificate: Certificate,
    /// Best GIT value found (an upper bound), when the descent ran.
    pub value: Option<f64>,
    /// Frames tried before a decision.
    pub frames_tried: usize,
}

#[derive(Clone, Debug)]
pub struct VerdictOptions {
    pub frames: usize,
    pub seed: u64,
    pub git: GitOptions,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions { frames: 64, seed: 0, git: GitOptions::default() }
    }
}

/// Random integer matrix of determinant 1 (a product of elementary shears).
fn unimodular<R: Rng>(n: usize, rng: &mut R) -> Mat<Rat> {
    let mut m = Mat::<Rat>::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..2 * n {
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        let c = rat_int([-2, -1, 1, 2][rng.random_range(0..4)]);
        for col in 0..n {
            let v = &m[(j, col)] * &c;
            m[(i, col)] = &m[(i, col)] + &v;
        }
    }
    m
}

/// Frame adapted to a kernel vector K of the slice map R^b⊗R^c → R^a: columns and variables are
/// changed so that K becomes [I_r 0; 0 0], then the output basis is made of the first independent
/// images of the basis tensors, which forces the relation K = 0 onto few support triples.
fn kernel_adapted_frame(pm: &PolyMatrix<Rat>) -> Option<GroupElement<Rat>> {
    let (a, b, c) = (pm.p(), pm.q(), pm.d());
    let coeff = |p: &PolyMatrix<Rat>, i: usize, j: usize, l: usize| p.get(i, j).coeff(&Multiindex::unit(c, l));
    let slice = Mat::from_fn(a, b * c, |i, jl| coeff(pm, i, jl / c, jl % c));
    let ker = slice.kernel();
    let kv = ker.first()?;
    let kmat = Mat::from_fn(b, c, |j, l| kv[j * c + l].clone());
    // E·K = R (reduced); K = E⁻¹·N·Q with Q = pivot rows of R completed by unit rows
    let rr = kmat.rref();
    let mut qrows: Vec<Vec<Rat>> = (0..rr.pivots.len()).map(|r| rr.reduced.row(r).to_vec()).collect();
    for col in (0..c).filter(|col| !rr.pivots.contains(col)) {
        qrows.push((0..c).map(|x| if x == col { Rat::one() } else { Rat::zero() }).collect());
    }
    let q = Mat::from_rows(qrows);
    // K' = B^{-T} K C^{-1} = N needs Bᵀ = E⁻¹, C = Q
    let b_mat = rr.transform.inverse()?.transpose();
    let g0 = GroupElement::new(Mat::identity(a), b_mat.clone(), q.clone()).ok()?;
    let p1 = act_group(pm, &g0).ok()?;
    let mut chosen: Vec<Vec<Rat>> = Vec::new();
    for jl in 0..b * c {
        let v: Vec<Rat> = (0..a).map(|i| coeff(&p1, i, jl / c, jl % c)).collect();
        let mut trial = chosen.clone();
        trial.push(v.clone());
        if Mat::from_rows(trial).rank() > chosen.len() {
            chosen.push(v);
        }
        if chosen.len() == a {
            break;
        }
    }
    for e in 0..a {
        if chosen.len() == a {
            break;
        }
        let v: Vec<Rat> = (0..a).map(|i| if i == e { Rat::one() } else { Rat::zero() }).collect();
        let mut trial = chosen.clone();
        trial.push(v.clone());
        if Mat::from_rows(trial).rank() > chosen.len() {
            chosen.push(v);
        }
    }
    // columns of S are the chosen images; A = S⁻¹ sends them to unit vectors
    let s = Mat::from_rows(chosen).transpose();
    GroupElement::new(s.inverse()?, b_mat, q).ok()
}

/// Exact re-verification of a destabilising certificate.
pub fn verify_destabilizing(pm: &PolyMatrix<Rat>, sigma: &Rat, frame: &GroupElement<Rat>, d: &Destabilizer) -> bool {
    let invertible = !frame.a.det().is_zero() && !frame.b.det().is_zero() && !frame.c.det().is_zero();
    invertible && act_group(pm, frame).is_ok_and(|moved| d.verify(&moved.support_set(), sigma))
}

/// Verdict for Q at σ = 1/c.
pub fn semistability_verdict(q: &CurvatureForm, opts: &VerdictOptions) -> Result<SemistabilityVerdict> {
    let c = q.shape().2;
    verdict_at(&q.to_poly_matrix(), &rat(1, c as i64), opts)
}

/// Semistability verdict for any P at σ: the sparse criterion, then exact destabiliser searches
/// over the identity, a kernel-adapted frame (linear forms only) and random unimodular frames, then
/// GIT descent. The first decisive certificate wins; otherwise the verdict is undetermined.
pub fn verdict_at(pm: &PolyMatrix<Rat>, sigma: &Rat, opts: &VerdictOptions) -> Result<SemistabilityVerdict> {
    let (a, b, c) = (pm.p(), pm.q(), pm.d());
    let verdict = |state, certificate, value, frames_tried| SemistabilityVerdict { state, sigma: sigma.clone(), certificate, value, frames_tried };
    let sparse = sparse_criterion(pm, sigma);
    if sparse.positive {
        return Ok(verdict(VerdictState::Positive, Certificate::Sparse { theta: sparse.theta }, None, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut frames = vec![GroupElement::identity(a, b, c)];
    let linear = pm.entries().iter().all(|e| e.terms().all(|(al, _)| al.order() == 1));
    if linear {
        frames.extend(kernel_adapted_frame(pm));
    }
    while frames.len() < opts.frames.max(1) {
        frames.push(GroupElement { a: unimodular(a, &mut rng), b: unimodular(b, &mut rng), c: unimodular(c, &mut rng) });
    }
    for (tried, frame) in frames.into_iter().enumerate() {
        let moved = act_group(pm, &frame)?;
        let membership = polytope_membership(&moved.support_set(), sigma)?;
        if let Some(d) = membership.separator {
            if verify_destabilizing(pm, sigma, &frame, &d) {
                return Ok(verdict(VerdictState::Unstable, Certificate::Destabilizing { frame, destabilizer: d }, None, tried + 1));
            }
        }
    }
    let est = git_norm_with(pm, rat_to_f64(sigma), &opts.git);
    let norm2 = pm.hs_norm().powi(2);
    let decisive = est.status == DiagonalStatus::Converged && est.value > 1e-6 * norm2.sqrt() && est.foc_residual <= 1e-6 * norm2;
    if decisive {
        let cert = Certificate::Critical { value: est.value, residual: est.foc_residual };
        return Ok(verdict(VerdictState::Positive, cert, Some(est.value), opts.frames));
    }
    Ok(verdict(VerdictState::Undetermined, Certificate::None, Some(est.value), opts.frames))
}

impl SemistabilityVerdict {
    pub fn to_json_value(&self) -> Result<serde_json::Value> {
        let cert = match &self.certificate {
            Certificate::Sparse { theta } => serde_json::json!({
                "kind": "sparse",
                "theta": theta.iter().map(|t| Ok(serde_json::json!({
                    "i": t.i, "j": t.j, "alpha": t.alpha.entries(), "theta": rat_to_json(&t.theta)?
                }))).collect::<Result<Vec<_>>>()?,
            }),
            Certificate::Destabilizing { frame, destabilizer } => {
                let m = |x: &Mat<Rat>| x.to_rows().iter().map(|r| r.iter().map(rat_to_json).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>();
                let v = |x: &[Rat]| x.iter().map(rat_to_json).collect::<Result<Vec<_>>>();
                serde_json::json!({
                    "kind": "destabilizer",
                    "frame": {"A": m(&frame.a)?, "B": m(&frame.b)?, "C": m(&frame.c)?},
                    "w_p": v(&destabilizer.w.w_p)?, "w_q": v(&destabilizer.w.w_q)?, "w_d": v(&destabilizer.w.w_d)?,
                    "margin": rat_to_json(&destabilizer.margin)?,
                })
            }
            Certificate::Critical { value, residual } => serde_json::json!({"kind": "critical", "value": value, "residual": residual}),
            Certificate::None => serde_json::json!({"kind": "none"}),
        };
        Ok(serde_json::json!({
            "state": self.state.as_str(),
            "sigma": rat_to_json(&self.sigma)?,
            "certificate": cert,
            "value": self.value,
            "frames_tried": self.frames_tried,
        }))
    }
}

/// Exponents of the model bound and their duals.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelExponents {
    /// Lebesgue exponent on g (functions on R^n).
    pub r_g: Rat,
    /// Lebesgue exponent on f (functions on R^{n1}).
    pub r_f: Rat,
    /// 1/p₂ = n1(n−k)/(nn1−k²).
    pub inv_p2: Rat,
    /// 1/p₁ = n(n1−k)/(nn1−k²).
    pub inv_p1: Rat,
}

/// (k(n1−k)/(n1(n−k)) + 1, k(n−k)/(n(n1−k)) + 1) with the scaling identity
/// n1 + n = (n+k)/p₂ + (n1+k)/p₁ checked exactly.
pub fn model_exponents(n: usize, n1: usize, k: usize) -> Result<ModelExponents> {
    if k == 0 || k >= n.min(n1) {
        return Err(Error::Constraint(format!("need 0 < k < min(n, n1), got ({n}, {n1}, {k})")));
    }
    let (n, n1, k) = (n as i64, n1 as i64, k as i64);
    let r_g = rat(k * (n1 - k), n1 * (n - k)) + Rat::one();
    let r_f = rat(k * (n - k), n * (n1 - k)) + Rat::one();
    let inv_p2 = rat(n1 * (n - k), n * n1 - k * k);
    let inv_p1 = rat(n * (n1 - k), n * n1 - k * k);
    if rat_int(n + k) * &inv_p2 + rat_int(n1 + k) * &inv_p1 != rat_int(n1 + n) {
        return Err(Error::Constraint("scaling identity fails".into()));
    }
    Ok(ModelExponents { r_g, r_f, inv_p2, inv_p1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BalancedType {
    One,
    Two,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalancedReport {
    pub sigma: Rat,
    pub n: usize,
    /// Source exponent r.
    pub r: Rat,
    /// Target exponent r(N+1)/N (type 1) or r(N+d)/N (type 2).
    pub target: Rat,
}

fn render_mi(a: &Multiindex) -> String {
    format!("{:?}", a.entries())
}

/// Nonzero α' ≤ α with α' ≠ α.
fn proper_parts(alpha: &Multiindex) -> Vec<Multiindex> {
    let ranges: Vec<u32> = alpha.entries().to_vec();
    let mut out = vec![Vec::new()];
    for &r in &ranges {
        out = out.into_iter().flat_map(|p: Vec<u32>| (0..=r).map(move |v| [p.clone(), vec![v]].concat())).collect();
    }
    out.into_iter().map(Multiindex::new).filter(|m| m.order() > 0 && m != alpha).collect()
}

/// Checks the closure and mean conditions exactly and returns σ, N, r and the target exponent;
/// `k_or_d` is k for type 1 and is checked against the multiindex length for type 2.
pub fn balanced_check(set: &[Multiindex], ty: BalancedType, k_or_d: usize) -> Result<BalancedReport> {
    let members: BTreeSet<&Multiindex> = set.iter().collect();
    if members.is_empty() || members.len() != set.len() {
        return Err(Error::Constraint("the set must be nonempty without repetitions".into()));
    }
    let d = set[0].len();
    if set.iter().any(|a| a.len() != d || a.order() == 0) {
        return Err(Error::Constraint("multiindices must be nonzero and of equal length".into()));
    }
    let nn = set.len() as i64;
    let mean = |f: &dyn Fn(&Multiindex, usize) -> Rat| (0..d).map(|c| set.iter().map(|a| f(a, c)).sum::<Rat>() / rat_int(nn)).collect::<Vec<Rat>>();
    let all_equal = |v: &[Rat]| v.iter().all(|x| *x == v[0]);
    match ty {
        BalancedType::One => {
            for a in set {
                if let Some(w) = proper_parts(a).into_iter().find(|p| !members.contains(p)) {
                    return Err(Error::Closure { witness: render_mi(&w) });
                }
            }
            let m = mean(&|a, c| rat_int(a.entries()[c] as i64));
            if !all_equal(&m) || !m[0].is_positive() {
                return Err(Error::Constraint(format!("mean {} is not a positive multiple of 1", m.iter().map(fmt_rat).collect::<Vec<_>>().join(","))));
            }
            let sigma = m[0].clone();
            let k = rat_int(k_or_d as i64);
            let r = rat_int(nn) * &k * &sigma / rat_int(nn + 1) + Rat::one();
            let target = &r * rat(nn + 1, nn);
            Ok(BalancedReport { sigma, n: set.len(), r, target })
        }
        BalancedType::Two => {
            if k_or_d != d {
                return Err(Error::Dimension(format!("multiindices of length {d}, expected d = {k_or_d}")));
            }
            if let Some(a) = set.iter().find(|a| a.order() == 1) {
                return Err(Error::Constraint(format!("type 2 excludes |α| = 1, found {}", render_mi(a))));
            }
            for a in set {
                if let Some(w) = proper_parts(a).into_iter().find(|p| p.order() >= 2 && !members.contains(p)) {
                    return Err(Error::Closure { witness: render_mi(&w) });
                }
            }
            let m1 = mean(&|a, c| rat(a.entries()[c] as i64, a.order() as i64));
            if m1.iter().any(|x| *x != rat(1, d as i64)) {
                return Err(Error::Constraint("mean of α/|α| is not d⁻¹·1".into()));
            }
            let m2 = mean(&|a, c| rat_int(a.entries()[c] as i64));
            let sigma = &m2[0] - rat(1, d as i64);
            if !all_equal(&m2) || !sigma.is_positive() {
                return Err(Error::Constraint("mean of α is not (σ + d⁻¹)·1 with σ > 0".into()));
            }
            let dd = rat_int(d as i64);
            let r = rat_int(nn) * &sigma * &dd / rat_int(nn + d as i64) + Rat::one();
            let target = &r * rat(nn + d as i64, nn);
            Ok(BalancedReport { sigma, n: set.len(), r, target })
        }
    }
}

fn factorial_rat(a: &Multiindex) -> Rat {
    Rat::from_integer(a.factorial())
}

/// u^α/α! in dim variables.
fn monomial_over_factorial(a: &Multiindex) -> Poly<Rat> {
    Poly::monomial(a.clone(), Rat::one() / factorial_rat(a))
}

/// Multiindices of a set in graded order (lower-order first), as used for row blocks.
fn graded(set: &[Multiindex]) -> Vec<Multiindex> {
    let mut v = set.to_vec();
    v.sort();
    v
}

/// φ^{(α,i)}(x, t) = x_{α,i} + t^α x'_i/α! with x = ({x_{α,i}}, x'), n = Nk + k, n1 = Nk + d.
pub fn type1_problem(set: &[Multiindex], k: usize) -> Result<RadonProblem> {
    let set = graded(set);
    let (nn, d) = (set.len(), set[0].len());
    let n = nn * k + k;
    let dim = n + d;
    let phi = set
        .iter()
        .enumerate()
        .flat_map(|(a, alpha)| {
            (0..k).map(move |i| {
                let mono = monomial_over_factorial(alpha).embed(dim, n);
                &Poly::var(dim, a * k + i) + &(&mono * &Poly::var(dim, nn * k + i))
            })
        })
        .collect();
    RadonProblem::new(n, nn * k + d, nn * k, phi)
}

/// φ^α(x, t) = x_α + (x' − t)^α/α! with x = ({x_α}, x'), n = n1 = N + d.
pub fn type2_problem(set: &[Multiindex]) -> Result<RadonProblem> {
    let set = graded(set);
    let (nn, d) = (set.len(), set[0].len());
    let n = nn + d;
    let dim = n + d;
    let diff: Vec<Poly<Rat>> = (0..d).map(|l| &Poly::var(dim, nn + l) - &Poly::var(dim, n + l)).collect();
    let phi = set.iter().enumerate().map(|(a, alpha)| &Poly::var(dim, a) + &monomial_over_factorial(alpha).compose(&diff)).collect();
    RadonProblem::new(n, n, nn, phi)
}

/// Witness (A(s), B(t), P(s, z)) for the incidence matrix of a balanced set at x = 0; P is in the
/// variables (s, z) with z = t − s.
#[derive(Clone, Debug, PartialEq)]
pub struct RadonDecomposition {
    pub a: PolyMatrix<Rat>,
    pub b: PolyMatrix<Rat>,
    pub p: PolyMatrix<Rat>,
}

/// s ↦ (s, 0) embedding of a d-variable polynomial into (s, z).
fn lift_s(p: &Poly<Rat>, d: usize) -> Poly<Rat> {
    p.embed(2 * d, 0)
}

/// Type 1: B = [I, −r(t)⊗I; 0, I] with r(u) = (u^α/α!)_α, A lower unipotent with
/// A[α][α−β] = (−s)^β/β!, so that A·M·B = [A(s) | −(t−s)^α/α!·I_k] by Taylor's formula.
pub fn type1_decomposition(set: &[Multiindex], k: usize) -> RadonDecomposition {
    let set = graded(set);
    let (nn, d) = (set.len(), set[0].len());
    let (p, q) = (nn * k, nn * k + k);
    let idx = |a: &Multiindex| set.iter().position(|x| x == a);
    let neg_s: Vec<Poly<Rat>> = (0..d).map(|l| -&Poly::var(d, l)).collect();
    let a = PolyMatrix::from_fn(p, p, d, |row, col| {
        let (ra, ri, ca, ci) = (row / k, row % k, col / k, col % k);
        if ri != ci {
            return Poly::zero(d);
        }
        match set[ra].checked_sub(&set[ca]) {
            Some(beta) if idx(&set[ca]).is_some() => monomial_over_factorial(&beta).compose(&neg_s),
            _ => Poly::zero(d),
        }
    });
    let b = PolyMatrix::from_fn(q, q, d, |row, col| {
        if row == col {
            Poly::one(d)
        } else if col >= p && row < p && row % k == col - p {
            -&monomial_over_factorial(&set[row / k])
        } else {
            Poly::zero(d)
        }
    });
    let z: Vec<Poly<Rat>> = (0..d).map(|l| Poly::var(2 * d, d + l)).collect();
    let pm = PolyMatrix::from_fn(p, q, 2 * d, |row, col| {
        if col < p {
            lift_s(a.get(row, col), d)
        } else if row % k == col - p {
            -&monomial_over_factorial(&set[row / k]).compose(&z)
        } else {
            Poly::zero(2 * d)
        }
    });
    RadonDecomposition { a, b, p: pm }
}

/// Type 2 with r_α(u) = (−1)^{|α|−1}∇(u^α/α!): B = [I, −r(t); 0, I_d], A[α][α−β] = s^β/β! for
/// |α−β| ≥ 2, and A·M·B = [A(s) | (−1)^{|α|}∇(z^α/α!)] with z = t − s.
pub fn type2_decomposition(set: &[Multiindex]) -> RadonDecomposition {
    let set = graded(set);
    let (nn, d) = (set.len(), set[0].len());
    let sign = |a: &Multiindex| if a.order() % 2 == 1 { Rat::one() } else { -Rat::one() };
    let r = |a: &Multiindex, l: usize| monomial_over_factorial(a).derivative(l).scale(&sign(a));
    let a = PolyMatrix::from_fn(nn, nn, d, |row, col| match set[row].checked_sub(&set[col]) {
        Some(beta) if set[col].order() >= 2 => monomial_over_factorial(&beta),
        _ => Poly::zero(d),
    });
    let b = PolyMatrix::from_fn(nn + d, nn + d, d, |row, col| {
        if row == col {
            Poly::one(d)
        } else if row < nn && col >= nn {
            -&r(&set[row], col - nn)
        } else {
            Poly::zero(d)
        }
    });
    let z: Vec<Poly<Rat>> = (0..d).map(|l| Poly::var(2 * d, d + l)).collect();
    let pm = PolyMatrix::from_fn(nn, nn + d, 2 * d, |row, col| {
        if col < nn {
            lift_s(a.get(row, col), d)
        } else {
            let alpha = &set[row];
            let s = if alpha.order().is_multiple_of(2) { Rat::one() } else { -Rat::one() };
            monomial_over_factorial(alpha).derivative(col - nn).compose(&z).scale(&s)
        }
    });
    RadonDecomposition { a, b, p: pm }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadonViolation {
    pub entry: [usize; 2],
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadonVerifyReport {
    pub pass: bool,
    pub det_a: bool,
    pub det_b: bool,
    pub violations: Vec<RadonViolation>,
}

/// With M = M(x₀, s): det A ≡ det B ≡ 1, and every ∂_s^α∂_t^β with |α|+|β| ≤ deg P_ij kills
/// F = A(s)M(s)B(t) − P(s, t−s) on t = s (deg of a zero entry of P is the largest degree in P).
pub fn verify_radon_decomposition(prob: &RadonProblem, x0: &[Rat], dec: &RadonDecomposition) -> Result<RadonVerifyReport> {
    let d = prob.d();
    let t0 = vec![Rat::zero(); d];
    let m = incidence_at(prob, x0, &t0)?;
    let (p, q) = (m.p(), m.q());
    if dec.a.p() != p || dec.a.q() != p || dec.b.p() != q || dec.b.q() != q || dec.p.p() != p || dec.p.q() != q {
        return Err(Error::Shape(format!("witness shapes do not match the {p}x{q} incidence matrix")));
    }
    if dec.a.d() != d || dec.b.d() != d || dec.p.d() != 2 * d {
        return Err(Error::Dimension("witnesses must be in d variables and P in (s, z)".into()));
    }
    let det_a = poly_is_one(&dec.a.det()?);
    let det_b = poly_is_one(&dec.b.det()?);
    let am = dec.a.matmul(&m)?.map_entries(|_, _, e| e.embed(2 * d, 0));
    let bt = dec.b.map_entries(|_, _, e| e.embed(2 * d, d));
    // P(s, t − s) in the variables (s, t)
    let to_st: Vec<Poly<Rat>> = (0..d).map(|l| Poly::var(2 * d, l)).chain((0..d).map(|l| &Poly::var(2 * d, d + l) - &Poly::var(2 * d, l))).collect();
    let f = am.matmul(&bt)?.sub(&dec.p.compose(&to_st))?;
    let z_degree = |e: &Poly<Rat>| e.terms().map(|(a, _)| a.entries()[d..].iter().sum::<u32>()).max();
    let max_deg = dec.p.entries().iter().filter_map(z_degree).max().unwrap_or(0);
    let diag: Vec<Poly<Rat>> = (0..2 * d).map(|l| Poly::var(d, l % d)).collect();
    let mut violations = Vec::new();
    for i in 0..p {
        for j in 0..q {
            let entry = f.get(i, j);
            if entry.is_zero() {
                continue;
            }
            let deg = z_degree(dec.p.get(i, j)).unwrap_or(max_deg);
            for ab in Multiindex::all_up_to(2 * d, deg) {
                if !entry.partial_derivative(&ab).compose(&diag).is_zero() {
                    let (alpha, beta) = ab.split(d);
                    violations.push(RadonViolation { entry: [i, j], alpha: alpha.entries().to_vec(), beta: beta.entries().to_vec() });
                }
            }
        }
    }
    Ok(RadonVerifyReport { pass: det_a && det_b && violations.is_empty(), det_a, det_b, violations })
}

/// Pretty names (x1.., t1..) for a problem's variables.
pub fn variable_names(prob: &RadonProblem) -> Vec<String> {
    let mut names = default_names("x", prob.n);
    names.extend(default_names("t", prob.d()));
    names
}
