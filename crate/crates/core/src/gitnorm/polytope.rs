//! Exact Newton-polytope decisions: membership of the balanced barycenter, one-parameter
//! destabilisers (Hilbert–Mumford), and the sparse positivity criterion.

use num_traits::{One, Signed, Zero};

use super::LogWeights;
use crate::error::{Error, Result};
use crate::lp::{min_norm_point, Lp, LpOutcome, Relation};
use crate::polycore::{Multiindex, PolyMatrix, SupportSet};
use crate::scalar::{rat_abs, Rat};

/// w·(e^i; e^j; α − σ1) for triple `idx`.
pub fn pairing(e: &SupportSet, idx: usize, w: &LogWeights<Rat>, sigma: &Rat) -> Rat {
    let t = &e.triples[idx];
    let mut s = &w.w_p[t.i] + &w.w_q[t.j];
    for (k, &a) in t.alpha.entries().iter().enumerate() {
        s += &w.w_d[k] * (Rat::from_integer(a.into()) - sigma);
    }
    s
}

/// Coefficient row of the pairing functional of triple `idx` (length p+q+d).
fn pairing_row(e: &SupportSet, idx: usize, sigma: &Rat) -> Vec<Rat> {
    let t = &e.triples[idx];
    let mut row = vec![Rat::zero(); e.p + e.q + e.d];
    row[t.i] = Rat::one();
    row[e.p + t.j] = Rat::one();
    for (k, &a) in t.alpha.entries().iter().enumerate() {
        row[e.p + e.q + k] = Rat::from_integer(a.into()) - sigma;
    }
    row
}

fn block_sum_row(n: usize, start: usize, len: usize) -> Vec<Rat> {
    let mut r = vec![Rat::zero(); n];
    for v in r.iter_mut().skip(start).take(len) {
        *v = Rat::one();
    }
    r
}

/// The balanced barycenter (p⁻¹1_p; q⁻¹1_q; σ1_d).
fn target(e: &SupportSet, sigma: &Rat) -> Vec<Rat> {
    let mut t = vec![Rat::zero(); e.p + e.q + e.d];
    for v in t.iter_mut().take(e.p) {
        *v = Rat::new(1.into(), (e.p as i64).into());
    }
    for v in t.iter_mut().skip(e.p).take(e.q) {
        *v = Rat::new(1.into(), (e.q as i64).into());
    }
    for v in t.iter_mut().skip(e.p + e.q) {
        *v = sigma.clone();
    }
    t
}

/// θ ≥ 0 with Σθ = 1 and Σθ_e point_e = target; extra trailing variables for the caller.
fn barycentric_lp(e: &SupportSet, sigma: &Rat, extra: usize) -> Lp {
    let n = e.len();
    let mut lp = Lp::new(n + extra);
    let points: Vec<Vec<Rat>> = (0..n).map(|k| e.point(k)).collect();
    let tgt = target(e, sigma);
    for (c, tv) in tgt.iter().enumerate() {
        let mut row: Vec<Rat> = points.iter().map(|pt| pt[c].clone()).collect();
        row.extend(std::iter::repeat_n(Rat::zero(), extra));
        lp.constrain(row, Relation::Eq, tv.clone());
    }
    let mut ones = vec![Rat::one(); n];
    ones.extend(std::iter::repeat_n(Rat::zero(), extra));
    lp.constrain(ones, Relation::Eq, Rat::one());
    lp
}

/// One-parameter destabiliser: every pairing is ≤ −margin.
#[derive(Clone, Debug, PartialEq)]
pub struct Destabilizer {
    /// Direction scaled to ‖w‖∞ = 1 (zero for the empty support).
    pub w: LogWeights<Rat>,
    /// min over the support of −w·(e^i;e^j;α−σ1).
    pub margin: Rat,
    /// Optimal margin of the max-margin program over ‖w‖∞ ≤ 1.
    pub lp_margin: Rat,
}

impl Destabilizer {
    /// Exact re-verification against a support set.
    pub fn verify(&self, e: &SupportSet, sigma: &Rat) -> bool {
        let traceless = self.w.w_p.iter().sum::<Rat>().is_zero() && self.w.w_q.iter().sum::<Rat>().is_zero();
        traceless && self.margin.is_positive() && (0..e.len()).all(|k| pairing(e, k, &self.w, sigma) <= -self.margin.clone())
    }
}

/// Max-margin LP: max m s.t. pairing_e(w) + m ≤ 0, Σw_p = Σw_q = 0, ‖w‖∞ ≤ 1 (+ optional Σw_d = 0).
fn max_margin(e: &SupportSet, sigma: &Rat, pin_d: bool) -> Option<(Vec<Rat>, Rat)> {
    let n = e.p + e.q + e.d;
    let mut lp = Lp::new(n + 1);
    for v in 0..=n {
        lp.set_free(v);
    }
    for k in 0..e.len() {
        let mut row = pairing_row(e, k, sigma);
        row.push(Rat::one());
        lp.constrain(row, Relation::Le, Rat::zero());
    }
    let mut trace = |start, len| {
        let mut r = block_sum_row(n, start, len);
        r.push(Rat::zero());
        lp.constrain(r, Relation::Eq, Rat::zero());
    };
    trace(0, e.p);
    trace(e.p, e.q);
    if pin_d {
        trace(e.p + e.q, e.d);
    }
    for v in 0..n {
        lp.bound(v, Some(-Rat::one()), Some(Rat::one()));
    }
    let mut obj = vec![Rat::zero(); n + 1];
    obj[n] = Rat::one();
    lp.maximize(obj);
    match lp.solve() {
        LpOutcome::Optimal { x, value } if value.is_positive() => Some((x[..n].to_vec(), value)),
        _ => None,
    }
}

/// Exact destabiliser search. Existence and the optimal margin come from the max-margin LP;
/// the reported direction is the minimum-norm point of {pairings ≤ −1, traceless}, preferring
/// Σw_d = 0 when that face is feasible, rescaled to ‖w‖∞ = 1.
pub fn find_destabilizer(e: &SupportSet, sigma: &Rat) -> Option<Destabilizer> {
    let (p, q, d) = (e.p, e.q, e.d);
    if e.is_empty() {
        return Some(Destabilizer { w: LogWeights::zeros(p, q, d), margin: Rat::one(), lp_margin: Rat::one() });
    }
    let (w_lp, m) = max_margin(e, sigma, false)?;
    let n = p + q + d;
    let g: Vec<Vec<Rat>> = (0..e.len()).map(|k| pairing_row(e, k, sigma)).collect();
    let h = vec![-Rat::one(); e.len()];
    let mut eqs = vec![block_sum_row(n, 0, p), block_sum_row(n, p, q)];
    let (start, eqs) = match max_margin(e, sigma, true) {
        Some((w2, m2)) => {
            eqs.push(block_sum_row(n, p + q, d));
            (w2.iter().map(|x| x / &m2).collect::<Vec<_>>(), eqs)
        }
        None => (w_lp.iter().map(|x| x / &m).collect(), eqs),
    };
    let dir = min_norm_point(&g, &h, &eqs, &start, 500).unwrap_or(start);
    let scale = dir.iter().map(rat_abs).max().expect("nonempty direction");
    let w = LogWeights::from_flat(&dir.iter().map(|x| x / &scale).collect::<Vec<_>>(), p, q, d);
    let margin = (0..e.len()).map(|k| -pairing(e, k, &w, sigma)).min().expect("nonempty support");
    Some(Destabilizer { w, margin, lp_margin: m })
}

/// Outcome of the membership test with its certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// Barycentric coefficients in support order.
    pub theta: Option<Vec<Rat>>,
    pub separator: Option<Destabilizer>,
}

/// Decides (p⁻¹1_p; q⁻¹1_q; σ1_d) ∈ conv{(e^i;e^j;α)} by exact LP; a failure is certified by a
/// separating destabiliser, and the two routes are required to agree.
pub fn polytope_membership(e: &SupportSet, sigma: &Rat) -> Result<Membership> {
    if e.is_empty() {
        return Ok(Membership { member: false, theta: None, separator: find_destabilizer(e, sigma) });
    }
    let lp = barycentric_lp(e, sigma, 0);
    let theta = match lp.solve() {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    };
    let separator = find_destabilizer(e, sigma);
    match (&theta, &separator) {
        (Some(_), None) => Ok(Membership { member: true, theta, separator: None }),
        (None, Some(_)) => Ok(Membership { member: false, theta: None, separator }),
        _ => Err(Error::Constraint("membership LP and separation LP disagree".into())),
    }
}

/// Feasible σ range [min, max] for which the barycenter lies in the hull (σ free in the LP).
pub fn sigma_interval(e: &SupportSet) -> Option<(Rat, Rat)> {
    if e.is_empty() {
        return None;
    }
    let n = e.len();
    // variables θ_1..θ_n, σ (free); the σ rows read Σθ_e α_k − σ = 0
    let mut lp = Lp::new(n + 1);
    lp.set_free(n);
    let points: Vec<Vec<Rat>> = (0..n).map(|k| e.point(k)).collect();
    let tgt = target(e, &Rat::zero());
    for (c, tv) in tgt.iter().enumerate() {
        let mut row: Vec<Rat> = points.iter().map(|pt| pt[c].clone()).collect();
        row.push(if c >= e.p + e.q { -Rat::one() } else { Rat::zero() });
        lp.constrain(row, Relation::Eq, tv.clone());
    }
    let mut ones = vec![Rat::one(); n];
    ones.push(Rat::zero());
    lp.constrain(ones, Relation::Eq, Rat::one());
    let mut obj = vec![Rat::zero(); n + 1];
    obj[n] = Rat::one();
    lp.minimize(obj.clone());
    let lo = lp.solve().optimal()?.1.clone();
    lp.maximize(obj);
    let hi = lp.solve().optimal()?.1.clone();
    Some((lo, hi))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaEntry {
    pub i: usize,
    pub j: usize,
    pub alpha: Multiindex,
    pub theta: Rat,
}

/// Sparse positivity verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVerdict {
    pub applicable: bool,
    pub positive: bool,
    pub theta: Vec<ThetaEntry>,
    pub strictly_positive_theta: bool,
}

/// At most one nonzero per row and per column of each constant matrix ∂^αP(0).
fn hypothesis_one(pm: &PolyMatrix<Rat>) -> bool {
    let e = pm.support_set();
    let mut by_alpha: std::collections::BTreeMap<&Multiindex, Vec<(usize, usize)>> = Default::default();
    for t in &e.triples {
        by_alpha.entry(&t.alpha).or_default().push((t.i, t.j));
    }
    by_alpha.values().all(|cells| {
        let mut rows = std::collections::BTreeSet::new();
        let mut cols = std::collections::BTreeSet::new();
        cells.iter().all(|&(i, j)| rows.insert(i) && cols.insert(j))
    })
}

/// No two support multiindices of one entry differ by e^k − e^{k'}.
fn hypothesis_two(pm: &PolyMatrix<Rat>) -> bool {
    pm.entries().iter().all(|entry| {
        let alphas: Vec<&Multiindex> = entry.terms().map(|(a, _)| a).collect();
        alphas.iter().enumerate().all(|(x, a)| {
            alphas[x + 1..].iter().all(|b| {
                let diff: Vec<i64> = a.entries().iter().zip(b.entries()).map(|(&u, &v)| u as i64 - v as i64).collect();
                let plus = diff.iter().filter(|&&v| v == 1).count();
                let minus = diff.iter().filter(|&&v| v == -1).count();
                let zero = diff.iter().filter(|&&v| v == 0).count();
                !(plus == 1 && minus == 1 && zero == diff.len() - 2)
            })
        })
    })
}

/// Sparse criterion: if the support is sparse (hypotheses 1–2), positivity holds iff the
/// barycenter is a convex combination θ of support points; θ is taken from the LP that
/// maximises min θ_e, so `strictly_positive_theta` reports whether a fully interior θ exists.
pub fn sparse_criterion(pm: &PolyMatrix<Rat>, sigma: &Rat) -> SparseVerdict {
    let applicable = hypothesis_one(pm) && hypothesis_two(pm);
    let none = SparseVerdict { applicable, positive: false, theta: vec![], strictly_positive_theta: false };
    let e = pm.support_set();
    if !applicable || e.is_empty() {
        return none;
    }
    let n = e.len();
    let mut lp = barycentric_lp(&e, sigma, 1);
    lp.set_free(n);
    for k in 0..n {
        lp.constrain_sparse(&[(k, Rat::one()), (n, -Rat::one())], Relation::Ge, Rat::zero());
    }
    let mut obj = vec![Rat::zero(); n + 1];
    obj[n] = Rat::one();
    lp.maximize(obj);
    let LpOutcome::Optimal { x, value } = lp.solve() else { return none };
    let theta = e
        .triples
        .iter()
        .zip(&x)
        .map(|(t, th)| ThetaEntry { i: t.i, j: t.j, alpha: t.alpha.clone(), theta: th.clone() })
        .collect();
    SparseVerdict { applicable, positive: true, theta, strictly_positive_theta: value.is_positive() }
}
