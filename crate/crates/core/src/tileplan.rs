//! Convex combinations of tile points [σ]_𝒯 hitting (p⁻¹1; q⁻¹1; σ), and the resulting
//! sublevel exponent τ = 1/(pσ).

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::blockdecomp::{useful_tiles, BlockDecomposition, Tile, TileMapper};
use crate::error::{invalid, Error, Result};
use crate::gitnorm::{sigma_interval, sparse_criterion};
use crate::lp::{Lp, LpOutcome, Relation};
use crate::polycore::json::{rat_from_json, rat_to_json, RatJson};
use crate::scalar::{rat_int, Rat};

/// [σ]_𝒯 in group-indexed coordinates: 1_I/p_I over row groups, 1_J/q_J over column groups, σ.
#[derive(Clone, Debug, PartialEq)]
pub struct TilePoint {
    pub tile: Tile,
    pub sigma: Rat,
    pub rows: Vec<Rat>,
    pub cols: Vec<Rat>,
}

impl TilePoint {
    /// (rows; cols; σ).
    pub fn coords(&self) -> Vec<Rat> {
        self.rows.iter().chain(&self.cols).cloned().chain(std::iter::once(self.sigma.clone())).collect()
    }
}

pub fn tile_point(dec: &BlockDecomposition, tile: &Tile, sigma: &Rat) -> TilePoint {
    let pi = rat_int(tile.p_of(dec) as i64);
    let qj = rat_int(tile.q_of(dec) as i64);
    let rows = (0..=dec.m_star()).map(|i| if (tile.rows.0..=tile.rows.1).contains(&i) { Rat::one() / pi.clone() } else { Rat::zero() }).collect();
    let cols = (0..=dec.m()).map(|j| if (tile.cols.0..=tile.cols.1).contains(&j) { Rat::one() / qj.clone() } else { Rat::zero() }).collect();
    TilePoint { tile: *tile, sigma: sigma.clone(), rows, cols }
}

/// How the free σ of the target is fixed.
#[derive(Clone, Debug, PartialEq)]
pub enum SigmaChoice {
    Pinned(Rat),
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TilePlan {
    pub points: Vec<TilePoint>,
    pub theta: Vec<Rat>,
    pub sigma: Rat,
    pub tau: Rat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanTileJson {
    pub rows: [usize; 2],
    pub cols: [usize; 2],
    pub sigma: RatJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanJson {
    pub theta: Vec<RatJson>,
    pub sigma: RatJson,
    pub tau: RatJson,
    pub tiles: Vec<PlanTileJson>,
}

impl TilePlan {
    /// Σθᵢ[σᵢ]_{𝒯ᵢ} − (p⁻¹1; q⁻¹1; σ), exactly.
    pub fn residual(&self, p: usize, q: usize) -> Vec<Rat> {
        let len = self.points.first().map_or(0, |pt| pt.coords().len());
        let mut acc = vec![Rat::zero(); len];
        for (th, pt) in self.theta.iter().zip(&self.points) {
            for (a, c) in acc.iter_mut().zip(pt.coords()) {
                *a += th.clone() * c;
            }
        }
        let tgt = target(&self.points[0], p, q, &self.sigma);
        acc.into_iter().zip(tgt).map(|(a, t)| a - t).collect()
    }

    pub fn to_json_value(&self) -> Result<PlanJson> {
        Ok(PlanJson {
            theta: self.theta.iter().map(rat_to_json).collect::<Result<_>>()?,
            sigma: rat_to_json(&self.sigma)?,
            tau: rat_to_json(&self.tau)?,
            tiles: self
                .points
                .iter()
                .map(|pt| Ok(PlanTileJson { rows: [pt.tile.rows.0, pt.tile.rows.1], cols: [pt.tile.cols.0, pt.tile.cols.1], sigma: rat_to_json(&pt.sigma)? }))
                .collect::<Result<_>>()?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value()?)?)
    }
}

/// Parses the tile list of a plan file back into (tile, σ) pairs.
pub fn tiles_from_json(v: &PlanJson) -> Result<Vec<(Tile, Rat)>> {
    v.tiles
        .iter()
        .enumerate()
        .map(|(k, t)| Ok((Tile::new((t.rows[0], t.rows[1]), (t.cols[0], t.cols[1])), rat_from_json(&t.sigma, &format!("$.tiles[{k}].sigma"))?)))
        .collect()
}

fn target(shape: &TilePoint, p: usize, q: usize, sigma: &Rat) -> Vec<Rat> {
    let (ip, iq) = (Rat::one() / rat_int(p as i64), Rat::one() / rat_int(q as i64));
    shape.rows.iter().map(|_| ip.clone()).chain(shape.cols.iter().map(|_| iq.clone())).chain(std::iter::once(sigma.clone())).collect()
}

/// Feasibility LP over θ ≥ 0, Σθ = 1 with row/column coordinates pinned to the target; the σ
/// coordinate Σθᵢσᵢ is pinned, maximised or minimised, then θ is made the lexicographically
/// least optimal vertex. `None` when infeasible.
pub fn solve_plan(points: &[TilePoint], p: usize, q: usize, choice: &SigmaChoice) -> Result<Option<TilePlan>> {
    let Some(first) = points.first() else { return Err(invalid("$.tiles", "at least one tile point is required")) };
    if points.iter().any(|pt| pt.rows.len() != first.rows.len() || pt.cols.len() != first.cols.len()) {
        return Err(Error::Shape("tile points come from different block grids".into()));
    }
    if p == 0 || q == 0 {
        return Err(Error::Shape("p and q must be positive".into()));
    }
    let k = points.len();
    let tgt = target(first, p, q, &Rat::zero());
    let coords: Vec<Vec<Rat>> = points.iter().map(|pt| pt.coords()).collect();
    let sig_row: Vec<Rat> = points.iter().map(|pt| pt.sigma.clone()).collect();
    let base = || {
        let mut lp = Lp::new(k);
        for c in 0..tgt.len() - 1 {
            lp.constrain(coords.iter().map(|v| v[c].clone()).collect(), Relation::Eq, tgt[c].clone());
        }
        lp.constrain(vec![Rat::one(); k], Relation::Eq, Rat::one());
        lp
    };
    let sigma = match choice {
        SigmaChoice::Pinned(s) => s.clone(),
        SigmaChoice::Max | SigmaChoice::Min => {
            let mut lp = base();
            if *choice == SigmaChoice::Max {
                lp.maximize(sig_row.clone());
            } else {
                lp.minimize(sig_row.clone());
            }
            match lp.solve() {
                LpOutcome::Optimal { value, .. } => value,
                _ => return Ok(None),
            }
        }
    };
    let mut lp = base();
    lp.constrain(sig_row, Relation::Eq, sigma.clone());
    let mut theta = Vec::with_capacity(k);
    for l in 0..k {
        let mut obj = vec![Rat::zero(); k];
        obj[l] = Rat::one();
        lp.minimize(obj.clone());
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => {
                lp.constrain(obj, Relation::Eq, value.clone());
                theta.push(value);
            }
            _ => return Ok(None),
        }
    }
    if sigma.is_zero() {
        return Err(Error::Constraint("the feasible plan has σ = 0, so τ = 1/(pσ) is undefined".into()));
    }
    let tau = Rat::one() / (rat_int(p as i64) * sigma.clone());
    Ok(Some(TilePlan { points: points.to_vec(), theta, sigma, tau }))
}

/// Tile points for every useful tile whose map at t₀ is certified positive by the sparse
/// criterion at an endpoint of its feasible σ interval.
pub fn certified_tile_points(mapper: &TileMapper, t0: &[Rat]) -> Result<Vec<TilePoint>> {
    let mut out = Vec::new();
    for tile in useful_tiles(&mapper.dec) {
        let pm = mapper.at(&tile, t0)?;
        let Some((lo, hi)) = sigma_interval(&pm.support_set()) else { continue };
        let mut sigmas = vec![lo];
        if hi != sigmas[0] {
            sigmas.push(hi);
        }
        for s in sigmas {
            if sparse_criterion(&pm, &s).positive {
                out.push(tile_point(&mapper.dec, &tile, &s));
            }
        }
    }
    Ok(out)
}

/// [min σ, max σ] over all feasible θ.
pub fn feasible_sigma(points: &[TilePoint], p: usize, q: usize) -> Result<Option<(Rat, Rat)>> {
    let lo = solve_plan(points, p, q, &SigmaChoice::Min);
    let hi = solve_plan(points, p, q, &SigmaChoice::Max);
    match (lo, hi) {
        (Ok(Some(a)), Ok(Some(b))) => Ok(Some((a.sigma, b.sigma))),
        (Ok(None), _) | (_, Ok(None)) => Ok(None),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}
