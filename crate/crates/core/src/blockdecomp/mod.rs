//! Block decompositions of polynomial incidence matrices: elimination witnesses A(s), B(t),
//! formal degrees of vanishing along the diagonal t = s, verification, kernel parametrisation
//! and tile maps.
//!
//! Internally the diagonal coordinate is z = t − s, and the reduced product
//! R(s, z) = A(s)·M(s)·B(s + z) lives in 2d variables ordered (s, z).

mod degrees;
mod eliminate;
mod kernel;
mod tiles;
mod verify;

pub use degrees::{infer_groups, lowest_z_terms, vanishing_degrees, z_order, VanishingDegrees};
pub use eliminate::{decompose, derivative_closure, eliminate, eliminate_general, Elimination, Route};
pub use kernel::{parametrize_kernel, parametrize_kernel_with_minor, KernelParam};
pub use tiles::{invariance_certificate, tile_map, useful_tiles, Tile, TileMapper};
pub use verify::{verify_block_decomposition, VerifyReport, Violation};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::polycore::json::PolyMatrixJson;
use crate::polycore::{Poly, PolyMatrix};
use crate::scalar::Rat;

/// Consecutive row groups p₀..p_{m*}, column groups q₀..q_m, formal degrees D and the
/// unimodular witnesses A(s) (p×p) and B(t) (q×q).
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDecomposition {
    pub row_groups: Vec<usize>,
    pub col_groups: Vec<usize>,
    pub degrees: Vec<Vec<u32>>,
    pub a: PolyMatrix<Rat>,
    pub b: PolyMatrix<Rat>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub row_groups: Vec<usize>,
    pub col_groups: Vec<usize>,
    #[serde(rename = "D")]
    pub degrees: Vec<Vec<u32>>,
    #[serde(rename = "A")]
    pub a: PolyMatrixJson,
    #[serde(rename = "B")]
    pub b: PolyMatrixJson,
}

fn offsets(groups: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(groups.len() + 1);
    out.push(0);
    for g in groups {
        out.push(out[out.len() - 1] + g);
    }
    out
}

impl BlockDecomposition {
    /// Checks group sums, the shape of D and the sizes of A and B against p×q.
    pub fn new(row_groups: Vec<usize>, col_groups: Vec<usize>, degrees: Vec<Vec<u32>>, a: PolyMatrix<Rat>, b: PolyMatrix<Rat>) -> Result<Self> {
        let dec = BlockDecomposition { row_groups, col_groups, degrees, a, b };
        dec.check_shape()?;
        Ok(dec)
    }

    fn check_shape(&self) -> Result<()> {
        if self.row_groups.contains(&0) || self.col_groups.contains(&0) {
            return Err(invalid("$.row_groups", "groups must be nonempty"));
        }
        if self.degrees.len() != self.row_groups.len() || self.degrees.iter().any(|r| r.len() != self.col_groups.len()) {
            return Err(invalid("$.D", format!("expected a {}x{} table", self.row_groups.len(), self.col_groups.len())));
        }
        let (p, q) = (self.p(), self.q());
        if self.a.p() != p || self.a.q() != p {
            return Err(invalid("$.A", format!("expected {p}x{p}, found {}x{}", self.a.p(), self.a.q())));
        }
        if self.b.p() != q || self.b.q() != q {
            return Err(invalid("$.B", format!("expected {q}x{q}, found {}x{}", self.b.p(), self.b.q())));
        }
        if self.a.d() != self.b.d() {
            return Err(Error::Dimension(format!("A has d = {}, B has d = {}", self.a.d(), self.b.d())));
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.row_groups.iter().sum()
    }

    pub fn q(&self) -> usize {
        self.col_groups.iter().sum()
    }

    pub fn d(&self) -> usize {
        self.a.d()
    }

    /// Index m* of the last row group.
    pub fn m_star(&self) -> usize {
        self.row_groups.len() - 1
    }

    /// Index m of the last column group.
    pub fn m(&self) -> usize {
        self.col_groups.len() - 1
    }

    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        let o = offsets(&self.row_groups);
        o[i]..o[i + 1]
    }

    pub fn col_range(&self, j: usize) -> std::ops::Range<usize> {
        let o = offsets(&self.col_groups);
        o[j]..o[j + 1]
    }

    /// Row group containing row r.
    pub fn row_group_of(&self, r: usize) -> usize {
        (0..self.row_groups.len()).find(|&i| self.row_range(i).contains(&r)).expect("row in range")
    }

    pub fn col_group_of(&self, c: usize) -> usize {
        (0..self.col_groups.len()).find(|&j| self.col_range(j).contains(&c)).expect("column in range")
    }

    /// D nondecreasing along rows and columns; returns the offending adjacent pairs.
    pub fn monotonicity_failures(&self) -> Vec<((usize, usize), (usize, usize))> {
        let mut out = Vec::new();
        for i in 0..self.degrees.len() {
            for j in 0..self.degrees[i].len() {
                if i + 1 < self.degrees.len() && self.degrees[i + 1][j] < self.degrees[i][j] {
                    out.push(((i, j), (i + 1, j)));
                }
                if j + 1 < self.degrees[i].len() && self.degrees[i][j + 1] < self.degrees[i][j] {
                    out.push(((i, j), (i, j + 1)));
                }
            }
        }
        out
    }

    pub fn to_json_value(&self) -> Result<DecompositionJson> {
        Ok(DecompositionJson {
            row_groups: self.row_groups.clone(),
            col_groups: self.col_groups.clone(),
            degrees: self.degrees.clone(),
            a: self.a.to_json_value()?,
            b: self.b.to_json_value()?,
        })
    }

    pub fn from_json_value(v: &DecompositionJson, path: &str) -> Result<Self> {
        let a = PolyMatrix::from_json_value(&v.a, &format!("{path}.A"))?;
        let b = PolyMatrix::from_json_value(&v.b, &format!("{path}.B"))?;
        BlockDecomposition::new(v.row_groups.clone(), v.col_groups.clone(), v.degrees.clone(), a, b)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value()?)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: DecompositionJson = serde_json::from_str(s)?;
        Self::from_json_value(&v, "$")
    }

    /// Same groups and witnesses with a different degree table.
    pub fn with_degrees(&self, degrees: Vec<Vec<u32>>) -> Result<Self> {
        BlockDecomposition::new(self.row_groups.clone(), self.col_groups.clone(), degrees, self.a.clone(), self.b.clone())
    }
}

/// An incidence matrix with proposed witnesses and groups; the degree table is read off the
/// reduced product rather than supplied.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessedMatrix {
    pub m: PolyMatrix<Rat>,
    pub row_groups: Vec<usize>,
    pub col_groups: Vec<usize>,
    pub a: PolyMatrix<Rat>,
    pub b: PolyMatrix<Rat>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessedMatrixJson {
    #[serde(rename = "M")]
    pub m: PolyMatrixJson,
    pub row_groups: Vec<usize>,
    pub col_groups: Vec<usize>,
    #[serde(rename = "A")]
    pub a: PolyMatrixJson,
    #[serde(rename = "B")]
    pub b: PolyMatrixJson,
}

impl WitnessedMatrix {
    /// D from the reduced product A(s)M(s)B(s + z) with the given groups.
    pub fn decomposition(&self) -> Result<(BlockDecomposition, VanishingDegrees)> {
        let r = reduced_product(&self.m, &self.a, &self.b)?;
        if r.p() != self.row_groups.iter().sum::<usize>() || r.q() != self.col_groups.iter().sum::<usize>() {
            return Err(Error::Shape(format!("groups do not partition the {}x{} matrix", r.p(), r.q())));
        }
        let v = vanishing_degrees(&r, &self.row_groups, &self.col_groups);
        let dec = BlockDecomposition::new(self.row_groups.clone(), self.col_groups.clone(), v.degrees.clone(), self.a.clone(), self.b.clone())?;
        Ok((dec, v))
    }

    pub fn to_json_value(&self) -> Result<WitnessedMatrixJson> {
        Ok(WitnessedMatrixJson {
            m: self.m.to_json_value()?,
            row_groups: self.row_groups.clone(),
            col_groups: self.col_groups.clone(),
            a: self.a.to_json_value()?,
            b: self.b.to_json_value()?,
        })
    }

    pub fn from_json_value(v: &WitnessedMatrixJson) -> Result<Self> {
        let w = WitnessedMatrix {
            m: PolyMatrix::from_json_value(&v.m, "$.M")?,
            row_groups: v.row_groups.clone(),
            col_groups: v.col_groups.clone(),
            a: PolyMatrix::from_json_value(&v.a, "$.A")?,
            b: PolyMatrix::from_json_value(&v.b, "$.B")?,
        };
        w.decomposition()?;
        Ok(w)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value()?)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(s)?)
    }
}

/// s ↦ (s, ·): embeds a polynomial in s into the (s, z) ring.
pub(crate) fn embed_s(p: &Poly<Rat>) -> Poly<Rat> {
    p.embed(2 * p.dim(), 0)
}

/// t ↦ s + z in the (s, z) ring.
pub(crate) fn shift_subs(d: usize) -> Vec<Poly<Rat>> {
    (0..d).map(|k| &Poly::var(2 * d, k) + &Poly::var(2 * d, d + k)).collect()
}

/// R(s, z) = A(s)·M(s)·B(s + z) in the (s, z) ring.
pub fn reduced_product(m: &PolyMatrix<Rat>, a: &PolyMatrix<Rat>, b: &PolyMatrix<Rat>) -> Result<PolyMatrix<Rat>> {
    let d = m.d();
    if a.d() != d || b.d() != d {
        return Err(Error::Dimension(format!("M has d = {d}, A has d = {}, B has d = {}", a.d(), b.d())));
    }
    let subs = shift_subs(d);
    let am = a.matmul(m)?;
    let am2 = am.map_entries(|_, _, e| embed_s(e));
    let b2 = b.compose(&subs);
    am2.matmul(&b2)
}

/// Negates the variables at positions `from..` (z ↦ −z), converting between the internal
/// z = t − s and displays written with z = s − t.
pub fn reflect_z(pm: &PolyMatrix<Rat>, from: usize) -> PolyMatrix<Rat> {
    pm.map_entries(|_, _, e| {
        Poly::from_terms(
            e.dim(),
            e.terms().map(|(a, c)| {
                let deg: u32 = a.entries()[from..].iter().sum();
                (a.clone(), if deg % 2 == 1 { -c.clone() } else { c.clone() })
            }),
        )
    })
}
