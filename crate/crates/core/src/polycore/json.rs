//! Interchange format: rationals as {"num","den"}, polynomials as graded-lex term lists.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{Multiindex, Poly, PolyMatrix};
use crate::error::{invalid, Error, Result};
use crate::scalar::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatJson {
    pub num: i64,
    pub den: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub alpha: Vec<u32>,
    pub num: i64,
    pub den: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyMatrixJson {
    pub p: usize,
    pub q: usize,
    pub d: usize,
    pub entries: Vec<Vec<Vec<TermJson>>>,
}

fn small(v: &BigInt, what: &str) -> Result<i64> {
    v.to_i64().ok_or_else(|| Error::Constraint(format!("{what} {v} exceeds the 64-bit interchange range")))
}

pub fn rat_to_json(r: &Rat) -> Result<RatJson> {
    Ok(RatJson { num: small(r.numer(), "numerator")?, den: small(r.denom(), "denominator")? })
}

pub fn rat_from_json(r: &RatJson, path: &str) -> Result<Rat> {
    if r.den == 0 {
        return Err(invalid(path, "zero denominator"));
    }
    Ok(Rat::new(BigInt::from(r.num), BigInt::from(r.den)))
}

pub fn poly_to_json(p: &Poly<Rat>) -> Result<Vec<TermJson>> {
    p.terms()
        .map(|(a, c)| Ok(TermJson { alpha: a.entries().to_vec(), num: small(c.numer(), "numerator")?, den: small(c.denom(), "denominator")? }))
        .collect()
}

pub fn poly_from_json(terms: &[TermJson], dim: usize, path: &str) -> Result<Poly<Rat>> {
    let mut out = Vec::with_capacity(terms.len());
    for (k, t) in terms.iter().enumerate() {
        let here = format!("{path}[{k}]");
        if t.alpha.len() != dim {
            return Err(invalid(&here, format!("alpha has length {}, expected {dim}", t.alpha.len())));
        }
        if t.den == 0 {
            return Err(invalid(&here, "zero denominator"));
        }
        let c = Rat::new(BigInt::from(t.num), BigInt::from(t.den));
        out.push((Multiindex::new(t.alpha.clone()), c));
    }
    Ok(Poly::from_terms(dim, out))
}

impl PolyMatrix<Rat> {
    pub fn to_json_value(&self) -> Result<PolyMatrixJson> {
        let mut rows = Vec::with_capacity(self.p());
        for i in 0..self.p() {
            let mut row = Vec::with_capacity(self.q());
            for j in 0..self.q() {
                row.push(poly_to_json(self.get(i, j))?);
            }
            rows.push(row);
        }
        Ok(PolyMatrixJson { p: self.p(), q: self.q(), d: self.d(), entries: rows })
    }

    pub fn from_json_value(v: &PolyMatrixJson, path: &str) -> Result<Self> {
        if v.entries.len() != v.p {
            return Err(invalid(format!("{path}.entries"), format!("expected {} rows, found {}", v.p, v.entries.len())));
        }
        let mut entries = Vec::with_capacity(v.p * v.q);
        for (i, row) in v.entries.iter().enumerate() {
            if row.len() != v.q {
                return Err(invalid(format!("{path}.entries[{i}]"), format!("expected {} columns, found {}", v.q, row.len())));
            }
            for (j, cell) in row.iter().enumerate() {
                entries.push(poly_from_json(cell, v.d, &format!("{path}.entries[{i}][{j}]"))?);
            }
        }
        PolyMatrix::new(v.p, v.q, v.d, entries)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value()?)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: PolyMatrixJson = serde_json::from_str(s)?;
        Self::from_json_value(&v, "$")
    }
}

/// Rationals that must be nonnegative, e.g. σ.
pub fn nonneg(r: &Rat, path: &str) -> Result<()> {
    if r.is_negative() {
        return Err(invalid(path, "must be nonnegative"));
    }
    Ok(())
}
