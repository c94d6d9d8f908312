//! Construction of the witnesses A(s), B(t): an exact exponential route for derivative-closed
//! matrices and a greedy Taylor reduction by elementary row and column operations otherwise.

use std::collections::BTreeSet;

use num_traits::One;

use super::degrees::{infer_groups, lowest_z_terms, vanishing_degrees, z_order, VanishingDegrees};
use super::{embed_s, reduced_product, shift_subs, BlockDecomposition};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::polycore::{Multiindex, Poly, PolyMatrix};
use crate::scalar::{rat_int, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// B(t) = exp(−Σ t_k L_k) from the closure operators.
    Closed,
    /// Greedy row and column reduction.
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Elimination {
    pub a: PolyMatrix<Rat>,
    pub b: PolyMatrix<Rat>,
    /// R(s, z) = A(s)·M(s)·B(s + z), variables (s, z).
    pub r: PolyMatrix<Rat>,
    pub route: Route,
}

/// Constant q×q matrices L_k with ∂_k M = M·L_k, or the first column whose derivative leaves
/// the constant column span.
pub fn derivative_closure(m: &PolyMatrix<Rat>) -> Result<Vec<Mat<Rat>>> {
    let (p, q, d) = (m.p(), m.q(), m.d());
    let mut monos: BTreeSet<Multiindex> = BTreeSet::new();
    for e in m.entries() {
        monos.extend(e.terms().map(|(a, _)| a.clone()));
    }
    let monos: Vec<Multiindex> = monos.into_iter().collect();
    // one equation per (row, monomial); derivatives only lower degrees, so the monomial set suffices
    let system = Mat::from_fn(p * monos.len(), q, |e, i| m.get(e / monos.len(), i).coeff(&monos[e % monos.len()]));
    let mut out = Vec::with_capacity(d);
    for k in 0..d {
        let mut l = Mat::zeros(q, q);
        for j in 0..q {
            let col: Vec<Poly<Rat>> = (0..p).map(|r| m.get(r, j).derivative(k)).collect();
            let rhs: Vec<Rat> = (0..p * monos.len()).map(|e| col[e / monos.len()].coeff(&monos[e % monos.len()])).collect();
            let covered = col.iter().all(|c| c.terms().all(|(a, _)| monos.binary_search(a).is_ok()));
            let x = if covered { system.solve(&rhs) } else { None };
            let Some(x) = x else { return Err(Error::NotDerivativeClosed { column: j }) };
            for (i, v) in x.into_iter().enumerate() {
                l[(i, j)] = v;
            }
        }
        out.push(l);
    }
    Ok(out)
}

/// Closed route: B(t) = exp(−Σ t_k L_k), A = I, so that R(s, z) = M(−z). Refuses matrices that
/// are not derivative-closed.
pub fn eliminate(m: &PolyMatrix<Rat>) -> Result<Elimination> {
    let (p, q, d) = (m.p(), m.q(), m.d());
    let ls = derivative_closure(m)?;
    let n = PolyMatrix::from_fn(q, q, d, |a, b| Poly::from_terms(d, (0..d).map(|k| (Multiindex::unit(d, k), -ls[k][(a, b)].clone()))));
    let mut b = PolyMatrix::identity(q, d);
    let mut pow = PolyMatrix::identity(q, d);
    for k in 1..=q.max(1) {
        pow = pow.matmul(&n)?.scale(&(Rat::one() / rat_int(k as i64)));
        if pow.is_zero() {
            break;
        }
        if k == q {
            return Err(Error::Elimination("closure operators are not nilpotent".into()));
        }
        b = b.add(&pow)?;
    }
    let a = PolyMatrix::identity(p, d);
    let r = reduced_product(m, &a, &b)?;
    let reflected: Vec<Poly<Rat>> = (0..d).map(|k| -Poly::var(2 * d, d + k)).collect();
    if r != m.compose(&reflected) {
        return Err(Error::Elimination("closure operators do not commute".into()));
    }
    Ok(Elimination { a, b, r, route: Route::Closed })
}

/// (order, count): least z-order (u32::MAX when zero) and the number of z-monomials there.
type Key = (u32, usize);

fn key_of<'a>(entries: impl Iterator<Item = &'a Poly<Rat>> + Clone, d: usize) -> Key {
    let order = entries.clone().filter_map(|e| z_order(e, d)).min().unwrap_or(u32::MAX);
    if order == u32::MAX {
        return (order, 0);
    }
    let count = entries.map(|e| lowest_z_terms(e, d).into_iter().filter(|(b, _)| b.order() == order).count()).sum();
    (order, count)
}

fn better(new: Key, old: Key) -> bool {
    new.0 > old.0 || (new.0 == old.0 && new.1 < old.1)
}

struct State {
    d: usize,
    a: PolyMatrix<Rat>,
    b: PolyMatrix<Rat>,
    r: PolyMatrix<Rat>,
    subs: Vec<Poly<Rat>>,
    ops: usize,
}

const MAX_OPS: usize = 2000;

impl State {
    fn col(&self, j: usize) -> Vec<Poly<Rat>> {
        (0..self.r.p()).map(|i| self.r.get(i, j).clone()).collect()
    }

    /// Tries col_j −= f(t)·col_c for every lowest term of column j and every pivot column;
    /// applies the first operation that improves the column key.
    fn reduce_column(&mut self, j: usize) -> bool {
        let d = self.d;
        let cur = self.col(j);
        let old = key_of(cur.iter(), d);
        if old.0 == u32::MAX {
            return false;
        }
        for (i, entry) in cur.iter().enumerate() {
            for (beta, g) in lowest_z_terms(entry, d) {
                if beta.order() != old.0 {
                    continue;
                }
                for c in (0..self.r.q()).filter(|&c| c != j) {
                    let Some(kappa) = self.r.get(i, c).split_vars(d).remove(&beta) else { continue };
                    if z_order(self.r.get(i, c), d) != Some(beta.order()) {
                        continue;
                    }
                    let Some(f) = g.div_exact(&kappa) else { continue };
                    let fs = f.compose(&self.subs);
                    let trial: Vec<Poly<Rat>> = (0..self.r.p()).map(|row| &cur[row] - &(&fs * self.r.get(row, c))).collect();
                    if better(key_of(trial.iter(), d), old) {
                        for (row, v) in trial.into_iter().enumerate() {
                            self.r.set(row, j, v);
                        }
                        for row in 0..self.b.p() {
                            let v = self.b.get(row, j) - &(&f * self.b.get(row, c));
                            self.b.set(row, j, v);
                        }
                        self.ops += 1;
                        return true;
                    }
                }
            }
        }
        false
    }

    fn row_keys(&self, row: &[Poly<Rat>], groups: &[std::ops::Range<usize>]) -> Vec<Key> {
        groups.iter().map(|g| key_of(row[g.clone()].iter(), self.d)).collect()
    }

    /// Tries row_i −= g(s)·row_r targeting the lowest terms of one column group at a time;
    /// orders may not drop in any group and the targeted group must improve.
    fn reduce_row(&mut self, i: usize, groups: &[std::ops::Range<usize>]) -> bool {
        let d = self.d;
        let cur: Vec<Poly<Rat>> = self.r.row(i).to_vec();
        let old = self.row_keys(&cur, groups);
        for (gi, g) in groups.iter().enumerate() {
            if old[gi].0 == u32::MAX {
                continue;
            }
            for col in g.clone() {
                for (beta, h) in lowest_z_terms(&cur[col], d) {
                    if beta.order() != old[gi].0 {
                        continue;
                    }
                    for r in (0..self.r.p()).filter(|&r| r != i) {
                        let Some(kappa) = self.r.get(r, col).split_vars(d).remove(&beta) else { continue };
                        let Some(f) = h.div_exact(&kappa) else { continue };
                        let fs = embed_s(&f);
                        let trial: Vec<Poly<Rat>> = cur.iter().zip(self.r.row(r)).map(|(x, y)| x - &(&fs * y)).collect();
                        let new = self.row_keys(&trial, groups);
                        let no_drop = new.iter().zip(&old).all(|(n, o)| n.0 >= o.0);
                        if no_drop && better(new[gi], old[gi]) {
                            for (c, v) in trial.into_iter().enumerate() {
                                self.r.set(i, c, v);
                            }
                            for c in 0..self.a.q() {
                                let v = self.a.get(i, c) - &(&f * self.a.get(r, c));
                                self.a.set(i, c, v);
                            }
                            self.ops += 1;
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Greedy elimination for arbitrary matrices. Columns are reduced left to right with
/// col_j −= f(t)·col_c, where f·κ cancels a lowest-order term g(s)z^β of column j against the
/// lowest-order term κ(s)z^β of a pivot column; then rows are reduced with row_i −= g(s)·row_r
/// within the column groups that the column orders induce. Every operation is elementary, so
/// det A = det B = 1 exactly.
pub fn eliminate_general(m: &PolyMatrix<Rat>) -> Result<Elimination> {
    let (p, q, d) = (m.p(), m.q(), m.d());
    let a = PolyMatrix::identity(p, d);
    let b = PolyMatrix::identity(q, d);
    let r = reduced_product(m, &a, &b)?;
    let mut st = State { d, a, b, r, subs: shift_subs(d), ops: 0 };
    loop {
        let mut changed = false;
        for j in 0..q {
            while st.ops < MAX_OPS && st.reduce_column(j) {
                changed = true;
            }
        }
        if !changed || st.ops >= MAX_OPS {
            break;
        }
    }
    let (_, col_groups) = infer_groups(&st.r);
    let mut groups = Vec::new();
    let mut o = 0;
    for g in col_groups {
        groups.push(o..o + g);
        o += g;
    }
    loop {
        let mut changed = false;
        for i in 0..p {
            while st.ops < MAX_OPS && st.reduce_row(i, &groups) {
                changed = true;
            }
        }
        if !changed || st.ops >= MAX_OPS {
            break;
        }
    }
    if st.ops >= MAX_OPS {
        return Err(Error::Elimination(format!("no fixed point after {MAX_OPS} operations")));
    }
    Ok(Elimination { a: st.a, b: st.b, r: st.r, route: Route::General })
}

/// Elimination (closed route when available), consecutive grouping inferred from the
/// reduced product, and formal degrees read off blockwise.
pub fn decompose(m: &PolyMatrix<Rat>) -> Result<(BlockDecomposition, Elimination, VanishingDegrees)> {
    let el = match eliminate(m) {
        Ok(el) => el,
        Err(Error::NotDerivativeClosed { .. }) | Err(Error::Elimination(_)) => eliminate_general(m)?,
        Err(e) => return Err(e),
    };
    let (row_groups, col_groups) = infer_groups(&el.r);
    let v = vanishing_degrees(&el.r, &row_groups, &col_groups);
    let dec = BlockDecomposition::new(row_groups, col_groups, v.degrees.clone(), el.a.clone(), el.b.clone())?;
    Ok((dec, el, v))
}
