//! Two-phase dense tableau simplex over exact rationals with Bland's anti-cycling rule.

use num_traits::{One, Signed, Zero};

use crate::scalar::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<(&[Rat], &Rat)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, value)),
            _ => None,
        }
    }
}

/// Linear program `min/max cᵀx` over nonnegative or free variables.
#[derive(Clone, Debug)]
pub struct Lp {
    n: usize,
    free: Vec<bool>,
    rows: Vec<(Vec<Rat>, Relation, Rat)>,
    objective: Vec<Rat>,
    maximize: bool,
}

impl Lp {
    /// `n` variables, all nonnegative by default.
    pub fn new(n: usize) -> Self {
        Lp { n, free: vec![false; n], rows: Vec::new(), objective: vec![Rat::zero(); n], maximize: false }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) -> &mut Self {
        assert_eq!(coeffs.len(), self.n, "constraint length must equal the variable count");
        self.rows.push((coeffs, rel, rhs));
        self
    }

    /// Sparse form of `constrain`.
    pub fn constrain_sparse(&mut self, coeffs: &[(usize, Rat)], rel: Relation, rhs: Rat) -> &mut Self {
        let mut row = vec![Rat::zero(); self.n];
        for (k, v) in coeffs {
            row[*k] = &row[*k] + v;
        }
        self.constrain(row, rel, rhs)
    }

    /// lo ≤ x_var ≤ hi.
    pub fn bound(&mut self, var: usize, lo: Option<Rat>, hi: Option<Rat>) -> &mut Self {
        if let Some(l) = lo {
            self.constrain_sparse(&[(var, Rat::one())], Relation::Ge, l);
        }
        if let Some(h) = hi {
            self.constrain_sparse(&[(var, Rat::one())], Relation::Le, h);
        }
        self
    }

    pub fn minimize(&mut self, c: Vec<Rat>) -> &mut Self {
        assert_eq!(c.len(), self.n);
        self.objective = c;
        self.maximize = false;
        self
    }

    pub fn maximize(&mut self, c: Vec<Rat>) -> &mut Self {
        assert_eq!(c.len(), self.n);
        self.objective = c;
        self.maximize = true;
        self
    }

    pub fn solve(&self) -> LpOutcome {
        // column layout: for each original variable its + part, then − parts of free variables, then slacks
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(self.n);
        let mut next = self.n;
        for v in 0..self.n {
            if self.free[v] {
                col_of.push((v, Some(next)));
                next += 1;
            } else {
                col_of.push((v, None));
            }
        }
        let n_struct = next;
        let n_slack = self.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let m = self.rows.len();
        let n_real = n_struct + n_slack;
        let n_total = n_real + m;

        let mut a = vec![vec![Rat::zero(); n_total + 1]; m];
        let mut slack = n_struct;
        for (i, (coeffs, rel, rhs)) in self.rows.iter().enumerate() {
            for (v, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (pos, neg) = col_of[v];
                a[i][pos] = c.clone();
                if let Some(nc) = neg {
                    a[i][nc] = -c.clone();
                }
            }
            match rel {
                Relation::Le => {
                    a[i][slack] = Rat::one();
                    slack += 1;
                }
                Relation::Ge => {
                    a[i][slack] = -Rat::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            a[i][n_total] = rhs.clone();
            if rhs.is_negative() {
                for v in a[i].iter_mut() {
                    *v = -v.clone();
                }
            }
            a[i][n_real + i] = Rat::one();
        }
        let mut basis: Vec<usize> = (0..m).map(|i| n_real + i).collect();

        // phase 1: minimise the sum of artificials
        let mut cost = vec![Rat::zero(); n_total];
        for c in cost.iter_mut().skip(n_real) {
            *c = Rat::one();
        }
        let allowed: Vec<bool> = vec![true; n_total];
        if !run_simplex(&mut a, &mut basis, &cost, &allowed) {
            unreachable!("phase 1 is bounded below by zero");
        }
        let phase1: Rat = basis.iter().enumerate().filter(|(_, &b)| b >= n_real).map(|(i, _)| a[i][n_total].clone()).sum();
        if phase1.is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive zero-level artificials out of the basis; drop redundant rows
        let mut i = 0;
        while i < a.len() {
            if basis[i] >= n_real {
                if let Some(col) = (0..n_real).find(|&j| !a[i][j].is_zero()) {
                    pivot(&mut a, &mut basis, i, col);
                } else {
                    a.remove(i);
                    basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }

        // phase 2
        let mut cost2 = vec![Rat::zero(); n_total];
        for (v, c) in self.objective.iter().enumerate() {
            let c = if self.maximize { -c.clone() } else { c.clone() };
            let (pos, neg) = col_of[v];
            cost2[pos] = c.clone();
            if let Some(nc) = neg {
                cost2[nc] = -c;
            }
        }
        let allowed2: Vec<bool> = (0..n_total).map(|j| j < n_real).collect();
        if !run_simplex(&mut a, &mut basis, &cost2, &allowed2) {
            return LpOutcome::Unbounded;
        }
        let mut col_val = vec![Rat::zero(); n_total];
        for (i, &b) in basis.iter().enumerate() {
            col_val[b] = a[i][n_total].clone();
        }
        let x: Vec<Rat> = col_of
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(nc) => &col_val[pos] - &col_val[nc],
                None => col_val[pos].clone(),
            })
            .collect();
        let value = self.objective.iter().zip(&x).fold(Rat::zero(), |acc, (c, v)| acc + c * v);
        LpOutcome::Optimal { x, value }
    }
}

fn pivot(a: &mut [Vec<Rat>], basis: &mut [usize], row: usize, col: usize) {
    let inv = Rat::one() / &a[row][col];
    for v in a[row].iter_mut() {
        *v = &*v * &inv;
    }
    let prow = a[row].clone();
    for (i, r) in a.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col].clone();
        if f.is_zero() {
            continue;
        }
        for (v, p) in r.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v = &*v - &(&f * p);
            }
        }
    }
    basis[row] = col;
}

/// Minimises `cost` from the current basic feasible solution; false when unbounded.
fn run_simplex(a: &mut [Vec<Rat>], basis: &mut [usize], cost: &[Rat], allowed: &[bool]) -> bool {
    let n = cost.len();
    loop {
        // reduced costs c_j − c_Bᵀ a_j; Bland: smallest improving index enters
        let mut entering = None;
        for j in 0..n {
            if !allowed[j] || basis.contains(&j) {
                continue;
            }
            let mut rc = cost[j].clone();
            for (i, &b) in basis.iter().enumerate() {
                if !cost[b].is_zero() && !a[i][j].is_zero() {
                    rc -= &cost[b] * &a[i][j];
                }
            }
            if rc.is_negative() {
                entering = Some(j);
                break;
            }
        }
        let Some(col) = entering else { return true };
        // ratio test, ties broken by smallest basic index
        let mut best: Option<(usize, Rat)> = None;
        for (i, row) in a.iter().enumerate() {
            if row[col].is_positive() {
                let ratio = &row[n] / &row[col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = best else { return false };
        pivot(a, basis, row, col);
    }
}
