//! Exact minimum-norm point of a polyhedron {w : G w ≤ h, E w = 0} by a primal active-set method.

use num_traits::{Signed, Zero};

use crate::linalg::Mat;
use crate::scalar::Rat;

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| if x.is_zero() || y.is_zero() { acc } else { acc + x * y })
}

fn independent(rows: &[Vec<Rat>]) -> bool {
    rows.is_empty() || Mat::from_rows(rows.to_vec()).rank() == rows.len()
}

/// Minimises ‖w‖² over {G w ≤ h, E w = 0} starting from a feasible `start`.
///
/// Returns `None` if the iteration cap is reached (the caller keeps its feasible point).
pub fn min_norm_point(g: &[Vec<Rat>], h: &[Rat], e: &[Vec<Rat>], start: &[Rat], max_iter: usize) -> Option<Vec<Rat>> {
    let n = start.len();
    let mut w = start.to_vec();
    debug_assert!(g.iter().zip(h).all(|(r, b)| dot(r, &w) <= *b));
    debug_assert!(e.iter().all(|r| dot(r, &w).is_zero()));
    let eq: Vec<Vec<Rat>> = {
        // keep an independent subset of the equality rows
        let mut kept: Vec<Vec<Rat>> = Vec::new();
        for r in e {
            let mut trial = kept.clone();
            trial.push(r.clone());
            if independent(&trial) {
                kept = trial;
            }
        }
        kept
    };
    let mut working: Vec<usize> = Vec::new();
    for (i, r) in g.iter().enumerate() {
        if dot(r, &w) == h[i] {
            let mut rows = eq.clone();
            rows.extend(working.iter().map(|&k| g[k].clone()));
            rows.push(r.clone());
            if independent(&rows) {
                working.push(i);
            }
        }
    }
    for _ in 0..max_iter {
        // KKT: p + Σλ_i g_i + Σμ_k e_k = −w, g_i·p = 0, e_k·p = 0
        let nw = working.len();
        let ne = eq.len();
        let size = n + nw + ne;
        let mut kkt: Mat<Rat> = Mat::zeros(size, size);
        for k in 0..n {
            kkt[(k, k)] = Rat::from_integer(1.into());
        }
        for (c, &i) in working.iter().enumerate() {
            for k in 0..n {
                kkt[(k, n + c)] = g[i][k].clone();
                kkt[(n + c, k)] = g[i][k].clone();
            }
        }
        for (c, r) in eq.iter().enumerate() {
            for k in 0..n {
                kkt[(k, n + nw + c)] = r[k].clone();
                kkt[(n + nw + c, k)] = r[k].clone();
            }
        }
        let mut rhs = vec![Rat::zero(); size];
        for k in 0..n {
            rhs[k] = -w[k].clone();
        }
        let sol = kkt.solve(&rhs)?;
        let p = &sol[..n];
        if p.iter().all(|x| x.is_zero()) {
            let lambdas = &sol[n..n + nw];
            let worst = lambdas
                .iter()
                .enumerate()
                .filter(|(_, l)| l.is_negative())
                .min_by(|a, b| a.1.cmp(b.1).then(working[a.0].cmp(&working[b.0])));
            match worst {
                None => return Some(w),
                Some((pos, _)) => {
                    working.remove(pos);
                }
            }
            continue;
        }
        // step to the first blocking constraint
        let mut step = Rat::from_integer(1.into());
        let mut blocking: Option<usize> = None;
        for (i, r) in g.iter().enumerate() {
            if working.contains(&i) {
                continue;
            }
            let ap = dot(r, p);
            if ap.is_positive() {
                let t = (&h[i] - dot(r, &w)) / ap;
                if t < step || (t == step && blocking.is_some_and(|b| i < b)) {
                    step = t;
                    blocking = Some(i);
                }
            }
        }
        for k in 0..n {
            w[k] = &w[k] + &(&step * &p[k]);
        }
        if let Some(b) = blocking {
            working.push(b);
        }
    }
    None
}
