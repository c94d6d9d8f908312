use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};



use super::Multiindex;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{Rat, Scalar};

/// Sparse polynomial in `dim` variables; no stored coefficient is zero (or negligible, in floats).
#[derive(Clone, PartialEq)]
pub struct Poly<T> {
    dim: usize,
    terms: BTreeMap<Multiindex, T>,
}

impl<T: Scalar> Poly<T> {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        Self::monomial(Multiindex::zero(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, T::one())
    }

    pub fn monomial(alpha: Multiindex, c: T) -> Self {
        let dim = alpha.len();
        let mut terms = BTreeMap::new();
        terms.insert(alpha, c);
        Self::from_map(dim, terms)
    }

    /// The coordinate function z_k.
    pub fn var(dim: usize, k: usize) -> Self {
        Self::monomial(Multiindex::unit(dim, k), T::one())
    }

    /// Sums duplicate exponents and prunes zeros.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Multiindex, T)>) -> Self {
        let mut map: BTreeMap<Multiindex, T> = BTreeMap::new();
        for (a, c) in terms {
            assert_eq!(a.len(), dim, "multiindex length must equal the variable count");
            match map.get_mut(&a) {
                Some(v) => *v = v.clone() + c,
                None => {
                    map.insert(a, c);
                }
            }
        }
        Self::from_map(dim, map)
    }

    fn from_map(dim: usize, mut terms: BTreeMap<Multiindex, T>) -> Self {
        let scale = if T::EXACT { 0.0 } else { terms.values().map(|c| c.abs_f64()).fold(0.0, f64::max) };
        terms.retain(|_, c| !c.negligible(scale));
        Poly { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Multiindex, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &Multiindex) -> T {
        self.terms.get(alpha).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; −1 for the zero polynomial.
    pub fn degree(&self) -> i32 {
        self.terms.keys().map(|a| a.order() as i32).max().unwrap_or(-1)
    }

    /// Lowest total degree of a stored term (order of vanishing at the origin).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.order()).min()
    }

    pub fn is_constant(&self) -> bool {
        self.degree() <= 0
    }

    /// Constant term.
    pub fn constant_term(&self) -> T {
        self.coeff(&Multiindex::zero(self.dim))
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_map(self.dim, self.terms.iter().map(|(a, v)| (a.clone(), v.clone() * c.clone())).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.dim);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// ∂/∂z_k
    pub fn derivative(&self, k: usize) -> Self {
        let terms = self.terms.iter().filter(|(a, _)| a.entries()[k] > 0).map(|(a, c)| {
            let mut e = a.entries().to_vec();
            let m = e[k];
            e[k] -= 1;
            (Multiindex::new(e), c.clone() * T::from_i64(m as i64))
        });
        Self::from_terms(self.dim, terms)
    }

    /// ∂^α
    pub fn partial_derivative(&self, alpha: &Multiindex) -> Self {
        assert_eq!(alpha.len(), self.dim);
        let terms = self.terms.iter().filter_map(|(a, c)| {
            let rest = a.checked_sub(alpha)?;
            let mut factor = T::one();
            for (&ak, &bk) in a.entries().iter().zip(alpha.entries()) {
                for m in 0..bk {
                    factor = factor * T::from_i64((ak - m) as i64);
                }
            }
            Some((rest, c.clone() * factor))
        });
        Self::from_terms(self.dim, terms)
    }

    /// ∂^α P(0) = α!·c_α.
    pub fn taylor_coeff(&self, alpha: &Multiindex) -> T {
        let c = self.coeff(alpha);
        if c.is_zero() {
            return c;
        }
        c * T::from_rat(&Rat::from_integer(alpha.factorial()))
    }

    /// Double-precision evaluation.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dim {
            return Err(Error::Dimension(format!("point has length {}, polynomial has {} variables", point.len(), self.dim)));
        }
        Ok(self
            .terms
            .iter()
            .map(|(a, c)| c.to_f64() * a.entries().iter().zip(point).map(|(&e, &x)| x.powi(e as i32)).product::<f64>())
            .sum())
    }

    /// Evaluation in the coefficient field.
    pub fn eval_exact(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.dim);
        let mut acc = T::zero();
        for (a, c) in &self.terms {
            let mut m = c.clone();
            for (&e, x) in a.entries().iter().zip(point) {
                for _ in 0..e {
                    m = m * x.clone();
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Substitutes polynomial `subs[k]` for variable k; all substitutes share one dimension.
    pub fn compose(&self, subs: &[Poly<T>]) -> Poly<T> {
        assert_eq!(subs.len(), self.dim, "one substitute per variable");
        let out_dim = subs.first().map(|s| s.dim).unwrap_or(0);
        let mut powers: Vec<Vec<Poly<T>>> = subs.iter().map(|s| vec![Poly::one(s.dim)]).collect();
        let mut acc = Poly::zero(out_dim);
        for (a, c) in &self.terms {
            let mut term = Poly::constant(out_dim, c.clone());
            for (k, &e) in a.entries().iter().enumerate() {
                while powers[k].len() <= e as usize {
                    let next = &powers[k][powers[k].len() - 1] * &subs[k];
                    powers[k].push(next);
                }
                if e > 0 {
                    term = &term * &powers[k][e as usize];
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// z ↦ P(Cᵀz).
    pub fn substitute_linear(&self, c: &Mat<T>) -> Poly<T> {
        assert!(c.rows() == self.dim && c.cols() == self.dim, "substitution matrix must be d×d");
        let subs: Vec<Poly<T>> = (0..self.dim)
            .map(|k| Poly::from_terms(self.dim, (0..self.dim).map(|l| (Multiindex::unit(self.dim, l), c[(l, k)].clone()))))
            .collect();
        self.compose(&subs)
    }

    /// z ↦ P(s₀ + z).
    pub fn diagonal_shift(&self, s0: &[T]) -> Poly<T> {
        assert_eq!(s0.len(), self.dim);
        let subs: Vec<Poly<T>> = (0..self.dim).map(|k| &Poly::var(self.dim, k) + &Poly::constant(self.dim, s0[k].clone())).collect();
        self.compose(&subs)
    }

    /// Terms of total degree exactly n.
    pub fn homogeneous_part(&self, n: u32) -> Poly<T> {
        Poly { dim: self.dim, terms: self.terms.iter().filter(|(a, _)| a.order() == n).map(|(a, c)| (a.clone(), c.clone())).collect() }
    }

    /// Terms whose exponent satisfies `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Multiindex) -> bool) -> Poly<T> {
        Poly { dim: self.dim, terms: self.terms.iter().filter(|(a, _)| keep(a)).map(|(a, c)| (a.clone(), c.clone())).collect() }
    }

    /// Places the variables at positions offset..offset+dim of a `new_dim`-variable ring.
    pub fn embed(&self, new_dim: usize, offset: usize) -> Poly<T> {
        assert!(offset + self.dim <= new_dim);
        let terms = self.terms.iter().map(|(a, c)| {
            let mut e = vec![0; new_dim];
            e[offset..offset + self.dim].copy_from_slice(a.entries());
            (Multiindex::new(e), c.clone())
        });
        Poly::from_terms(new_dim, terms)
    }

    /// Splits a polynomial in (u, v) with u of length `at` into v-monomials with u-polynomial coefficients.
    pub fn split_vars(&self, at: usize) -> BTreeMap<Multiindex, Poly<T>> {
        let mut out: BTreeMap<Multiindex, Vec<(Multiindex, T)>> = BTreeMap::new();
        for (a, c) in &self.terms {
            let (u, v) = a.split(at);
            out.entry(v).or_default().push((u, c.clone()));
        }
        out.into_iter().map(|(v, ts)| (v, Poly::from_terms(at, ts))).collect()
    }

    /// Rebuilds from a split representation (inverse of `split_vars`).
    pub fn join_vars(at: usize, rest: usize, parts: &BTreeMap<Multiindex, Poly<T>>) -> Poly<T> {
        let mut terms = Vec::new();
        for (v, p) in parts {
            for (u, c) in p.terms() {
                terms.push((u.concat(v), c.clone()));
            }
        }
        Poly::from_terms(at + rest, terms)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::from_terms(self.dim, self.terms.iter().map(|(a, c)| (a.clone(), f(c))))
    }

    pub fn to_f64(&self) -> Poly<f64> {
        self.map(|c| c.to_f64())
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    /// Exact division by a divisor that is known to divide; `None` if a nonzero remainder appears.
    pub fn div_exact(&self, divisor: &Poly<T>) -> Option<Poly<T>> {
        let (lead_a, lead_c) = divisor.terms.iter().next_back()?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.dim);
        let mut guard = 0usize;
        while let Some((a, c)) = rem.terms.iter().next_back().map(|(a, c)| (a.clone(), c.clone())) {
            let shift = a.checked_sub(lead_a)?;
            let factor = Poly::monomial(shift, c / lead_c.clone());
            rem = &rem - &(&factor * divisor);
            quot = &quot + &factor;
            guard += 1;
            if guard > 1_000_000 {
                return None;
            }
        }
        Some(quot)
    }

    /// Renders with the given variable names.
    pub fn render_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (a, c)) in self.terms.iter().enumerate() {
            let mut mono = Vec::new();
            for (k, &e) in a.entries().iter().enumerate() {
                match e {
                    0 => {}
                    1 => mono.push(names[k].clone()),
                    _ => mono.push(format!("{}^{}", names[k], e)),
                }
            }
            let cs = c.render();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, cs),
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mono.is_empty() {
                out.push_str(&mag);
            } else {
                if mag != "1" {
                    out.push_str(&mag);
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

pub fn default_names(prefix: &str, d: usize) -> Vec<String> {
    (1..=d).map(|k| format!("{prefix}{k}")).collect()
}

impl<T: Scalar> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_with(&default_names("z", self.dim)))
    }
}

impl<T: Scalar> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.dim, self)
    }
}

impl<T: Scalar> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        assert_eq!(self.dim, rhs.dim, "variable count mismatch");
        let mut terms = self.terms.clone();
        for (a, c) in &rhs.terms {
            match terms.get_mut(a) {
                Some(v) => *v = v.clone() + c.clone(),
                None => {
                    terms.insert(a.clone(), c.clone());
                }
            }
        }
        Poly::from_map(self.dim, terms)
    }
}

impl<T: Scalar> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly { dim: self.dim, terms: self.terms.iter().map(|(a, c)| (a.clone(), -c.clone())).collect() }
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        assert_eq!(self.dim, rhs.dim, "variable count mismatch");
        let mut terms: BTreeMap<Multiindex, T> = BTreeMap::new();
        for (a, c) in &self.terms {
            for (b, e) in &rhs.terms {
                let k = a.add(b);
                let v = c.clone() * e.clone();
                match terms.get_mut(&k) {
                    Some(x) => *x = x.clone() + v,
                    None => {
                        terms.insert(k, v);
                    }
                }
            }
        }
        Poly::from_map(self.dim, terms)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for Poly<T> {
            type Output = Poly<T>;
            fn $m(self, rhs: Poly<T>) -> Poly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl<T: Scalar> Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        -&self
    }
}

/// Polynomial ring elements as `Zero`/`One` need a fixed dimension, so these helpers stand in.
pub fn poly_is_one<T: Scalar>(p: &Poly<T>) -> bool {
    p.num_terms() == 1 && p.constant_term().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn z(d: usize, k: usize) -> Poly<Rat> {
        Poly::var(d, k)
    }
    fn c(d: usize, v: Rat) -> Poly<Rat> {
        Poly::constant(d, v)
    }

    #[test]
    fn eval_examples() {
        let p = &z(2, 0).pow(2) + &z(2, 1);
        assert_eq!(p.eval(&[2.0, 3.0]).unwrap(), 7.0);
        assert_eq!(Poly::<Rat>::zero(2).eval(&[5.0, -1.0]).unwrap(), 0.0);
        assert_eq!((&z(2, 0) * &z(2, 1)).eval(&[1.0, 1.0]).unwrap(), 1.0);
        assert!(p.eval(&[1.0]).is_err());
    }

    #[test]
    fn derivative_examples() {
        let p = &z(2, 0).pow(2) * &z(2, 1);
        assert_eq!(p.partial_derivative(&Multiindex::from([2, 0])), c(2, rat_int(2)) * z(2, 1));
        assert!(z(2, 0).pow(2).partial_derivative(&Multiindex::from([0, 2])).is_zero());
        assert_eq!((&z(2, 0) * &z(2, 1)).partial_derivative(&Multiindex::from([1, 1])), Poly::one(2));
    }

    #[test]
    fn taylor_coefficient_is_factorial_times_coefficient() {
        let p = Poly::monomial(Multiindex::from([3, 2]), rat(5, 7));
        let alpha = Multiindex::from([3, 2]);
        assert_eq!(p.taylor_coeff(&alpha), rat(5, 7) * rat_int(12));
        assert_eq!(p.partial_derivative(&alpha).constant_term(), p.taylor_coeff(&alpha));
    }

    #[test]
    fn substitution_examples() {
        let p = z(2, 0).pow(2);
        let cm = Mat::from_rows(vec![vec![rat_int(2), rat_int(0)], vec![rat_int(0), rat_int(1)]]);
        assert_eq!(p.substitute_linear(&cm), c(2, rat_int(4)) * z(2, 0).pow(2));
        // 90° rotation: (Cᵀz)_1 = C_11 z_1 + C_21 z_2 = z_2
        let rot = Mat::from_rows(vec![vec![rat_int(0), rat_int(-1)], vec![rat_int(1), rat_int(0)]]);
        assert_eq!(z(2, 0).substitute_linear(&rot), z(2, 1));
        let q = &z(2, 0) * &z(2, 1);
        assert_eq!(q.substitute_linear(&Mat::identity(2)), q);
    }

    #[test]
    fn shift_examples() {
        let a = rat(3, 5);
        let p = c(1, rat(1, 2)) * z(1, 0).pow(2);
        let expect = &(&c(1, a.clone() * a.clone() / rat_int(2)) + &(c(1, a.clone()) * z(1, 0))) + &(c(1, rat(1, 2)) * z(1, 0).pow(2));
        assert_eq!(p.diagonal_shift(&[a]), expect);
        assert_eq!(p.diagonal_shift(&[rat_int(0)]), p);
        let q = &z(2, 0) * &z(2, 1);
        let e = &(&(&Poly::one(2) + &z(2, 0)) + &z(2, 1)) + &q;
        assert_eq!(q.diagonal_shift(&[rat_int(1), rat_int(1)]), e);
    }

    #[test]
    fn exact_division() {
        let a = &z(2, 0) + &z(2, 1);
        let b = &z(2, 0) - &c(2, rat_int(3));
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert!(a.div_exact(&b).is_none());
    }

    #[test]
    fn float_pruning_is_relative() {
        let p = Poly::from_terms(1, vec![(Multiindex::from([0]), 1.0), (Multiindex::from([1]), 1e-16)]);
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn rendering() {
        let p = &(c(2, rat_int(-3)) * (&z(2, 0) * &z(2, 1))) + &z(2, 0).pow(2);
        assert_eq!(p.to_string(), "-3*z1*z2 + z1^2");
    }
}
