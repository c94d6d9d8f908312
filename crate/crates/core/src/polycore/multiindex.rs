use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

/// Exponent vector α with graded-lexicographic order (total degree first, then entries).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Multiindex(Vec<u32>);

impl Multiindex {
    pub fn new(entries: Vec<u32>) -> Self {
        Multiindex(entries)
    }

    pub fn zero(d: usize) -> Self {
        Multiindex(vec![0; d])
    }

    pub fn unit(d: usize, k: usize) -> Self {
        let mut v = vec![0; d];
        v[k] = 1;
        Multiindex(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// |α|
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// α! as an exact integer.
    pub fn factorial(&self) -> BigInt {
        let mut f = BigInt::one();
        for &a in &self.0 {
            for k in 2..=a {
                f *= k;
            }
        }
        f
    }

    pub fn factorial_f64(&self) -> f64 {
        self.0.iter().map(|&a| (2..=a).map(|k| k as f64).product::<f64>()).product()
    }

    pub fn add(&self, other: &Multiindex) -> Multiindex {
        Multiindex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// α − β when β ≤ α componentwise.
    pub fn checked_sub(&self, other: &Multiindex) -> Option<Multiindex> {
        let mut v = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            v.push(a.checked_sub(*b)?);
        }
        Some(Multiindex(v))
    }

    pub fn divides(&self, other: &Multiindex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Concatenation (α; β), used for (s, z) variable blocks.
    pub fn concat(&self, other: &Multiindex) -> Multiindex {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Multiindex(v)
    }

    pub fn split(&self, at: usize) -> (Multiindex, Multiindex) {
        (Multiindex(self.0[..at].to_vec()), Multiindex(self.0[at..].to_vec()))
    }

    /// All multiindices of dimension `d` with |α| ≤ `max_order`, in graded-lex order.
    pub fn all_up_to(d: usize, max_order: u32) -> Vec<Multiindex> {
        let mut out = Vec::new();
        for n in 0..=max_order {
            out.extend(Self::all_of_order(d, n));
        }
        out
    }

    /// All multiindices of dimension `d` with |α| = `n`, ascending.
    pub fn all_of_order(d: usize, n: u32) -> Vec<Multiindex> {
        fn rec(d: usize, n: u32, prefix: &mut Vec<u32>, out: &mut Vec<Multiindex>) {
            if prefix.len() + 1 == d {
                prefix.push(n);
                out.push(Multiindex(prefix.clone()));
                prefix.pop();
                return;
            }
            for a in 0..=n {
                prefix.push(a);
                rec(d, n - a, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if d == 0 {
            if n == 0 {
                out.push(Multiindex(vec![]));
            }
            return out;
        }
        rec(d, n, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl Ord for Multiindex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Multiindex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Multiindex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for Multiindex {
    fn from(v: Vec<u32>) -> Self {
        Multiindex(v)
    }
}

impl<const N: usize> From<[u32; N]> for Multiindex {
    fn from(v: [u32; N]) -> Self {
        Multiindex(v.to_vec())
    }
}
