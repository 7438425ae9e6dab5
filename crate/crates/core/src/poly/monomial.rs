use std::cmp::Ordering;
use std::fmt;

use super::{PolyError, RingSpec, Var};

/// An exponent vector over `x_1..x_n, y_1..y_{n+1}`, stored flat in that
/// variable order.
///
/// The ordering is graded lexicographic: total degree first, then exponents
/// compared variable by variable with `x_1` most significant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Box<[u32]>,
}

impl Monomial {
    pub fn one(ring: RingSpec) -> Self {
        Monomial { exps: vec![0; ring.nvars()].into_boxed_slice() }
    }

    pub fn var(ring: RingSpec, v: Var) -> Self {
        let mut m = Self::one(ring);
        m.exps[ring.index(v)] = 1;
        m
    }

    pub fn from_parts(ring: RingSpec, x: &[u32], y: &[u32]) -> Result<Self, PolyError> {
        if x.len() != ring.n() || y.len() != ring.n() + 1 {
            return Err(PolyError::ExponentLength { n: ring.n(), x: x.len(), y: y.len() });
        }
        let exps: Vec<u32> = x.iter().chain(y).copied().collect();
        Ok(Monomial { exps: exps.into_boxed_slice() })
    }

    /// Build from a flat exponent slice of length `2n+1`.
    pub fn from_exps(exps: &[u32]) -> Self {
        Monomial { exps: exps.into() }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, idx: usize) -> u32 {
        self.exps[idx]
    }

    pub fn set_exp(&mut self, idx: usize, e: u32) {
        self.exps[idx] = e;
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn n(&self) -> usize {
        (self.exps.len() - 1) / 2
    }

    pub fn x_exps(&self) -> &[u32] {
        &self.exps[..self.n()]
    }

    pub fn y_exps(&self) -> &[u32] {
        &self.exps[self.n()..]
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn y_degree(&self) -> u32 {
        self.y_exps().iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        let exps: Vec<u32> = self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect();
        Monomial { exps: exps.into_boxed_slice() }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let exps: Vec<u32> = other.exps.iter().zip(self.exps.iter()).map(|(a, b)| a - b).collect();
        Some(Monomial { exps: exps.into_boxed_slice() })
    }

    /// `[a_2/2] + ... + [a_n/2] - (b_1 + ... + b_n)`. Neither `x_1` nor
    /// `y_{n+1}` contributes.
    pub fn tau(&self) -> i64 {
        let n = self.n();
        let halves: i64 = self.exps[1..n].iter().map(|&a| i64::from(a / 2)).sum();
        let ys: i64 = self.exps[n..2 * n].iter().map(|&b| i64::from(b)).sum();
        halves - ys
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        let mut first = true;
        for (idx, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            let (c, i) = if idx < n { ('x', idx + 1) } else { ('y', idx - n + 1) };
            write!(f, "{c}{i}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}
