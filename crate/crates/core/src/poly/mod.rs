//! Exact sparse polynomials in `k[x_1..x_n, y_1..y_{n+1}]`.
//!
//! A [`Polynomial`] is an immutable map from [`Monomial`] to nonzero
//! coefficient. The map is a `BTreeMap` keyed by the graded lexicographic
//! order, so iteration (and every serialized form) is canonical: two
//! polynomials are equal exactly when they print identically.

mod monomial;
mod parse;
mod weight;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::{ExactScalar, Scalar};

pub use monomial::Monomial;
pub use weight::WeightVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("ring mismatch: n = {left} vs n = {right}")]
    RingMismatch { left: usize, right: usize },
    #[error("invalid ring: n = {0} (need n >= 1)")]
    InvalidRing(usize),
    #[error("exponent vectors must have lengths n = {n} and n + 1, got {x} and {y}")]
    ExponentLength { n: usize, x: usize, y: usize },
    #[error("weight vector must have length {expected}, got {got}")]
    WeightLength { expected: usize, got: usize },
    #[error("x1^{j} slice has monomials with differing y1 exponents")]
    MixedY1Powers { j: u32 },
    #[error("polynomial contains y_(n+1)")]
    ContainsYLast,
    #[error("not divisible by x1^{k}")]
    NotDivisible { k: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

/// The ring `k[x_1..x_n, y_1..y_{n+1}]`, identified by `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingSpec {
    n: usize,
}

/// A ring variable, 1-based as in `x_1..x_n`, `y_1..y_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(usize),
    Y(usize),
}

impl RingSpec {
    pub fn new(n: usize) -> Result<Self, PolyError> {
        if n == 0 {
            return Err(PolyError::InvalidRing(n));
        }
        Ok(RingSpec { n })
    }

    pub fn n(self) -> usize {
        self.n
    }

    /// Number of variables, `2n + 1`.
    pub fn nvars(self) -> usize {
        2 * self.n + 1
    }

    /// Flat index of a variable. Panics when out of range.
    pub fn index(self, v: Var) -> usize {
        match v {
            Var::X(i) => {
                assert!((1..=self.n).contains(&i), "x_{i} out of range for n = {}", self.n);
                i - 1
            }
            Var::Y(j) => {
                assert!((1..=self.n + 1).contains(&j), "y_{j} out of range for n = {}", self.n);
                self.n + j - 1
            }
        }
    }

    pub fn var(self, idx: usize) -> Var {
        assert!(idx < self.nvars());
        if idx < self.n {
            Var::X(idx + 1)
        } else {
            Var::Y(idx - self.n + 1)
        }
    }

    pub fn vars(self) -> impl Iterator<Item = Var> {
        (0..self.nvars()).map(move |i| self.var(i))
    }

    pub fn x1(self) -> usize {
        0
    }

    pub fn y1(self) -> usize {
        self.n
    }

    pub fn y_last(self) -> usize {
        2 * self.n
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{i}"),
            Var::Y(j) => write!(f, "y{j}"),
        }
    }
}

/// One `x_1`-slice of a polynomial: `g = Σ x_1^j · y_1^q · h`.
#[derive(Debug, Clone, PartialEq)]
pub struct X1Slice<C> {
    pub j: u32,
    pub q: u32,
    pub h: Polynomial<C>,
}

#[derive(Clone, PartialEq)]
pub struct Polynomial<C> {
    ring: RingSpec,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Scalar> Polynomial<C> {
    pub fn zero(ring: RingSpec) -> Self {
        Polynomial { ring, terms: BTreeMap::new() }
    }

    pub fn one(ring: RingSpec) -> Self {
        Self::constant(ring, C::one())
    }

    pub fn constant(ring: RingSpec, c: C) -> Self {
        Self::term(ring, Monomial::one(ring), c)
    }

    pub fn term(ring: RingSpec, m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { ring, terms }
    }

    pub fn var(ring: RingSpec, v: Var) -> Self {
        Self::term(ring, Monomial::var(ring, v), C::one())
    }

    pub fn x(ring: RingSpec, i: usize) -> Self {
        Self::var(ring, Var::X(i))
    }

    pub fn y(ring: RingSpec, j: usize) -> Self {
        Self::var(ring, Var::Y(j))
    }

    /// Collects terms, summing duplicates and dropping zeros.
    pub fn from_terms<I>(ring: RingSpec, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut acc: BTreeMap<Monomial, C> = BTreeMap::new();
        for (m, c) in terms {
            if m.nvars() != ring.nvars() {
                return Err(PolyError::ExponentLength { n: ring.n, x: m.nvars(), y: 0 });
            }
            accumulate(&mut acc, m, c);
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Polynomial { ring, terms: acc })
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (descending) order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter().rev()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn var_degree(&self, v: Var) -> Option<u32> {
        let idx = self.ring.index(v);
        self.terms.keys().map(|m| m.exp(idx)).max()
    }

    /// Largest total `y`-degree of any term.
    pub fn y_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::y_degree).max()
    }

    /// True when no term involves a variable outside `allowed`.
    pub fn supported_on(&self, allowed: &[Var]) -> bool {
        let mask = self.ring.mask(allowed);
        self.terms.keys().all(|m| m.exps().iter().zip(&mask).all(|(&e, &ok)| ok || e == 0))
    }

    fn check_ring(&self, other: &Self) -> Result<(), PolyError> {
        if self.ring != other.ring {
            return Err(PolyError::RingMismatch { left: self.ring.n, right: other.ring.n });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), c.clone());
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Polynomial { ring: self.ring, terms })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), -c.clone());
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Polynomial { ring: self.ring, terms })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate(&mut terms, ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        terms.retain(|_, c: &mut C| !c.is_zero());
        Ok(Polynomial { ring: self.ring, terms })
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.ring);
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())).collect();
        Polynomial { ring: self.ring, terms }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        let terms = self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect();
        Polynomial { ring: self.ring, terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// The coefficient `g_i` of `y_{n+1}^i`, as a polynomial free of `y_{n+1}`.
    pub fn coeff_in_y_last(&self, i: u32) -> Self {
        let idx = self.ring.y_last();
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(idx) == i)
            .map(|(m, c)| {
                let mut m = m.clone();
                m.set_exp(idx, 0);
                (m, c.clone())
            })
            .collect();
        Polynomial { ring: self.ring, terms }
    }

    /// Writes a `y_{n+1}`-free polynomial as `Σ_j x_1^j · y_1^{q_j} · h_j`
    /// with each `h_j` free of `x_1` and `y_1`. Slices come in increasing `j`
    /// and zero slices are omitted.
    pub fn split_by_x1(&self) -> Result<Vec<X1Slice<C>>, PolyError> {
        let (x1, y1, yl) = (self.ring.x1(), self.ring.y1(), self.ring.y_last());
        let mut slices: BTreeMap<u32, (u32, BTreeMap<Monomial, C>)> = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.exp(yl) != 0 {
                return Err(PolyError::ContainsYLast);
            }
            let (j, q) = (m.exp(x1), m.exp(y1));
            let mut h = m.clone();
            h.set_exp(x1, 0);
            h.set_exp(y1, 0);
            let entry = slices.entry(j).or_insert_with(|| (q, BTreeMap::new()));
            if entry.0 != q {
                return Err(PolyError::MixedY1Powers { j });
            }
            entry.1.insert(h, c.clone());
        }
        Ok(slices
            .into_iter()
            .map(|(j, (q, terms))| X1Slice { j, q, h: Polynomial { ring: self.ring, terms } })
            .collect())
    }

    /// `p / x_1^k`, failing if some term has `x_1`-exponent below `k`.
    pub fn exact_div_x1(&self, k: u32) -> Result<Self, PolyError> {
        let x1 = self.ring.x1();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(x1);
            if e < k {
                return Err(PolyError::NotDivisible { k });
            }
            let mut m = m.clone();
            m.set_exp(x1, e - k);
            terms.insert(m, c.clone());
        }
        Ok(Polynomial { ring: self.ring, terms })
    }

    /// True when every term has `x_1`-exponent at least `k`.
    pub fn divisible_by_x1(&self, k: u32) -> bool {
        let x1 = self.ring.x1();
        self.terms.keys().all(|m| m.exp(x1) >= k)
    }

    /// Exact partial derivative.
    pub fn partial(&self, v: Var) -> Self {
        let idx = self.ring.index(v);
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(idx);
            if e == 0 {
                continue;
            }
            let mut m = m.clone();
            m.set_exp(idx, e - 1);
            terms.insert(m, c.clone() * C::from_u64_exact(u64::from(e)));
        }
        Polynomial { ring: self.ring, terms }
    }

    /// Common weight of all terms, or `None` if the terms disagree (or the
    /// polynomial is zero).
    pub fn is_homogeneous(&self, w: &WeightVector) -> Option<i64> {
        let mut weights = self.terms.keys().map(|m| w.weight(m));
        let first = weights.next()?;
        weights.all(|x| x == first).then_some(first)
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Polynomial { ring: self.ring, terms }
    }
}

impl RingSpec {
    pub(crate) fn mask(self, allowed: &[Var]) -> Vec<bool> {
        let mut mask = vec![false; self.nvars()];
        for &v in allowed {
            mask[self.index(v)] = true;
        }
        mask
    }
}

fn accumulate<C: Scalar>(terms: &mut BTreeMap<Monomial, C>, m: Monomial, c: C) {
    match terms.get_mut(&m) {
        Some(v) => *v = v.clone() + c,
        None => {
            terms.insert(m, c);
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $try:ident) => {
        /// Panics on ring mismatch; use the `try_` method to get an error.
        impl<C: Scalar> $trait<&Polynomial<C>> for &Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: &Polynomial<C>) -> Polynomial<C> {
                self.$try(rhs).expect("polynomial ring mismatch")
            }
        }

        impl<C: Scalar> $trait for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: Polynomial<C>) -> Polynomial<C> {
                (&self).$method(&rhs)
            }
        }

        impl<C: Scalar> $trait<&Polynomial<C>> for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: &Polynomial<C>) -> Polynomial<C> {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl<C: Scalar> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect();
        Polynomial { ring: self.ring, terms }
    }
}

impl<C: Scalar> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

impl<C: ExactScalar> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let mut s = c.to_fraction();
            if let Some(stripped) = s.strip_suffix("/1") {
                s = stripped.to_string();
            }
            let (neg, mag) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&mag)?;
            } else if mag == "1" {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl<C: fmt::Debug> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().rev()).finish()
    }
}
