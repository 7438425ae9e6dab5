//! `k`-derivations of `B = k[x_1..x_n, y_1..y_{n+1}]` given by the images
//! of the variables and extended by the Leibniz rule.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::{nullspace_of_map, Echelon, SparseVec};
use crate::poly::{Monomial, PolyError, Polynomial, RingSpec, Var};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("n = {0} is too small (need n >= 2)")]
    NTooSmall(usize),
    #[error("expected {expected} variable images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("no iteration cap given for a general derivation")]
    MissingCap,
    #[error("derivation did not vanish within {cap} iterations")]
    IterationCapExceeded { cap: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Kuroda,
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivation<C> {
    ring: RingSpec,
    images: Vec<Polynomial<C>>,
    kind: Kind,
}

/// A basis of the kernel restricted to polynomials of total degree at most
/// `degree_bound` in the masked variables.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBasis<C> {
    pub degree_bound: u32,
    pub elements: Vec<Polynomial<C>>,
}

impl<C: Scalar> KernelBasis<C> {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Exact span membership.
    pub fn spans(&self, p: &Polynomial<C>) -> bool {
        let mut ech = Echelon::new();
        for e in &self.elements {
            let _ = ech.insert(&to_sparse(e));
        }
        ech.contains(&to_sparse(p))
    }
}

pub(crate) fn to_sparse<C: Scalar>(p: &Polynomial<C>) -> SparseVec<Monomial, C> {
    p.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

/// All monomials of total degree `<= bound` in the masked variables, in
/// ascending canonical order.
pub fn monomials_up_to(ring: RingSpec, bound: u32, mask: &[Var]) -> Vec<Monomial> {
    fn rec(idx: &[usize], left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        match idx.split_first() {
            None => out.push(cur.clone()),
            Some((&i, rest)) => {
                for e in 0..=left {
                    cur.set_exp(i, e);
                    rec(rest, left - e, cur, out);
                }
                cur.set_exp(i, 0);
            }
        }
    }
    let mut idx: Vec<usize> = mask.iter().map(|&v| ring.index(v)).collect();
    idx.sort_unstable();
    idx.dedup();
    let mut out = Vec::new();
    rec(&idx, bound, &mut Monomial::one(ring), &mut out);
    out.sort();
    out
}

impl<C: Scalar> Derivation<C> {
    /// A derivation from one image per variable, in the order
    /// `x_1..x_n, y_1..y_{n+1}`.
    pub fn new(ring: RingSpec, images: Vec<Polynomial<C>>) -> Result<Self, DerivationError> {
        if images.len() != ring.nvars() {
            return Err(DerivationError::ImageCount { expected: ring.nvars(), got: images.len() });
        }
        if let Some(bad) = images.iter().find(|p| p.ring() != ring) {
            return Err(PolyError::RingMismatch { left: ring.n(), right: bad.ring().n() }.into());
        }
        Ok(Derivation { ring, images, kind: Kind::General })
    }

    /// `δ(x_i) = 0`, `δ(y_i) = x_i²` for `i <= n`, `δ(y_{n+1}) = x_1⋯x_n`.
    pub fn kuroda(n: usize) -> Result<Self, DerivationError> {
        if n < 2 {
            return Err(DerivationError::NTooSmall(n));
        }
        let ring = RingSpec::new(n)?;
        let mut images = vec![Polynomial::zero(ring); n];
        for i in 1..=n {
            images.push(Polynomial::x(ring, i).pow(2));
        }
        let all_x = Monomial::from_parts(ring, &vec![1; n], &vec![0; n + 1])?;
        images.push(Polynomial::term(ring, all_x, C::one()));
        Ok(Derivation { ring, images, kind: Kind::Kuroda })
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn is_kuroda(&self) -> bool {
        self.kind == Kind::Kuroda
    }

    pub fn image(&self, v: Var) -> &Polynomial<C> {
        &self.images[self.ring.index(v)]
    }

    pub fn images(&self) -> &[Polynomial<C>] {
        &self.images
    }

    fn check_ring(&self, p: &Polynomial<C>) -> Result<(), DerivationError> {
        if p.ring() != self.ring {
            return Err(PolyError::RingMismatch { left: self.ring.n(), right: p.ring().n() }.into());
        }
        Ok(())
    }

    pub fn apply(&self, p: &Polynomial<C>) -> Result<Polynomial<C>, DerivationError> {
        self.check_ring(p)?;
        Ok(self.apply_unchecked(p))
    }

    pub(crate) fn apply_unchecked(&self, p: &Polynomial<C>) -> Polynomial<C> {
        let mut out = Vec::new();
        for (m, c) in p.terms() {
            for (idx, &e) in m.exps().iter().enumerate() {
                let img = &self.images[idx];
                if e == 0 || img.is_zero() {
                    continue;
                }
                let mut rest = m.clone();
                rest.set_exp(idx, e - 1);
                let k = c.clone() * C::from_u64_exact(u64::from(e));
                for (im, ic) in img.terms() {
                    out.push((rest.mul(im), k.clone() * ic.clone()));
                }
            }
        }
        Polynomial::from_terms(self.ring, out).expect("monomials built in the same ring")
    }

    pub fn in_kernel(&self, p: &Polynomial<C>) -> Result<bool, DerivationError> {
        Ok(self.apply(p)?.is_zero())
    }

    /// Least `N` with `δ^N(p) = 0`.
    ///
    /// The Kuroda derivation lowers the `y`-degree of every term by one, so
    /// its cap is `y_degree(p) + 1` unless `cap` overrides it; any other
    /// derivation needs an explicit cap.
    pub fn nilpotency_index(&self, p: &Polynomial<C>, cap: Option<usize>) -> Result<usize, DerivationError> {
        self.check_ring(p)?;
        let cap = match (cap, self.kind) {
            (Some(c), _) => c,
            (None, Kind::Kuroda) => p.y_degree().map_or(0, |d| d as usize + 1),
            (None, Kind::General) => return Err(DerivationError::MissingCap),
        };
        let mut cur = p.clone();
        for n in 0..=cap {
            if cur.is_zero() {
                return Ok(n);
            }
            if n < cap {
                cur = self.apply_unchecked(&cur);
            }
        }
        Err(DerivationError::IterationCapExceeded { cap })
    }

    /// A basis of `{p : deg p <= bound, p supported on mask, δ(p) = 0}`.
    ///
    /// Computed as the exact nullspace of `δ` on the monomial basis of the
    /// truncated space. Every element is monic in its canonically largest
    /// monomial.
    pub fn truncated_kernel_basis(&self, degree_bound: u32, mask: &[Var]) -> KernelBasis<C> {
        let sources = monomials_up_to(self.ring, degree_bound, mask);
        let null = nullspace_of_map(&sources, |m| {
            to_sparse(&self.apply_unchecked(&Polynomial::term(self.ring, m.clone(), C::one())))
        });
        let elements = null
            .into_iter()
            .map(|v| {
                Polynomial::from_terms(self.ring, v.into_iter().map(|(k, c)| (sources[k].clone(), c)))
                    .expect("same ring")
            })
            .collect();
        KernelBasis { degree_bound, elements }
    }
}

/// Every variable of the ring.
pub fn all_vars(ring: RingSpec) -> Vec<Var> {
    ring.vars().collect()
}

/// Images as a map, handy for reports.
pub fn image_table<C: Scalar>(d: &Derivation<C>) -> BTreeMap<Var, Polynomial<C>> {
    d.ring().vars().map(|v| (v, d.image(v).clone())).collect()
}
