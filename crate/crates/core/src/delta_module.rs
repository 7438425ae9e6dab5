//! Module derivations on free `B`-modules, and the natural one on the
//! differential module `Ω_{B/k} = ⊕ B dx_i ⊕ ⊕ B dy_j` given by
//! `δ_M(db) = d(δ(b))`.
//!
//! Basis symbols are identified with ring variables: the basis element for
//! variable `v` is `dv`, so a [`FreeModuleElement`] is a map from variable
//! index to coefficient polynomial.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::derivation::{monomials_up_to, to_sparse, Derivation, DerivationError};
use crate::invariant::{build_invariant, BuildError};
use crate::linalg::{nullspace_of_map, SparseVec};
use crate::poly::{Monomial, PolyError, Polynomial, RingSpec, Var};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("expected {expected} basis images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("ring mismatch: n = {left} vs n = {right}")]
    RingMismatch { left: usize, right: usize },
    #[error("no iteration cap given for a general module derivation")]
    MissingCap,
    #[error("module derivation did not vanish within {cap} iterations")]
    IterationCapExceeded { cap: usize },
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `Σ_v c_v · dv` with no zero coefficient stored.
#[derive(Clone, PartialEq)]
pub struct FreeModuleElement<C> {
    ring: RingSpec,
    coeffs: BTreeMap<usize, Polynomial<C>>,
}

impl<C: std::fmt::Debug> std::fmt::Debug for FreeModuleElement<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut m = f.debug_map();
        for (&idx, c) in &self.coeffs {
            m.entry(&format!("d{}", self.ring.var(idx)), c);
        }
        m.finish()
    }
}

impl<C: Scalar> FreeModuleElement<C> {
    pub fn zero(ring: RingSpec) -> Self {
        FreeModuleElement { ring, coeffs: BTreeMap::new() }
    }

    /// `c · dv`.
    pub fn single(v: Var, c: Polynomial<C>) -> Self {
        let ring = c.ring();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(ring.index(v), c);
        }
        FreeModuleElement { ring, coeffs }
    }

    pub fn basis(ring: RingSpec, v: Var) -> Self {
        Self::single(v, Polynomial::one(ring))
    }

    pub fn from_components(
        ring: RingSpec,
        parts: impl IntoIterator<Item = (Var, Polynomial<C>)>,
    ) -> Result<Self, ModuleError> {
        let mut e = Self::zero(ring);
        for (v, c) in parts {
            e = e.try_add(&Self::single(v, c))?;
        }
        Ok(e)
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, v: Var) -> Polynomial<C> {
        self.coeffs.get(&self.ring.index(v)).cloned().unwrap_or_else(|| Polynomial::zero(self.ring))
    }

    /// Nonzero components in basis order `dx_1..dx_n, dy_1..dy_{n+1}`.
    pub fn components(&self) -> impl Iterator<Item = (Var, &Polynomial<C>)> {
        self.coeffs.iter().map(|(&i, c)| (self.ring.var(i), c))
    }

    fn check_ring(&self, other: RingSpec) -> Result<(), ModuleError> {
        if self.ring != other {
            return Err(ModuleError::RingMismatch { left: self.ring.n(), right: other.n() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ModuleError> {
        self.check_ring(other.ring)?;
        let mut coeffs = self.coeffs.clone();
        for (&k, c) in &other.coeffs {
            let sum = match coeffs.get(&k) {
                Some(prev) => prev + c,
                None => c.clone(),
            };
            if sum.is_zero() {
                coeffs.remove(&k);
            } else {
                coeffs.insert(k, sum);
            }
        }
        Ok(FreeModuleElement { ring: self.ring, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ModuleError> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(&k, c)| (k, -c)).collect();
        FreeModuleElement { ring: self.ring, coeffs }
    }

    /// `b · e` for a ring element `b`.
    pub fn scale(&self, b: &Polynomial<C>) -> Result<Self, ModuleError> {
        self.check_ring(b.ring())?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&k, c)| (k, b * c))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Ok(FreeModuleElement { ring: self.ring, coeffs })
    }

    /// Largest `y`-degree over all coefficients.
    pub fn y_degree(&self) -> Option<u32> {
        self.coeffs.values().filter_map(Polynomial::y_degree).max()
    }
}

/// `dp = Σ_v ∂p/∂v · dv`.
pub fn differential<C: Scalar>(p: &Polynomial<C>) -> FreeModuleElement<C> {
    let ring = p.ring();
    let coeffs = ring
        .vars()
        .map(|v| (ring.index(v), p.partial(v)))
        .filter(|(_, c)| !c.is_zero())
        .collect();
    FreeModuleElement { ring, coeffs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// `δ_M(dv) = d(δ(v))` over a Kuroda base.
    KurodaOmega,
    General,
}

/// `δ_M(b·e) = δ(b)·e + b·δ_M(e)`, determined by the images of the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleDerivation<C> {
    base: Derivation<C>,
    basis_images: Vec<FreeModuleElement<C>>,
    kind: Kind,
}

impl<C: Scalar> ModuleDerivation<C> {
    pub fn new(base: Derivation<C>, basis_images: Vec<FreeModuleElement<C>>) -> Result<Self, ModuleError> {
        let ring = base.ring();
        if basis_images.len() != ring.nvars() {
            return Err(ModuleError::ImageCount { expected: ring.nvars(), got: basis_images.len() });
        }
        for e in &basis_images {
            e.check_ring(ring)?;
        }
        Ok(ModuleDerivation { base, basis_images, kind: Kind::General })
    }

    /// The natural structure on `Ω_{B/k}`: `δ_M(dv) = d(δ(v))`.
    pub fn omega(base: Derivation<C>) -> Self {
        let basis_images = base.images().iter().map(differential).collect();
        let kind = if base.is_kuroda() { Kind::KurodaOmega } else { Kind::General };
        ModuleDerivation { base, basis_images, kind }
    }

    pub fn base(&self) -> &Derivation<C> {
        &self.base
    }

    pub fn ring(&self) -> RingSpec {
        self.base.ring()
    }

    pub fn basis_image(&self, v: Var) -> &FreeModuleElement<C> {
        &self.basis_images[self.ring().index(v)]
    }

    pub fn apply(&self, e: &FreeModuleElement<C>) -> Result<FreeModuleElement<C>, ModuleError> {
        e.check_ring(self.ring())?;
        let mut acc = FreeModuleElement::zero(self.ring());
        for (&idx, c) in &e.coeffs {
            let v = self.ring().var(idx);
            acc = acc.try_add(&FreeModuleElement::single(v, self.base.apply(c)?))?;
            acc = acc.try_add(&self.basis_images[idx].scale(c)?)?;
        }
        Ok(acc)
    }

    /// Least `N` with `δ_M^N(e) = 0`. For `Ω` over the Kuroda derivation
    /// the default cap is `y_degree(e) + 2`.
    pub fn nilpotency_index(&self, e: &FreeModuleElement<C>, cap: Option<usize>) -> Result<usize, ModuleError> {
        e.check_ring(self.ring())?;
        let cap = match (cap, self.kind) {
            (Some(c), _) => c,
            (None, Kind::KurodaOmega) => e.y_degree().map_or(0, |d| d as usize + 2),
            (None, Kind::General) => return Err(ModuleError::MissingCap),
        };
        let mut cur = e.clone();
        for n in 0..=cap {
            if cur.is_zero() {
                return Ok(n);
            }
            if n < cap {
                cur = self.apply(&cur)?;
            }
        }
        Err(ModuleError::IterationCapExceeded { cap })
    }
}

/// `Ω_{B/k}` with the module derivation induced by the Kuroda derivation.
pub fn omega_derivation<C: Scalar>(n: usize) -> Result<ModuleDerivation<C>, ModuleError> {
    Ok(ModuleDerivation::omega(Derivation::kuroda(n)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct M0Report<C> {
    pub element: FreeModuleElement<C>,
    pub image: FreeModuleElement<C>,
    pub in_m0: bool,
}

pub fn in_m0<C: Scalar>(dm: &ModuleDerivation<C>, e: &FreeModuleElement<C>) -> Result<M0Report<C>, ModuleError> {
    let image = dm.apply(e)?;
    Ok(M0Report { element: e.clone(), in_m0: image.is_zero(), image })
}

/// `d(G / x_1^{ℓ-1})` for the constructed kernel element; it lies in `M_0`
/// and its `dy_{n+1}`-coefficient is `ℓ x_1 y_{n+1}^{ℓ-1} + (lower terms)`.
pub fn invariant_differential<C: Scalar>(n: usize, ell: u32) -> Result<FreeModuleElement<C>, BuildError> {
    let cert = build_invariant::<C>(n, ell)?;
    Ok(differential(&cert.divided))
}

/// `δ_M(d p) = d(δ p)`.
pub fn commutes_check<C: Scalar>(
    d: &Derivation<C>,
    dm: &ModuleDerivation<C>,
    p: &Polynomial<C>,
) -> Result<bool, ModuleError> {
    let lhs = dm.apply(&differential(p))?;
    let rhs = differential(&d.apply(p)?);
    Ok(lhs == rhs)
}

/// A basis of `ker δ_M` restricted to elements whose coefficients have total
/// degree at most `degree_bound`. Sources are ordered basis-major
/// (`dx_1..dy_{n+1}`), then by ascending monomial.
pub fn truncated_m0_basis<C: Scalar>(dm: &ModuleDerivation<C>, degree_bound: u32) -> Vec<FreeModuleElement<C>> {
    let ring = dm.ring();
    let all: Vec<Var> = ring.vars().collect();
    let monos = monomials_up_to(ring, degree_bound, &all);
    let sources: Vec<(usize, Monomial)> =
        (0..ring.nvars()).flat_map(|b| monos.iter().map(move |m| (b, m.clone()))).collect();
    let image = |(b, m): &(usize, Monomial)| -> SparseVec<(usize, Monomial), C> {
        let e = FreeModuleElement::single(ring.var(*b), Polynomial::term(ring, m.clone(), C::one()));
        let img = dm.apply(&e).expect("same ring");
        img.coeffs
            .iter()
            .flat_map(|(&k, c)| to_sparse(c).into_iter().map(move |(mm, v)| ((k, mm), v)))
            .collect()
    };
    nullspace_of_map(&sources, image)
        .into_iter()
        .map(|v| {
            let mut per_basis: BTreeMap<usize, Vec<(Monomial, C)>> = BTreeMap::new();
            for (k, c) in v {
                let (b, m) = &sources[k];
                per_basis.entry(*b).or_default().push((m.clone(), c));
            }
            let coeffs = per_basis
                .into_iter()
                .map(|(b, terms)| (b, Polynomial::from_terms(ring, terms).expect("same ring")))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            FreeModuleElement { ring, coeffs }
        })
        .collect()
}
