//! The kernel generators `f_{1,n+1} = x_1 y_{n+1} - x_2⋯x_n y_1` and
//! `f_{i,j} = x_i² y_j - x_j² y_i`, and decomposition of kernel elements of
//! `k[x_2..x_n, y_2..y_n]` as sums `c · x_2^{d_2}⋯x_n^{d_n} · Π f_{i,j}^{t_{i,j}}`.
//!
//! The restricted derivation is graded: giving `x_i` weight `e_i`, `y_i`
//! weight `2e_i` and additionally counting the `y`-degree, every generator is
//! homogeneous (`x_i ↦ (e_i, 0)`, `f_{i,j} ↦ (2e_i + 2e_j, 1)`). A kernel
//! element therefore splits into graded components, and each component can
//! only be a combination of the finitely many generator products of the same
//! grade. Decomposition solves that exact linear system component by
//! component.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::derivation::{to_sparse, Derivation, DerivationError};
use crate::linalg::Echelon;
use crate::poly::{Monomial, PolyError, Polynomial, RingSpec, Var};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelGenError {
    #[error("f_(i,j) needs i != j (got i = j = {0})")]
    SameIndex(usize),
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("n = {0} is too small (need n >= 2)")]
    NTooSmall(usize),
    #[error("polynomial is not in the kernel")]
    NotInKernel,
    #[error("polynomial involves x1, y1 or y_(n+1)")]
    UnsupportedVariables,
    #[error("no combination of generator products matches a graded component")]
    DecompositionFailed,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
}

/// `c · x_2^{d_2}⋯x_n^{d_n} · Π_{i<j} f_{i,j}^{t_{i,j}}` with all indices in `2..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Summand<C> {
    pub c: C,
    /// Exponents of `x_2..x_n`.
    pub d: Vec<u32>,
    /// `(i, j) ↦ t_{i,j}` with `2 <= i < j <= n`; zero entries are omitted.
    pub t: BTreeMap<(usize, usize), u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelCombination<C> {
    pub n: usize,
    pub summands: Vec<Summand<C>>,
}

pub fn f_gen<C: Scalar>(ring: RingSpec, i: usize, j: usize) -> Result<Polynomial<C>, KernelGenError> {
    let n = ring.n();
    for index in [i, j] {
        if !(1..=n).contains(&index) {
            return Err(KernelGenError::IndexOutOfRange { index, n });
        }
    }
    if i == j {
        return Err(KernelGenError::SameIndex(i));
    }
    let xi2 = Polynomial::x(ring, i).pow(2);
    let xj2 = Polynomial::x(ring, j).pow(2);
    Ok(&xi2 * &Polynomial::y(ring, j) - &xj2 * &Polynomial::y(ring, i))
}

pub fn f_top<C: Scalar>(n: usize) -> Result<Polynomial<C>, KernelGenError> {
    if n < 2 {
        return Err(KernelGenError::NTooSmall(n));
    }
    let ring = RingSpec::new(n)?;
    let x_rest = Monomial::from_parts(ring, &[vec![0], vec![1; n - 1]].concat(), &vec![0; n + 1])?;
    let lead = Polynomial::x(ring, 1) * Polynomial::y(ring, n + 1);
    let tail = Polynomial::term(ring, x_rest, C::one()) * Polynomial::y(ring, 1);
    Ok(lead - tail)
}

/// `Π f_{i,j}^{t_{i,j}}`.
pub fn f_product<C: Scalar>(
    ring: RingSpec,
    t: &BTreeMap<(usize, usize), u32>,
) -> Result<Polynomial<C>, KernelGenError> {
    let mut acc = Polynomial::one(ring);
    for (&(i, j), &e) in t {
        if e > 0 {
            acc = &acc * &f_gen(ring, i, j)?.pow(e);
        }
    }
    Ok(acc)
}

fn x_tail(ring: RingSpec, d: &[u32]) -> Result<Monomial, PolyError> {
    Monomial::from_parts(ring, &[&[0], d].concat(), &vec![0; ring.n() + 1])
}

impl<C: Scalar> Summand<C> {
    pub fn expand(&self, ring: RingSpec) -> Result<Polynomial<C>, KernelGenError> {
        let x = Polynomial::term(ring, x_tail(ring, &self.d)?, self.c.clone());
        Ok(&x * &f_product(ring, &self.t)?)
    }
}

/// `Σ c · x^d · Π f^t`.
pub fn expand<C: Scalar>(kc: &KernelCombination<C>) -> Result<Polynomial<C>, KernelGenError> {
    let ring = RingSpec::new(kc.n)?;
    let mut acc = Polynomial::zero(ring);
    for s in &kc.summands {
        acc = &acc + &s.expand(ring)?;
    }
    Ok(acc)
}

/// Pairs `(i, j)` with `2 <= i < j <= n`, sorted.
pub fn index_pairs(n: usize) -> Vec<(usize, usize)> {
    (2..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect()
}

type Grade = (Vec<u32>, u32);

/// Grade of a monomial of `k[x_2..x_n, y_2..y_n]`: `(a_i + 2 b_i)_{i>=2}` and
/// the total `y`-degree.
fn grade(m: &Monomial) -> Grade {
    let n = m.n();
    let x = m.x_exps();
    let y = m.y_exps();
    let w = (1..n).map(|i| x[i] + 2 * y[i]).collect();
    (w, y[1..n].iter().sum())
}

/// All `(d, t)` with the given grade, sorted lexicographically by `d` and
/// then by `t` listed over [`index_pairs`].
fn candidates(n: usize, w: &[u32], y: u32) -> Vec<(Vec<u32>, Vec<u32>)> {
    fn rec(
        pairs: &[(usize, usize)],
        k: usize,
        left: u32,
        budget: &mut [u32],
        t: &mut Vec<u32>,
        out: &mut Vec<(Vec<u32>, Vec<u32>)>,
        w: &[u32],
    ) {
        if k == pairs.len() {
            if left == 0 {
                let d = w.iter().zip(budget.iter()).map(|(wi, bi)| wi - bi).collect();
                out.push((d, t.clone()));
            }
            return;
        }
        let (i, j) = pairs[k];
        let (a, b) = (i - 2, j - 2);
        let mut e = 0;
        loop {
            if e > left || budget[a] + 2 * e > w[a] || budget[b] + 2 * e > w[b] {
                break;
            }
            budget[a] += 2 * e;
            budget[b] += 2 * e;
            t.push(e);
            rec(pairs, k + 1, left - e, budget, t, out, w);
            t.pop();
            budget[a] -= 2 * e;
            budget[b] -= 2 * e;
            e += 1;
        }
    }
    let pairs = index_pairs(n);
    let mut out = Vec::new();
    let mut budget = vec![0; w.len()];
    rec(&pairs, 0, y, &mut budget, &mut Vec::new(), &mut out, w);
    out.sort();
    out
}

fn t_map(n: usize, t: &[u32]) -> BTreeMap<(usize, usize), u32> {
    index_pairs(n).into_iter().zip(t.iter().copied()).filter(|&(_, e)| e > 0).collect()
}

/// Decomposes a kernel element of `k[x_2..x_n, y_2..y_n]` into generator
/// products.
///
/// Within each graded component the candidate products are tried in
/// lexicographic `(d, t)` order and a candidate is used only if it is
/// independent of the earlier ones, so the answer is deterministic even
/// though the `f_{i,j}` satisfy relations for `n >= 4`.
pub fn km_decompose<C: Scalar>(h: &Polynomial<C>) -> Result<KernelCombination<C>, KernelGenError> {
    let ring = h.ring();
    let n = ring.n();
    if n < 2 {
        return Err(KernelGenError::NTooSmall(n));
    }
    let allowed: Vec<Var> = (2..=n).flat_map(|i| [Var::X(i), Var::Y(i)]).collect();
    if !h.supported_on(&allowed) {
        return Err(KernelGenError::UnsupportedVariables);
    }
    if !Derivation::<C>::kuroda(n)?.in_kernel(h)? {
        return Err(KernelGenError::NotInKernel);
    }

    let mut components: BTreeMap<Grade, Vec<(Monomial, C)>> = BTreeMap::new();
    for (m, c) in h.terms() {
        components.entry(grade(m)).or_default().push((m.clone(), c.clone()));
    }

    let mut summands = Vec::new();
    for ((w, y), terms) in components {
        let target = Polynomial::from_terms(ring, terms)?;
        let cands = candidates(n, &w, y);
        let mut ech = Echelon::new();
        let mut expanded = Vec::with_capacity(cands.len());
        for (d, t) in &cands {
            let s = Summand { c: C::one(), d: d.clone(), t: t_map(n, t) };
            let p = s.expand(ring)?;
            let _ = ech.insert(&to_sparse(&p));
            expanded.push(s);
        }
        let coeffs = ech.express(&to_sparse(&target)).ok_or(KernelGenError::DecompositionFailed)?;
        for (k, c) in coeffs {
            if !c.is_zero() {
                summands.push(Summand { c, ..expanded[k].clone() });
            }
        }
    }
    Ok(KernelCombination { n, summands })
}

/// Every product `x_2^{d_2}⋯x_n^{d_n} · Π f_{i,j}^{t_{i,j}}` of total degree
/// at most `degree_bound` (each `f_{i,j}` has degree 3).
pub fn generator_products<C: Scalar>(n: usize, degree_bound: u32) -> Result<Vec<Summand<C>>, KernelGenError> {
    if n < 2 {
        return Err(KernelGenError::NTooSmall(n));
    }
    let pairs = index_pairs(n);
    let nx = n - 1;
    let mut out = Vec::new();
    // exponent vectors over [x_2..x_n, pairs...] with weights 1 and 3
    let weights: Vec<u32> = std::iter::repeat_n(1, nx).chain(std::iter::repeat_n(3, pairs.len())).collect();
    let mut cur = vec![0u32; weights.len()];
    fn rec(k: usize, left: u32, weights: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == weights.len() {
            out.push(cur.clone());
            return;
        }
        let mut e = 0;
        while e * weights[k] <= left {
            cur[k] = e;
            rec(k + 1, left - e * weights[k], weights, cur, out);
            e += 1;
        }
        cur[k] = 0;
    }
    let mut exps = Vec::new();
    rec(0, degree_bound, &weights, &mut cur, &mut exps);
    for e in exps {
        out.push(Summand { c: C::one(), d: e[..nx].to_vec(), t: t_map(n, &e[nx..]) });
    }
    Ok(out)
}
