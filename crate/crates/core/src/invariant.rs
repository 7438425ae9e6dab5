//! Construction of kernel elements `x_1 y_{n+1}^ℓ + (lower terms in y_{n+1})`
//! of the Kuroda derivation for `n >= 4`.
//!
//! Start from `G = f_{1,n+1}^ℓ` and write `G = Σ_i g_i y_{n+1}^i` with
//! `g_i = Σ_j x_1^j y_1^{q_ij} h_ij`. Working down from `r = ℓ-2` to `0`,
//! take the least `p` in `r..=ℓ-2` with `h_{r,p} != 0`; it is a kernel element
//! of `k[x_2..x_n, y_2..y_n]`, so it decomposes into summands
//! `c x^d Π f_{i,j}^{t_ij}`. For each summand subtract `F·H` where
//!
//! ```text
//! F = c x_1^{p-r} f_{1,n+1}^r f_{2,1}^{q_2}⋯f_{n,1}^{q_n} x_2^{d_2-2q_2}⋯x_n^{d_n-2q_n}
//! H = Π f_{i,j}^{t_ij}
//! ```
//!
//! `F·H` agrees with the summand on the `(x_1^p, y_{n+1}^r)` slot and only
//! has terms of higher `x_1`-degree or lower `y_{n+1}`-degree, so `h_{r,p}`
//! disappears without touching `g_{r+1}..g_{ℓ-1}`. When every level is done,
//! all `g_i` with `i < ℓ` are divisible by `x_1^{ℓ-1}`, and the quotient
//! `G / x_1^{ℓ-1}` lies in the kernel because the kernel is factorially closed.
//!
//! Every intermediate `G` is audited: kernel membership, the three slice
//! conditions of [`check_conditions`], frame preservation and progress. A
//! certificate is only returned when every audit passed.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::derivation::{Derivation, DerivationError};
use crate::kernel_gens::{f_gen, f_product, f_top, km_decompose, KernelGenError, Summand};
use crate::poly::{Monomial, PolyError, Polynomial, RingSpec, WeightVector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("the construction needs n >= 4 (got n = {0})")]
    NRequirement(usize),
    #[error("ell must be at least 1")]
    EllZero,
    #[error("q split infeasible: floor(d_i/2) sums to {available} < {q_total}")]
    Infeasible { available: u32, q_total: u32 },
    #[error("bad parameters: {0}")]
    Parameters(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    KernelGen(#[from] KernelGenError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One subtraction of `F·H`.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationStep<C> {
    /// `y_{n+1}`-level.
    pub r: u32,
    /// `x_1`-level.
    pub p: u32,
    pub summand: Summand<C>,
    pub q_total: u32,
    /// `(q_2, ..., q_n)`.
    pub q_split: Vec<u32>,
    pub f: Polynomial<C>,
    pub h: Polynomial<C>,
    pub subtracted: Polynomial<C>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCertificate<C> {
    pub n: usize,
    pub ell: u32,
    pub g: Polynomial<C>,
    pub steps: Vec<EliminationStep<C>>,
    pub divided: Polynomial<C>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityClass {
    AllOdd,
    AllEven,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonomialCheck {
    pub monomial: Monomial,
    pub tau: i64,
    pub parity: ParityClass,
    /// Lower bound required of `2τ`.
    pub bound: i64,
    pub ok: bool,
}

/// Checks for one `(i, j, q)` slice `y_{n+1}^i x_1^j y_1^q h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceReport {
    pub i: u32,
    pub j: u32,
    pub q: u32,
    /// `i + j + 2q = 2ℓ`.
    pub condition1_ok: bool,
    /// `j >= i`.
    pub condition2_ok: bool,
    pub monomials: Vec<MonomialCheck>,
}

impl SliceReport {
    pub fn condition3_ok(&self) -> bool {
        self.monomials.iter().all(|m| m.ok)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub ell: u32,
    pub slices: Vec<SliceReport>,
}

impl ConditionReport {
    pub fn condition1_ok(&self) -> bool {
        self.slices.iter().all(|s| s.condition1_ok)
    }

    pub fn condition2_ok(&self) -> bool {
        self.slices.iter().all(|s| s.condition2_ok)
    }

    pub fn condition3_ok(&self) -> bool {
        self.slices.iter().all(SliceReport::condition3_ok)
    }

    pub fn all_ok(&self) -> bool {
        self.condition1_ok() && self.condition2_ok() && self.condition3_ok()
    }

    /// Number of failed checks (slice-level and monomial-level).
    pub fn violations(&self) -> usize {
        self.slices
            .iter()
            .map(|s| {
                usize::from(!s.condition1_ok)
                    + usize::from(!s.condition2_ok)
                    + s.monomials.iter().filter(|m| !m.ok).count()
            })
            .sum()
    }
}

/// Greedy split `q_i = min(floor(d_i / 2), remaining)` in index order.
pub fn choose_q_split(d: &[u32], q_total: u32) -> Result<Vec<u32>, BuildError> {
    let available: u32 = d.iter().map(|&di| di / 2).sum();
    if available < q_total {
        return Err(BuildError::Infeasible { available, q_total });
    }
    let mut remaining = q_total;
    Ok(d.iter()
        .map(|&di| {
            let q = (di / 2).min(remaining);
            remaining -= q;
            q
        })
        .collect())
}

/// `c · x_1^{p-r} · f_{1,n+1}^r · Π f_{i,1}^{q_i} · Π x_i^{d_i - 2q_i}`.
pub fn make_f<C: Scalar>(
    ring: RingSpec,
    p: u32,
    r: u32,
    c: &C,
    d: &[u32],
    q_split: &[u32],
) -> Result<Polynomial<C>, BuildError> {
    let n = ring.n();
    if p < r {
        return Err(BuildError::Parameters(format!("p = {p} < r = {r}")));
    }
    if d.len() != n - 1 || q_split.len() != n - 1 {
        return Err(BuildError::Parameters(format!("d and q_split need {} entries", n - 1)));
    }
    if let Some(i) = (0..n - 1).find(|&i| 2 * q_split[i] > d[i]) {
        return Err(BuildError::Parameters(format!("2 q_{} > d_{}", i + 2, i + 2)));
    }
    let mut x = vec![p - r];
    x.extend(d.iter().zip(q_split).map(|(di, qi)| di - 2 * qi));
    let mono = Monomial::from_parts(ring, &x, &vec![0; n + 1])?;
    let mut acc = Polynomial::term(ring, mono, c.clone());
    if r > 0 {
        acc = &acc * &f_top::<C>(n)?.pow(r);
    }
    for (k, &qi) in q_split.iter().enumerate() {
        if qi > 0 {
            acc = &acc * &f_gen::<C>(ring, k + 2, 1)?.pow(qi);
        }
    }
    Ok(acc)
}

fn parity_class(m: &Monomial) -> ParityClass {
    let xs = &m.x_exps()[1..];
    if xs.iter().all(|a| a % 2 == 1) {
        ParityClass::AllOdd
    } else if xs.iter().all(|a| a % 2 == 0) {
        ParityClass::AllEven
    } else {
        ParityClass::Mixed
    }
}

/// Evaluates the slice conditions on every `y_{n+1}`-coefficient `g_i`,
/// `i <= ℓ-1`:
///
/// 1. `i + j + 2q = 2ℓ`;
/// 2. `j >= i`;
/// 3. for each monomial `m`: if `j ≡ ℓ-1 (mod 2)` then `2τ(m) >= ℓ-j-3` and
///    `a_2..a_n` are all odd; if `j ≡ ℓ (mod 2)` then `2τ(m) >= ℓ-j` and
///    `a_2..a_n` are all even.
///
/// Monomials of one `g_i` with the same `x_1`-exponent but different `y_1`
/// exponents land in separate slices, where at most one can satisfy (1).
pub fn check_conditions<C: Scalar>(g: &Polynomial<C>, ell: u32) -> ConditionReport {
    let ring = g.ring();
    let (x1, y1, yl) = (ring.x1(), ring.y1(), ring.y_last());
    let mut slices: BTreeMap<(u32, u32, u32), Vec<MonomialCheck>> = BTreeMap::new();
    for m in g.monomials() {
        let i = m.exp(yl);
        if i >= ell {
            continue;
        }
        let (j, q) = (m.exp(x1), m.exp(y1));
        let tau = m.tau();
        let parity = parity_class(m);
        let (bound, want) = if (j + 1) % 2 == ell % 2 {
            (i64::from(ell) - i64::from(j) - 3, ParityClass::AllOdd)
        } else {
            (i64::from(ell) - i64::from(j), ParityClass::AllEven)
        };
        let ok = 2 * tau >= bound && parity == want;
        slices.entry((i, j, q)).or_default().push(MonomialCheck { monomial: m.clone(), tau, parity, bound, ok });
    }
    let slices = slices
        .into_iter()
        .map(|((i, j, q), monomials)| SliceReport {
            i,
            j,
            q,
            condition1_ok: i + j + 2 * q == 2 * ell,
            condition2_ok: j >= i,
            monomials,
        })
        .collect();
    ConditionReport { ell, slices }
}

fn violation(msg: impl Into<String>) -> BuildError {
    BuildError::InvariantViolation(msg.into())
}

struct Auditor<C> {
    delta: Derivation<C>,
    weight: WeightVector,
    ell: u32,
}

impl<C: Scalar> Auditor<C> {
    fn state(&self, g: &Polynomial<C>) -> Result<(), BuildError> {
        if !self.delta.in_kernel(g)? {
            return Err(violation("G left the kernel"));
        }
        if g.is_homogeneous(&self.weight) != Some(2 * i64::from(self.ell)) {
            return Err(violation("G is not homogeneous of weight 2ℓ (condition 1)"));
        }
        let ring = g.ring();
        if g.monomials().any(|m| m.exp(ring.x1()) < m.exp(ring.y_last())) {
            return Err(violation("x1-degree below y_(n+1)-degree (condition 2)"));
        }
        let report = check_conditions(g, self.ell);
        if !report.all_ok() {
            return Err(violation(format!("{} slice-condition failures", report.violations())));
        }
        if g.coeff_in_y_last(self.ell) != Polynomial::x(ring, 1).pow(self.ell) {
            return Err(violation("top y_(n+1)-coefficient changed"));
        }
        Ok(())
    }
}

/// Runs the construction for `n >= 4`, `ℓ >= 1`.
pub fn build_invariant<C: Scalar>(n: usize, ell: u32) -> Result<InvariantCertificate<C>, BuildError> {
    build_invariant_traced(n, ell, |_| {})
}

/// As [`build_invariant`], calling `on_step` after each audited step.
pub fn build_invariant_traced<C: Scalar>(
    n: usize,
    ell: u32,
    mut on_step: impl FnMut(&EliminationStep<C>),
) -> Result<InvariantCertificate<C>, BuildError> {
    if n < 4 {
        return Err(BuildError::NRequirement(n));
    }
    if ell == 0 {
        return Err(BuildError::EllZero);
    }
    let ring = RingSpec::new(n)?;
    let audit = Auditor { delta: Derivation::kuroda(n)?, weight: WeightVector::x1_y1_ylast(ring), ell };
    let mut g = f_top::<C>(n)?.pow(ell);
    audit.state(&g)?;

    let mut steps = Vec::new();
    for r in (0..ell.saturating_sub(1)).rev() {
        loop {
            let slices = g.coeff_in_y_last(r).split_by_x1()?;
            if slices.iter().any(|s| s.j < r) {
                return Err(violation(format!("g_{r} has a slice below x1^{r}")));
            }
            let Some(slice) = slices.into_iter().find(|s| s.j <= ell - 2) else {
                break;
            };
            let p = slice.j;
            if !audit.delta.in_kernel(&slice.h)? {
                return Err(violation(format!("h_({r},{p}) is not in the kernel")));
            }
            let kc = km_decompose(&slice.h)?;
            let before_upper: Vec<Polynomial<C>> = (r + 1..ell).map(|i| g.coeff_in_y_last(i)).collect();

            for (k, summand) in kc.summands.iter().enumerate() {
                let q_split = choose_q_split(&summand.d, slice.q)?;
                let f = make_f(ring, p, r, &summand.c, &summand.d, &q_split)?;
                let h = f_product::<C>(ring, &summand.t)?;
                let subtracted = &f * &h;
                g = &g - &subtracted;

                audit.state(&g)?;
                let after = g.coeff_in_y_last(r).split_by_x1()?;
                if after.iter().any(|s| s.j < p) {
                    return Err(violation(format!("a step at ({r},{p}) disturbed a lower x1-level")));
                }
                let remaining: Vec<Summand<C>> = kc.summands[k + 1..].to_vec();
                let expected = crate::kernel_gens::expand(&crate::kernel_gens::KernelCombination { n, summands: remaining })?;
                let current = after.iter().find(|s| s.j == p).map_or_else(|| Polynomial::zero(ring), |s| s.h.clone());
                if current != expected {
                    return Err(violation(format!("h_({r},{p}) did not shrink by the subtracted summand")));
                }
                let upper_same = (r + 1..ell).zip(&before_upper).all(|(i, prev)| &g.coeff_in_y_last(i) == prev);
                if !upper_same || (r + 1..ell).any(|i| !g.coeff_in_y_last(i).divisible_by_x1(ell - 1)) {
                    return Err(violation(format!("a step at level {r} changed g_i for i > {r}")));
                }

                let step = EliminationStep { r, p, summand: summand.clone(), q_total: slice.q, q_split, f, h, subtracted };
                on_step(&step);
                steps.push(step);
            }
        }
    }

    if (0..ell).any(|i| !g.coeff_in_y_last(i).divisible_by_x1(ell - 1)) {
        return Err(violation("a y_(n+1)-coefficient is not divisible by x1^(ℓ-1)"));
    }
    let divided = g.exact_div_x1(ell - 1)?;
    if !audit.delta.in_kernel(&divided)? {
        return Err(violation("G / x1^(ℓ-1) is not in the kernel"));
    }
    if divided.coeff_in_y_last(ell) != Polynomial::x(ring, 1) {
        return Err(violation("divided form does not start with x1 y_(n+1)^ℓ"));
    }
    Ok(InvariantCertificate { n, ell, g, steps, divided })
}

/// `G / x_1^{ℓ-1}`, rechecked for kernel membership.
pub fn divided_form<C: Scalar>(cert: &InvariantCertificate<C>) -> Result<Polynomial<C>, BuildError> {
    if cert.ell == 0 {
        return Err(BuildError::EllZero);
    }
    let divided = cert.g.exact_div_x1(cert.ell - 1)?;
    if !Derivation::<C>::kuroda(cert.n)?.in_kernel(&divided)? {
        return Err(violation("divided form is not in the kernel"));
    }
    Ok(divided)
}

/// Rechecks every certificate invariant from scratch. Returns the sorted
/// names of the violated invariants; empty means the certificate is valid.
pub fn verify_certificate<C: Scalar>(cert: &InvariantCertificate<C>) -> Vec<&'static str> {
    let mut bad: Vec<&'static str> = Vec::new();
    let (n, ell) = (cert.n, cert.ell);
    if n < 4 || ell == 0 {
        return vec!["parameters"];
    }
    let Ok(ring) = RingSpec::new(n) else {
        return vec!["parameters"];
    };
    let polys = [&cert.g, &cert.divided];
    if polys.iter().any(|p| p.ring() != ring)
        || cert.steps.iter().any(|s| [&s.f, &s.h, &s.subtracted].iter().any(|p| p.ring() != ring))
    {
        return vec!["ring"];
    }
    let delta = Derivation::<C>::kuroda(n).expect("n >= 4");
    let g = &cert.g;

    if !delta.apply_unchecked(g).is_zero() {
        bad.push("kernel");
    }
    let top_ok = g.coeff_in_y_last(ell) == Polynomial::x(ring, 1).pow(ell)
        && g.var_degree(crate::poly::Var::Y(n + 1)).unwrap_or(0) <= ell;
    if !top_ok {
        bad.push("top_coefficient");
    }
    if (0..ell).any(|i| !g.coeff_in_y_last(i).divisible_by_x1(ell - 1)) {
        bad.push("divisibility");
    }
    let report = check_conditions(g, ell);
    if !report.condition1_ok() || g.is_homogeneous(&WeightVector::x1_y1_ylast(ring)) != Some(2 * i64::from(ell)) {
        bad.push("condition1");
    }
    if !report.condition2_ok() || g.monomials().any(|m| m.exp(ring.x1()) < m.exp(ring.y_last())) {
        bad.push("condition2");
    }
    if !report.condition3_ok() {
        bad.push("condition3");
    }

    let mut replay = f_top::<C>(n).expect("n >= 4").pow(ell);
    for s in &cert.steps {
        replay = &replay - &s.subtracted;
        if s.r > s.p || s.p + 2 > ell {
            bad.push("step_levels");
        }
        let split_ok = s.q_split.len() == n - 1
            && s.summand.d.len() == n - 1
            && s.q_split.iter().sum::<u32>() == s.q_total
            && s.q_split.iter().zip(&s.summand.d).all(|(q, d)| 2 * q <= *d);
        if !split_ok {
            bad.push("step_q_split");
        } else {
            match make_f(ring, s.p, s.r, &s.summand.c, &s.summand.d, &s.q_split) {
                Ok(f) if f == s.f => {}
                _ => bad.push("step_f"),
            }
        }
        let t_ok = s.summand.t.keys().all(|&(i, j)| 2 <= i && i < j && j <= n);
        match (t_ok, f_product::<C>(ring, &s.summand.t)) {
            (true, Ok(h)) if h == s.h => {}
            _ => bad.push("step_h"),
        }
        if &s.f * &s.h != s.subtracted {
            bad.push("step_product");
        }
    }
    if &replay != g {
        bad.push("trace");
    }

    match g.exact_div_x1(ell - 1) {
        Ok(d) if d == cert.divided => {}
        _ => bad.push("divided"),
    }
    if !delta.apply_unchecked(&cert.divided).is_zero() {
        bad.push("divided_kernel");
    }
    if cert.divided.coeff_in_y_last(ell) != Polynomial::x(ring, 1) {
        bad.push("divided_top");
    }
    bad.sort_unstable();
    bad.dedup();
    bad
}
