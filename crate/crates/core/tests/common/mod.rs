#![allow(dead_code)]

use std::collections::BTreeMap;

use lnd_core::delta_module::FreeModuleElement;
use lnd_core::poly::{Monomial, Polynomial, RingSpec};
use lnd_core::{QPolynomial, Q};
use proptest::prelude::*;

pub fn ring(n: usize) -> RingSpec {
    RingSpec::new(n).unwrap()
}

pub fn q(v: i64) -> Q {
    Q::from_integer(v.into())
}

pub fn p(n: usize, text: &str) -> QPolynomial {
    Polynomial::parse(ring(n), text).unwrap()
}

pub fn sparse(p: &QPolynomial) -> BTreeMap<Monomial, Q> {
    p.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

/// Monomial of total degree at most `deg`.
pub fn monomial(rs: RingSpec, deg: usize) -> impl Strategy<Value = Monomial> {
    let nv = rs.nvars();
    prop::collection::vec(0..nv, 0..=deg).prop_map(move |vars| {
        let mut exps = vec![0u32; nv];
        for v in vars {
            exps[v] += 1;
        }
        Monomial::from_exps(&exps)
    })
}

/// Polynomial with up to `terms` terms of total degree at most `deg`.
pub fn poly(rs: RingSpec, deg: usize, terms: usize) -> impl Strategy<Value = QPolynomial> {
    prop::collection::vec((monomial(rs, deg), -4i64..=4, 1i64..=3), 0..=terms).prop_map(move |ts| {
        ts.into_iter().fold(Polynomial::zero(rs), |acc, (m, a, b)| {
            &acc + &Polynomial::term(rs, m, Q::new(a.into(), b.into()))
        })
    })
}

pub fn module_element(rs: RingSpec, deg: usize) -> impl Strategy<Value = FreeModuleElement<Q>> {
    let nv = rs.nvars();
    prop::collection::vec((0..nv, poly(rs, deg, 3)), 0..=3).prop_map(move |parts| {
        parts.into_iter().fold(FreeModuleElement::zero(rs), |acc, (v, c)| {
            acc.try_add(&FreeModuleElement::single(rs.var(v), c)).unwrap()
        })
    })
}
