//! A small text reader for human-typed polynomials such as
//! `x1*y5 - x2*x3*x4*y1` or `-1/2*x2^2*y3 + 7`.

use super::{Monomial, PolyError, Polynomial, RingSpec};
use crate::scalar::ExactScalar;

impl<C: ExactScalar> Polynomial<C> {
    pub fn parse(ring: RingSpec, text: &str) -> Result<Self, PolyError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(PolyError::Parse("empty input".into()));
        }
        let mut terms = Vec::new();
        let mut rest = compact.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let negative = match rest.as_bytes()[0] {
                b'+' => {
                    rest = &rest[1..];
                    false
                }
                b'-' => {
                    rest = &rest[1..];
                    true
                }
                _ if first => false,
                _ => return Err(PolyError::Parse(format!("expected + or - before {rest:?}"))),
            };
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (term, tail) = rest.split_at(end);
            rest = tail;
            let (m, mut c) = parse_term::<C>(ring, term)?;
            if negative {
                c = -c;
            }
            terms.push((m, c));
        }
        Polynomial::from_terms(ring, terms)
    }
}

fn parse_term<C: ExactScalar>(ring: RingSpec, term: &str) -> Result<(Monomial, C), PolyError> {
    if term.is_empty() {
        return Err(PolyError::Parse("empty term".into()));
    }
    let mut coeff = C::one();
    let mut m = Monomial::one(ring);
    for factor in term.split('*') {
        match factor.chars().next() {
            Some(c @ ('x' | 'y')) => {
                let (name, exp) = match factor.split_once('^') {
                    Some((name, e)) => (name, parse_u32(e)?),
                    None => (factor, 1),
                };
                let idx: usize = parse_u32(&name[1..])? as usize;
                let limit = if c == 'x' { ring.n() } else { ring.n() + 1 };
                if idx == 0 || idx > limit {
                    return Err(PolyError::Parse(format!("variable {name} out of range")));
                }
                let flat = if c == 'x' { idx - 1 } else { ring.n() + idx - 1 };
                m.set_exp(flat, m.exp(flat) + exp);
            }
            Some(_) => {
                let v = C::parse_fraction(factor)
                    .ok_or_else(|| PolyError::Parse(format!("bad coefficient {factor:?}")))?;
                coeff = coeff * v;
            }
            None => return Err(PolyError::Parse(format!("empty factor in {term:?}"))),
        }
    }
    Ok((m, coeff))
}

fn parse_u32(s: &str) -> Result<u32, PolyError> {
    s.parse().map_err(|_| PolyError::Parse(format!("bad integer {s:?}")))
}
