//! JSON formats shared by the library and the CLI.
//!
//! A polynomial is `{"n": 4, "terms": [{"c": "-2/1", "x": [..], "y": [..]}]}`
//! with terms in canonical (descending) order and coefficients as exact
//! fraction strings. Every other record embeds polynomials in this form.
//! Files written by the CLI additionally carry `"schema": "lnd-forge/v1"`
//! as their first key (see [`stamp`]).

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::delta_module::{FreeModuleElement, M0Report};
use crate::derivation::KernelBasis;
use crate::invariant::{EliminationStep, InvariantCertificate};
use crate::kernel_gens::{KernelCombination, Summand};
use crate::poly::{Monomial, PolyError, Polynomial, RingSpec, Var};
use crate::scalar::ExactScalar;

pub const SCHEMA: &str = "lnd-forge/v1";

#[derive(Debug, Error)]
pub enum SerialError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad coefficient {0:?}")]
    Coefficient(String),
    #[error("malformed record: {0}")]
    Shape(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub c: String,
    pub x: Vec<u32>,
    pub y: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub n: usize,
    pub terms: Vec<TermRecord>,
}

fn coeff<C: ExactScalar>(s: &str) -> Result<C, SerialError> {
    C::parse_fraction(s).ok_or_else(|| SerialError::Coefficient(s.to_string()))
}

impl PolyRecord {
    pub fn from_poly<C: ExactScalar>(p: &Polynomial<C>) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| TermRecord { c: c.to_fraction(), x: m.x_exps().to_vec(), y: m.y_exps().to_vec() })
            .collect();
        PolyRecord { n: p.ring().n(), terms }
    }

    /// Reads terms in any order, summing repeats and dropping zeros.
    pub fn to_poly<C: ExactScalar>(&self) -> Result<Polynomial<C>, SerialError> {
        let ring = RingSpec::new(self.n)?;
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((Monomial::from_parts(ring, &t.x, &t.y)?, coeff::<C>(&t.c)?)))
            .collect::<Result<Vec<_>, SerialError>>()?;
        Ok(Polynomial::from_terms(ring, terms)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandRecord {
    pub c: String,
    pub d: Vec<u32>,
    /// `[i, j, t_ij]` triples with `i < j`, sorted.
    pub t: Vec<[usize; 3]>,
}

impl SummandRecord {
    pub fn from_summand<C: ExactScalar>(s: &Summand<C>) -> Self {
        SummandRecord {
            c: s.c.to_fraction(),
            d: s.d.clone(),
            t: s.t.iter().map(|(&(i, j), &e)| [i, j, e as usize]).collect(),
        }
    }

    pub fn to_summand<C: ExactScalar>(&self) -> Result<Summand<C>, SerialError> {
        let mut t = std::collections::BTreeMap::new();
        for &[i, j, e] in &self.t {
            if i >= j {
                return Err(SerialError::Shape(format!("pair ({i}, {j}) must have i < j")));
            }
            let e = u32::try_from(e).map_err(|_| SerialError::Shape("exponent too large".into()))?;
            if e > 0 && t.insert((i, j), e).is_some() {
                return Err(SerialError::Shape(format!("pair ({i}, {j}) repeated")));
            }
        }
        Ok(Summand { c: coeff(&self.c)?, d: self.d.clone(), t })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCombinationRecord {
    pub n: usize,
    pub summands: Vec<SummandRecord>,
}

impl KernelCombinationRecord {
    pub fn from_combination<C: ExactScalar>(kc: &KernelCombination<C>) -> Self {
        KernelCombinationRecord { n: kc.n, summands: kc.summands.iter().map(SummandRecord::from_summand).collect() }
    }

    pub fn to_combination<C: ExactScalar>(&self) -> Result<KernelCombination<C>, SerialError> {
        let summands = self.summands.iter().map(SummandRecord::to_summand).collect::<Result<_, _>>()?;
        Ok(KernelCombination { n: self.n, summands })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelBasisRecord {
    pub n: usize,
    pub degree_bound: u32,
    pub elements: Vec<PolyRecord>,
}

impl KernelBasisRecord {
    pub fn from_basis<C: ExactScalar>(n: usize, b: &KernelBasis<C>) -> Self {
        KernelBasisRecord {
            n,
            degree_bound: b.degree_bound,
            elements: b.elements.iter().map(PolyRecord::from_poly).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub r: u32,
    pub p: u32,
    pub summand: SummandRecord,
    pub q_total: u32,
    pub q_split: Vec<u32>,
    #[serde(rename = "F")]
    pub f: PolyRecord,
    #[serde(rename = "H")]
    pub h: PolyRecord,
    pub subtracted: PolyRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub n: usize,
    pub ell: u32,
    #[serde(rename = "G")]
    pub g: PolyRecord,
    pub divided: PolyRecord,
    pub steps: Vec<StepRecord>,
}

impl CertificateRecord {
    pub fn from_certificate<C: ExactScalar>(cert: &InvariantCertificate<C>) -> Self {
        CertificateRecord {
            n: cert.n,
            ell: cert.ell,
            g: PolyRecord::from_poly(&cert.g),
            divided: PolyRecord::from_poly(&cert.divided),
            steps: cert
                .steps
                .iter()
                .map(|s| StepRecord {
                    r: s.r,
                    p: s.p,
                    summand: SummandRecord::from_summand(&s.summand),
                    q_total: s.q_total,
                    q_split: s.q_split.clone(),
                    f: PolyRecord::from_poly(&s.f),
                    h: PolyRecord::from_poly(&s.h),
                    subtracted: PolyRecord::from_poly(&s.subtracted),
                })
                .collect(),
        }
    }

    pub fn to_certificate<C: ExactScalar>(&self) -> Result<InvariantCertificate<C>, SerialError> {
        let steps = self
            .steps
            .iter()
            .map(|s| {
                Ok(EliminationStep {
                    r: s.r,
                    p: s.p,
                    summand: s.summand.to_summand()?,
                    q_total: s.q_total,
                    q_split: s.q_split.clone(),
                    f: s.f.to_poly()?,
                    h: s.h.to_poly()?,
                    subtracted: s.subtracted.to_poly()?,
                })
            })
            .collect::<Result<_, SerialError>>()?;
        Ok(InvariantCertificate {
            n: self.n,
            ell: self.ell,
            g: self.g.to_poly()?,
            divided: self.divided.to_poly()?,
            steps,
        })
    }
}

fn basis_key(v: Var) -> String {
    format!("d{v}")
}

/// `{"n": 4, "dx1": {...}, ..., "dy5": {...}}` with zero components omitted
/// and keys in basis order. `n` is carried so the zero element round-trips.
pub fn module_element_to_value<C: ExactScalar>(e: &FreeModuleElement<C>) -> Value {
    let mut map = Map::new();
    map.insert("n".into(), Value::from(e.ring().n()));
    for (v, c) in e.components() {
        map.insert(basis_key(v), serde_json::to_value(PolyRecord::from_poly(c)).expect("serializable"));
    }
    Value::Object(map)
}

pub fn module_element_from_value<C: ExactScalar>(value: &Value) -> Result<FreeModuleElement<C>, SerialError> {
    let obj = value.as_object().ok_or_else(|| SerialError::Shape("module element must be an object".into()))?;
    let mut parts = Vec::new();
    let mut n_seen: Option<usize> = obj.get("n").and_then(Value::as_u64).map(|n| n as usize);
    for (k, v) in obj {
        if k == "n" || k == "schema" {
            continue;
        }
        let p: Polynomial<C> = serde_json::from_value::<PolyRecord>(v.clone())?.to_poly()?;
        let n = *n_seen.get_or_insert(p.ring().n());
        if p.ring().n() != n {
            return Err(SerialError::Shape(format!("component {k} has n = {}", p.ring().n())));
        }
        let var = parse_basis_key(k, n)?;
        parts.push((var, p));
    }
    let n = n_seen.ok_or_else(|| SerialError::Shape("cannot infer n for an empty element".into()))?;
    let ring = RingSpec::new(n)?;
    FreeModuleElement::from_components(ring, parts).map_err(|e| SerialError::Shape(e.to_string()))
}

fn parse_basis_key(k: &str, n: usize) -> Result<Var, SerialError> {
    let bad = || SerialError::Shape(format!("unknown basis key {k:?}"));
    let rest = k.strip_prefix('d').ok_or_else(bad)?;
    let (kind, idx) = rest.split_at(1.min(rest.len()));
    let idx: usize = idx.parse().map_err(|_| bad())?;
    match kind {
        "x" if (1..=n).contains(&idx) => Ok(Var::X(idx)),
        "y" if (1..=n + 1).contains(&idx) => Ok(Var::Y(idx)),
        _ => Err(bad()),
    }
}

pub fn m0_report_to_value<C: ExactScalar>(r: &M0Report<C>) -> Value {
    let mut map = Map::new();
    map.insert("element".into(), module_element_to_value(&r.element));
    map.insert("image".into(), module_element_to_value(&r.image));
    map.insert("in_m0".into(), Value::Bool(r.in_m0));
    Value::Object(map)
}

/// Prepends `"schema": "lnd-forge/v1"` to a JSON object.
pub fn stamp(value: Value) -> Value {
    match value {
        Value::Object(obj) => {
            let mut map = Map::new();
            map.insert("schema".into(), Value::from(SCHEMA));
            for (k, v) in obj {
                if k != "schema" {
                    map.insert(k, v);
                }
            }
            Value::Object(map)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta_module::differential;
    use crate::invariant::build_invariant;
    use crate::Q;

    #[test]
    fn polynomial_format() {
        let ring = RingSpec::new(4).unwrap();
        let p = Polynomial::<Q>::parse(ring, "x1*y5 - 2*x2*x3*x4*y1").unwrap();
        let json = serde_json::to_string(&PolyRecord::from_poly(&p)).unwrap();
        assert_eq!(
            json,
            r#"{"n":4,"terms":[{"c":"-2/1","x":[0,1,1,1],"y":[1,0,0,0,0]},{"c":"1/1","x":[1,0,0,0],"y":[0,0,0,0,1]}]}"#
        );
        let back: PolyRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_poly::<Q>().unwrap(), p);
    }

    #[test]
    fn rejects_bad_records() {
        let bad_c = r#"{"n":4,"terms":[{"c":"one","x":[1,0,0,0],"y":[0,0,0,0,1]}]}"#;
        let rec: PolyRecord = serde_json::from_str(bad_c).unwrap();
        assert!(matches!(rec.to_poly::<Q>(), Err(SerialError::Coefficient(_))));
        let bad_len = r#"{"n":4,"terms":[{"c":"1","x":[1,0,0],"y":[0,0,0,0,1]}]}"#;
        let rec: PolyRecord = serde_json::from_str(bad_len).unwrap();
        assert!(rec.to_poly::<Q>().is_err());
    }

    #[test]
    fn certificate_round_trip() {
        let cert = build_invariant::<Q>(4, 3).unwrap();
        let rec = CertificateRecord::from_certificate(&cert);
        let text = serde_json::to_string(&rec).unwrap();
        let back: CertificateRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_certificate::<Q>().unwrap(), cert);
    }

    #[test]
    fn module_element_keys_in_basis_order() {
        let ring = RingSpec::new(4).unwrap();
        let p = Polynomial::<Q>::parse(ring, "x1*y5 - x2*x3*x4*y1").unwrap();
        let v = module_element_to_value(&differential(&p));
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["n", "dx1", "dx2", "dx3", "dx4", "dy1", "dy5"]);
        assert_eq!(module_element_from_value::<Q>(&v).unwrap(), differential(&p));
        let zero = module_element_to_value(&FreeModuleElement::<Q>::zero(ring));
        assert!(module_element_from_value::<Q>(&zero).unwrap().is_zero());
        assert!(module_element_from_value::<Q>(&serde_json::json!({"dz1": {"n": 4, "terms": []}})).is_err());
    }

    #[test]
    fn stamp_puts_schema_first() {
        let v = stamp(serde_json::json!({"a": 1, "schema": "old"}));
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["schema", "a"]);
        assert_eq!(v["schema"], SCHEMA);
    }
}
