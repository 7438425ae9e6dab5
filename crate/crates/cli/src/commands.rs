use std::fs;
use std::path::Path;
use std::process::ExitCode;

use lnd_core::delta_module::{in_m0, invariant_differential, omega_derivation, truncated_m0_basis, ModuleError};
use lnd_core::derivation::{Derivation, DerivationError};
use lnd_core::invariant::{build_invariant_traced, verify_certificate, BuildError};
use lnd_core::kernel_gens::{expand, km_decompose, KernelGenError};
use lnd_core::poly::{RingSpec, Var};
use lnd_core::serial::{
    m0_report_to_value, module_element_from_value, module_element_to_value, stamp, CertificateRecord,
    KernelBasisRecord, KernelCombinationRecord, PolyRecord, SerialError,
};
use lnd_core::Q;
use serde_json::{json, Value};

use crate::{Cli, Command, OracleTarget};

/// A domain failure: reported as `{"error": code, "message": ...}` with exit
/// code 1, or as a structured body (e.g. verification violations).
pub struct Failure {
    code: &'static str,
    message: String,
    body: Option<Value>,
}

impl Failure {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        Failure { code, message: message.into(), body: None }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        let code = match &e {
            BuildError::NRequirement(_) => "n_requirement",
            BuildError::EllZero => "ell_zero",
            BuildError::InvariantViolation(_) => "invariant_violation",
            BuildError::KernelGen(_) => "decomposition_failed",
            _ => "build_failed",
        };
        Failure::new(code, e.to_string())
    }
}

impl From<KernelGenError> for Failure {
    fn from(e: KernelGenError) -> Self {
        let code = match &e {
            KernelGenError::NotInKernel => "not_in_kernel",
            KernelGenError::UnsupportedVariables => "unsupported_variables",
            KernelGenError::DecompositionFailed => "decomposition_failed",
            _ => "invalid_input",
        };
        Failure::new(code, e.to_string())
    }
}

impl From<DerivationError> for Failure {
    fn from(e: DerivationError) -> Self {
        let code = match &e {
            DerivationError::NTooSmall(_) => "n_requirement",
            _ => "invalid_input",
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ModuleError> for Failure {
    fn from(e: ModuleError) -> Self {
        match e {
            ModuleError::Derivation(d) => d.into(),
            other => Failure::new("invalid_input", other.to_string()),
        }
    }
}

impl From<SerialError> for Failure {
    fn from(e: SerialError) -> Self {
        Failure::new("invalid_input", e.to_string())
    }
}

pub fn execute(cli: &Cli) -> ExitCode {
    let (value, code) = match run(cli) {
        Ok(v) => (v, ExitCode::SUCCESS),
        Err(f) => {
            let body = f.body.unwrap_or_else(|| json!({ "error": f.code, "message": f.message }));
            (body, ExitCode::from(1))
        }
    };
    let mut text = serde_json::to_string_pretty(&stamp(value)).expect("serializable");
    text.push('\n');
    match (&cli.out, code == ExitCode::SUCCESS) {
        (Some(path), true) => {
            if let Err(e) = fs::write(path, &text) {
                let err = json!({ "error": "io", "message": format!("{}: {e}", path.display()) });
                println!("{}", serde_json::to_string_pretty(&stamp(err)).expect("serializable"));
                return ExitCode::from(1);
            }
        }
        _ => print!("{text}"),
    }
    code
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new("invalid_input", format!("{}: {e}", path.display())))
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::new("invalid_input", e.to_string()))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn parse_vars(n: usize, names: &[String]) -> Result<Vec<Var>, Failure> {
    names
        .iter()
        .map(|s| {
            let s = s.trim();
            let bad = || Failure::new("invalid_input", format!("unknown variable {s:?}"));
            let idx: usize = s.get(1..).and_then(|i| i.parse().ok()).ok_or_else(bad)?;
            match s.chars().next() {
                Some('x') if (1..=n).contains(&idx) => Ok(Var::X(idx)),
                Some('y') if (1..=n + 1).contains(&idx) => Ok(Var::Y(idx)),
                _ => Err(bad()),
            }
        })
        .collect()
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    let verbose = cli.verbose;
    match &cli.command {
        Command::Invariant { n, ell } => {
            let cert = build_invariant_traced::<Q>(*n, *ell, |s| {
                if verbose {
                    eprintln!("step r={} p={} q={} summand c={}", s.r, s.p, s.q_total, s.summand.c);
                }
            })?;
            if verbose {
                eprintln!("done: {} steps, {} terms in G", cert.steps.len(), cert.g.len());
            }
            Ok(to_value(&CertificateRecord::from_certificate(&cert)))
        }
        Command::Verify { input } => {
            let rec: CertificateRecord = from_value(read_json(input)?)?;
            let cert = rec.to_certificate::<Q>()?;
            let violations = verify_certificate(&cert);
            if verbose {
                eprintln!("checked {} steps, {} violations", cert.steps.len(), violations.len());
            }
            if violations.is_empty() {
                Ok(json!({ "ok": true, "n": cert.n, "ell": cert.ell, "steps": cert.steps.len() }))
            } else {
                Err(Failure {
                    code: "verification_failed",
                    message: violations.join(", "),
                    body: Some(json!({ "ok": false, "error": "verification_failed", "violations": violations })),
                })
            }
        }
        Command::Decompose { input } => {
            let p = from_value::<PolyRecord>(read_json(input)?)?.to_poly::<Q>()?;
            let kc = km_decompose(&p)?;
            if expand(&kc)? != p {
                return Err(Failure::new("decomposition_failed", "expansion does not reproduce the input"));
            }
            if verbose {
                eprintln!("{} summands", kc.summands.len());
            }
            Ok(to_value(&KernelCombinationRecord::from_combination(&kc)))
        }
        Command::Oracle { n, deg, target, vars } => {
            let delta = Derivation::<Q>::kuroda(*n)?;
            match target {
                OracleTarget::Kernel => {
                    let mask = match vars {
                        Some(names) => parse_vars(*n, names)?,
                        None => RingSpec::new(*n).map_err(|e| Failure::new("invalid_input", e.to_string()))?.vars().collect(),
                    };
                    let basis = delta.truncated_kernel_basis(*deg, &mask);
                    if verbose {
                        eprintln!("kernel dimension {} at degree <= {deg}", basis.dim());
                    }
                    Ok(to_value(&KernelBasisRecord::from_basis(*n, &basis)))
                }
                OracleTarget::M0 => {
                    if vars.is_some() {
                        return Err(Failure::new("invalid_input", "--vars applies to the kernel target only"));
                    }
                    let dm = omega_derivation::<Q>(*n)?;
                    let basis = truncated_m0_basis(&dm, *deg);
                    if verbose {
                        eprintln!("M0 dimension {} at degree <= {deg}", basis.len());
                    }
                    let elements: Vec<Value> = basis.iter().map(module_element_to_value).collect();
                    Ok(json!({ "n": n, "degree_bound": deg, "elements": elements }))
                }
            }
        }
        Command::M0 { n, ell } => {
            let e = invariant_differential::<Q>(*n, *ell)?;
            let dm = omega_derivation::<Q>(*n)?;
            let report = in_m0(&dm, &e)?;
            let top = e.coeff(Var::Y(n + 1)).var_degree(Var::Y(n + 1));
            let mut v = json!({ "n": n, "ell": ell, "dy_last_degree": top });
            if let (Value::Object(obj), Value::Object(rep)) = (&mut v, m0_report_to_value(&report)) {
                obj.extend(rep);
            }
            Ok(v)
        }
        Command::Apply { input } => {
            let v = read_json(input)?;
            if v.get("terms").is_some() {
                let p = from_value::<PolyRecord>(v)?.to_poly::<Q>()?;
                let delta = Derivation::<Q>::kuroda(p.ring().n())?;
                Ok(to_value(&PolyRecord::from_poly(&delta.apply(&p)?)))
            } else {
                let e = module_element_from_value::<Q>(&v)?;
                let dm = omega_derivation::<Q>(e.ring().n())?;
                Ok(module_element_to_value(&dm.apply(&e)?))
            }
        }
    }
}
