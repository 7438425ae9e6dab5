//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use lnd_core::delta_module::{
    commutes_check, differential, in_m0, invariant_differential, omega_derivation, FreeModuleElement,
};
use lnd_core::derivation::Derivation;
use lnd_core::invariant::{build_invariant, build_invariant_traced, check_conditions};
use lnd_core::kernel_gens::{expand, f_gen, f_top, generator_products, index_pairs, km_decompose};
use lnd_core::linalg::Echelon;
use lnd_core::poly::{Monomial, Polynomial, RingSpec, Var};
use lnd_core::serial::{module_element_to_value, stamp, PolyRecord};
use lnd_core::{QPolynomial, Q};
use proptest::strategy::{Just, Strategy, ValueTree};
use proptest::test_runner::TestRunner;

const BIN: &str = env!("CARGO_BIN_EXE_lnd-forge");

type Outcome = Result<String, String>;
type Criterion = dyn FnOnce(&mut TestRunner) -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ring(n: usize) -> RingSpec {
    RingSpec::new(n).unwrap()
}

fn int(v: i64) -> Q {
    Q::from_integer(v.into())
}

fn sample<S: Strategy>(runner: &mut TestRunner, s: &S) -> S::Value {
    s.new_tree(runner).expect("strategy").current()
}

/// Random polynomial of total degree at most `deg` with up to `terms` terms.
fn poly_strategy(rs: RingSpec, deg: usize, terms: usize) -> impl Strategy<Value = QPolynomial> {
    let nv = rs.nvars();
    let term = (proptest::collection::vec(0..nv, 0..=deg), -5i64..=5);
    proptest::collection::vec(term, 1..=terms).prop_map(move |ts| {
        let mut p = Polynomial::zero(rs);
        for (vars, c) in ts {
            let mut exps = vec![0u32; nv];
            for v in vars {
                exps[v] += 1;
            }
            p = &p + &Polynomial::term(rs, Monomial::from_exps(&exps), int(c));
        }
        p
    })
}

fn module_strategy(rs: RingSpec, deg: usize) -> impl Strategy<Value = FreeModuleElement<Q>> {
    let nv = rs.nvars();
    proptest::collection::vec((0..nv, poly_strategy(rs, deg, 3)), 1..=3).prop_map(move |parts| {
        let mut e = FreeModuleElement::zero(rs);
        for (v, c) in parts {
            e = e.try_add(&FreeModuleElement::single(rs.var(v), c)).unwrap();
        }
        e
    })
}

fn sparse(p: &QPolynomial) -> BTreeMap<Monomial, Q> {
    p.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

fn invariant_shape() -> Outcome {
    let n = 4;
    let delta = Derivation::<Q>::kuroda(n).unwrap();
    let x1 = Polynomial::<Q>::x(ring(n), 1);
    for ell in 1..=5u32 {
        let cert = build_invariant::<Q>(n, ell).map_err(|e| format!("ell={ell}: {e}"))?;
        let g = &cert.g;
        ensure(delta.apply(g).unwrap().is_zero(), || format!("ell={ell}: δG != 0"))?;
        ensure(g.coeff_in_y_last(ell) == x1.pow(ell), || format!("ell={ell}: top coefficient"))?;
        for i in 0..ell {
            let gi = g.coeff_in_y_last(i);
            let q = gi.exact_div_x1(ell - 1).map_err(|_| format!("ell={ell}: g_{i} not divisible"))?;
            ensure(&q * &x1.pow(ell - 1) == gi, || format!("ell={ell}: g_{i} division"))?;
        }
        ensure(cert.divided.coeff_in_y_last(ell) == x1, || format!("ell={ell}: divided top coefficient"))?;
        ensure(delta.apply(&cert.divided).unwrap().is_zero(), || format!("ell={ell}: δ(divided) != 0"))?;
        ensure(&cert.divided * &x1.pow(ell - 1) == *g, || format!("ell={ell}: divided form"))?;
    }
    Ok("n=4, ell=1..5".into())
}

fn golden_ell2() -> Outcome {
    let expected = Polynomial::<Q>::parse(
        ring(4),
        "x1*y5^2 - 2*x2*x3*x4*y1*y5 + x1*x2^2*x4^2*y1*y3 + x1*x3^2*x4^2*y1*y2 - x1^3*x4^2*y2*y3",
    )
    .unwrap();
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/invariant_n4_ell2_divided.json");
    let golden: PolyRecord = serde_json::from_str(&std::fs::read_to_string(&golden_path).unwrap()).unwrap();
    let golden = golden.to_poly::<Q>().unwrap();
    ensure(golden == expected, || "golden file disagrees with the closed form".into())?;

    let cert = build_invariant::<Q>(4, 2).unwrap();
    ensure(cert.divided == expected, || format!("library: got {}", cert.divided))?;

    let out = Command::new(BIN).args(["invariant", "--n", "4", "--ell", "2"]).output().unwrap();
    ensure(out.status.success(), || "cli exit status".into())?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cli: PolyRecord = serde_json::from_value(v["divided"].clone()).unwrap();
    ensure(cli.to_poly::<Q>().unwrap() == expected, || "cli divided form".into())?;
    Ok(format!("{expected}"))
}

fn conditions_every_step() -> Outcome {
    let mut steps = 0usize;
    let mut violations = 0usize;
    for n in [4usize, 5] {
        for ell in 2..=4u32 {
            let mut g = f_top::<Q>(n).unwrap().pow(ell);
            violations += check_conditions(&g, ell).violations();
            let cert = build_invariant_traced::<Q>(n, ell, |s| {
                g = &g - &s.subtracted;
                steps += 1;
                violations += check_conditions(&g, ell).violations();
            })
            .map_err(|e| format!("n={n} ell={ell}: {e}"))?;
            ensure(g == cert.g, || format!("n={n} ell={ell}: replayed trace differs"))?;
        }
    }
    ensure(violations == 0, || format!("{violations} violations over {steps} steps"))?;
    Ok(format!("{steps} steps, 0 violations"))
}

fn oracle_equivalence() -> Outcome {
    let n = 4;
    let rs = ring(n);
    let delta = Derivation::<Q>::kuroda(n).unwrap();
    let mask = [Var::X(2), Var::X(3), Var::X(4), Var::Y(2), Var::Y(3), Var::Y(4)];
    let oracle = delta.truncated_kernel_basis(6, &mask);

    let products: Vec<QPolynomial> = generator_products::<Q>(n, 6)
        .unwrap()
        .iter()
        .map(|s| s.expand(rs).unwrap())
        .collect();
    let mut span = Echelon::<Monomial, Q>::new();
    for p in &products {
        let _ = span.insert(&sparse(p));
    }
    ensure(span.rank() == oracle.dim(), || format!("dimensions {} vs {}", span.rank(), oracle.dim()))?;
    for p in &products {
        ensure(oracle.spans(p), || format!("product {p} outside the oracle kernel"))?;
    }
    for e in &oracle.elements {
        ensure(span.contains(&sparse(e)), || format!("oracle element {e} outside the product span"))?;
        let kc = km_decompose(e).map_err(|err| format!("decompose {e}: {err}"))?;
        ensure(expand(&kc).unwrap() == *e, || format!("round trip failed for {e}"))?;
    }
    Ok(format!("dim {} ({} products), {} round trips", oracle.dim(), products.len(), oracle.dim()))
}

fn delta_module_suite(runner: &mut TestRunner) -> Outcome {
    let n = 4;
    let rs = ring(n);
    let delta = Derivation::<Q>::kuroda(n).unwrap();
    let dm = omega_derivation::<Q>(n).unwrap();

    let mut gens = vec![f_top::<Q>(n).unwrap()];
    for (i, j) in index_pairs(n) {
        gens.push(f_gen::<Q>(rs, i, j).unwrap());
    }
    gens.extend(rs.vars().map(|v| Polynomial::var(rs, v)));
    for g in &gens {
        ensure(commutes_check(&delta, &dm, g).unwrap(), || format!("commutes_check fails on {g}"))?;
    }
    let polys = poly_strategy(rs, 4, 6);
    for _ in 0..60 {
        let p = sample(runner, &polys);
        ensure(commutes_check(&delta, &dm, &p).unwrap(), || format!("commutes_check fails on {p}"))?;
    }
    for ell in 1..=4u32 {
        let e = invariant_differential::<Q>(n, ell).map_err(|e| e.to_string())?;
        ensure(in_m0(&dm, &e).unwrap().in_m0, || format!("d(invariant) not in M0 for ell={ell}"))?;
    }
    let elems = module_strategy(rs, 4);
    for _ in 0..100 {
        let e = sample(runner, &elems);
        let bound = e.y_degree().map_or(0, |d| d as usize + 2);
        dm.nilpotency_index(&e, Some(bound)).map_err(|err| format!("bound exceeded for {e:?}: {err}"))?;
    }
    Ok(format!("{} generators, 60 random commute checks, ell<=4 in M0, 100 nilpotency checks", gens.len()))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let rs = ring(4);

    let cert = d.join("cert.json");
    run(&["invariant", "--n", "4", "--ell", "3", "--out", cert.to_str().unwrap()])?;

    let kernel_poly = &(&f_gen::<Q>(rs, 2, 3).unwrap() * &f_gen::<Q>(rs, 3, 4).unwrap())
        + &Polynomial::parse(rs, "3*x2^2*x4").unwrap();
    let kpath = d.join("kernel_poly.json");
    write_json(&kpath, serde_json::to_value(PolyRecord::from_poly(&kernel_poly)).unwrap());

    let p = Polynomial::<Q>::parse(rs, "x1*y5^2 - 1/2*x2*y3*y1 + y4").unwrap();
    let ppath = d.join("poly.json");
    write_json(&ppath, serde_json::to_value(PolyRecord::from_poly(&p)).unwrap());

    let e = differential(&p);
    let epath = d.join("module.json");
    write_json(&epath, module_element_to_value(&e));

    let s = |p: &Path| p.to_str().unwrap().to_string();
    let cases: Vec<Vec<String>> = vec![
        vec!["invariant".into(), "--n".into(), "5".into(), "--ell".into(), "3".into()],
        vec!["verify".into(), "--in".into(), s(&cert)],
        vec!["decompose".into(), "--in".into(), s(&kpath)],
        vec!["oracle".into(), "--n".into(), "4".into(), "--deg".into(), "3".into()],
        vec!["oracle".into(), "--n".into(), "4".into(), "--deg".into(), "4".into(), "--vars".into(), "x2,x3,x4,y2,y3,y4".into()],
        vec!["oracle".into(), "--n".into(), "4".into(), "--deg".into(), "2".into(), "--target".into(), "m0".into()],
        vec!["m0".into(), "--n".into(), "4".into(), "--ell".into(), "3".into()],
        vec!["apply".into(), "--in".into(), s(&ppath)],
        vec!["apply".into(), "--in".into(), s(&epath)],
    ];
    for (k, args) in cases.iter().enumerate() {
        let mut bytes = Vec::new();
        for round in 0..2 {
            let out = d.join(format!("case{k}_{round}.json"));
            let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
            full.extend(["--out", out.to_str().unwrap()]);
            run(&full)?;
            bytes.push(std::fs::read(&out).unwrap());
        }
        ensure(bytes[0] == bytes[1], || format!("`{}` differs between runs", args.join(" ")))?;
        ensure(!bytes[0].is_empty(), || format!("`{}` wrote nothing", args.join(" ")))?;
    }
    Ok(format!("{} subcommand invocations", cases.len()))
}

fn run(args: &[&str]) -> Result<(), String> {
    let out = Command::new(BIN).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("`{}` exited with {}: {}", args.join(" "), out.status, String::from_utf8_lossy(&out.stdout))
    })
}

fn write_json(path: &Path, v: serde_json::Value) {
    std::fs::write(path, serde_json::to_string_pretty(&stamp(v)).unwrap()).unwrap();
}

fn properties(runner: &mut TestRunner) -> Outcome {
    // τ stability
    let mono = (4usize..=6).prop_flat_map(|n| (Just(n), proptest::collection::vec(0u32..6, 2 * n + 1)));
    for _ in 0..1000 {
        let (n, exps) = sample(runner, &mono);
        let rs = ring(n);
        let m = Monomial::from_exps(&exps);
        let t = m.tau();
        let mv = |v: Var| Monomial::var(rs, v);
        let mut factors = vec![mv(Var::Y(n + 1)), mv(Var::X(1))];
        for i in 2..=n {
            let xi2 = mv(Var::X(i)).mul(&mv(Var::X(i)));
            factors.push(xi2.mul(&mv(Var::Y(1))));
            for j in 2..=n {
                factors.push(xi2.mul(&mv(Var::Y(j))));
            }
        }
        for f in &factors {
            ensure(m.mul(f).tau() == t, || format!("τ({m}·{f}) != τ({m})"))?;
        }
    }

    // Leibniz for δ and δ_M
    let rs = ring(4);
    let delta = Derivation::<Q>::kuroda(4).unwrap();
    let dm = omega_derivation::<Q>(4).unwrap();
    let polys = poly_strategy(rs, 4, 5);
    let elems = module_strategy(rs, 3);
    for _ in 0..200 {
        let (p, q) = (sample(runner, &polys), sample(runner, &polys));
        let lhs = delta.apply(&(&p * &q)).unwrap();
        let rhs = &(&delta.apply(&p).unwrap() * &q) + &(&p * &delta.apply(&q).unwrap());
        ensure(lhs == rhs, || format!("δ Leibniz fails for {p}, {q}"))?;

        let e = sample(runner, &elems);
        let lhs = dm.apply(&e.scale(&p).unwrap()).unwrap();
        let rhs = e
            .scale(&delta.apply(&p).unwrap())
            .unwrap()
            .try_add(&dm.apply(&e).unwrap().scale(&p).unwrap())
            .unwrap();
        ensure(lhs == rhs, || format!("δ_M Leibniz fails for {p}"))?;
    }
    Ok("1000 monomials, 200 pairs each for δ and δ_M".into())
}

fn main() -> ExitCode {
    let mut runner = TestRunner::deterministic();
    let criteria: Vec<(&str, Box<Criterion>)> = vec![
        ("invariant shape", Box::new(|_| invariant_shape())),
        ("ell=2 golden value", Box::new(|_| golden_ell2())),
        ("conditions after every step", Box::new(|_| conditions_every_step())),
        ("kernel oracle equivalence", Box::new(|_| oracle_equivalence())),
        ("delta-module suite", Box::new(delta_module_suite)),
        ("cli determinism", Box::new(|_| determinism())),
        ("property suite", Box::new(properties)),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check(&mut runner);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.2}s): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
