//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use quivsat::cnf::{preprocess, Clause, Formula, Literal};
use quivsat::gf::FieldSpec;
use quivsat::harness::{
    decide_sat, schur_root_certificate, tits_check, verify_formula, CertificateKind, Verdict, VerifyOptions,
};
use quivsat::matrix::{Backend, Matrix};
use quivsat::reduction::{
    build_skeleton, general_field_conditions, select_e_vectors, subset_basis_condition, EVectorScheme,
};
use quivsat::roots::{classify_root, default_max_steps, gram_matrix, occurrence_counts, RootClass, RootVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{corpus, gf3_cases, messy_formula, Case};

const CRITERION_1_LIMIT: Duration = Duration::from_secs(120);
const CRITERION_3_LIMIT: Duration = Duration::from_secs(600);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn gf2() -> FieldSpec {
    FieldSpec::gf2()
}

fn gf3() -> FieldSpec {
    FieldSpec::prime(3).unwrap()
}

fn gf4() -> FieldSpec {
    FieldSpec::new(2, 2, None).unwrap()
}

fn criterion_1(cases: &[Case]) -> Outcome {
    let start = Instant::now();
    let mut assignments = 0;
    let mut problems = Vec::new();
    for case in cases {
        let report = verify_formula(&case.formula, &gf2(), &VerifyOptions::default()).unwrap();
        assignments += report.assignments.len();
        for r in &report.assignments {
            let ok = if r.evaluates {
                r.end_dim == 1 && r.certificate == CertificateKind::Schur
            } else {
                r.end_dim >= 2 && r.certificate == CertificateKind::ExplicitDecomposition
            };
            if !ok {
                problems.push(format!("{}: {:?}", case.name, r.assignment));
            }
        }
        let models = case.formula.boolean_models().len();
        if report.count(CertificateKind::Schur) != models || report.verdict != Verdict::Pass {
            problems.push(format!("{}: model count mismatch", case.name));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        problems.is_empty() && elapsed < CRITERION_1_LIMIT,
        format!(
            "{} formulas, {assignments} assignments, {} violations, {:.1}s (limit {}s)",
            cases.len(),
            problems.len(),
            elapsed.as_secs_f64(),
            CRITERION_1_LIMIT.as_secs()
        ),
    )
}

fn criterion_2(cases: &[Case]) -> Outcome {
    let mut checked = 0;
    let mut problems = Vec::new();
    for case in cases {
        let f = &case.formula;
        let l = f.num_clauses() as i64;
        let counts = occurrence_counts(f);
        let sum_sq: i64 = counts.iter().map(|&c| (c * c) as i64).sum();
        // Independent evaluations of both closed forms.
        let general = |b: i64| 2 * b * (l - counts.iter().map(|&c| c as i64 * (b * c as i64 + 1)).sum::<i64>());
        let expected = [(gf2(), -4 * l - 2 * sum_sq), (gf3(), general(8)), (gf4(), general(27))];
        if general(1) != -4 * l - 2 * sum_sq {
            problems.push(format!("{}: B=1 specialization", case.name));
        }
        for (field, value) in expected {
            let sk = build_skeleton(f, &field).unwrap();
            let t = tits_check(&sk).unwrap();
            checked += 1;
            if t.gram_value != value || t.closed_form != value || !t.pairings_match {
                problems.push(format!("{} over {field}: {t:?}, expected {value}", case.name));
            }
        }
    }
    outcome(problems.is_empty(), format!("{checked} (formula, field) pairs, {} mismatches {problems:?}", problems.len()))
}

/// Every formula of at most three distinct-variable clauses over three
/// variables, up to clause order.
fn small_triple_formulas() -> Vec<Formula> {
    let patterns: Vec<Clause> = (0..8u8)
        .map(|s| {
            let lit = |v: usize, bit: u8| if s >> bit & 1 == 1 { Literal::neg(v) } else { Literal::pos(v) };
            Clause::triple(lit(1, 0), lit(2, 1), lit(3, 2))
        })
        .collect();
    let mut out = Vec::new();
    for a in 0..8 {
        out.push(vec![a]);
        for b in a..8 {
            out.push(vec![a, b]);
            for c in b..8 {
                out.push(vec![a, b, c]);
            }
        }
    }
    out.into_iter()
        .map(|idx| Formula::new(3, idx.into_iter().map(|i| patterns[i].clone()).collect()).unwrap())
        .collect()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let field = gf3();
    let mut problems = Vec::new();
    let mut unsat_verified = Vec::new();
    let mut max_clauses = 0;
    for case in gf3_cases() {
        let f = &case.formula;
        max_clauses = max_clauses.max(f.num_clauses());
        if f.num_vars() > 3 {
            problems.push(format!("{}: M = {}", case.name, f.num_vars()));
        }
        let report = verify_formula(f, &field, &VerifyOptions::default()).unwrap();
        for r in &report.assignments {
            if r.evaluates && r.boolean && r.end_dim != 1 {
                problems.push(format!("{}: boolean model {:?} has dim End {}", case.name, r.assignment, r.end_dim));
            }
        }
        if report.verdict != Verdict::Pass {
            problems.push(format!("{}: verdict fail", case.name));
        }
        if !f.is_satisfiable_brute_force()
            && report.assignments.len() == 27
            && report.count(CertificateKind::ExplicitDecomposition) == 27
        {
            unsat_verified.push(format!("{} (L = {})", case.name, f.num_clauses()));
        }
    }
    // No unsatisfiable formula exists within M ≤ 3, L ≤ 3; confirm by enumeration.
    let small = small_triple_formulas();
    let small_unsat = small.iter().filter(|f| !f.is_satisfiable_brute_force()).count();
    let elapsed = start.elapsed();
    outcome(
        problems.is_empty() && !unsat_verified.is_empty() && elapsed < CRITERION_3_LIMIT,
        format!(
            "5 formulas over GF(3), max L {max_clauses}, unsat verified: {unsat_verified:?}; \
             {small_unsat} of {} formulas with M <= 3, L <= 3 are unsatisfiable; {:.1}s (limit {}s) {problems:?}",
            small.len(),
            elapsed.as_secs_f64(),
            CRITERION_3_LIMIT.as_secs()
        ),
    )
}

fn criterion_4(cases: &[Case]) -> Outcome {
    let mut unsat = 0;
    let mut failures = Vec::new();
    for case in cases {
        if !case.formula.is_satisfiable_brute_force() {
            unsat += 1;
        }
        let positive = case.formula.positive_form();
        let same_dims =
            build_skeleton(&case.formula, &gf2()).unwrap().dims() == build_skeleton(&positive, &gf2()).unwrap().dims();
        if !same_dims || !schur_root_certificate(&case.formula, &gf2()).unwrap() {
            failures.push(case.name.clone());
        }
    }
    for case in gf3_cases() {
        if !schur_root_certificate(&case.formula, &gf3()).unwrap() {
            failures.push(format!("{} over GF(3)", case.name));
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} formulas over GF(2) ({unsat} unsatisfiable) and 5 over GF(3), failures {failures:?}", cases.len()),
    )
}

fn criterion_5(cases: &[Case]) -> Outcome {
    let mut checks = 0;
    let mut failures = Vec::new();
    for case in cases {
        for (i, &count) in occurrence_counts(&case.formula).iter().enumerate() {
            let sum_basis = select_e_vectors(&gf2(), count, 1, EVectorScheme::SumOfBasis).unwrap();
            let general2 = select_e_vectors(&gf2(), count, 1, EVectorScheme::GeneralField).unwrap();
            let general3 = select_e_vectors(&gf3(), 8 * count, 8, EVectorScheme::GeneralField).unwrap();
            let results = [
                subset_basis_condition(&gf2(), &sum_basis),
                general_field_conditions(&gf2(), &general2),
                general_field_conditions(&gf3(), &general3),
            ];
            checks += results.len();
            if results.iter().any(|ok| !ok) {
                failures.push(format!("{} x{}: {results:?}", case.name, i + 1));
            }
        }
    }
    outcome(failures.is_empty(), format!("{checks} variable-level checks, failures {failures:?}"))
}

fn criterion_6(cases: &[Case]) -> Outcome {
    let mut failures = Vec::new();
    for case in cases {
        for field in [gf2(), gf3(), gf4()] {
            let sk = build_skeleton(&case.formula, &field).unwrap();
            let t = tits_check(&sk).unwrap();
            if t.gram_value > 0 {
                failures.push(format!("{} over {field}: (α,α) = {}", case.name, t.gram_value));
            }
        }
        let sk = build_skeleton(&case.formula, &gf2()).unwrap();
        let lat = gram_matrix(sk.quiver()).unwrap();
        let alpha = RootVector::new(sk.dims().iter().map(|&d| d as i64).collect());
        let class = classify_root(&lat, &alpha, default_max_steps(&alpha)).unwrap();
        if class != RootClass::Imaginary {
            failures.push(format!("{}: {class}", case.name));
        }
    }
    outcome(failures.is_empty(), format!("{} formulas classified imaginary, failures {failures:?}", cases.len()))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    let (mut tautologies, mut duplicates, mut short) = (0, 0, 0);
    for _ in 0..200 {
        let f = messy_formula(&mut rng);
        let p = preprocess(&f);
        tautologies += p.provenance().deleted_tautologies.len();
        duplicates += f.clauses().iter().filter(|c| !c.is_tautology() && c.len() == 3 && !c.is_distinct_triple()).count();
        short += f.clauses().iter().filter(|c| c.len() < 3).count();
        // Fresh variables are existentially quantified by the truth table of `p`.
        if f.is_satisfiable_brute_force() != p.is_satisfiable_brute_force() || !p.is_preprocessed() {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0 && tautologies > 0 && duplicates > 0 && short > 0,
        format!(
            "200 formulas ({tautologies} tautologies, {duplicates} repeated-literal clauses, {short} short clauses), \
             {mismatches} mismatches"
        ),
    )
}

fn criterion_8() -> Outcome {
    let f = gf2();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let rows = rng.gen_range(1..=64);
        let cols = rng.gen_range(1..=64);
        let density = rng.gen_range(0.05..0.95);
        let m = Matrix::from_fn(&f, rows, cols, |_, _| f.embed_bool(rng.gen_bool(density)));
        let b: Vec<_> = (0..rows).map(|_| f.embed_bool(rng.gen_bool(0.5))).collect();
        let generic = m.echelon_with(Backend::Generic);
        let packed = m.echelon_with(Backend::Packed);
        let same = generic == packed
            && m.kernel_with(Backend::Generic) == m.kernel_with(Backend::Packed)
            && m.solve_with(&b, Backend::Generic).unwrap() == m.solve_with(&b, Backend::Packed).unwrap();
        if !same {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("1000 random instances up to 64x64, {mismatches} mismatches"))
}

fn write_dimacs(f: &Formula) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(f.to_dimacs().as_bytes()).unwrap();
    file
}

fn cli_exit(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_quivsat")).args(args).output().unwrap().status.code()
}

fn criterion_9(cases: &[Case]) -> Outcome {
    let mut compared = 0;
    let mut problems = Vec::new();
    let mut gf3_inputs: Vec<&Case> = cases.iter().filter(|c| c.formula.num_vars() <= 3).collect();
    let extra = gf3_cases();
    gf3_inputs.extend(extra.iter());
    let runs = cases
        .iter()
        .filter(|c| c.formula.num_vars() <= 5)
        .map(|c| (c, gf2()))
        .chain(gf3_inputs.into_iter().map(|c| (c, gf3())));
    for (case, field) in runs {
        let truth = case.input.is_satisfiable_brute_force();
        let verdict = decide_sat(&case.input, &field).unwrap();
        compared += 1;
        if verdict.satisfiable != truth {
            problems.push(format!("{} over {field}", case.name));
        }
        if let Some(w) = &verdict.witness {
            if !case.formula.evaluate(w, &field).unwrap() {
                problems.push(format!("{} over {field}: witness does not satisfy", case.name));
            }
        }
    }
    // Exit codes: sat 0 / unsat 1, verify pass 0, errors 3.
    let sat = write_dimacs(&common::running_example());
    let unsat = write_dimacs(&common::contradiction());
    let sat_path = sat.path().to_str().unwrap();
    let unsat_path = unsat.path().to_str().unwrap();
    let codes = [
        (cli_exit(&["sat", sat_path]), Some(0)),
        (cli_exit(&["sat", unsat_path]), Some(1)),
        (cli_exit(&["verify", sat_path]), Some(0)),
        (cli_exit(&["verify", unsat_path, "--field", "3"]), Some(0)),
        (cli_exit(&["sat", "/nonexistent.cnf"]), Some(3)),
    ];
    let bad_codes = codes.iter().filter(|(got, want)| got != want).count();
    outcome(
        problems.is_empty() && bad_codes == 0,
        format!("{compared} decide_sat runs agree with truth tables, {bad_codes} wrong exit codes {problems:?}"),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let cases = corpus();
    let criteria: Vec<Criterion> = vec![
        ("reduction equivalence over GF(2)", Box::new(|| criterion_1(&cases))),
        ("closed-form Tits agreement", Box::new(|| criterion_2(&cases))),
        ("general-field verification over GF(3)", Box::new(criterion_3)),
        ("Schur-root certificate", Box::new(|| criterion_4(&cases))),
        ("e-vector conditions", Box::new(|| criterion_5(&cases))),
        ("root classification", Box::new(|| criterion_6(&cases))),
        ("preprocessing equisatisfiability", Box::new(criterion_7)),
        ("packed vs generic linear algebra", Box::new(criterion_8)),
        ("decide_sat vs truth table, exit codes", Box::new(|| criterion_9(&cases))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("acceptance {} {}: {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
