mod common;

use proptest::prelude::*;
use quivsat::cnf::{preprocess, Assignment};
use quivsat::gf::FieldSpec;
use quivsat::harness::{decide_sat, verify_formula, CertificateKind, Mode, VerifyOptions};
use quivsat::matrix::Matrix;
use quivsat::quiver::{
    endomorphism_space, endomorphism_space_with, search_decomposition, verify_decomposition, Endomorphism,
    Representation, SearchOutcome, SolveRoute,
};
use quivsat::reduction::{build_template, substitute};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{corpus, random_triple_formula};

/// Satisfying assignments, Schur representations, and representations with
/// no splitting endomorphism under exhaustive search are the same set.
#[test]
fn three_way_equivalence_on_small_corpus_members() {
    let f2 = FieldSpec::gf2();
    for case in corpus().iter().filter(|c| c.formula.num_vars() <= 5) {
        let t = build_template(&case.formula, &f2).unwrap();
        let m = case.formula.num_vars();
        for idx in 0..1u64 << m {
            let x = Assignment::from_index(&f2, m, idx);
            let r = substitute(&t, &x).unwrap();
            let sat = case.formula.evaluate(&x, &f2).unwrap();
            let schur = endomorphism_space(&r).dimension() == 1;
            let split = match search_decomposition(&r, 1 << 20) {
                SearchOutcome::Found { witness, .. } => {
                    assert!(verify_decomposition(&r, &witness).unwrap());
                    true
                }
                SearchOutcome::Exhausted { exhaustive, .. } => {
                    assert!(exhaustive, "{}: search fell back to sampling", case.name);
                    false
                }
            };
            assert_eq!(sat, schur, "{} {:?}", case.name, x);
            assert_eq!(sat, !split, "{} {:?}", case.name, x);
        }
    }
}

#[test]
fn endomorphism_spaces_are_closed_and_route_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for field in [FieldSpec::gf2(), FieldSpec::prime(3).unwrap()] {
        for case in corpus().iter().filter(|c| c.formula.num_vars() <= 5 && c.formula.num_clauses() <= 4).take(6) {
            let t = build_template(&case.formula, &field).unwrap();
            let m = case.formula.num_vars();
            let x = Assignment::new((0..m).map(|_| field.element(rng.gen_range(0..field.order() as u64)).unwrap()).collect());
            let r = substitute(&t, &x).unwrap();
            let space = endomorphism_space(&r);
            assert_eq!(space, endomorphism_space_with(&r, SolveRoute::Dense));
            assert!(space.contains(&Endomorphism::identity(&r)).unwrap());
            for b in space.basis() {
                assert!(b.commutes_with(&r).unwrap());
            }
            let random = |rng: &mut ChaCha8Rng| {
                let c: Vec<_> = (0..space.dimension())
                    .map(|_| field.element(rng.gen_range(0..field.order() as u64)).unwrap())
                    .collect();
                space.combination(&c)
            };
            let (a, b) = (random(&mut rng), random(&mut rng));
            let ab = a.compose(&b).unwrap();
            assert!(ab.commutes_with(&r).unwrap());
            assert!(space.contains(&ab).unwrap());
        }
    }
}

#[test]
fn substituted_representations_round_trip_through_json() {
    let f3 = FieldSpec::prime(3).unwrap();
    let t = build_template(&common::running_example(), &f3).unwrap();
    let x = Assignment::from_codes(&f3, &[2, 0, 1, 1, 2]).unwrap();
    let r = substitute(&t, &x).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: Representation = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}

#[test]
fn malformed_representation_json_is_rejected() {
    let f2 = FieldSpec::gf2();
    let q = quivsat::quiver::Quiver::new(vec!["a".into(), "b".into()], vec![quivsat::quiver::Arrow { source: 0, target: 1 }])
        .unwrap();
    let r = Representation::new(q, &f2, vec![1, 2], vec![Matrix::from_ints(&f2, &[&[1], &[0]]).unwrap()]).unwrap();
    let mut v: serde_json::Value = serde_json::to_value(&r).unwrap();
    v["dims"] = serde_json::json!([1, 3]);
    assert!(serde_json::from_value::<Representation>(v).is_err());
}

#[test]
fn reports_are_deterministic() {
    let f2 = FieldSpec::gf2();
    for mode in [Mode::Exhaustive { budget: 1 << 16 }, Mode::Sample { count: 12, seed: 99 }] {
        let opts = VerifyOptions { mode, ..Default::default() };
        let mut a = verify_formula(&common::running_example(), &f2, &opts).unwrap();
        let mut b = verify_formula(&common::running_example(), &f2, &opts).unwrap();
        a.elapsed_ms = 0;
        b.elapsed_ms = 0;
        assert_eq!(a.to_json(), b.to_json());
    }
}

#[test]
fn satisfying_non_boolean_assignments_are_observational() {
    let f3 = FieldSpec::prime(3).unwrap();
    let report = verify_formula(&common::formula(3, &[&[1, 2, 3]]), &f3, &VerifyOptions::default()).unwrap();
    let observed: Vec<_> = report.assignments.iter().filter(|r| r.observational).collect();
    // 26 satisfying assignments, 7 of them boolean.
    assert_eq!(observed.len(), 19);
    assert!(observed.iter().all(|r| r.evaluates && !r.boolean && r.certificate != CertificateKind::Violation));
}

#[test]
fn lifted_witness_satisfies_the_input() {
    let f2 = FieldSpec::gf2();
    for case in corpus().iter().filter(|c| c.formula.num_vars() <= 5) {
        let v = decide_sat(&case.input, &f2).unwrap();
        if let Some(w) = v.original_witness {
            assert!(case.input.evaluate(&w, &f2).unwrap(), "{}", case.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn theorem_holds_on_random_formulas(seed in any::<u64>(), m in 3usize..6, l in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = preprocess(&random_triple_formula(&mut rng, m, l));
        let report = verify_formula(&f, &FieldSpec::gf2(), &VerifyOptions::default()).unwrap();
        prop_assert_eq!(report.violations().count(), 0);
        prop_assert_eq!(report.count(CertificateKind::Schur), f.boolean_models().len());
        let tits = report.tits.unwrap();
        prop_assert_eq!(tits.gram_value, tits.closed_form);
    }
}
