//! Shared formula corpus for the integration tests.
#![allow(dead_code)]

use quivsat::cnf::{preprocess, Clause, Formula, Literal};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x00c0_ffee;
pub const MAX_VARS: usize = 8;
pub const MAX_CLAUSES: usize = 12;

pub struct Case {
    pub name: String,
    pub input: Formula,
    pub formula: Formula,
}

impl Case {
    pub fn new(name: impl Into<String>, input: Formula) -> Self {
        let formula = preprocess(&input);
        Case { name: name.into(), input, formula }
    }
}

pub fn formula(num_vars: usize, clauses: &[&[i64]]) -> Formula {
    Formula::from_dimacs_clauses(num_vars, clauses).unwrap()
}

/// `(X1 ∨ X2 ∨ X̄3) ∧ (X2 ∨ X3 ∨ X5) ∧ (X3 ∨ X̄4 ∨ X̄5)`.
pub fn running_example() -> Formula {
    formula(5, &[&[1, 2, -3], &[2, 3, 5], &[3, -4, -5]])
}

/// All eight sign patterns on three variables: `X1` forced both ways.
pub fn contradiction() -> Formula {
    formula(
        3,
        &[&[1, 2, 3], &[1, 2, -3], &[1, -2, 3], &[1, -2, -3], &[-1, 2, 3], &[-1, 2, -3], &[-1, -2, 3], &[-1, -2, -3]],
    )
}

pub fn random_triple_formula(rng: &mut ChaCha8Rng, num_vars: usize, num_clauses: usize) -> Formula {
    let vars: Vec<usize> = (1..=num_vars).collect();
    let clauses = (0..num_clauses)
        .map(|_| {
            let picked: Vec<Literal> = vars
                .choose_multiple(rng, 3)
                .map(|&v| if rng.gen_bool(0.5) { Literal::neg(v) } else { Literal::pos(v) })
                .collect();
            Clause::new(picked).unwrap()
        })
        .collect();
    Formula::new(num_vars, clauses).unwrap()
}

fn handcrafted() -> Vec<Case> {
    vec![
        Case::new("contradiction", contradiction()),
        Case::new("contradiction-plus", {
            let mut clauses: Vec<Vec<i64>> = contradiction().clauses().iter().map(dimacs).collect();
            clauses.push(vec![1, 2, 4]);
            let refs: Vec<&[i64]> = clauses.iter().map(Vec::as_slice).collect();
            formula(4, &refs)
        }),
        Case::new("duplicate-literal", formula(2, &[&[1, 1, 2]])),
        Case::new("unit-clause", formula(3, &[&[1], &[1, 2, 3]])),
        Case::new("two-literal", formula(4, &[&[1, -2], &[2, 3, 4]])),
        Case::new("tautology", formula(3, &[&[1, -1, 2], &[1, 2, 3]])),
    ]
}

fn dimacs(c: &Clause) -> Vec<i64> {
    c.literals().iter().map(|l| l.to_dimacs()).collect()
}

/// Fifty seeded random formulas whose preprocessed form has at most
/// [`MAX_VARS`] variables and [`MAX_CLAUSES`] clauses.
pub fn random_corpus() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out = Vec::new();
    while out.len() < 50 {
        let m = rng.gen_range(3..=MAX_VARS);
        let l = rng.gen_range(1..=MAX_CLAUSES);
        let case = Case::new(format!("random-{}", out.len()), random_triple_formula(&mut rng, m, l));
        if case.formula.num_vars() <= MAX_VARS && case.formula.num_clauses() <= MAX_CLAUSES {
            out.push(case);
        }
    }
    out
}

/// Random corpus, the running example, and hand-written edge cases.
pub fn corpus() -> Vec<Case> {
    let mut out = vec![Case::new("running-example", running_example())];
    out.extend(random_corpus());
    out.extend(handcrafted());
    out
}

/// Formulas over three variables for the general-field checks. The last one
/// is unsatisfiable; with three variables that takes all eight clauses.
pub fn gf3_cases() -> Vec<Case> {
    vec![
        Case::new("one-clause", formula(3, &[&[1, 2, 3]])),
        Case::new("two-clauses", formula(3, &[&[1, 2, 3], &[-1, 2, 3]])),
        Case::new("three-clauses", formula(3, &[&[1, -2, -3], &[-1, 2, -3], &[-1, -2, 3]])),
        Case::new("all-negative", formula(3, &[&[-1, -2, -3]])),
        Case::new("contradiction", contradiction()),
    ]
}

/// Formulas with at most four variables and clauses, mixing tautologies,
/// repeated literals, and short clauses.
pub fn messy_formula(rng: &mut ChaCha8Rng) -> Formula {
    let m = rng.gen_range(1..=4);
    let l = rng.gen_range(1..=4);
    let clauses = (0..l)
        .map(|_| {
            let len = rng.gen_range(1..=3);
            let lits: Vec<Literal> = (0..len)
                .map(|_| {
                    let v = rng.gen_range(1..=m);
                    if rng.gen_bool(0.5) {
                        Literal::neg(v)
                    } else {
                        Literal::pos(v)
                    }
                })
                .collect();
            Clause::new(lits).unwrap()
        })
        .collect();
    Formula::new(m, clauses).unwrap()
}
