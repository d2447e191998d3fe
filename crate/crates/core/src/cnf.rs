//! 3-CNF formulas: DIMACS input/output, evaluation over a finite field, and
//! the preprocessing that makes the three variables of every clause distinct.
//!
//! Variables are numbered from 1 as in DIMACS. Over a general field a literal
//! `X_i` is false exactly when `x_i = 0` and `X̄_i` is false exactly when
//! `x_i ≠ 0`; over GF(2) this is ordinary boolean evaluation.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: clause data before the `p cnf` header")]
    MissingHeader { line: usize },
    #[error("no `p cnf` header found")]
    NoHeader,
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: variable {var} is outside 1..={num_vars}")]
    VariableOutOfRange { line: usize, var: u64, num_vars: usize },
    #[error("line {line}: clause has more than 3 literals")]
    ClauseTooLong { line: usize },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("last clause is missing its terminating 0")]
    MissingTerminator,
    #[error("header announces {expected} clauses, found {found}")]
    ClauseCount { expected: usize, found: usize },
    #[error("clause must have 1 to 3 literals, got {0}")]
    ClauseSize(usize),
    #[error("literal refers to variable {var} but the formula has {num_vars}")]
    LiteralRange { var: usize, num_vars: usize },
    #[error("assignment has {got} values, formula has {expected} variables")]
    AssignmentLength { expected: usize, got: usize },
    #[error("assignment value is not an element of {0}")]
    AssignmentField(String),
    #[error("gadget variables must be fresh and distinct: target {target}, auxiliaries {b}, {c}")]
    NotFresh { target: usize, b: usize, c: usize },
}

/// A variable or its negation. `var` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i64", try_from = "i64")]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    pub fn negate(self) -> Self {
        Literal { var: self.var, negated: !self.negated }
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    /// Truth value under the field falsity rule.
    pub fn is_true(self, value: FieldElement) -> bool {
        value.is_zero() == self.negated
    }
}

impl From<Literal> for i64 {
    fn from(l: Literal) -> i64 {
        l.to_dimacs()
    }
}

impl TryFrom<i64> for Literal {
    type Error = String;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        match v {
            0 => Err("literal 0".into()),
            v if v > 0 => Ok(Literal::pos(v as usize)),
            v => Ok(Literal::neg(v.unsigned_abs() as usize)),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// A disjunction of one to three literals. Preprocessed formulas only hold
/// clauses of exactly three literals on distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Result<Self, CnfError> {
        if literals.is_empty() || literals.len() > 3 {
            return Err(CnfError::ClauseSize(literals.len()));
        }
        Ok(Clause { literals })
    }

    pub fn triple(a: Literal, b: Literal, c: Literal) -> Self {
        Clause { literals: vec![a, b, c] }
    }

    /// From DIMACS integers, e.g. `[1, 2, -3]`.
    pub fn from_dimacs(lits: &[i64]) -> Result<Self, CnfError> {
        let literals = lits
            .iter()
            .map(|&v| Literal::try_from(v).map_err(|_| CnfError::ClauseSize(0)))
            .collect::<Result<Vec<_>, _>>()?;
        Clause::new(literals)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Contains some `X_i` together with `X̄_i`.
    pub fn is_tautology(&self) -> bool {
        self.literals.iter().any(|a| self.literals.contains(&a.negate()))
    }

    /// Exactly three literals on pairwise distinct variables.
    pub fn is_distinct_triple(&self) -> bool {
        let l = &self.literals;
        l.len() == 3 && l[0].var != l[1].var && l[0].var != l[2].var && l[1].var != l[2].var
    }

    pub fn evaluate(&self, values: &[FieldElement]) -> bool {
        self.literals.iter().any(|l| l.is_true(values[l.var - 1]))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.literals.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(" ∨ "))
    }
}

/// What happened to one input clause during preprocessing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rewrite {
    /// `X ∨ X ∨ Y` became `X ∨ z ∨ Y` with `z` forced false.
    DuplicateLiteral { clause: usize, fresh: usize },
    /// A clause with a single distinct literal was replaced by the gadget forcing it.
    ForcedLiteral { clause: usize, literal: Literal },
    /// A two-literal clause was padded with `z` forced false.
    Padded { clause: usize, fresh: usize },
}

/// Record of the preprocessing applied to a formula. Clause numbers are
/// 1-based positions in the input; variable numbers before renumbering are
/// the input variables followed by fresh variables in allocation order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub comments: Vec<String>,
    /// Input clauses with fewer than three literals.
    pub short_clauses: Vec<usize>,
    pub preprocessed: bool,
    pub original_num_vars: usize,
    pub deleted_tautologies: Vec<usize>,
    pub rewrites: Vec<Rewrite>,
    /// Targets of the forcing gadgets, with their two auxiliary variables.
    pub gadgets: Vec<(Literal, usize, usize)>,
    /// Fresh variables introduced, in allocation order.
    pub fresh_vars: Vec<usize>,
    /// `renumbering[v - 1]` is the final index of pre-renumbering variable `v`.
    pub renumbering: Vec<Option<usize>>,
}

/// A CNF formula over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Clause>,
    provenance: Provenance,
}

/// Values for `x_1, ..., x_M`, each in a common field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment {
    values: Vec<FieldElement>,
}

impl Assignment {
    pub fn new(values: Vec<FieldElement>) -> Self {
        Assignment { values }
    }

    pub fn from_bools(field: &FieldSpec, bits: &[bool]) -> Self {
        Assignment { values: bits.iter().map(|&b| field.embed_bool(b)).collect() }
    }

    pub fn from_codes(field: &FieldSpec, codes: &[u64]) -> Result<Self, CnfError> {
        let values = codes
            .iter()
            .map(|&c| field.element(c).map_err(|_| CnfError::AssignmentField(field.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(Assignment { values })
    }

    /// The `index`-th assignment of `F^m` in scan order: `x_1` is the least
    /// significant digit, so the scan runs `(0,0,..), (1,0,..), (2,0,..), ...`.
    pub fn from_index(field: &FieldSpec, m: usize, mut index: u64) -> Self {
        let q = field.order() as u64;
        let values = (0..m)
            .map(|_| {
                let d = index % q;
                index /= q;
                field.element(d).expect("digit below field order")
            })
            .collect();
        Assignment { values }
    }

    /// `q^m`, or `None` on overflow.
    pub fn count(field: &FieldSpec, m: usize) -> Option<u64> {
        (field.order() as u64).checked_pow(u32::try_from(m).ok()?)
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, var: usize) -> FieldElement {
        self.values[var - 1]
    }

    /// Every value is 0 or 1.
    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(|v| v.code() <= 1)
    }

    pub fn codes(&self) -> Vec<u32> {
        self.values.iter().map(|v| v.code()).collect()
    }
}

impl Formula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        for c in &clauses {
            if let Some(l) = c.literals.iter().find(|l| l.var == 0 || l.var > num_vars) {
                return Err(CnfError::LiteralRange { var: l.var, num_vars });
            }
        }
        let provenance = Provenance { original_num_vars: num_vars, ..Provenance::default() };
        Ok(Formula { num_vars, clauses, provenance })
    }

    /// Shorthand for literals: `Formula::from_dimacs_clauses(5, &[&[1, 2, -3], ...])`.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Result<Self, CnfError> {
        let clauses = clauses.iter().map(|c| Clause::from_dimacs(c)).collect::<Result<_, _>>()?;
        Formula::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Structural check of the preprocessing postconditions: every clause is a
    /// distinct triple, every variable occurs, and `M ≥ 2` unless `L = 0`.
    pub fn is_preprocessed(&self) -> bool {
        if !self.clauses.iter().all(Clause::is_distinct_triple) {
            return false;
        }
        let mut used = vec![false; self.num_vars];
        for c in &self.clauses {
            for l in &c.literals {
                used[l.var - 1] = true;
            }
        }
        used.iter().all(|&u| u) && (self.clauses.is_empty() || self.num_vars >= 2)
    }

    /// `Θ′`: every negated literal replaced by its positive form.
    pub fn positive_form(&self) -> Formula {
        let clauses = self
            .clauses
            .iter()
            .map(|c| Clause { literals: c.literals.iter().map(|l| Literal::pos(l.var)).collect() })
            .collect();
        Formula { num_vars: self.num_vars, clauses, provenance: self.provenance.clone() }
    }

    /// Truth value under the field falsity rule.
    pub fn evaluate(&self, x: &Assignment, field: &FieldSpec) -> Result<bool, CnfError> {
        if x.len() != self.num_vars {
            return Err(CnfError::AssignmentLength { expected: self.num_vars, got: x.len() });
        }
        if x.values.iter().any(|&v| !field.contains(v)) {
            return Err(CnfError::AssignmentField(field.to_string()));
        }
        Ok(self.clauses.iter().all(|c| c.evaluate(&x.values)))
    }

    /// Index of the first clause falsified by `x` (0-based).
    pub fn first_falsified(&self, x: &Assignment) -> Option<usize> {
        self.clauses.iter().position(|c| !c.evaluate(&x.values))
    }

    /// All satisfying boolean assignments by truth table, in scan order.
    /// Intended for small `M` only.
    pub fn boolean_models(&self) -> Vec<Vec<bool>> {
        assert!(self.num_vars < 30, "truth table too large");
        let f2 = FieldSpec::gf2();
        (0..1u64 << self.num_vars)
            .map(|idx| (0..self.num_vars).map(|i| idx >> i & 1 == 1).collect::<Vec<bool>>())
            .filter(|bits| {
                let x = Assignment::from_bools(&f2, bits);
                self.clauses.iter().all(|c| c.evaluate(&x.values))
            })
            .collect()
    }

    pub fn is_satisfiable_brute_force(&self) -> bool {
        assert!(self.num_vars < 30, "truth table too large");
        let f2 = FieldSpec::gf2();
        (0..1u64 << self.num_vars).any(|idx| {
            let x = Assignment::from_index(&f2, self.num_vars, idx);
            self.clauses.iter().all(|c| c.evaluate(&x.values))
        })
    }

    /// Maps an assignment of this (preprocessed) formula back to the input
    /// variables. Input variables that were dropped as unused get 0.
    pub fn original_assignment(&self, x: &Assignment) -> Assignment {
        let p = &self.provenance;
        if !p.preprocessed {
            return x.clone();
        }
        let values = (0..p.original_num_vars)
            .map(|v| match p.renumbering.get(v).copied().flatten() {
                Some(new) => x.values[new - 1],
                None => FieldElement::ZERO,
            })
            .collect();
        Assignment { values }
    }

    /// Extends an assignment of the input variables to this (preprocessed)
    /// formula, setting fresh gadget variables to 0. The extension satisfies
    /// the formula iff the input assignment satisfies the input formula.
    pub fn lift_assignment(&self, original: &Assignment) -> Result<Assignment, CnfError> {
        let p = &self.provenance;
        if !p.preprocessed {
            return Ok(original.clone());
        }
        if original.len() != p.original_num_vars {
            return Err(CnfError::AssignmentLength { expected: p.original_num_vars, got: original.len() });
        }
        let mut values = vec![FieldElement::ZERO; self.num_vars];
        for (old, new) in p.renumbering.iter().enumerate().take(p.original_num_vars) {
            if let Some(new) = new {
                values[new - 1] = original.values[old];
            }
        }
        Ok(Assignment { values })
    }

    /// DIMACS text: header, then one `0`-terminated clause per line.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in &c.literals {
                out.push_str(&l.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "⊤");
        }
        let parts: Vec<String> = self.clauses.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" ∧ "))
    }
}

/// Parses DIMACS CNF. Clauses may span lines; a line starting with `%` ends
/// the input. Clauses with one or two literals are accepted and recorded in
/// the provenance for padding.
pub fn parse_dimacs(text: &str) -> Result<Formula, CnfError> {
    let mut header: Option<(usize, usize)> = None;
    let mut comments = Vec::new();
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut short = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "c" || trimmed.starts_with("c ") || trimmed.starts_with("c\t") {
            comments.push(trimmed[1..].trim().to_string());
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(CnfError::DuplicateHeader { line });
            }
            let malformed = || CnfError::MalformedHeader { line, text: trimmed.to_string() };
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(malformed());
            }
            let m = parts[2].parse::<usize>().map_err(|_| malformed())?;
            let l = parts[3].parse::<usize>().map_err(|_| malformed())?;
            header = Some((m, l));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(CnfError::MissingHeader { line });
        };
        for token in trimmed.split_whitespace() {
            let v: i64 = token.parse().map_err(|_| CnfError::InvalidToken { line, token: token.to_string() })?;
            if v == 0 {
                if current.is_empty() {
                    return Err(CnfError::EmptyClause { line });
                }
                if current.len() < 3 {
                    short.push(clauses.len() + 1);
                }
                clauses.push(Clause { literals: std::mem::take(&mut current) });
                continue;
            }
            let var = v.unsigned_abs();
            if var as usize > num_vars {
                return Err(CnfError::VariableOutOfRange { line, var, num_vars });
            }
            if current.len() == 3 {
                return Err(CnfError::ClauseTooLong { line });
            }
            current.push(Literal::try_from(v).expect("nonzero literal"));
        }
    }
    let Some((num_vars, expected)) = header else {
        return Err(CnfError::NoHeader);
    };
    if !current.is_empty() {
        return Err(CnfError::MissingTerminator);
    }
    if clauses.len() != expected {
        return Err(CnfError::ClauseCount { expected, found: clauses.len() });
    }
    let mut f = Formula::new(num_vars, clauses)?;
    f.provenance.comments = comments;
    f.provenance.short_clauses = short;
    Ok(f)
}

/// The four clauses `(t ∨ b ∨ c) ∧ (t ∨ b ∨ c̄) ∧ (t ∨ b̄ ∨ c) ∧ (t ∨ b̄ ∨ c̄)`,
/// satisfied exactly when `target` is true.
pub fn force_gadget(target: Literal, b: usize, c: usize) -> Result<[Clause; 4], CnfError> {
    if b == 0 || c == 0 || b == c || b == target.var || c == target.var {
        return Err(CnfError::NotFresh { target: target.var, b, c });
    }
    let t = target;
    Ok([
        Clause::triple(t, Literal::pos(b), Literal::pos(c)),
        Clause::triple(t, Literal::pos(b), Literal::neg(c)),
        Clause::triple(t, Literal::neg(b), Literal::pos(c)),
        Clause::triple(t, Literal::neg(b), Literal::neg(c)),
    ])
}

struct Builder {
    next_var: usize,
    clauses: Vec<Clause>,
    gadget_clauses: Vec<Clause>,
    provenance: Provenance,
}

impl Builder {
    fn fresh(&mut self) -> usize {
        let v = self.next_var;
        self.next_var += 1;
        self.provenance.fresh_vars.push(v);
        v
    }

    fn force(&mut self, target: Literal) {
        let b = self.fresh();
        let c = self.fresh();
        let gadget = force_gadget(target, b, c).expect("fresh variables are distinct");
        self.gadget_clauses.extend(gadget);
        self.provenance.gadgets.push((target, b, c));
    }
}

/// Rewrites `f` so that every clause has three distinct variables, keeping
/// satisfiability (input variables keep their values).
///
/// Per input clause, in order: tautologies are deleted; a clause with a
/// single distinct literal is replaced by the gadget forcing that literal; a
/// clause with two distinct literals gets a fresh variable `z` (in place of
/// the repeated literal, or appended to a two-literal clause) together with
/// the gadget forcing `z` false. Gadget clauses follow all rewritten input
/// clauses. Unused variables are then dropped and the rest renumbered in
/// increasing order.
pub fn preprocess(f: &Formula) -> Formula {
    let mut b = Builder {
        next_var: f.num_vars + 1,
        clauses: Vec::new(),
        gadget_clauses: Vec::new(),
        provenance: Provenance {
            comments: f.provenance.comments.clone(),
            short_clauses: f.provenance.short_clauses.clone(),
            preprocessed: true,
            original_num_vars: f.num_vars,
            ..Provenance::default()
        },
    };
    for (idx, clause) in f.clauses.iter().enumerate() {
        let number = idx + 1;
        if clause.is_tautology() {
            b.provenance.deleted_tautologies.push(number);
            continue;
        }
        let mut distinct: Vec<Literal> = Vec::new();
        for &l in &clause.literals {
            if !distinct.contains(&l) {
                distinct.push(l);
            }
        }
        match distinct.len() {
            3 => b.clauses.push(clause.clone()),
            2 => {
                let z = b.fresh();
                let literals = if clause.len() == 3 {
                    // Replace the second occurrence of the repeated literal.
                    let mut seen = Vec::new();
                    clause
                        .literals
                        .iter()
                        .map(|&l| {
                            if seen.contains(&l) {
                                Literal::pos(z)
                            } else {
                                seen.push(l);
                                l
                            }
                        })
                        .collect()
                } else {
                    vec![distinct[0], distinct[1], Literal::pos(z)]
                };
                b.clauses.push(Clause { literals });
                b.force(Literal::neg(z));
                let rewrite = if clause.len() == 3 {
                    Rewrite::DuplicateLiteral { clause: number, fresh: z }
                } else {
                    Rewrite::Padded { clause: number, fresh: z }
                };
                b.provenance.rewrites.push(rewrite);
            }
            1 => {
                b.force(distinct[0]);
                b.provenance.rewrites.push(Rewrite::ForcedLiteral { clause: number, literal: distinct[0] });
            }
            _ => unreachable!("clauses hold 1 to 3 literals"),
        }
    }
    let mut clauses = b.clauses;
    clauses.append(&mut b.gadget_clauses);

    let total = b.next_var - 1;
    let mut used = vec![false; total];
    for c in &clauses {
        for l in &c.literals {
            used[l.var - 1] = true;
        }
    }
    let mut renumbering = vec![None; total];
    let mut next = 0;
    for (v, &u) in used.iter().enumerate() {
        if u {
            next += 1;
            renumbering[v] = Some(next);
        }
    }
    for c in &mut clauses {
        for l in &mut c.literals {
            l.var = renumbering[l.var - 1].expect("used variable");
        }
    }
    let mut provenance = b.provenance;
    provenance.renumbering = renumbering;
    // With L ≥ 1 every clause names three distinct variables, so M ≥ 3 here;
    // L = 0 leaves M = 0.
    debug_assert!(clauses.is_empty() || next >= 3);
    Formula { num_vars: next, clauses, provenance }
}
