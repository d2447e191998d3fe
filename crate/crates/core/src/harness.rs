//! End-to-end checks of the reduction on concrete formulas: per-assignment
//! certificates, SAT decision through indecomposability, the Schur-root
//! certificate, and JSON/DOT output.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cnf::{preprocess, Assignment, CnfError, Formula};
use crate::gf::FieldSpec;
use crate::quiver::{
    endomorphism_dimension, endomorphism_space, search_in_space, verify_decomposition, Arrow, Quiver, QuiverError,
    Representation, SearchOutcome,
};
use crate::reduction::{
    build_template, build_template_with, explicit_decomposition, find_falsified_witness,
    substitute, EVectorScheme, ReductionError, ReductionOutput, Skeleton, SymbolicEntry,
};
use crate::roots::{
    classify_root, closed_form_tits, default_max_steps, gram_matrix, tits_value, RootClass, RootError, RootVector,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Default cap on `q^M` for exhaustive assignment sweeps.
pub const DEFAULT_ASSIGNMENT_BUDGET: u64 = 1 << 16;
/// Default cap on `q^{dim End}` for exhaustive endomorphism enumeration.
pub const DEFAULT_END_BUDGET: u64 = 1 << 20;
/// Sampled endomorphisms tried when the space is too large to enumerate.
pub const DEFAULT_SEARCH_SAMPLES: u64 = 256;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{needed} assignments exceed the budget of {budget}")]
    Budget { needed: String, budget: u64 },
    #[error("assignment {0:?} has neither a Schur certificate nor a verified decomposition")]
    Inconclusive(Vec<u32>),
    #[error("unknown output format {0:?}")]
    UnknownFormat(String),
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Root(#[from] RootError),
}

/// Which assignments [`verify_formula`] visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    /// Every assignment in `F^M`, refused when `q^M > budget`.
    Exhaustive { budget: u64 },
    /// `count` draws (deduplicated) from a generator seeded with `seed`.
    Sample { count: u64, seed: u64 },
}

impl Default for Mode {
    fn default() -> Self {
        Mode::Exhaustive { budget: DEFAULT_ASSIGNMENT_BUDGET }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub mode: Mode,
    /// Exhaustive endomorphism search when `q^{dim End}` is at most this.
    pub end_budget: u64,
    /// Samples tried otherwise.
    pub search_samples: u64,
    /// E-vector choice; the field default when `None`.
    pub scheme: Option<EVectorScheme>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: Mode::default(),
            end_budget: DEFAULT_END_BUDGET,
            search_samples: DEFAULT_SEARCH_SAMPLES,
            scheme: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Schur,
    ExplicitDecomposition,
    SearchDecomposition,
    /// Observational record without a certificate either way.
    NoCertificate,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    /// 1-based clause and block of the explicit witness.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clause: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub block: Option<usize>,
    pub first_dims: Vec<usize>,
    pub second_dims: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub found: bool,
    pub exhaustive: bool,
    pub examined: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentRecord {
    /// Position in scan order.
    pub index: u64,
    /// Element codes of `x_1, ..., x_M`.
    pub assignment: Vec<u32>,
    pub evaluates: bool,
    pub boolean: bool,
    pub end_dim: usize,
    pub certificate: CertificateKind,
    /// True for satisfying non-boolean assignments, which never affect the verdict.
    pub observational: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub decomposition: Option<DecompositionSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search: Option<SearchSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TitsRecord {
    pub gram_value: i64,
    pub closed_form: i64,
    /// `(α, α_u_i) = −n_i`, `(α, α_v_i) = 1`, `(α, α_w) = 2 − 2Σ n_i` over the clause's variables.
    pub pairings_match: bool,
}

impl TitsRecord {
    pub fn agrees(&self) -> bool {
        self.gram_value == self.closed_form && self.pairings_match
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverSummary {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl From<&Quiver> for QuiverSummary {
    fn from(q: &Quiver) -> Self {
        QuiverSummary { vertices: q.vertices().to_vec(), arrows: q.arrows().to_vec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaSummary {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
    pub provenance: crate::cnf::Provenance,
}

impl From<&Formula> for FormulaSummary {
    fn from(f: &Formula) -> Self {
        FormulaSummary {
            num_vars: f.num_vars(),
            clauses: f.clauses().iter().map(|c| c.literals().iter().map(|l| l.to_dimacs()).collect()).collect(),
            provenance: f.provenance().clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub fingerprint: String,
    pub formula: FormulaSummary,
    pub field: String,
    pub mode: Mode,
    pub quiver: QuiverSummary,
    pub dim_vector: RootVector,
    pub assignments: Vec<AssignmentRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tits: Option<TitsRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub root_class: Option<RootClass>,
    pub schur_root: bool,
    pub verdict: Verdict,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn violations(&self) -> impl Iterator<Item = &AssignmentRecord> {
        self.assignments.iter().filter(|r| r.certificate == CertificateKind::Violation)
    }

    pub fn count(&self, kind: CertificateKind) -> usize {
        self.assignments.iter().filter(|r| r.certificate == kind).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// SHA-256 of the formula's DIMACS text, hex encoded.
pub fn fingerprint(f: &Formula) -> String {
    Sha256::digest(f.to_dimacs().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn preprocessed(f: &Formula) -> Formula {
    if f.is_preprocessed() {
        f.clone()
    } else {
        preprocess(f)
    }
}

fn assignment_indices(field: &FieldSpec, m: usize, mode: Mode) -> Result<Vec<u64>, HarnessError> {
    let total = Assignment::count(field, m);
    match mode {
        Mode::Exhaustive { budget } => match total {
            Some(t) if t <= budget => Ok((0..t).collect()),
            _ => Err(HarnessError::Budget { needed: format!("{}^{}", field.order(), m), budget }),
        },
        Mode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx: Vec<u64> = match total {
                Some(t) => (0..count).map(|_| rng.gen_range(0..t)).collect(),
                // q^M overflows u64; sample within the first 2^64 indices.
                None => (0..count).map(|_| rng.gen()).collect(),
            };
            idx.sort_unstable();
            idx.dedup();
            Ok(idx)
        }
    }
}

/// Observational search: exhaustive when the endomorphism space is small.
fn observe(r: &Representation, opts: &VerifyOptions) -> SearchOutcome {
    let space = endomorphism_space(r);
    let q = r.field().order() as u64;
    let small = u32::try_from(space.dimension()).ok().and_then(|d| q.checked_pow(d)).is_some_and(|t| t <= opts.end_budget);
    search_in_space(r, &space, if small { opts.end_budget } else { opts.search_samples })
}

fn verify_one(t: &ReductionOutput, index: u64, opts: &VerifyOptions) -> Result<AssignmentRecord, HarnessError> {
    let field = t.field();
    let x = Assignment::from_index(field, t.num_vars(), index);
    let evaluates = t.formula().evaluate(&x, field)?;
    let r = substitute(t, &x)?;
    let end_dim = endomorphism_dimension(&r);
    let mut record = AssignmentRecord {
        index,
        assignment: x.codes(),
        evaluates,
        boolean: x.is_boolean(),
        end_dim,
        certificate: CertificateKind::Violation,
        observational: false,
        decomposition: None,
        search: None,
        detail: None,
    };
    match find_falsified_witness(t, &x)? {
        Some((k, l)) => {
            let w = explicit_decomposition(t, &x, k, l)?;
            let verified = verify_decomposition(&r, &w)?;
            record.decomposition = Some(DecompositionSummary {
                clause: Some(k + 1),
                block: Some(l + 1),
                first_dims: w.first_dims(),
                second_dims: w.second_dims(),
            });
            if verified && end_dim >= 2 {
                record.certificate = CertificateKind::ExplicitDecomposition;
            } else {
                record.detail = Some(format!("decomposition verified: {verified}, dim End = {end_dim}"));
            }
        }
        None if x.is_boolean() => {
            if end_dim == 1 {
                record.certificate = CertificateKind::Schur;
            } else {
                record.detail = Some(format!("satisfying assignment with dim End = {end_dim}"));
            }
        }
        None => {
            record.observational = true;
            if end_dim == 1 {
                record.certificate = CertificateKind::Schur;
            } else {
                let outcome = observe(&r, opts);
                record.search = Some(match &outcome {
                    SearchOutcome::Found { .. } => SearchSummary { found: true, exhaustive: false, examined: 0 },
                    SearchOutcome::Exhausted { exhaustive, examined } => {
                        SearchSummary { found: false, exhaustive: *exhaustive, examined: *examined }
                    }
                });
                record.certificate = match outcome {
                    SearchOutcome::Found { witness, .. } => {
                        record.decomposition = Some(DecompositionSummary {
                            clause: None,
                            block: None,
                            first_dims: witness.first_dims(),
                            second_dims: witness.second_dims(),
                        });
                        CertificateKind::SearchDecomposition
                    }
                    SearchOutcome::Exhausted { .. } => CertificateKind::NoCertificate,
                };
            }
        }
    }
    Ok(record)
}

/// Gram and closed-form Tits values of `dim R_Θ`, with the per-vertex pairings.
pub fn tits_check(t: &Skeleton) -> Result<TitsRecord, HarnessError> {
    let lat = gram_matrix(t.quiver())?;
    let dims = t.dims();
    let alpha = RootVector::new(dims.iter().map(|&d| d as i64).collect());
    let gram_value = tits_value(&lat, &alpha, &alpha)?;
    let closed_form = closed_form_tits(t.formula(), t.blocks());
    let m = t.num_vars();
    let mut pairings_match = true;
    for i in 0..m {
        pairings_match &= lat.pairing_with_simple(&alpha, t.u_vertex(i)) == -(t.n(i) as i64);
        pairings_match &= lat.pairing_with_simple(&alpha, t.v_vertex(i)) == 1;
    }
    for (k, clause) in t.formula().clauses().iter().enumerate() {
        let expected = 2 - 2 * clause.literals().iter().map(|l| t.n(l.var - 1) as i64).sum::<i64>();
        for l in 0..t.blocks() as usize {
            pairings_match &= lat.pairing_with_simple(&alpha, t.w_vertex(k, l)) == expected;
        }
    }
    Ok(TitsRecord { gram_value, closed_form, pairings_match })
}

/// Classification of `dim R_Θ` under the default descent budget.
pub fn root_class(t: &Skeleton) -> Result<RootClass, HarnessError> {
    let lat = gram_matrix(t.quiver())?;
    let alpha = RootVector::new(t.dims().iter().map(|&d| d as i64).collect());
    Ok(classify_root(&lat, &alpha, default_max_steps(&alpha))?)
}

fn template_for(f: &Formula, field: &FieldSpec, scheme: Option<EVectorScheme>) -> Result<ReductionOutput, HarnessError> {
    Ok(match scheme {
        Some(s) => build_template_with(f, field, s)?,
        None => build_template(f, field)?,
    })
}

/// Checks the reduction theorem on the assignments selected by `opts.mode`.
///
/// Formulas that are not yet preprocessed are preprocessed first; the report
/// describes the preprocessed formula.
pub fn verify_formula(f: &Formula, field: &FieldSpec, opts: &VerifyOptions) -> Result<VerificationReport, HarnessError> {
    let start = Instant::now();
    let f = preprocessed(f);
    let mut report = VerificationReport {
        schema_version: SCHEMA_VERSION,
        fingerprint: fingerprint(&f),
        formula: FormulaSummary::from(&f),
        field: field.to_string(),
        mode: opts.mode,
        quiver: QuiverSummary { vertices: Vec::new(), arrows: Vec::new() },
        dim_vector: RootVector::zero(0),
        assignments: Vec::new(),
        tits: None,
        root_class: None,
        schur_root: false,
        verdict: Verdict::Pass,
        elapsed_ms: 0,
    };
    if f.num_clauses() == 0 {
        report.elapsed_ms = start.elapsed().as_millis() as u64;
        return Ok(report);
    }
    let indices = assignment_indices(field, f.num_vars(), opts.mode)?;
    let t = template_for(&f, field, opts.scheme)?;
    report.quiver = QuiverSummary::from(t.quiver());
    report.dim_vector = RootVector::new(t.dims().iter().map(|&d| d as i64).collect());
    report.assignments =
        indices.into_par_iter().map(|idx| verify_one(&t, idx, opts)).collect::<Result<Vec<_>, _>>()?;
    report.tits = Some(tits_check(&t)?);
    report.root_class = Some(root_class(&t)?);
    report.schur_root = schur_root_certificate(&f, field)?;
    if report.violations().next().is_some() {
        report.verdict = Verdict::Fail;
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatVerdict {
    pub satisfiable: bool,
    /// Satisfying assignment of the preprocessed formula.
    pub witness: Option<Assignment>,
    /// The witness restricted to the input variables.
    pub original_witness: Option<Assignment>,
    pub method: String,
    /// Assignments examined before the answer.
    pub examined: u64,
}

/// Decides satisfiability by scanning `F^M` for an assignment whose
/// representation is Schur. Every non-Schur assignment must carry a verified
/// decomposition, otherwise the call fails as inconclusive.
pub fn decide_sat(f: &Formula, field: &FieldSpec) -> Result<SatVerdict, HarnessError> {
    decide_sat_with(f, field, DEFAULT_ASSIGNMENT_BUDGET)
}

pub fn decide_sat_with(f: &Formula, field: &FieldSpec, budget: u64) -> Result<SatVerdict, HarnessError> {
    let pf = preprocessed(f);
    let method = "exhaustive".to_string();
    if pf.num_clauses() == 0 {
        let x = Assignment::new(vec![field.zero(); pf.num_vars()]);
        return Ok(SatVerdict {
            satisfiable: true,
            original_witness: Some(pf.original_assignment(&x)),
            witness: Some(x),
            method,
            examined: 0,
        });
    }
    let m = pf.num_vars();
    let total = Assignment::count(field, m)
        .filter(|&t| t <= budget)
        .ok_or_else(|| HarnessError::Budget { needed: format!("{}^{}", field.order(), m), budget })?;
    let t = build_template(&pf, field)?;
    // Each assignment is classified independently; the first Schur one in
    // scan order wins.
    let check = |idx: u64| -> Result<bool, HarnessError> {
        let x = Assignment::from_index(field, m, idx);
        let r = substitute(&t, &x)?;
        if endomorphism_dimension(&r) == 1 {
            return Ok(true);
        }
        let verified = match find_falsified_witness(&t, &x)? {
            Some((k, l)) => verify_decomposition(&r, &explicit_decomposition(&t, &x, k, l)?)?,
            None => false,
        };
        if verified {
            Ok(false)
        } else {
            Err(HarnessError::Inconclusive(x.codes()))
        }
    };
    let chunk = rayon::current_num_threads().max(1) as u64;
    let mut start = 0;
    while start < total {
        let end = (start + chunk).min(total);
        let results: Vec<Result<bool, HarnessError>> = (start..end).into_par_iter().map(check).collect();
        for (offset, res) in results.into_iter().enumerate() {
            if res? {
                let x = Assignment::from_index(field, m, start + offset as u64);
                return Ok(SatVerdict {
                    satisfiable: true,
                    original_witness: Some(pf.original_assignment(&x)),
                    witness: Some(x),
                    method,
                    examined: start + offset as u64 + 1,
                });
            }
        }
        start = end;
    }
    Ok(SatVerdict { satisfiable: false, witness: None, original_witness: None, method, examined: total })
}

/// Certifies that `dim R_Θ` is a Schur root: with `Θ′` the formula with all
/// negations removed, the all-ones assignment satisfies `Θ′`, so `R_{Θ′}(1, ..., 1)`
/// must be Schur, and it has the same dimension vector as `R_Θ`.
pub fn schur_root_certificate(f: &Formula, field: &FieldSpec) -> Result<bool, HarnessError> {
    let f = preprocessed(f);
    if f.num_clauses() == 0 {
        return Ok(false);
    }
    let positive = f.positive_form();
    let t = build_template(&f, field)?;
    let tp = build_template(&positive, field)?;
    if t.dims() != tp.dims() {
        return Ok(false);
    }
    let ones = Assignment::new(vec![field.one(); positive.num_vars()]);
    let r = substitute(&tp, &ones)?;
    Ok(endomorphism_dimension(&r) == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            other => Err(HarnessError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Dot => "dot",
        })
    }
}

/// Graphviz text: one node per vertex, one edge per arrow.
pub fn quiver_dot(q: &Quiver) -> String {
    let mut out = String::from("digraph Q {\n");
    for (i, label) in q.vertices().iter().enumerate() {
        out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
    }
    for a in q.arrows() {
        out.push_str(&format!("  n{} -> n{};\n", a.source, a.target));
    }
    out.push_str("}\n");
    out
}

/// JSON description of a reduction: quiver, dimension vector, and the
/// symbolic arrow matrices with entries written as field elements or `X<i>`.
pub fn reduction_json(t: &ReductionOutput) -> Value {
    let field = t.field();
    let maps: Vec<Value> = t
        .quiver()
        .arrows()
        .iter()
        .zip(t.template())
        .map(|(a, s)| {
            let rows: Vec<Vec<String>> = (0..s.rows())
                .map(|r| {
                    (0..s.cols())
                        .map(|c| match s.get(r, c) {
                            SymbolicEntry::Const(e) => field.format_element(e),
                            SymbolicEntry::Var(i) => format!("X{i}"),
                        })
                        .collect()
                })
                .collect();
            json!({ "source": a.source, "target": a.target, "matrix": rows })
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "formula": FormulaSummary::from(t.formula()),
        "field": field.to_string(),
        "blocks": t.blocks(),
        "scheme": t.scheme(),
        "quiver": QuiverSummary::from(t.quiver()),
        "dims": t.dims(),
        "template": maps,
    })
}

pub fn emit_reduction(t: &ReductionOutput, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&reduction_json(t)).expect("json"),
        Format::Dot => quiver_dot(t.quiver()),
    }
}

pub fn emit_representation(r: &Representation, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(r).expect("json"),
        Format::Dot => quiver_dot(r.quiver()),
    }
}

pub fn emit_report(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Dot => {
            let q = Quiver::new(report.quiver.vertices.clone(), report.quiver.arrows.clone()).expect("valid quiver");
            quiver_dot(&q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single() -> Formula {
        Formula::from_dimacs_clauses(3, &[&[1, 2, 3]]).unwrap()
    }

    fn example() -> Formula {
        Formula::from_dimacs_clauses(5, &[&[1, 2, -3], &[2, 3, 5], &[3, -4, -5]]).unwrap()
    }

    #[test]
    fn single_clause_gf2() {
        let f2 = FieldSpec::gf2();
        let rep = verify_formula(&single(), &f2, &VerifyOptions::default()).unwrap();
        assert_eq!(rep.assignments.len(), 8);
        assert_eq!(rep.count(CertificateKind::Schur), 7);
        assert_eq!(rep.count(CertificateKind::ExplicitDecomposition), 1);
        assert_eq!(rep.verdict, Verdict::Pass);
        assert_eq!(rep.tits.as_ref().unwrap().gram_value, -10);
        assert!(rep.tits.as_ref().unwrap().agrees());
        assert_eq!(rep.root_class, Some(RootClass::Imaginary));
        assert!(rep.schur_root);
    }

    #[test]
    fn running_example_gf2() {
        let f2 = FieldSpec::gf2();
        let rep = verify_formula(&example(), &f2, &VerifyOptions::default()).unwrap();
        assert_eq!(rep.assignments.len(), 32);
        assert_eq!(rep.count(CertificateKind::Schur), example().boolean_models().len());
        assert_eq!(rep.verdict, Verdict::Pass);
        assert_eq!(rep.tits.unwrap().closed_form, -50);
    }

    #[test]
    fn sat_decisions() {
        let f2 = FieldSpec::gf2();
        let v = decide_sat(&single(), &f2).unwrap();
        assert!(v.satisfiable);
        assert_eq!(v.witness.unwrap(), Assignment::from_bools(&f2, &[true, false, false]));
        let taut = Formula::from_dimacs_clauses(2, &[&[1, -1, 2]]).unwrap();
        assert!(decide_sat(&taut, &f2).unwrap().satisfiable);
    }

    #[test]
    fn budget_is_enforced() {
        let f2 = FieldSpec::gf2();
        let opts = VerifyOptions { mode: Mode::Exhaustive { budget: 4 }, ..Default::default() };
        assert!(matches!(verify_formula(&single(), &f2, &opts), Err(HarnessError::Budget { .. })));
    }

    #[test]
    fn sampling_is_deterministic() {
        let f2 = FieldSpec::gf2();
        let opts = VerifyOptions { mode: Mode::Sample { count: 10, seed: 7 }, ..Default::default() };
        let mut a = verify_formula(&example(), &f2, &opts).unwrap();
        let mut b = verify_formula(&example(), &f2, &opts).unwrap();
        a.elapsed_ms = 0;
        b.elapsed_ms = 0;
        assert_eq!(a, b);
        assert!(a.assignments.windows(2).all(|w| w[0].index < w[1].index));
    }

    #[test]
    fn dot_and_json() {
        let t = build_template(&single(), &FieldSpec::gf2()).unwrap();
        let dot = emit_reduction(&t, Format::Dot);
        assert_eq!(dot.matches("[label=").count(), 7);
        assert_eq!(dot.matches(" -> ").count(), 12);
        let v: Value = serde_json::from_str(&emit_reduction(&t, Format::Json)).unwrap();
        assert_eq!(v["template"][3]["matrix"], json!([["1"], ["X1"]]));
        assert!("xml".parse::<Format>().is_err());
        let rep = verify_formula(&single(), &FieldSpec::gf2(), &VerifyOptions::default()).unwrap();
        let v: Value = serde_json::from_str(&rep.to_json()).unwrap();
        for key in ["schema_version", "formula", "field", "quiver", "assignments", "tits", "root_class", "verdict"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["assignments"][0]["certificate"], "explicit-decomposition");
    }
}
