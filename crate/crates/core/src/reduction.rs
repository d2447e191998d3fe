//! The reduction from a preprocessed 3-CNF formula to a quiver `Q_Θ` with a
//! symbolic representation `R_Θ(X_1, ..., X_M)`.
//!
//! Vertex order is `u_1..u_M`, `v_1..v_M`, then `w_k^(ℓ)` with `k` outer and
//! `ℓ` inner. `V_i = F^{n_i}` with `n_i = B·|Ω_i| + 1` and `B = (q−1)³`. In
//! `V_i` the marker vectors are `F_i = (1, 0, ..., 0)` and `T_i = (1, 1, 0, ..., 0)`.
//!
//! Clause indices `k` and block indices `ℓ` are 0-based throughout the API;
//! vertex labels use 1-based numbering.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Assignment, Formula};
use crate::gf::{FieldElement, FieldSpec};
use crate::matrix::{rank_of, Matrix, MatrixError, SubspaceBasis, Vector};
use crate::quiver::{Arrow, Quiver, QuiverError, Representation, SubrepWitness};

/// Upper bound on `B·L`, the number of `w` vertices.
pub const MAX_W_VERTICES: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("formula is not preprocessed (distinct triples, no unused variables)")]
    NotPreprocessed,
    #[error("the reduction needs at least two variables, got {0}")]
    TooFewVariables(usize),
    #[error("variable {0} occurs in no clause")]
    EmptyOccurrence(usize),
    #[error("{blocks} blocks per clause over {clauses} clauses is too large")]
    TooLarge { blocks: u64, clauses: usize },
    #[error("the sum-of-basis e-vectors need one block per clause, the field gives {0}")]
    SchemeUnsupported(u64),
    #[error("e-vectors of variable {0} violate the basis conditions")]
    EVectorCondition(usize),
    #[error("assignment has {got} values, formula has {expected} variables")]
    AssignmentLength { expected: usize, got: usize },
    #[error("assignment values are not in {0}")]
    AssignmentField(String),
    #[error("clause {0} is not falsified by the assignment")]
    NotFalsified(usize),
    #[error("block {block} does not match clause {clause} under the assignment")]
    InvalidBlock { clause: usize, block: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// Occurrence sets per variable; clause indices ascending, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceSets {
    pub plus: Vec<Vec<usize>>,
    pub minus: Vec<Vec<usize>>,
    pub omega: Vec<Vec<usize>>,
}

impl OccurrenceSets {
    pub fn from_formula(f: &Formula) -> Self {
        let m = f.num_vars();
        let mut plus = vec![Vec::new(); m];
        let mut minus = vec![Vec::new(); m];
        let mut omega = vec![Vec::new(); m];
        for (k, clause) in f.clauses().iter().enumerate() {
            for lit in clause.literals() {
                let i = lit.var - 1;
                let side = if lit.negated { &mut minus[i] } else { &mut plus[i] };
                if side.last() != Some(&k) {
                    side.push(k);
                }
                if omega[i].last() != Some(&k) {
                    omega[i].push(k);
                }
            }
        }
        OccurrenceSets { plus, minus, omega }
    }

    pub fn num_vars(&self) -> usize {
        self.omega.len()
    }

    /// `n_i = B·|Ω_i| + 1` for the 0-based variable index `i`.
    pub fn n(&self, i: usize, b: u64) -> usize {
        b as usize * self.omega[i].len() + 1
    }
}

/// A template entry: a constant or the indeterminate `X_i` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymbolicEntry {
    Const(FieldElement),
    Var(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<SymbolicEntry>,
}

impl SymbolicMatrix {
    fn constant(m: &Matrix) -> Self {
        SymbolicMatrix {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|&e| SymbolicEntry::Const(e)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> SymbolicEntry {
        self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[SymbolicEntry] {
        &self.entries
    }

    /// Indeterminates appearing in the matrix, with multiplicity.
    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().filter_map(|e| match e {
            SymbolicEntry::Var(i) => Some(*i),
            SymbolicEntry::Const(_) => None,
        })
    }

    pub fn substitute(&self, field: &FieldSpec, x: &[FieldElement]) -> Matrix {
        let data = self
            .entries
            .iter()
            .map(|e| match *e {
                SymbolicEntry::Const(c) => c,
                SymbolicEntry::Var(i) => x[i - 1],
            })
            .collect();
        Matrix::from_vec(field, self.rows, self.cols, data).expect("template shape")
    }
}

/// How the vectors `e_i(k, ℓ)` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EVectorScheme {
    /// One block per clause: the first `|Ω_i|−1` clauses get `ε_3, ..., ε_{n_i}`
    /// and the last gets `T_i + F_i + Σ ε_j`.
    SumOfBasis,
    /// The first pair gets `(0, 1, ..., 1)`, the rest `ε_3, ..., ε_{n_i}`.
    GeneralField,
}

impl EVectorScheme {
    pub fn default_for(field: &FieldSpec) -> Self {
        if field.is_gf2() {
            EVectorScheme::SumOfBasis
        } else {
            EVectorScheme::GeneralField
        }
    }
}

/// `B = (q − 1)³`.
pub fn blocks_per_clause(field: &FieldSpec) -> u64 {
    let q1 = field.order() as u64 - 1;
    q1 * q1 * q1
}

/// Nonzero triples in lexicographic order of element codes.
pub fn triples(field: &FieldSpec) -> Vec<[FieldElement; 3]> {
    let nz: Vec<FieldElement> = field.nonzero_elements().collect();
    let mut out = Vec::with_capacity(nz.len().pow(3));
    for &a in &nz {
        for &b in &nz {
            for &c in &nz {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Index of a nonzero triple in [`triples`] order.
pub fn triple_index(field: &FieldSpec, t: [FieldElement; 3]) -> usize {
    let q1 = field.order() as usize - 1;
    t.iter().fold(0, |acc, e| acc * q1 + (e.code() as usize - 1))
}

pub fn false_marker(field: &FieldSpec, n: usize) -> Vector {
    let mut v = vec![field.zero(); n];
    v[0] = field.one();
    v
}

pub fn true_marker(field: &FieldSpec, n: usize) -> Vector {
    value_vector(field, n, field.one())
}

/// `(1, c, 0, ..., 0)`.
pub fn value_vector(field: &FieldSpec, n: usize, c: FieldElement) -> Vector {
    let mut v = false_marker(field, n);
    v[1] = c;
    v
}

fn unit(field: &FieldSpec, n: usize, j: usize) -> Vector {
    let mut v = vec![field.zero(); n];
    v[j] = field.one();
    v
}

/// The vectors `e_i(k, ℓ)` for one variable, in pair order (`k` ascending,
/// then `ℓ`), for `count = B·|Ω_i|` pairs in `F^{count+1}`.
pub fn select_e_vectors(
    field: &FieldSpec,
    count: usize,
    b: u64,
    scheme: EVectorScheme,
) -> Result<Vec<Vector>, ReductionError> {
    if count == 0 {
        return Err(ReductionError::EmptyOccurrence(0));
    }
    let n = count + 1;
    match scheme {
        EVectorScheme::SumOfBasis => {
            if b != 1 {
                return Err(ReductionError::SchemeUnsupported(b));
            }
            let mut es: Vec<Vector> = (2..n).map(|j| unit(field, n, j)).collect();
            let mut last: Vector =
                true_marker(field, n).iter().zip(false_marker(field, n)).map(|(&a, b)| field.add(a, b)).collect();
            for e in &es {
                last = last.iter().zip(e).map(|(&a, &b)| field.add(a, b)).collect();
            }
            es.push(last);
            Ok(es)
        }
        EVectorScheme::GeneralField => {
            let mut first = vec![field.one(); n];
            first[0] = field.zero();
            let mut es = vec![first];
            es.extend((2..n).map(|j| unit(field, n, j)));
            Ok(es)
        }
    }
}

/// Every `n`-element subset of `{e} ∪ {T, F}` is a basis of `F^n`.
pub fn subset_basis_condition(field: &FieldSpec, es: &[Vector]) -> bool {
    let n = es.len() + 1;
    let mut all = es.to_vec();
    all.push(true_marker(field, n));
    all.push(false_marker(field, n));
    (0..all.len()).into_par_iter().all(|skip| {
        let subset: Vec<Vector> = all.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, v)| v.clone()).collect();
        rank_of(field, n, &subset) == n
    })
}

/// `{e} ∪ {(1,c,0,..)}` is a basis for every `c`, and `{F, (1,c,0,..)} ∪
/// ({e} minus one)` is a basis for every `c ≠ 0` and every omitted vector.
pub fn general_field_conditions(field: &FieldSpec, es: &[Vector]) -> bool {
    let n = es.len() + 1;
    let with_value = field.elements().all(|c| {
        let mut set = es.to_vec();
        set.push(value_vector(field, n, c));
        rank_of(field, n, &set) == n
    });
    with_value
        && field.nonzero_elements().all(|c| {
            (0..es.len()).into_par_iter().all(|skip| {
                let mut set: Vec<Vector> =
                    es.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, v)| v.clone()).collect();
                set.push(false_marker(field, n));
                set.push(value_vector(field, n, c));
                rank_of(field, n, &set) == n
            })
        })
}

/// The conditions the construction relies on: the subset-basis property with
/// one block per clause, the general-field pair otherwise.
pub fn e_vectors_satisfy_conditions(field: &FieldSpec, es: &[Vector], b: u64) -> bool {
    if b == 1 {
        subset_basis_condition(field, es)
    } else {
        general_field_conditions(field, es)
    }
}

/// The unique row vector `r` with `r · basis[j] = target[j]`.
fn row_through(field: &FieldSpec, basis: &[Vector], target: &[FieldElement]) -> Option<Vector> {
    let n = basis.len();
    let m = Matrix::from_rows(field, basis).ok()?;
    let sol = m.solve(target).ok()??;
    if !sol.kernel.is_zero() || sol.particular.len() != n {
        return None;
    }
    Some(sol.particular)
}

/// The quiver `Q_Θ` with its dimension vector, independent of any choice of
/// arrow matrices.
#[derive(Debug, Clone)]
pub struct Skeleton {
    formula: Formula,
    field: FieldSpec,
    b: u64,
    osets: OccurrenceSets,
    quiver: Quiver,
}

impl Skeleton {
    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn blocks(&self) -> u64 {
        self.b
    }

    pub fn occurrences(&self) -> &OccurrenceSets {
        &self.osets
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn num_vars(&self) -> usize {
        self.osets.num_vars()
    }

    /// `n_i` for the 0-based variable index `i`.
    pub fn n(&self, i: usize) -> usize {
        self.osets.n(i, self.b)
    }

    pub fn u_vertex(&self, i: usize) -> usize {
        i
    }

    pub fn v_vertex(&self, i: usize) -> usize {
        self.num_vars() + i
    }

    pub fn w_vertex(&self, k: usize, l: usize) -> usize {
        2 * self.num_vars() + k * self.b as usize + l
    }

    /// Position of the pair `(k, ℓ)` among the e-vectors of variable `i`.
    pub fn pair_index(&self, i: usize, k: usize, l: usize) -> Option<usize> {
        let pos = self.osets.omega[i].binary_search(&k).ok()?;
        Some(pos * self.b as usize + l)
    }

    /// Dimension vector of every substitution.
    pub fn dims(&self) -> Vec<usize> {
        let m = self.num_vars();
        let mut dims = vec![1; m];
        dims.extend((0..m).map(|i| self.n(i)));
        dims.extend(std::iter::repeat_n(1, self.b as usize * self.formula.num_clauses()));
        dims
    }

    fn check_assignment(&self, x: &Assignment) -> Result<(), ReductionError> {
        if x.len() != self.num_vars() {
            return Err(ReductionError::AssignmentLength { expected: self.num_vars(), got: x.len() });
        }
        if x.values().iter().any(|&v| !self.field.contains(v)) {
            return Err(ReductionError::AssignmentField(self.field.to_string()));
        }
        Ok(())
    }
}

/// Output of [`build_template`]: the skeleton, the symbolic representation,
/// and the e-vectors used to build it.
#[derive(Debug, Clone)]
pub struct ReductionOutput {
    skeleton: Skeleton,
    scheme: EVectorScheme,
    template: Vec<SymbolicMatrix>,
    /// `e_table[i][j]` is `e_i` of the `j`-th pair of variable `i`.
    e_table: Vec<Vec<Vector>>,
    triples: Vec<[FieldElement; 3]>,
}

impl std::ops::Deref for ReductionOutput {
    type Target = Skeleton;

    fn deref(&self) -> &Skeleton {
        &self.skeleton
    }
}

impl ReductionOutput {
    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn scheme(&self) -> EVectorScheme {
        self.scheme
    }

    pub fn template(&self) -> &[SymbolicMatrix] {
        &self.template
    }

    pub fn triples(&self) -> &[[FieldElement; 3]] {
        &self.triples
    }

    pub fn e_vectors(&self, i: usize) -> &[Vector] {
        &self.e_table[i]
    }

    pub fn e_vector(&self, i: usize, k: usize, l: usize) -> Option<&Vector> {
        self.pair_index(i, k, l).map(|j| &self.e_table[i][j])
    }
}

/// Vertex labels and arrows of `Q_Θ`.
pub fn build_quiver(osets: &OccurrenceSets, l: usize, b: u64) -> Result<Quiver, ReductionError> {
    let m = osets.num_vars();
    if m < 2 {
        return Err(ReductionError::TooFewVariables(m));
    }
    if let Some(i) = osets.omega.iter().position(Vec::is_empty) {
        return Err(ReductionError::EmptyOccurrence(i + 1));
    }
    if b.saturating_mul(l as u64) > MAX_W_VERTICES {
        return Err(ReductionError::TooLarge { blocks: b, clauses: l });
    }
    let b = b as usize;
    let mut vertices: Vec<String> = (1..=m).map(|i| format!("u{i}")).collect();
    vertices.extend((1..=m).map(|i| format!("v{i}")));
    for k in 1..=l {
        for ell in 1..=b {
            vertices.push(if b == 1 { format!("w{k}") } else { format!("w{k}^{ell}") });
        }
    }
    let mut arrows = Vec::new();
    for i in 0..m {
        arrows.push(Arrow { source: i, target: (i + 1) % m });
    }
    for i in 0..m {
        arrows.push(Arrow { source: i, target: m + i });
    }
    for i in 0..m {
        for &k in &osets.omega[i] {
            for ell in 0..b {
                let w = 2 * m + k * b + ell;
                arrows.push(Arrow { source: m + i, target: w });
                arrows.push(Arrow { source: w, target: m + i });
            }
        }
    }
    Ok(Quiver::new(vertices, arrows)?)
}

/// The quiver and dimension vector for `f` over `field`.
pub fn build_skeleton(f: &Formula, field: &FieldSpec) -> Result<Skeleton, ReductionError> {
    if !f.is_preprocessed() {
        return Err(ReductionError::NotPreprocessed);
    }
    let b = blocks_per_clause(field);
    let osets = OccurrenceSets::from_formula(f);
    let quiver = build_quiver(&osets, f.num_clauses(), b)?;
    Ok(Skeleton { formula: f.clone(), field: field.clone(), b, osets, quiver })
}

pub fn build_template(f: &Formula, field: &FieldSpec) -> Result<ReductionOutput, ReductionError> {
    build_template_with(f, field, EVectorScheme::default_for(field))
}

pub fn build_template_with(
    f: &Formula,
    field: &FieldSpec,
    scheme: EVectorScheme,
) -> Result<ReductionOutput, ReductionError> {
    let skeleton = build_skeleton(f, field)?;
    let (b, osets) = (skeleton.b, &skeleton.osets);
    let m = osets.num_vars();
    let bu = b as usize;
    let triples = triples(field);

    let e_table = (0..m)
        .into_par_iter()
        .map(|i| {
            let es = select_e_vectors(field, bu * osets.omega[i].len(), b, scheme)?;
            if !e_vectors_satisfy_conditions(field, &es, b) {
                return Err(ReductionError::EVectorCondition(i + 1));
            }
            Ok(es)
        })
        .collect::<Result<Vec<_>, _>>()?;

    // Outgoing rows v_i → w_k^(ℓ), in the same order as the arrows.
    let rows_per_var = (0..m)
        .into_par_iter()
        .map(|i| {
            let n = osets.n(i, b);
            let es = &e_table[i];
            let mut rows = Vec::with_capacity(es.len());
            for (pos, &k) in osets.omega[i].iter().enumerate() {
                let negated = osets.minus[i].binary_search(&k).is_ok();
                let position = f.clauses()[k].literals().iter().position(|lit| lit.var == i + 1).expect("occurs");
                for (ell, triple) in triples.iter().enumerate() {
                    let j = pos * bu + ell;
                    let others = es.iter().enumerate().filter(|&(jj, _)| jj != j).map(|(_, v)| v.clone());
                    let mut basis: Vec<Vector> = if negated {
                        vec![value_vector(field, n, triple[position]), false_marker(field, n)]
                    } else {
                        vec![false_marker(field, n), true_marker(field, n)]
                    };
                    basis.extend(others);
                    let mut target = vec![field.zero(); n];
                    target[1] = field.one();
                    let row = row_through(field, &basis, &target).ok_or(ReductionError::EVectorCondition(i + 1))?;
                    rows.push(row);
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<Vec<Vector>>, ReductionError>>()?;

    let one = SymbolicEntry::Const(field.one());
    let zero = SymbolicEntry::Const(field.zero());
    let mut template = Vec::with_capacity(skeleton.quiver.num_arrows());
    for _ in 0..m {
        template.push(SymbolicMatrix { rows: 1, cols: 1, entries: vec![one] });
    }
    for i in 0..m {
        let n = osets.n(i, b);
        let mut entries = vec![zero; n];
        entries[0] = one;
        entries[1] = SymbolicEntry::Var(i + 1);
        template.push(SymbolicMatrix { rows: n, cols: 1, entries });
    }
    for i in 0..m {
        let n = osets.n(i, b);
        for (j, row) in rows_per_var[i].iter().enumerate() {
            let out = Matrix::from_vec(field, 1, n, row.clone())?;
            let back = Matrix::from_vec(field, n, 1, e_table[i][j].clone())?;
            template.push(SymbolicMatrix::constant(&out));
            template.push(SymbolicMatrix::constant(&back));
        }
    }

    Ok(ReductionOutput { skeleton, scheme, template, e_table, triples })
}

/// `R_Θ(x)`.
pub fn substitute(t: &ReductionOutput, x: &Assignment) -> Result<Representation, ReductionError> {
    t.check_assignment(x)?;
    let maps = t.template.iter().map(|s| s.substitute(&t.field, x.values())).collect();
    Ok(Representation::new(t.quiver.clone(), &t.field, t.dims(), maps)?)
}

/// The smallest falsified clause and the block matching `x` on it.
///
/// The block's triple is `y_j = x_{i_j}` when that is nonzero, else 1.
pub fn find_falsified_witness(t: &ReductionOutput, x: &Assignment) -> Result<Option<(usize, usize)>, ReductionError> {
    t.check_assignment(x)?;
    let Some(k) = t.formula.first_falsified(x) else {
        return Ok(None);
    };
    let clause = &t.formula.clauses()[k];
    let mut y = [t.field.one(); 3];
    for (slot, lit) in y.iter_mut().zip(clause.literals()) {
        let v = x.get(lit.var);
        if !v.is_zero() {
            *slot = v;
        }
    }
    Ok(Some((k, triple_index(&t.field, y))))
}

/// The splitting `R_Θ(x) = S_1 ⊕ S_2` attached to a falsified clause `k` and
/// a matching block `ℓ`.
pub fn explicit_decomposition(
    t: &ReductionOutput,
    x: &Assignment,
    k: usize,
    l: usize,
) -> Result<SubrepWitness, ReductionError> {
    t.check_assignment(x)?;
    let clause = t.formula.clauses().get(k).ok_or(ReductionError::NotFalsified(k))?;
    if clause.evaluate(x.values()) {
        return Err(ReductionError::NotFalsified(k));
    }
    if l >= t.b as usize {
        return Err(ReductionError::InvalidBlock { clause: k, block: l });
    }
    for (u, lit) in clause.literals().iter().enumerate() {
        if lit.negated && t.triples[l][u] != x.get(lit.var) {
            return Err(ReductionError::InvalidBlock { clause: k, block: l });
        }
    }
    let f = &t.field;
    let m = t.num_vars();
    let dims = t.dims();
    let mut first: Vec<SubspaceBasis> = dims.iter().map(|&n| SubspaceBasis::zero(f, n)).collect();
    let mut second: Vec<SubspaceBasis> = dims.iter().map(|&n| SubspaceBasis::full(f, n)).collect();
    let w = t.w_vertex(k, l);
    first[w] = SubspaceBasis::full(f, 1);
    second[w] = SubspaceBasis::zero(f, 1);
    for i in 0..m {
        let Some(j) = t.pair_index(i, k, l) else {
            continue;
        };
        let n = t.n(i);
        let es = &t.e_table[i];
        first[t.v_vertex(i)] = SubspaceBasis::new(f, n, vec![es[j].clone()])?;
        let mut rest = vec![value_vector(f, n, x.get(i + 1))];
        rest.extend(es.iter().enumerate().filter(|&(jj, _)| jj != j).map(|(_, v)| v.clone()));
        second[t.v_vertex(i)] = SubspaceBasis::new(f, n, rest)?;
    }
    Ok(SubrepWitness { first, second })
}
