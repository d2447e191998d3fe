//! Quivers, their representations, and endomorphism computations.
//!
//! An endomorphism of a representation `R` is a family of square matrices
//! `a_v` with `R_{v→w} · a_v = a_w · R_{v→w}` for every arrow. The space of
//! endomorphisms is computed as the kernel of this homogeneous system; its
//! unknowns are the entries of the `a_v`, vertices in quiver order and each
//! matrix row-major.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec};
use crate::matrix::{is_direct_sum, Backend, Matrix, MatrixError, SparseSystem, SubspaceBasis, Vector};
use crate::roots::RootVector;

/// Seed of the generator used when the endomorphism space is too large to enumerate.
pub const SEARCH_SEED: u64 = 0x5eed_0fc0_ffee;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("arrow {arrow} has an endpoint outside the {vertices} vertices")]
    EndpointOutOfRange { arrow: usize, vertices: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("maps belong to a different field")]
    FieldMismatch,
    #[error("the representation is zero")]
    ZeroRepresentation,
    #[error("the given tuple does not commute with the arrow maps")]
    NotEndomorphism,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
}

/// A directed multigraph with labeled vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Result<Self, QuiverError> {
        let q = Quiver { vertices, arrows };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<(), QuiverError> {
        let n = self.vertices.len();
        if let Some(i) = self.arrows.iter().position(|a| a.source >= n || a.target >= n) {
            return Err(QuiverError::EndpointOutOfRange { arrow: i, vertices: n });
        }
        Ok(())
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> usize {
        self.vertices.push(label.into());
        self.vertices.len() - 1
    }

    pub fn add_arrow(&mut self, source: usize, target: usize) -> usize {
        assert!(source < self.vertices.len() && target < self.vertices.len(), "arrow endpoint out of range");
        self.arrows.push(Arrow { source, target });
        self.arrows.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn label(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn has_self_loops(&self) -> bool {
        self.arrows.iter().any(|a| a.source == a.target)
    }
}

/// A representation: a vector space `F^{n_v}` per vertex and an
/// `n_target × n_source` matrix per arrow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RepresentationRepr", into = "RepresentationRepr")]
pub struct Representation {
    quiver: Quiver,
    field: FieldSpec,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

#[derive(Serialize, Deserialize)]
struct RepresentationRepr {
    field: FieldSpec,
    quiver: Quiver,
    dims: Vec<usize>,
    /// Per arrow, row-major element codes.
    maps: Vec<Vec<Vec<u32>>>,
}

impl From<Representation> for RepresentationRepr {
    fn from(r: Representation) -> Self {
        let maps = r
            .maps
            .iter()
            .map(|m| (0..m.rows()).map(|i| m.row(i).iter().map(|e| e.code()).collect()).collect())
            .collect();
        RepresentationRepr { field: r.field, quiver: r.quiver, dims: r.dims, maps }
    }
}

impl TryFrom<RepresentationRepr> for Representation {
    type Error = QuiverError;

    fn try_from(repr: RepresentationRepr) -> Result<Self, Self::Error> {
        let field = repr.field;
        let mut maps = Vec::with_capacity(repr.maps.len());
        for (i, rows) in repr.maps.iter().enumerate() {
            let arrow = repr.quiver.arrows.get(i).ok_or_else(|| QuiverError::Shape("more maps than arrows".into()))?;
            let (r, c) = (
                *repr.dims.get(arrow.target).unwrap_or(&0),
                *repr.dims.get(arrow.source).unwrap_or(&0),
            );
            let data = rows
                .iter()
                .flatten()
                .map(|&code| field.element(code as u64).map_err(|_| MatrixError::ElementRange(field.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            maps.push(Matrix::from_vec(&field, r, c, data)?);
        }
        Representation::new(repr.quiver, &field, repr.dims, maps)
    }
}

impl Representation {
    pub fn new(quiver: Quiver, field: &FieldSpec, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self, QuiverError> {
        quiver.validate()?;
        if dims.len() != quiver.num_vertices() {
            return Err(QuiverError::Shape(format!(
                "{} dimensions for {} vertices",
                dims.len(),
                quiver.num_vertices()
            )));
        }
        if maps.len() != quiver.num_arrows() {
            return Err(QuiverError::Shape(format!("{} maps for {} arrows", maps.len(), quiver.num_arrows())));
        }
        for (i, (a, m)) in quiver.arrows.iter().zip(&maps).enumerate() {
            if m.field() != field {
                return Err(QuiverError::FieldMismatch);
            }
            if m.rows() != dims[a.target] || m.cols() != dims[a.source] {
                return Err(QuiverError::Shape(format!(
                    "arrow {i} ({}→{}) carries a {}x{} matrix, expected {}x{}",
                    a.source,
                    a.target,
                    m.rows(),
                    m.cols(),
                    dims[a.target],
                    dims[a.source]
                )));
            }
        }
        Ok(Representation { quiver, field: field.clone(), dims, maps })
    }

    /// Every space zero-dimensional.
    pub fn zero(quiver: Quiver, field: &FieldSpec) -> Self {
        let dims = vec![0; quiver.num_vertices()];
        let maps = quiver.arrows.iter().map(|_| Matrix::zeros(field, 0, 0)).collect();
        Representation { quiver, field: field.clone(), dims, maps }
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn map(&self, arrow: usize) -> &Matrix {
        &self.maps[arrow]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Offset of vertex `v`'s block among the `Σ n_v²` endomorphism unknowns.
    fn unknown_offsets(&self) -> (Vec<usize>, usize) {
        let mut offsets = Vec::with_capacity(self.dims.len());
        let mut total = 0;
        for &n in &self.dims {
            offsets.push(total);
            total += n * n;
        }
        (offsets, total)
    }

    /// The commutation equations as sparse rows over the unknowns.
    fn commutation_rows(&self) -> (usize, Vec<Vec<(usize, FieldElement)>>) {
        let (offsets, total) = self.unknown_offsets();
        let f = &self.field;
        let mut rows = Vec::new();
        for (arrow, m) in self.quiver.arrows.iter().zip(&self.maps) {
            let (s, t) = (arrow.source, arrow.target);
            let (ns, nt) = (self.dims[s], self.dims[t]);
            // Entry (p, q) of  A · a_s − a_t · A.
            for p in 0..nt {
                for q in 0..ns {
                    let mut row = Vec::new();
                    for r in 0..ns {
                        let c = m.get(p, r);
                        if !c.is_zero() {
                            row.push((offsets[s] + r * ns + q, c));
                        }
                    }
                    for r in 0..nt {
                        let c = m.get(r, q);
                        if !c.is_zero() {
                            row.push((offsets[t] + p * nt + r, f.neg(c)));
                        }
                    }
                    if !row.is_empty() {
                        rows.push(row);
                    }
                }
            }
        }
        (total, rows)
    }

    fn check_tuple(&self, components: &[Matrix]) -> Result<(), QuiverError> {
        if components.len() != self.dims.len() {
            return Err(QuiverError::Shape(format!(
                "{} components for {} vertices",
                components.len(),
                self.dims.len()
            )));
        }
        for (m, &n) in components.iter().zip(&self.dims) {
            if m.field() != &self.field {
                return Err(QuiverError::FieldMismatch);
            }
            if m.rows() != n || m.cols() != n {
                return Err(QuiverError::Shape(format!("{}x{} component at a vertex of dimension {n}", m.rows(), m.cols())));
            }
        }
        Ok(())
    }

    fn check_subspaces(&self, s: &[SubspaceBasis]) -> Result<(), QuiverError> {
        if s.len() != self.dims.len() {
            return Err(QuiverError::Shape(format!("{} subspaces for {} vertices", s.len(), self.dims.len())));
        }
        for (b, &n) in s.iter().zip(&self.dims) {
            if b.field() != &self.field {
                return Err(QuiverError::FieldMismatch);
            }
            if b.ambient_dim() != n {
                return Err(QuiverError::Shape(format!("subspace of F^{} at a vertex of dimension {n}", b.ambient_dim())));
            }
        }
        Ok(())
    }
}

/// A per-vertex family of square matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endomorphism {
    components: Vec<Matrix>,
}

impl Endomorphism {
    pub fn new(components: Vec<Matrix>) -> Self {
        Endomorphism { components }
    }

    pub fn identity(r: &Representation) -> Self {
        Self::scalar(r, FieldElement::ONE)
    }

    pub fn scalar(r: &Representation, c: FieldElement) -> Self {
        Endomorphism { components: r.dims.iter().map(|&n| Matrix::scalar(&r.field, n, c)).collect() }
    }

    pub fn components(&self) -> &[Matrix] {
        &self.components
    }

    pub fn component(&self, v: usize) -> &Matrix {
        &self.components[v]
    }

    /// `Some(c)` when every component is `c·I` for one common `c`.
    pub fn scalar_value(&self) -> Option<FieldElement> {
        let mut common = None;
        for m in &self.components {
            if m.rows() == 0 {
                continue;
            }
            let c = m.scalar_value()?;
            match common {
                None => common = Some(c),
                Some(d) if d != c => return None,
                _ => {}
            }
        }
        Some(common.unwrap_or(FieldElement::ZERO))
    }

    /// Vertex-wise product `self ∘ other`.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism, QuiverError> {
        if self.components.len() != other.components.len() {
            return Err(QuiverError::Shape("component counts differ".into()));
        }
        let components =
            self.components.iter().zip(&other.components).map(|(a, b)| a.mul(b)).collect::<Result<_, _>>()?;
        Ok(Endomorphism { components })
    }

    /// Checks `R_{v→w} · a_v = a_w · R_{v→w}` for every arrow directly.
    pub fn commutes_with(&self, r: &Representation) -> Result<bool, QuiverError> {
        r.check_tuple(&self.components)?;
        for (arrow, m) in r.quiver.arrows.iter().zip(&r.maps) {
            let left = m.mul(&self.components[arrow.source])?;
            let right = self.components[arrow.target].mul(m)?;
            if left != right {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Unknown vector in the layout of the commutation system.
    fn flatten(&self) -> Vector {
        self.components.iter().flat_map(|m| m.entries().iter().copied()).collect()
    }
}

/// The space of endomorphisms with its canonical basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndomorphismSpace {
    field: FieldSpec,
    dims: Vec<usize>,
    basis: Vec<Endomorphism>,
}

impl EndomorphismSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Endomorphism] {
        &self.basis
    }

    /// `Σ c_j · basis_j`.
    pub fn combination(&self, coefficients: &[FieldElement]) -> Endomorphism {
        assert_eq!(coefficients.len(), self.basis.len(), "one coefficient per basis element");
        let f = &self.field;
        let components = self
            .dims
            .iter()
            .enumerate()
            .map(|(v, &n)| {
                let mut acc = Matrix::zeros(f, n, n);
                for (c, b) in coefficients.iter().zip(&self.basis) {
                    if !c.is_zero() {
                        acc = acc.add(&b.components[v].scale(*c)).expect("same shape");
                    }
                }
                acc
            })
            .collect();
        Endomorphism { components }
    }

    /// Whether `e` lies in the span of the basis.
    pub fn contains(&self, e: &Endomorphism) -> Result<bool, QuiverError> {
        let flat = e.flatten();
        let basis: Vec<Vector> = self.basis.iter().map(Endomorphism::flatten).collect();
        if basis.is_empty() {
            return Ok(flat.iter().all(|x| x.is_zero()));
        }
        let span = SubspaceBasis::new(&self.field, flat.len(), basis)?;
        Ok(span.contains(&flat)?)
    }
}

/// Elimination route for the commutation system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveRoute {
    /// Incremental sparse elimination.
    #[default]
    Sparse,
    /// Dense matrix kernel (bit-packed over GF(2)).
    Dense,
}

fn commutation_kernel(r: &Representation, route: SolveRoute) -> SubspaceBasis {
    let (total, rows) = r.commutation_rows();
    match route {
        SolveRoute::Sparse => {
            let mut sys = SparseSystem::new(&r.field, total);
            for row in &rows {
                sys.push_row(row).expect("columns in range");
            }
            sys.kernel()
        }
        SolveRoute::Dense => {
            let mut m = Matrix::zeros(&r.field, rows.len(), total);
            for (i, row) in rows.iter().enumerate() {
                for &(c, v) in row {
                    m.set(i, c, r.field.add(m.get(i, c), v));
                }
            }
            m.kernel_with(Backend::Auto)
        }
    }
}

pub fn endomorphism_space(r: &Representation) -> EndomorphismSpace {
    endomorphism_space_with(r, SolveRoute::Sparse)
}

pub fn endomorphism_space_with(r: &Representation, route: SolveRoute) -> EndomorphismSpace {
    let kernel = commutation_kernel(r, route);
    let (offsets, _) = r.unknown_offsets();
    let basis = kernel
        .vectors()
        .iter()
        .map(|k| {
            let components = r
                .dims
                .iter()
                .zip(&offsets)
                .map(|(&n, &off)| Matrix::from_vec(&r.field, n, n, k[off..off + n * n].to_vec()).expect("block shape"))
                .collect();
            Endomorphism { components }
        })
        .collect();
    EndomorphismSpace { field: r.field.clone(), dims: r.dims.clone(), basis }
}

/// `dim End R` without materializing the basis.
pub fn endomorphism_dimension(r: &Representation) -> usize {
    let (total, rows) = r.commutation_rows();
    let mut sys = SparseSystem::new(&r.field, total);
    for row in &rows {
        sys.push_row(row).expect("columns in range");
    }
    total - sys.rank()
}

/// `dim End R = 1`. A Schur representation is absolutely indecomposable.
pub fn is_schur(r: &Representation) -> Result<bool, QuiverError> {
    if r.total_dim() == 0 {
        return Err(QuiverError::ZeroRepresentation);
    }
    Ok(endomorphism_dimension(r) == 1)
}

/// Whether `s` (one subspace per vertex) is mapped into itself by every arrow.
pub fn is_subrepresentation(r: &Representation, s: &[SubspaceBasis]) -> Result<bool, QuiverError> {
    r.check_subspaces(s)?;
    for (arrow, m) in r.quiver.arrows.iter().zip(&r.maps) {
        let images: Vec<Vector> =
            s[arrow.source].vectors().iter().map(|v| m.apply(v)).collect::<Result<_, _>>()?;
        if !s[arrow.target].contains_all(&images)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Two families of subspaces claimed to split a representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubrepWitness {
    pub first: Vec<SubspaceBasis>,
    pub second: Vec<SubspaceBasis>,
}

impl SubrepWitness {
    pub fn swapped(&self) -> SubrepWitness {
        SubrepWitness { first: self.second.clone(), second: self.first.clone() }
    }

    pub fn first_dims(&self) -> Vec<usize> {
        self.first.iter().map(SubspaceBasis::dim).collect()
    }

    pub fn second_dims(&self) -> Vec<usize> {
        self.second.iter().map(SubspaceBasis::dim).collect()
    }
}

/// Both families are nonzero subrepresentations and they are complementary
/// at every vertex.
pub fn verify_decomposition(r: &Representation, w: &SubrepWitness) -> Result<bool, QuiverError> {
    r.check_subspaces(&w.first)?;
    r.check_subspaces(&w.second)?;
    if w.first.iter().all(SubspaceBasis::is_zero) || w.second.iter().all(SubspaceBasis::is_zero) {
        return Ok(false);
    }
    for (a, b) in w.first.iter().zip(&w.second) {
        if !is_direct_sum(a, b)? {
            return Ok(false);
        }
    }
    Ok(is_subrepresentation(r, &w.first)? && is_subrepresentation(r, &w.second)?)
}

/// Fitting splitting `R = im φ^N ⊕ ker φ^N` with `N` the total dimension.
/// `None` when `φ` is nilpotent or invertible.
pub fn fitting_split(r: &Representation, phi: &Endomorphism) -> Result<Option<SubrepWitness>, QuiverError> {
    if !phi.commutes_with(r)? {
        return Err(QuiverError::NotEndomorphism);
    }
    Ok(fitting_split_unchecked(r, phi))
}

fn fitting_split_unchecked(r: &Representation, phi: &Endomorphism) -> Option<SubrepWitness> {
    let n = r.total_dim() as u64;
    let mut first = Vec::with_capacity(r.dims.len());
    let mut second = Vec::with_capacity(r.dims.len());
    for m in &phi.components {
        let power = m.pow(n).expect("square component");
        first.push(power.column_space());
        second.push(power.kernel());
    }
    let nilpotent = first.iter().all(SubspaceBasis::is_zero);
    let invertible = second.iter().all(SubspaceBasis::is_zero);
    if nilpotent || invertible {
        None
    } else {
        Some(SubrepWitness { first, second })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A splitting endomorphism was found; `coefficients` are its coordinates
    /// in the canonical endomorphism basis.
    Found { witness: SubrepWitness, coefficients: Vec<FieldElement> },
    /// No witness among `examined` candidates. When `exhaustive` every element
    /// of `End R` was tried, which proves `R` indecomposable over its field.
    Exhausted { exhaustive: bool, examined: u64 },
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&SubrepWitness> {
        match self {
            SearchOutcome::Found { witness, .. } => Some(witness),
            SearchOutcome::Exhausted { .. } => None,
        }
    }
}

/// Looks for a non-scalar endomorphism that splits `R`.
///
/// Coefficient vectors are enumerated in lexicographic order (first
/// coordinate most significant) when `q^dim ≤ budget`; otherwise `budget`
/// vectors are drawn from a generator seeded with [`SEARCH_SEED`]. The
/// returned witness is the first hit in that order regardless of scheduling.
pub fn search_decomposition(r: &Representation, budget: u64) -> SearchOutcome {
    let space = endomorphism_space(r);
    search_in_space(r, &space, budget)
}

pub fn search_in_space(r: &Representation, space: &EndomorphismSpace, budget: u64) -> SearchOutcome {
    let budget = budget.max(1);
    let f = &r.field;
    let d = space.dimension();
    let q = f.order() as u64;
    let total = u32::try_from(d).ok().and_then(|d| q.checked_pow(d));
    let try_coeffs = |coeffs: Vec<FieldElement>| -> Option<SearchOutcome> {
        let phi = space.combination(&coeffs);
        if phi.scalar_value().is_some() {
            return None;
        }
        fitting_split_unchecked(r, &phi).map(|witness| SearchOutcome::Found { witness, coefficients: coeffs })
    };
    match total {
        Some(total) if total <= budget => {
            let decode = |mut idx: u64| -> Vec<FieldElement> {
                let mut c = vec![FieldElement::ZERO; d];
                for slot in c.iter_mut().rev() {
                    *slot = f.element(idx % q).expect("digit");
                    idx /= q;
                }
                c
            };
            (0..total)
                .into_par_iter()
                .find_map_first(|idx| try_coeffs(decode(idx)))
                .unwrap_or(SearchOutcome::Exhausted { exhaustive: true, examined: total })
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
            let samples: Vec<Vec<FieldElement>> = (0..budget)
                .map(|_| (0..d).map(|_| f.element(rng.gen_range(0..q)).expect("in range")).collect())
                .collect();
            samples
                .into_par_iter()
                .find_map_first(try_coeffs)
                .unwrap_or(SearchOutcome::Exhausted { exhaustive: false, examined: budget })
        }
    }
}

/// Per-vertex dimensions in vertex order.
pub fn dim_vector(r: &Representation) -> RootVector {
    RootVector::new(r.dims.iter().map(|&n| n as i64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::gf2()
    }

    fn single_vertex(n: usize) -> Representation {
        let q = Quiver::new(vec!["v".into()], vec![]).unwrap();
        Representation::new(q, &f2(), vec![n], vec![]).unwrap()
    }

    fn a2(map: u32) -> Representation {
        let q = Quiver::new(vec!["v".into(), "w".into()], vec![Arrow { source: 0, target: 1 }]).unwrap();
        let m = Matrix::from_ints(&f2(), &[&[map]]).unwrap();
        Representation::new(q, &f2(), vec![1, 1], vec![m]).unwrap()
    }

    #[test]
    fn endomorphism_dimensions() {
        assert_eq!(endomorphism_space(&single_vertex(2)).dimension(), 4);
        assert_eq!(endomorphism_space(&a2(1)).dimension(), 1);
        assert_eq!(endomorphism_space(&a2(0)).dimension(), 2);
    }

    #[test]
    fn schur_cases() {
        assert!(is_schur(&a2(1)).unwrap());
        assert!(!is_schur(&single_vertex(2)).unwrap());
        assert_eq!(is_schur(&single_vertex(0)), Err(QuiverError::ZeroRepresentation));
    }

    #[test]
    fn subrepresentation_cases() {
        let r = a2(1);
        let full: Vec<_> = r.dims().iter().map(|&n| SubspaceBasis::full(&f2(), n)).collect();
        let zero: Vec<_> = r.dims().iter().map(|&n| SubspaceBasis::zero(&f2(), n)).collect();
        assert!(is_subrepresentation(&r, &full).unwrap());
        assert!(is_subrepresentation(&r, &zero).unwrap());
        let mixed = vec![SubspaceBasis::full(&f2(), 1), SubspaceBasis::zero(&f2(), 1)];
        assert!(!is_subrepresentation(&r, &mixed).unwrap());
        assert!(is_subrepresentation(&r, &full[..1]).is_err());
    }

    #[test]
    fn decomposition_of_a2_zero_map() {
        let r = a2(0);
        let w = SubrepWitness {
            first: vec![SubspaceBasis::full(&f2(), 1), SubspaceBasis::zero(&f2(), 1)],
            second: vec![SubspaceBasis::zero(&f2(), 1), SubspaceBasis::full(&f2(), 1)],
        };
        assert!(verify_decomposition(&r, &w).unwrap());
        assert!(verify_decomposition(&r, &w.swapped()).unwrap());
        // The same witness fails once the map is nonzero.
        assert!(!verify_decomposition(&a2(1), &w).unwrap());
        let degenerate = SubrepWitness {
            first: vec![SubspaceBasis::zero(&f2(), 1), SubspaceBasis::zero(&f2(), 1)],
            second: vec![SubspaceBasis::full(&f2(), 1), SubspaceBasis::full(&f2(), 1)],
        };
        assert!(!verify_decomposition(&r, &degenerate).unwrap());
    }

    #[test]
    fn fitting_cases() {
        let r = single_vertex(2);
        assert_eq!(fitting_split(&r, &Endomorphism::identity(&r)).unwrap(), None);
        let diag = Endomorphism::new(vec![Matrix::from_ints(&f2(), &[&[1, 0], &[0, 0]]).unwrap()]);
        let w = fitting_split(&r, &diag).unwrap().unwrap();
        assert_eq!(w.first[0].vectors(), &[vec![f2().one(), f2().zero()]]);
        assert_eq!(w.second[0].vectors(), &[vec![f2().zero(), f2().one()]]);
        assert!(verify_decomposition(&r, &w).unwrap());
        let nil = Endomorphism::new(vec![Matrix::from_ints(&f2(), &[&[0, 1], &[0, 0]]).unwrap()]);
        assert_eq!(fitting_split(&r, &nil).unwrap(), None);
        let bad = Endomorphism::new(vec![Matrix::from_ints(&f2(), &[&[1]]).unwrap(), Matrix::from_ints(&f2(), &[&[0]]).unwrap()]);
        assert_eq!(fitting_split(&a2(1), &bad), Err(QuiverError::NotEndomorphism));
    }

    #[test]
    fn search_cases() {
        match search_decomposition(&a2(0), 1 << 20) {
            SearchOutcome::Found { witness, coefficients } => {
                assert!(verify_decomposition(&a2(0), &witness).unwrap());
                assert_eq!(coefficients.len(), 2);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
        assert_eq!(
            search_decomposition(&a2(1), 1 << 20),
            SearchOutcome::Exhausted { exhaustive: true, examined: 2 }
        );
        // Budget below q^dim switches to sampling, which still finds a split here.
        let r = single_vertex(2);
        let out = search_decomposition(&r, 4);
        assert!(out.witness().is_some_and(|w| verify_decomposition(&r, w).unwrap()));
    }

    #[test]
    fn identity_in_space_and_basis_commutes() {
        for r in [a2(0), a2(1), single_vertex(3)] {
            let space = endomorphism_space(&r);
            assert!(space.contains(&Endomorphism::identity(&r)).unwrap());
            for b in space.basis() {
                assert!(b.commutes_with(&r).unwrap());
            }
        }
    }

    #[test]
    fn routes_agree() {
        let r = single_vertex(3);
        assert_eq!(endomorphism_space_with(&r, SolveRoute::Dense), endomorphism_space_with(&r, SolveRoute::Sparse));
    }

    #[test]
    fn representation_validation() {
        let q = Quiver::new(vec!["v".into(), "w".into()], vec![Arrow { source: 0, target: 1 }]).unwrap();
        let wrong = Matrix::zeros(&f2(), 1, 2);
        assert!(matches!(Representation::new(q.clone(), &f2(), vec![1, 1], vec![wrong]), Err(QuiverError::Shape(_))));
        assert!(matches!(
            Quiver::new(vec!["v".into()], vec![Arrow { source: 0, target: 1 }]),
            Err(QuiverError::EndpointOutOfRange { .. })
        ));
        let zero = Representation::zero(q, &f2());
        assert_eq!(dim_vector(&zero), RootVector::new(vec![0, 0]));
    }

    #[test]
    fn json_round_trip() {
        let r = a2(1);
        let text = serde_json::to_string(&r).unwrap();
        let back: Representation = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
