//! Dense exact linear algebra over a finite field.
//!
//! Vectors are columns; a matrix of shape `rows × cols` acts on vectors of
//! length `cols` by left multiplication. Reduced row-echelon forms are unique,
//! and kernel bases follow the RREF free-variable convention (each free
//! column in ascending order contributes the vector with a 1 in that column
//! and 0 in every other free column), so every result is deterministic.
//!
//! Over GF(2) elimination runs on bit-packed rows (see [`packed`]); the
//! choice is invisible in results and can be forced through [`Backend`].

pub mod packed;
pub mod sparse;

use std::fmt;

use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec};

pub use sparse::SparseSystem;

/// A column vector.
pub type Vector = Vec<FieldElement>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("entry is not an element of {0}")]
    ElementRange(String),
    #[error("vectors are linearly dependent")]
    Dependent,
}

/// Elimination route. `Auto` picks the bit-packed route for GF(2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Auto,
    Generic,
    Packed,
}

impl Backend {
    fn packed_for(self, field: &FieldSpec) -> bool {
        match self {
            Backend::Auto => field.is_gf2(),
            Backend::Generic => false,
            Backend::Packed => {
                assert!(field.is_gf2(), "bit-packed elimination requires GF(2)");
                true
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?} [", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|&e| self.field.format_element(e)).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Result of Gauss-Jordan elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    pub rref: Matrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Canonical kernel basis of the original matrix.
    pub fn kernel(&self) -> SubspaceBasis {
        let m = &self.rref;
        let field = &m.field;
        let mut is_pivot = vec![false; m.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let vectors = (0..m.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![FieldElement::ZERO; m.cols];
                v[free] = FieldElement::ONE;
                for (r, &p) in self.pivots.iter().enumerate() {
                    v[p] = field.neg(m.get(r, free));
                }
                v
            })
            .collect();
        SubspaceBasis { field: field.clone(), ambient_dim: m.cols, vectors }
    }
}

impl Matrix {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, field: field.clone(), data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = FieldElement::ONE;
        }
        m
    }

    pub fn scalar(field: &FieldSpec, n: usize, c: FieldElement) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn from_fn(
        field: &FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, field: field.clone(), data }
    }

    /// Row-major construction with validation of shape and entries.
    pub fn from_vec(
        field: &FieldSpec,
        rows: usize,
        cols: usize,
        data: Vec<FieldElement>,
    ) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|&e| !field.contains(e)) {
            return Err(MatrixError::ElementRange(field.to_string()));
        }
        Ok(Matrix { rows, cols, field: field.clone(), data })
    }

    pub fn from_rows(field: &FieldSpec, rows: &[Vector]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Shape("ragged rows".into()));
        }
        Self::from_vec(field, rows.len(), cols, rows.concat())
    }

    /// Matrix whose columns are the given vectors, each of length `height`.
    pub fn from_columns(field: &FieldSpec, height: usize, columns: &[Vector]) -> Result<Self, MatrixError> {
        if columns.iter().any(|c| c.len() != height) {
            return Err(MatrixError::Shape("column length differs from height".into()));
        }
        if columns.iter().flatten().any(|&e| !field.contains(e)) {
            return Err(MatrixError::ElementRange(field.to_string()));
        }
        Ok(Self::from_fn(field, height, columns.len(), |r, c| columns[c][r]))
    }

    /// Convenience for tests and literals: entries given as small integers.
    pub fn from_ints(field: &FieldSpec, rows: &[&[u32]]) -> Result<Self, MatrixError> {
        let rows: Vec<Vector> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| field.element(x as u64).map_err(|_| MatrixError::ElementRange(field.to_string())))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Self::from_rows(field, &rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    /// `Some(c)` when the matrix equals `c·I`.
    pub fn scalar_value(&self) -> Option<FieldElement> {
        if !self.is_square() {
            return None;
        }
        let c = if self.rows == 0 { FieldElement::ZERO } else { self.get(0, 0) };
        for r in 0..self.rows {
            for k in 0..self.cols {
                let expect = if r == k { c } else { FieldElement::ZERO };
                if self.get(r, k) != expect {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |r, c| self.get(c, r))
    }

    fn check_field(&self, other: &Matrix) -> Result<(), MatrixError> {
        if self.field != other.field {
            return Err(MatrixError::FieldMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(MatrixError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * other.cols + c;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[FieldElement]) -> Result<Vector, MatrixError> {
        if x.len() != self.cols {
            return Err(MatrixError::Shape(format!(
                "{}x{} applied to a vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(FieldElement::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: impl Fn(&FieldSpec, FieldElement, FieldElement) -> FieldElement,
    ) -> Result<Matrix, MatrixError> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(MatrixError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(&self.field, a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, field: self.field.clone(), data })
    }

    pub fn scale(&self, c: FieldElement) -> Matrix {
        let data = self.data.iter().map(|&a| self.field.mul(c, a)).collect();
        Matrix { rows: self.rows, cols: self.cols, field: self.field.clone(), data }
    }

    pub fn pow(&self, mut e: u64) -> Result<Matrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::Shape("power of a non-square matrix".into()));
        }
        let mut base = self.clone();
        let mut acc = Matrix::identity(&self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(MatrixError::Shape("row counts differ".into()));
        }
        Ok(Matrix::from_fn(&self.field, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c)
            } else {
                other.get(r, c - self.cols)
            }
        }))
    }

    pub fn echelon(&self) -> Echelon {
        self.echelon_with(Backend::Auto)
    }

    pub fn echelon_with(&self, backend: Backend) -> Echelon {
        if backend.packed_for(&self.field) {
            let mut bits = packed::BitMatrix::from_matrix(self);
            let pivots = bits.rref();
            Echelon { rref: bits.to_matrix(&self.field), pivots }
        } else {
            let mut rref = self.clone();
            let pivots = rref_generic(&mut rref);
            Echelon { rref, pivots }
        }
    }

    pub fn rref(&self) -> Matrix {
        self.echelon().rref
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    pub fn kernel(&self) -> SubspaceBasis {
        self.kernel_with(Backend::Auto)
    }

    pub fn kernel_with(&self, backend: Backend) -> SubspaceBasis {
        if backend.packed_for(&self.field) {
            let mut bits = packed::BitMatrix::from_matrix(self);
            let pivots = bits.rref();
            bits.kernel(&pivots, &self.field)
        } else {
            self.echelon_with(backend).kernel()
        }
    }

    /// `(rref, rank, kernel)` in one elimination pass.
    pub fn rref_rank_kernel(&self) -> (Matrix, usize, SubspaceBasis) {
        self.rref_rank_kernel_with(Backend::Auto)
    }

    pub fn rref_rank_kernel_with(&self, backend: Backend) -> (Matrix, usize, SubspaceBasis) {
        let ech = self.echelon_with(backend);
        let kernel = ech.kernel();
        let rank = ech.rank();
        (ech.rref, rank, kernel)
    }

    /// Solves `self · x = b`. `Ok(None)` when `b` lies outside the column span.
    pub fn solve(&self, b: &[FieldElement]) -> Result<Option<Solution>, MatrixError> {
        self.solve_with(b, Backend::Auto)
    }

    pub fn solve_with(&self, b: &[FieldElement], backend: Backend) -> Result<Option<Solution>, MatrixError> {
        if b.len() != self.rows {
            return Err(MatrixError::Shape(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        if b.iter().any(|&e| !self.field.contains(e)) {
            return Err(MatrixError::ElementRange(self.field.to_string()));
        }
        let rhs = Matrix::from_fn(&self.field, self.rows, 1, |r, _| b[r]);
        let ech = self.hconcat(&rhs)?.echelon_with(backend);
        if ech.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut particular = vec![FieldElement::ZERO; self.cols];
        for (r, &p) in ech.pivots.iter().enumerate() {
            particular[p] = ech.rref.get(r, self.cols);
        }
        // The left block of rref([A | b]) is rref(A).
        let coeffs = Matrix::from_fn(&self.field, ech.rref.rows, self.cols, |r, c| ech.rref.get(r, c));
        let kernel = Echelon { rref: coeffs, pivots: ech.pivots.clone() }.kernel();
        Ok(Some(Solution { particular, kernel }))
    }

    /// Basis of the column space (image), taken from the pivot columns.
    pub fn column_space(&self) -> SubspaceBasis {
        let ech = self.echelon();
        let vectors = ech.pivots.iter().map(|&c| self.column(c)).collect();
        SubspaceBasis { field: self.field.clone(), ambient_dim: self.rows, vectors }
    }
}

/// In-place Gauss-Jordan elimination over an arbitrary field; returns pivot columns.
fn rref_generic(m: &mut Matrix) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let field = m.field.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m.data[i * cols + c].is_zero()) else {
            continue;
        };
        if p != r {
            for k in c..cols {
                m.data.swap(p * cols + k, r * cols + k);
            }
        }
        let inv = field.inv(m.data[r * cols + c]).expect("pivot is nonzero");
        if !inv.is_one() {
            for k in c..cols {
                m.data[r * cols + k] = field.mul(inv, m.data[r * cols + k]);
            }
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m.data[i * cols + c];
            if factor.is_zero() {
                continue;
            }
            let neg = field.neg(factor);
            for k in c..cols {
                let pv = m.data[r * cols + k];
                if !pv.is_zero() {
                    let idx = i * cols + k;
                    m.data[idx] = field.add(m.data[idx], field.mul(neg, pv));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A particular solution together with the homogeneous solution space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vector,
    pub kernel: SubspaceBasis,
}

/// A linearly independent family of column vectors in `F^ambient_dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    field: FieldSpec,
    ambient_dim: usize,
    vectors: Vec<Vector>,
}

impl SubspaceBasis {
    /// Validates lengths and linear independence.
    pub fn new(field: &FieldSpec, ambient_dim: usize, vectors: Vec<Vector>) -> Result<Self, MatrixError> {
        let basis = SubspaceBasis { field: field.clone(), ambient_dim, vectors };
        basis.check_lengths()?;
        if rank_of(field, ambient_dim, &basis.vectors) != basis.vectors.len() {
            return Err(MatrixError::Dependent);
        }
        Ok(basis)
    }

    /// Basis of the span of arbitrary vectors (the nonzero RREF rows).
    pub fn span(field: &FieldSpec, ambient_dim: usize, vectors: &[Vector]) -> Result<Self, MatrixError> {
        let tmp = SubspaceBasis { field: field.clone(), ambient_dim, vectors: vectors.to_vec() };
        tmp.check_lengths()?;
        if vectors.is_empty() {
            return Ok(Self::zero(field, ambient_dim));
        }
        let ech = Matrix::from_rows(field, vectors)?.echelon();
        let vectors = (0..ech.rank()).map(|r| ech.rref.row(r).to_vec()).collect();
        Ok(SubspaceBasis { field: field.clone(), ambient_dim, vectors })
    }

    pub fn zero(field: &FieldSpec, ambient_dim: usize) -> Self {
        SubspaceBasis { field: field.clone(), ambient_dim, vectors: Vec::new() }
    }

    /// The whole space, spanned by the standard unit vectors.
    pub fn full(field: &FieldSpec, ambient_dim: usize) -> Self {
        let vectors = (0..ambient_dim)
            .map(|i| {
                let mut v = vec![FieldElement::ZERO; ambient_dim];
                v[i] = FieldElement::ONE;
                v
            })
            .collect();
        SubspaceBasis { field: field.clone(), ambient_dim, vectors }
    }

    fn check_lengths(&self) -> Result<(), MatrixError> {
        if let Some(v) = self.vectors.iter().find(|v| v.len() != self.ambient_dim) {
            return Err(MatrixError::Shape(format!(
                "vector of length {} in ambient dimension {}",
                v.len(),
                self.ambient_dim
            )));
        }
        if self.vectors.iter().flatten().any(|&e| !self.field.contains(e)) {
            return Err(MatrixError::ElementRange(self.field.to_string()));
        }
        Ok(())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<Vector> {
        self.vectors
    }

    /// `ambient_dim × dim` matrix with the basis vectors as columns.
    pub fn as_columns(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.ambient_dim, self.vectors.len(), |r, c| self.vectors[c][r])
    }

    /// Whether every given vector lies in the span.
    pub fn contains_all(&self, extra: &[Vector]) -> Result<bool, MatrixError> {
        if extra.is_empty() {
            return Ok(true);
        }
        let joined: Vec<Vector> = self.vectors.iter().chain(extra).cloned().collect();
        let tmp = SubspaceBasis { field: self.field.clone(), ambient_dim: self.ambient_dim, vectors: joined };
        tmp.check_lengths()?;
        Ok(rank_of(&self.field, self.ambient_dim, &tmp.vectors) == self.dim())
    }

    pub fn contains(&self, v: &[FieldElement]) -> Result<bool, MatrixError> {
        self.contains_all(&[v.to_vec()])
    }
}

/// Rank of a family of vectors of common length `ambient_dim`.
pub fn rank_of(field: &FieldSpec, ambient_dim: usize, vectors: &[Vector]) -> usize {
    if vectors.is_empty() || ambient_dim == 0 {
        return 0;
    }
    Matrix::from_fn(field, vectors.len(), ambient_dim, |r, c| vectors[r][c]).rank()
}

/// True iff `a ⊕ b` is the whole ambient space.
pub fn is_direct_sum(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<bool, MatrixError> {
    if a.ambient_dim != b.ambient_dim {
        return Err(MatrixError::Shape(format!(
            "ambient dimensions {} and {}",
            a.ambient_dim, b.ambient_dim
        )));
    }
    if a.field != b.field {
        return Err(MatrixError::FieldMismatch);
    }
    let n = a.ambient_dim;
    if a.dim() + b.dim() != n {
        return Ok(false);
    }
    let joined: Vec<Vector> = a.vectors.iter().chain(&b.vectors).cloned().collect();
    Ok(rank_of(&a.field, n, &joined) == n)
}
