//! Incremental sparse elimination for large homogeneous systems.
//!
//! Rows are inserted one at a time and the accepted rows are kept in fully
//! reduced echelon form: every stored row starts with its pivot (value 1) and
//! contains no other pivot column. Since the reduced row-echelon form of a
//! matrix is unique, the stored rows (sorted by pivot) equal the nonzero rows
//! of the dense RREF, and [`SparseSystem::kernel`] yields the same canonical
//! basis as the dense route.

use crate::gf::{FieldElement, FieldSpec};

use super::{MatrixError, SubspaceBasis};

type Row = Vec<(u32, FieldElement)>;

const NO_PIVOT: u32 = u32::MAX;

pub struct SparseSystem {
    field: FieldSpec,
    ncols: usize,
    rows: Vec<Row>,
    pivot_row: Vec<u32>,
    /// Column -> rows that may hold the column as a non-pivot entry (may be stale).
    occurrences: Vec<Vec<u32>>,
    scratch: Vec<FieldElement>,
    touched: Vec<u32>,
    in_touched: Vec<bool>,
}

impl SparseSystem {
    pub fn new(field: &FieldSpec, ncols: usize) -> Self {
        SparseSystem {
            field: field.clone(),
            ncols,
            rows: Vec::new(),
            pivot_row: vec![NO_PIVOT; ncols],
            occurrences: vec![Vec::new(); ncols],
            scratch: vec![FieldElement::ZERO; ncols],
            touched: Vec::new(),
            in_touched: vec![false; ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn touch(&mut self, c: u32) {
        if !self.in_touched[c as usize] {
            self.in_touched[c as usize] = true;
            self.touched.push(c);
        }
    }

    /// Adds the equation `Σ coeff · x_col = 0`. Repeated columns are summed.
    /// Returns whether the rank increased.
    pub fn push_row(&mut self, entries: &[(usize, FieldElement)]) -> Result<bool, MatrixError> {
        let f = self.field.clone();
        for &(c, v) in entries {
            if c >= self.ncols {
                return Err(MatrixError::Shape(format!("column {c} out of {}", self.ncols)));
            }
            if !f.contains(v) {
                return Err(MatrixError::ElementRange(f.to_string()));
            }
        }
        for &(c, v) in entries {
            if v.is_zero() {
                continue;
            }
            self.touch(c as u32);
            self.scratch[c] = f.add(self.scratch[c], v);
        }
        // Reduce against existing pivots. Stored rows contain no foreign pivot
        // columns, so a single pass over the initial pivot entries suffices.
        let initial = self.touched.len();
        for t in 0..initial {
            let c = self.touched[t];
            let r = self.pivot_row[c as usize];
            if r == NO_PIVOT {
                continue;
            }
            let v = self.scratch[c as usize];
            if v.is_zero() {
                continue;
            }
            let neg = f.neg(v);
            let row = std::mem::take(&mut self.rows[r as usize]);
            for &(col, val) in &row {
                self.touch(col);
                let s = &mut self.scratch[col as usize];
                *s = f.add(*s, f.mul(neg, val));
            }
            self.rows[r as usize] = row;
        }
        let mut new_row: Row = Vec::new();
        for &c in &self.touched {
            let v = std::mem::replace(&mut self.scratch[c as usize], FieldElement::ZERO);
            self.in_touched[c as usize] = false;
            if !v.is_zero() {
                new_row.push((c, v));
            }
        }
        self.touched.clear();
        if new_row.is_empty() {
            return Ok(false);
        }
        new_row.sort_unstable_by_key(|&(c, _)| c);
        let inv = f.inv(new_row[0].1).expect("nonzero leading entry");
        if !inv.is_one() {
            for e in &mut new_row {
                e.1 = f.mul(inv, e.1);
            }
        }
        let pivot = new_row[0].0;
        let new_id = self.rows.len() as u32;

        // Clear the new pivot column from every stored row.
        let holders = std::mem::take(&mut self.occurrences[pivot as usize]);
        let mut last = NO_PIVOT;
        let mut sorted = holders;
        sorted.sort_unstable();
        for r in sorted {
            if r == last {
                continue;
            }
            last = r;
            let row = &self.rows[r as usize];
            let Ok(pos) = row.binary_search_by_key(&pivot, |&(c, _)| c) else {
                continue;
            };
            let factor = f.neg(row[pos].1);
            let merged = axpy(&f, row, factor, &new_row);
            for &(c, _) in &new_row[1..] {
                self.occurrences[c as usize].push(r);
            }
            self.rows[r as usize] = merged;
        }
        for &(c, _) in &new_row[1..] {
            self.occurrences[c as usize].push(new_id);
        }
        self.pivot_row[pivot as usize] = new_id;
        self.rows.push(new_row);
        Ok(true)
    }

    /// Pivot columns in ascending order.
    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.iter().map(|r| r[0].0 as usize).collect();
        p.sort_unstable();
        p
    }

    /// Nonzero RREF rows as dense vectors, ordered by pivot.
    pub fn rref_rows(&self) -> Vec<Vec<FieldElement>> {
        let mut rows: Vec<&Row> = self.rows.iter().collect();
        rows.sort_unstable_by_key(|r| r[0].0);
        rows.into_iter()
            .map(|r| {
                let mut dense = vec![FieldElement::ZERO; self.ncols];
                for &(c, v) in r {
                    dense[c as usize] = v;
                }
                dense
            })
            .collect()
    }

    /// Canonical kernel basis (free columns ascending).
    pub fn kernel(&self) -> SubspaceBasis {
        let free: Vec<usize> = (0..self.ncols).filter(|&c| self.pivot_row[c] == NO_PIVOT).collect();
        let mut index_of = vec![usize::MAX; self.ncols];
        for (i, &c) in free.iter().enumerate() {
            index_of[c] = i;
        }
        let mut vectors: Vec<Vec<FieldElement>> = free
            .iter()
            .map(|&c| {
                let mut v = vec![FieldElement::ZERO; self.ncols];
                v[c] = FieldElement::ONE;
                v
            })
            .collect();
        for row in &self.rows {
            let pivot = row[0].0 as usize;
            for &(c, val) in &row[1..] {
                vectors[index_of[c as usize]][pivot] = self.field.neg(val);
            }
        }
        SubspaceBasis { field: self.field.clone(), ambient_dim: self.ncols, vectors }
    }
}

/// `a + factor · b` for sorted sparse rows.
fn axpy(f: &FieldSpec, a: &[(u32, FieldElement)], factor: FieldElement, b: &[(u32, FieldElement)]) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, f.mul(factor, b[j].1)));
            j += 1;
        } else {
            let v = f.add(a[i].1, f.mul(factor, b[j].1));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}
