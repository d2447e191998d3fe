//! Bit-packed GF(2) elimination: rows are `u64` word arrays and row
//! operations are word-level XORs.

use crate::gf::{FieldElement, FieldSpec};

use super::{Matrix, SubspaceBasis};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix { rows, cols, words, bits: vec![0; rows * words] }
    }

    /// Packs a GF(2) matrix.
    pub fn from_matrix(m: &Matrix) -> Self {
        debug_assert!(m.field().is_gf2());
        let mut out = Self::zeros(m.rows(), m.cols());
        for r in 0..m.rows() {
            for (c, e) in m.row(r).iter().enumerate() {
                if !e.is_zero() {
                    out.set(r, c, true);
                }
            }
        }
        out
    }

    pub fn to_matrix(&self, field: &FieldSpec) -> Matrix {
        Matrix::from_fn(field, self.rows, self.cols, |r, c| {
            if self.get(r, c) {
                FieldElement::ONE
            } else {
                FieldElement::ZERO
            }
        })
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.bits[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.bits.split_at_mut(hi * self.words);
        head[lo * self.words..(lo + 1) * self.words].swap_with_slice(&mut tail[..self.words]);
    }

    /// `row[dst] ^= row[src]`, touching only words from `from_word` on.
    fn xor_row(&mut self, dst: usize, src: usize, from_word: usize) {
        let w = self.words;
        for k in from_word..w {
            let s = self.bits[src * w + k];
            self.bits[dst * w + k] ^= s;
        }
    }

    /// In-place Gauss-Jordan elimination; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(p, r);
            let from = c / 64;
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row(i, r, from);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Canonical kernel basis, read from a matrix already in RREF.
    pub fn kernel(&self, pivots: &[usize], field: &FieldSpec) -> SubspaceBasis {
        let mut is_pivot = vec![false; self.cols];
        for &p in pivots {
            is_pivot[p] = true;
        }
        let vectors = (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![FieldElement::ZERO; self.cols];
                v[free] = FieldElement::ONE;
                for (r, &p) in pivots.iter().enumerate() {
                    if self.get(r, free) {
                        v[p] = FieldElement::ONE;
                    }
                }
                v
            })
            .collect();
        SubspaceBasis { field: field.clone(), ambient_dim: self.cols, vectors }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packs_across_word_boundary() {
        let f = FieldSpec::gf2();
        let m = Matrix::from_fn(&f, 3, 130, |r, c| if (r + c) % 3 == 0 { f.one() } else { f.zero() });
        let bits = BitMatrix::from_matrix(&m);
        assert_eq!(bits.to_matrix(&f), m);
        assert!(bits.get(0, 129));
        assert!(!bits.get(1, 129));
    }

    #[test]
    fn rref_of_dependent_rows() {
        let f = FieldSpec::gf2();
        let m = Matrix::from_ints(&f, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]).unwrap();
        let mut bits = BitMatrix::from_matrix(&m);
        assert_eq!(bits.rref(), vec![0, 1]);
        let expect = Matrix::from_ints(&f, &[&[1, 0, 1], &[0, 1, 1], &[0, 0, 0]]).unwrap();
        assert_eq!(bits.to_matrix(&f), expect);
    }
}
