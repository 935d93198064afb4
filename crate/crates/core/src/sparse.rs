//! Compressed sparse row storage for dataset feature matrices.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSR arrays, checking every structural invariant:
    /// monotone offsets, in-range and strictly increasing column indices per
    /// row, finite non-zero values.
    pub fn from_csr(
        rows: usize,
        cols: usize,
        offsets: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if offsets.len() != rows + 1 {
            return Err(Error::contract(format!(
                "offsets has length {}, expected {}",
                offsets.len(),
                rows + 1
            )));
        }
        if offsets[0] != 0 || offsets[rows] != indices.len() || indices.len() != values.len() {
            return Err(Error::contract("offsets do not bracket the index/value arrays"));
        }
        for r in 0..rows {
            let (lo, hi) = (offsets[r], offsets[r + 1]);
            if lo > hi {
                return Err(Error::contract(format!("offsets decrease at row {r}")));
            }
            let row = &indices[lo..hi];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::contract(format!(
                    "column indices not strictly increasing in row {r}"
                )));
            }
            if let Some(&c) = row.last() {
                if c >= cols {
                    return Err(Error::contract(format!("column {c} out of range in row {r}")));
                }
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v == 0.0) {
            return Err(Error::contract(format!("stored value #{i} is zero or non-finite")));
        }
        Ok(SparseMatrix { rows, cols, offsets, indices, values })
    }

    /// Assembles a matrix row by row from `(column, value)` pairs. Exact zeros
    /// are dropped.
    pub fn from_rows<I, R>(cols: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = (usize, f64)>,
    {
        let mut offsets = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for row in rows {
            for (c, v) in row {
                if v != 0.0 {
                    indices.push(c);
                    values.push(v);
                }
            }
            offsets.push(indices.len());
        }
        let m = offsets.len() - 1;
        Self::from_csr(m, cols, offsets, indices, values)
    }

    /// Stores a dense row-major matrix sparsely.
    pub fn from_dense(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Self::from_rows(
            cols,
            data.chunks(cols.max(1))
                .take(rows)
                .map(|r| r.iter().copied().enumerate()),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Returns the `(indices, values)` slices of one row.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.offsets[r], self.offsets[r + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_dot(&self, r: usize, w: &[f64]) -> Result<f64> {
        if r >= self.rows {
            return Err(Error::contract(format!("row {r} out of range ({} rows)", self.rows)));
        }
        if w.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: w.len() });
        }
        Ok(self.row_dot_unchecked(r, w))
    }

    #[inline]
    pub(crate) fn row_dot_unchecked(&self, r: usize, w: &[f64]) -> f64 {
        let (idx, val) = self.row(r);
        idx.iter().zip(val).map(|(&c, &v)| v * w[c]).sum()
    }

    /// `out[r] = row_r · w` for every row.
    pub fn mul_vec(&self, w: &[f64], out: &mut [f64]) {
        assert_eq!(w.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row_dot_unchecked(r, w);
        }
    }

    /// Returns a new matrix whose column count is raised to `cols`.
    pub fn with_cols(mut self, cols: usize) -> Result<Self> {
        if let Some(&max) = self.indices.iter().max() {
            if max >= cols {
                return Err(Error::contract(format!(
                    "cannot shrink to {cols} columns: column {max} is populated"
                )));
            }
        }
        self.cols = cols;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_term_dot() {
        let a = SparseMatrix::from_rows(4, [vec![(0, 2.0), (3, -1.0)]]).unwrap();
        assert_eq!(a.row_dot(0, &[1.0, 9.0, 9.0, 4.0]).unwrap(), -2.0);
    }

    #[test]
    fn empty_row_is_zero() {
        let a = SparseMatrix::from_rows(3, [vec![], vec![(1, 1.0)]]).unwrap();
        assert_eq!(a.row_dot(0, &[5.0, 6.0, 7.0]).unwrap(), 0.0);
    }

    #[test]
    fn identity_row() {
        let eye = SparseMatrix::from_dense(3, 3, &[1., 0., 0., 0., 1., 0., 0., 0., 1.]).unwrap();
        assert_eq!(eye.nnz(), 3);
        assert_eq!(eye.row_dot(1, &[5.0, 7.0, 11.0]).unwrap(), 7.0);
    }

    #[test]
    fn out_of_range_row_is_contract_error() {
        let a = SparseMatrix::from_rows(2, [vec![(0, 1.0)]]).unwrap();
        assert!(matches!(a.row_dot(1, &[0.0, 0.0]), Err(Error::Contract(_))));
        assert!(matches!(a.row_dot(0, &[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn structural_violations_rejected() {
        assert!(SparseMatrix::from_csr(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]).is_err());
        assert!(SparseMatrix::from_csr(1, 3, vec![0, 1], vec![3], vec![1.0]).is_err());
        assert!(SparseMatrix::from_csr(1, 3, vec![0, 1], vec![0], vec![0.0]).is_err());
        assert!(SparseMatrix::from_csr(2, 3, vec![0, 1, 0], vec![0], vec![1.0]).is_err());
    }
}
