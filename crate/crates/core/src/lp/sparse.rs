//! Compressed sparse column storage for the simplex constraint matrix.

#[derive(Debug, Clone)]
pub struct CscMat {
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CscMat {
    pub fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let lo = self.col_ptr[j];
        let hi = self.col_ptr[j + 1];
        (&self.row_idx[lo..hi], &self.values[lo..hi])
    }

    /// Builds from per-column coordinate lists. Rows within a column must
    /// be unique; order is preserved.
    pub fn from_columns(_nrows: usize, cols: &[Vec<(usize, f64)>]) -> Self {
        let mut col_ptr = Vec::with_capacity(cols.len() + 1);
        let nnz: usize = cols.iter().map(|c| c.len()).sum();
        let mut row_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        col_ptr.push(0);
        for col in cols {
            for &(r, v) in col {
                debug_assert!(r < _nrows);
                row_idx.push(r);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        Self {
            col_ptr,
            row_idx,
            values,
        }
    }

    /// Dot product of column `j` with a dense vector.
    pub fn col_dot(&self, j: usize, x: &[f64]) -> f64 {
        let (rows, vals) = self.col(j);
        let mut s = 0.0;
        for (r, v) in rows.iter().zip(vals) {
            s += v * x[*r];
        }
        s
    }
}
