//! Minimal column-compressed sparse matrix.
//!
//! The solvers only ever need column access (`O(nnz(column))`), full
//! matrix-vector products for residual refreshes, and per-column norms for
//! Lipschitz constants, so this stays deliberately small instead of pulling
//! in a general sparse linear algebra dependency.

use crate::error::{Error, Result};

/// Sparse matrix in compressed sparse column format.
#[derive(Clone, Debug)]
pub struct CscMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    values: Vec<f64>,
}

impl CscMatrix {
    /// Builds from `(row, col, value)` triplets. Duplicate entries are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(r, c, _) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::InvalidProblem(format!(
                    "triplet ({r}, {c}) outside {nrows}x{ncols} matrix"
                )));
            }
        }
        let mut per_col: Vec<Vec<(u32, f64)>> = vec![Vec::new(); ncols];
        for &(r, c, v) in triplets {
            per_col[c].push((r as u32, v));
        }
        let mut col_ptr = Vec::with_capacity(ncols + 1);
        let mut row_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        col_ptr.push(0);
        for col in &mut per_col {
            col.sort_unstable_by_key(|&(r, _)| r);
            let mut k = 0;
            while k < col.len() {
                let r = col[k].0;
                let mut v = 0.0;
                while k < col.len() && col[k].0 == r {
                    v += col[k].1;
                    k += 1;
                }
                if v != 0.0 {
                    row_idx.push(r);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Ok(CscMatrix {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        })
    }

    /// Builds from dense columns; zero entries are dropped.
    pub fn from_dense_columns(nrows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut triplets = Vec::new();
        for (c, col) in columns.iter().enumerate() {
            if col.len() != nrows {
                return Err(Error::DimensionMismatch {
                    what: "dense column",
                    expected: nrows,
                    got: col.len(),
                });
            }
            for (r, &v) in col.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((r, c, v));
                }
            }
        }
        Self::from_triplets(nrows, columns.len(), &triplets)
    }

    /// All-zero matrix of the given shape.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CscMatrix {
            nrows,
            ncols,
            col_ptr: vec![0; ncols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row indices and values of column `j`.
    #[inline]
    pub fn col(&self, j: usize) -> (&[u32], &[f64]) {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[range.clone()], &self.values[range])
    }

    #[inline]
    pub fn col_nnz(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    /// Average number of nonzeros per column.
    pub fn avg_col_nnz(&self) -> f64 {
        if self.ncols == 0 {
            0.0
        } else {
            self.nnz() as f64 / self.ncols as f64
        }
    }

    /// Squared Euclidean norm of column `j`.
    pub fn col_norm_sq(&self, j: usize) -> f64 {
        let (_, vals) = self.col(j);
        vals.iter().map(|v| v * v).sum()
    }

    /// Squared Frobenius norm of a contiguous column block.
    pub fn col_block_frob_sq(&self, cols: std::ops::Range<usize>) -> f64 {
        cols.map(|j| self.col_norm_sq(j)).sum()
    }

    /// `y = Z x` as a fresh vector.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                what: "matrix-vector product",
                expected: self.ncols,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                let (rows, vals) = self.col(j);
                for (&r, &v) in rows.iter().zip(vals) {
                    y[r as usize] += v * xj;
                }
            }
        }
        Ok(y)
    }

    /// Adds `coef * column_j` into `acc`.
    #[inline]
    pub fn axpy_col(&self, j: usize, coef: f64, acc: &mut [f64]) {
        let (rows, vals) = self.col(j);
        for (&r, &v) in rows.iter().zip(vals) {
            acc[r as usize] += v * coef;
        }
    }

    /// Dot product of column `j` with a dense vector.
    #[inline]
    pub fn col_dot(&self, j: usize, x: &[f64]) -> f64 {
        let (rows, vals) = self.col(j);
        let mut acc = 0.0;
        for (&r, &v) in rows.iter().zip(vals) {
            acc += v * x[r as usize];
        }
        acc
    }

    /// Dot product of two columns (sorted-row merge).
    pub fn col_dot_col(&self, i: usize, j: usize) -> f64 {
        let (ri, vi) = self.col(i);
        let (rj, vj) = self.col(j);
        let (mut p, mut q) = (0, 0);
        let mut acc = 0.0;
        while p < ri.len() && q < rj.len() {
            match ri[p].cmp(&rj[q]) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    acc += vi[p] * vj[q];
                    p += 1;
                    q += 1;
                }
            }
        }
        acc
    }

    /// Dense representation, row major. Test and oracle helper.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.ncols]; self.nrows];
        for (j, (&start, &end)) in self.col_ptr.iter().zip(&self.col_ptr[1..]).enumerate() {
            for k in start..end {
                dense[self.row_idx[k] as usize][j] = self.values[k];
            }
        }
        dense
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_round_trip() {
        let m = CscMatrix::from_triplets(3, 4, &[(0, 0, 1.0), (2, 0, -2.0), (1, 3, 4.0)]).unwrap();
        assert_eq!(m.nnz(), 3);
        let (rows, vals) = m.col(0);
        assert_eq!(rows, &[0, 2]);
        assert_eq!(vals, &[1.0, -2.0]);
        assert_eq!(m.col_nnz(1), 0);
        assert_eq!(m.col_norm_sq(0), 5.0);
    }

    #[test]
    fn duplicates_are_summed() {
        let m = CscMatrix::from_triplets(2, 1, &[(0, 0, 1.0), (0, 0, 2.5)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.col(0).1, &[3.5]);
    }

    #[test]
    fn mul_vec_matches_dense() {
        let m =
            CscMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (1, 1, 2.0), (0, 2, -1.0), (1, 2, 3.0)])
                .unwrap();
        let y = m.mul_vec(&[1.0, 2.0, -1.0]).unwrap();
        assert_eq!(y, vec![2.0, 1.0]);
    }

    #[test]
    fn out_of_bounds_triplet_rejected() {
        assert!(CscMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }
}
