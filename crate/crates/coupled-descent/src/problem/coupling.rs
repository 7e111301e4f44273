//! Linear coupling constraints.

use crate::error::{Error, Result};

/// Dense row-major matrix for the general coupling case. The constraint
/// count `m` is small in every use here, so dense storage is fine.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>, // row major
}

impl DenseMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(Error::InvalidProblem("coupling matrix has no rows".into()));
        }
        let ncols = rows[0].len();
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in &rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    what: "coupling matrix row",
                    expected: ncols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(DenseMatrix { nrows, ncols, data })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.ncols + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// The linear coupling constraint of the model.
#[derive(Clone, Debug)]
pub enum Coupling {
    /// `a^T x = b`.
    Single { a: Vec<f64>, b: f64 },
    /// `A x = b` with `1 < m <= n` rows.
    General { a_mat: DenseMatrix, b: Vec<f64> },
}

impl Coupling {
    pub fn single(a: Vec<f64>, b: f64) -> Self {
        Coupling::Single { a, b }
    }

    pub fn general(a_mat: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        if a_mat.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                what: "coupling right-hand side",
                expected: a_mat.nrows(),
                got: b.len(),
            });
        }
        Ok(Coupling::General { a_mat, b })
    }

    /// Number of scalar equality constraints.
    pub fn num_constraints(&self) -> usize {
        match self {
            Coupling::Single { .. } => 1,
            Coupling::General { a_mat, .. } => a_mat.nrows(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Coupling::Single { a, .. } => a.len(),
            Coupling::General { a_mat, .. } => a_mat.ncols(),
        }
    }

    /// Constraint values `A x` (length 1 for the single case).
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Coupling::Single { a, .. } => {
                vec![a.iter().zip(x).map(|(ai, xi)| ai * xi).sum()]
            }
            Coupling::General { a_mat, .. } => a_mat.mul_vec(x),
        }
    }

    /// Right-hand side as a slice-compatible vector.
    pub fn rhs(&self) -> Vec<f64> {
        match self {
            Coupling::Single { b, .. } => vec![*b],
            Coupling::General { b, .. } => b.clone(),
        }
    }

    /// `max_r |(A x - b)_r|`.
    pub fn defect(&self, x: &[f64]) -> f64 {
        let vals = self.eval(x);
        let rhs = self.rhs();
        vals.iter()
            .zip(&rhs)
            .map(|(v, b)| (v - b).abs())
            .fold(0.0, f64::max)
    }

    /// Lifts a single constraint into the general form with `m = 1`;
    /// returns the coupling unchanged if it is already general.
    pub fn to_general(&self) -> Result<Coupling> {
        match self {
            Coupling::Single { a, b } => Ok(Coupling::General {
                a_mat: DenseMatrix::from_rows(vec![a.clone()])?,
                b: vec![*b],
            }),
            general => Ok(general.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_defect() {
        let c = Coupling::single(vec![1.0, -1.0], 0.5);
        assert!((c.defect(&[1.0, 0.5]) - 0.0).abs() < 1e-15);
        assert!((c.defect(&[1.0, 1.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn general_eval() {
        let a = DenseMatrix::from_rows(vec![vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]]).unwrap();
        let c = Coupling::general(a, vec![0.0, 0.0]).unwrap();
        assert_eq!(c.eval(&[2.0, 2.0, 2.0]), vec![0.0, 0.0]);
        assert_eq!(c.num_constraints(), 2);
    }

    #[test]
    fn lift_to_general() {
        let c = Coupling::single(vec![1.0, 2.0], 1.0);
        let g = c.to_general().unwrap();
        assert_eq!(g.num_constraints(), 1);
        assert_eq!(g.eval(&[1.0, 1.0]), vec![3.0]);
    }
}
