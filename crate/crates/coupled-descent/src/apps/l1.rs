//! Random dense and sparse quadratic test families.

use crate::error::Result;
use crate::problem::{
    BlockPartition, CompositeProblem, Coupling, SeparableTerm, StructuredSmooth,
};
use crate::rng::Xoshiro256PlusPlus;
use crate::sparse::CscMatrix;

/// l1-regularized random dense instance:
/// `min 1/2 x' Z'Z x + q' x + lambda ||x||_1 + ind[-1,1](x)  s.t. e' x = 1`,
/// with `Z` (m_dim x n) and `q` i.i.d. uniform on `[0, 1]`.
/// Returns the problem plus the feasible starts `e_1` and `e / n`.
pub fn build_l1_random(
    n: usize,
    m_dim: usize,
    lambda: f64,
    seed: u64,
    alpha: f64,
) -> Result<(CompositeProblem, Vec<f64>, Vec<f64>)> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let columns: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..m_dim).map(|_| rng.next_f64()).collect())
        .collect();
    let z = CscMatrix::from_dense_columns(m_dim, &columns)?;
    let q: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
    let problem = CompositeProblem::new(
        StructuredSmooth::new(z, q)?,
        SeparableTerm::l1_box(lambda, -1.0, 1.0)?,
        Coupling::single(vec![1.0; n], 1.0),
        BlockPartition::scalar(n)?,
        alpha,
    )?;
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let uniform = vec![1.0 / n as f64; n];
    Ok((problem, e1, uniform))
}

/// Sparse box-constrained quadratic: every column of `Z` receives exactly
/// `col_nnz` nonzeros (uniform values in `[-1, 1]`) at distinct random
/// rows. With `lambda > 0` an l1 term is added on top of the `[-1, 1]` box.
/// Used for coordinate-cost and rate-shape experiments.
pub fn build_sparse_qp(
    n: usize,
    m_rows: usize,
    col_nnz: usize,
    lambda: f64,
    seed: u64,
    alpha: f64,
) -> Result<(CompositeProblem, Vec<f64>, Vec<f64>)> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let nnz = col_nnz.min(m_rows);
    let mut triplets = Vec::with_capacity(n * nnz);
    for c in 0..n {
        let rows = crate::rng::sample_distinct(&mut rng, m_rows, nnz);
        for r in rows {
            triplets.push((r, c, rng.uniform(-1.0, 1.0)));
        }
    }
    let z = CscMatrix::from_triplets(m_rows, n, &triplets)?;
    let q: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let problem = CompositeProblem::new(
        StructuredSmooth::new(z, q)?,
        SeparableTerm::l1_box(lambda, -1.0, 1.0)?,
        Coupling::single(vec![1.0; n], 1.0),
        BlockPartition::scalar(n)?,
        alpha,
    )?;
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let uniform = vec![1.0 / n as f64; n];
    Ok((problem, e1, uniform))
}
