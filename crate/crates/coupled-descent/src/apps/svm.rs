//! Linear SVM dual builder.
//!
//! `min 1/2 x' Z'Z x - e' x  s.t. a' x = 0, 0 <= x <= C`, where `Z` is the
//! instance matrix (examples as columns) and `a` the label vector.

use crate::error::Result;
use crate::problem::{
    BlockPartition, CompositeProblem, Coupling, SeparableTerm, StructuredSmooth,
};

use super::dataset::SvmInstance;

/// Builds the dual problem and its feasible start `x0 = 0`.
pub fn build_svm(
    instance: &SvmInstance,
    c: f64,
    alpha: f64,
) -> Result<(CompositeProblem, Vec<f64>)> {
    let n = instance.num_examples();
    let smooth = StructuredSmooth::new(instance.z().clone(), vec![-1.0; n])?;
    let problem = CompositeProblem::new(
        smooth,
        SeparableTerm::boxed(0.0, c)?,
        Coupling::single(instance.labels().to_vec(), 0.0),
        BlockPartition::scalar(n)?,
        alpha,
    )?;
    Ok((problem, vec![0.0; n]))
}
