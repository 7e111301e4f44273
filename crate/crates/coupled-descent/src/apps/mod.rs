//! Problem builders for the three experiment families (SVM dual, Chebyshev
//! center, l1-regularized random instances) and the sparse dataset parser.

mod chebyshev;
mod dataset;
mod l1;
mod svm;

pub use chebyshev::{build_chebyshev, recover_ball, BallSolution, ChebyshevInstance};
pub use dataset::{parse_sparse_dataset, parse_sparse_reader, SvmInstance};
pub use l1::{build_l1_random, build_sparse_qp};
pub use svm::build_svm;
