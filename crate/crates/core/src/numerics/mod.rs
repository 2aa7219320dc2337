//! Dense complex linear algebra: operator norms, numerical kernels, samplers.

mod norm;
mod nullspace;
pub mod random;

pub use norm::{
    operator_norm, operator_norm_op, operator_norm_svd, BlockRow, LinearOperator, DEFAULT_NORM_TOL,
};
pub use nullspace::{nullspace, NullspaceResult, DEFAULT_NULLSPACE_TOL};
pub use random::{random_row_contraction, random_tuple, seeded_rng};
