//! Dense linear algebra shared by every other module: packed symmetric
//! matrices, thresholded numerical null spaces, exact rational rank and
//! symmetric (generalized) eigensolvers.
//!
//! Everything here is a pure function of its inputs.

mod eigen;
mod exact;
mod nullspace;
mod sym;

pub use eigen::{generalized_sym_eig, generalized_sym_eigh, sym_eig, SymEigen};
pub use exact::{exact_nullspace, exact_rank, ExactMatrix};
pub use nullspace::{numerical_nullspace, NullspaceResult};
pub use sym::{pair_count, pair_index, pair_weight, pairs, SymMatrix};

use thiserror::Error;

/// Default relative null-space threshold for exactly representable inputs.
pub const EXACT_INPUT_REL_TOL: f64 = 1e-10;
/// Default relative null-space threshold for quadrature-sampled inputs.
pub const SAMPLED_INPUT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is empty")]
    Empty,
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("relative tolerance {0} outside (0, 1)")]
    InvalidTolerance(f64),
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("mass matrix is not positive definite (Cholesky factorization failed)")]
    NotPositiveDefinite,
    #[error("exact elimination refused: {rows}x{cols} exceeds the limit of {limit} cells")]
    TooLarge { rows: usize, cols: usize, limit: usize },
}
