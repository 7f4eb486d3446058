//! Fourier-Galerkin discretization of the Laplace-Beltrami operator of a
//! smooth metric on a flat torus, used as an independent spectrum oracle.
//!
//! Functions live in lattice coordinates `y` (`x = B y`), where a dual vector
//! with integer coordinates `k` gives the phase `2 pi k.y`. Quadrature is the
//! trapezoidal rule on a uniform grid, evaluated through FFTs.

mod assemble;
mod field;
mod grid;
mod metric;
mod spectrum;

pub use assemble::{
    assemble, assemble_by_quadrature, minimal_grid, resolve_grid, Assembly, GalerkinOptions,
    Mode, ModeKind, TrigBasis, DEFAULT_MAX_MODES,
};
pub use field::{SymTensorField, TrigField, TrigTerm};
pub use grid::Grid;
pub use metric::{
    sample_tensor, MetricField, MetricSamples, PerturbationTensor, TensorTerm, SPD_FLOOR,
};
pub use spectrum::{
    eigenspace_samples, nearest_cluster, solve, spectrum, Cluster, GalerkinEigen, SpectrumSlice,
    CLUSTER_REL_TOL, ISOLATION_FACTOR,
};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::torus::LatticeError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GalerkinError {
    #[error("metric is not positive definite at grid node {node:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite {
        node: Vec<usize>,
        min_eigenvalue: f64,
    },
    #[error("quadrature grid {given:?} is below the exactness requirement {required:?}")]
    GridTooSmall {
        required: Vec<usize>,
        given: Vec<usize>,
    },
    #[error("{modes} basis modes exceed the limit of {limit}")]
    TooManyModes { modes: usize, limit: usize },
    #[error("max_freq must be positive and finite, got {0}")]
    InvalidMaxFreq(f64),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error(
        "expected an isolated cluster of {expected} eigenvalues near {target}, \
         found {found} within relative tolerance (width {width:e}, gap {gap:e})"
    )]
    ClusterMismatch {
        target: f64,
        expected: usize,
        found: usize,
        width: f64,
        gap: f64,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
