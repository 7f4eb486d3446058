//! First-order eigenvalue splitting under metric perturbations: the splitting
//! matrix, its validation against recomputed spectra, cokernel tests for the
//! strong Arnold hypothesis and degeneracy detection from sampled
//! eigenfunctions.

mod basis;
mod classify;
mod random;
mod sah;
mod splitting;
mod validation;
mod variation;

pub use basis::{BasisSamples, BasisSource, EigenspaceBasis};
pub use classify::{
    classify_from_samples, function_relation_test, RelationTestReport, GRAM_TOL, RELATION_TOL,
};
pub use random::{normalize_pointwise, random_conformal_factor, random_direction, random_tensor};
pub use sah::{default_radius, sah_cokernel_test, sah_cokernel_test_with, SahMode, SahReport, SahVerdict};
pub use splitting::{splitting_matrix, SplittingContext, SplittingMatrix, PATH_AGREEMENT_TOL};
pub use validation::{first_order_validation, ValidationReport, ValidationRow};
pub use variation::{laplacian_apply, variation_apply, FunctionSamples};

use thiserror::Error;

use crate::galerkin::GalerkinError;
use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbError {
    #[error(
        "tensor and direct assembly of the splitting matrix disagree by {difference:e} \
         (allowed {allowed:e}); the quadrature grid does not resolve the integrand"
    )]
    PathMismatch { difference: f64, allowed: f64 },
    #[error("basis has {found} functions of dimension {dim}, expected a nonempty basis of dimension {expected}")]
    BasisShape {
        found: usize,
        dim: usize,
        expected: usize,
    },
    #[error("basis Gram matrix deviates from the identity by {deviation:e} (allowed {allowed:e})")]
    NotOrthonormal { deviation: f64, allowed: f64 },
    #[error("need at least 2 positive t values, got {0:?}")]
    TooFewSteps(Vec<f64>),
    #[error("cluster of {m} eigenvalues near {lambda} merges with its neighbours at t = {t} (width {width:e}, gap {gap:e})")]
    ClusterMerged {
        t: f64,
        lambda: f64,
        m: usize,
        width: f64,
        gap: f64,
    },
    #[error("{given} directions cannot certify a submersion onto {required}-dimensional symmetric matrices")]
    TooFewDirections { given: usize, required: usize },
    #[error(transparent)]
    Galerkin(#[from] GalerkinError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
