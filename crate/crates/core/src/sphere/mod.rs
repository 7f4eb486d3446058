//! Exact polynomial algebra on round spheres: harmonic bases, the product map
//! on symmetric pairs of harmonics and the gradient-product map, certified by
//! exact rational rank.
//!
//! A homogeneous polynomial vanishing on the unit sphere is zero, so relations
//! are certified on homogeneous polynomials without any sphere quadrature.

mod harmonic;
mod poly;

pub use harmonic::{
    first_guaranteed_kernel, gradient_map_certificate, gradient_map_certificate_with_budget,
    gradient_map_kernel, harmonic_basis, pair_combination, product_map_certificate,
    product_map_certificate_with_budget, product_map_kernel, s3_dimension_count,
    zonal_surjectivity_check, DimensionCount, HarmonicBasis, MapKind, RankCertificate,
    DEFAULT_CELL_BUDGET, MAX_MONOMIALS,
};
pub use poly::{binomial, Exponents, HomogPoly, MonomialIndex};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SphereError {
    #[error("need at least 3 variables (sphere dimension >= 2), got {0}")]
    InvalidVariables(usize),
    #[error("degree {0} is not allowed here")]
    InvalidDegree(usize),
    #[error("assembly needs {cells} cells, over the budget of {budget}")]
    TooLarge { cells: u128, budget: u128 },
}
