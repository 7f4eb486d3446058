use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::galerkin::{MetricField, PerturbationTensor};
use crate::linalg::{numerical_nullspace, pair_count, pair_weight, pairs, SymMatrix, SAMPLED_INPUT_REL_TOL};

use super::random::random_direction;
use super::{EigenspaceBasis, PerturbError, SplittingContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SahMode {
    /// Arbitrary symmetric directions `h`.
    Full,
    /// Directions `h = f g` inside the conformal class.
    Conformal,
}

impl SahMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::Conformal => "conformal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SahVerdict {
    Submersion,
    SahFails,
}

impl SahVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Submersion => "submersion",
            Self::SahFails => "sah_fails",
        }
    }
}

/// Outcome of a sampled cokernel test. `Submersion` means the sampled
/// splitting matrices span all symmetric matrices numerically; it is a
/// certificate at the sampled directions, not a proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SahReport {
    pub mode: SahMode,
    pub seed: u64,
    pub num_directions: usize,
    /// Directions use every frequency with `|kappa| <=` this radius.
    pub radius: f64,
    pub rel_tol: f64,
    /// `max |<A, M(h)>| / (|A| |M(h)|)` over cokernel matrices and directions.
    pub residual_max: f64,
    pub cokernel_dim: usize,
    pub cokernel_matrices: Vec<SymMatrix>,
    /// Singular values of the stacked direction map, nonincreasing.
    pub singular_values: Vec<f64>,
    pub verdict: SahVerdict,
}

/// Default direction radius: products `u_a u_b` carry frequencies up to
/// `2 |kappa|`, so directions must reach that far to see every relation.
pub fn default_radius(lambda: f64) -> f64 {
    (2.0 * lambda.abs().sqrt() / (2.0 * PI)).max(3.0)
}

/// Cokernel test at the default radius and [`SAMPLED_INPUT_REL_TOL`].
pub fn sah_cokernel_test(
    metric: &MetricField,
    basis: &EigenspaceBasis,
    mode: SahMode,
    num_directions: usize,
    seed: u64,
) -> Result<SahReport, PerturbError> {
    sah_cokernel_test_with(metric, basis, mode, num_directions, seed, SAMPLED_INPUT_REL_TOL, None)
}

/// Samples `num_directions` random directions, stacks their splitting
/// matrices as rows and reports the symmetric matrices orthogonal to all of
/// them.
pub fn sah_cokernel_test_with(
    metric: &MetricField,
    basis: &EigenspaceBasis,
    mode: SahMode,
    num_directions: usize,
    seed: u64,
    rel_tol: f64,
    radius: Option<f64>,
) -> Result<SahReport, PerturbError> {
    let m = basis.m();
    let p = pair_count(m);
    if num_directions < p {
        return Err(PerturbError::TooFewDirections {
            given: num_directions,
            required: p,
        });
    }
    let radius = radius.unwrap_or_else(|| default_radius(basis.lambda));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let directions: Vec<PerturbationTensor> = (0..num_directions)
        .map(|_| random_direction(metric, mode == SahMode::Conformal, radius, &mut rng))
        .collect::<Result<_, _>>()?;
    let extents = directions.iter().fold(vec![0; metric.dim()], |acc, h| {
        acc.iter().zip(h.extents()).map(|(a, b)| (*a).max(b)).collect()
    });
    let ctx = SplittingContext::new(metric, basis, &extents, None)?;
    // one full dual-path check guards the fast path used for the rest
    let first = ctx.matrix(&directions[0])?;
    let mut mats = vec![first.entries];
    mats.extend(
        directions[1..]
            .par_iter()
            .map(|h| ctx.tensor_matrix(h).map(|s| s.entries))
            .collect::<Result<Vec<_>, _>>()?,
    );

    let pair_list: Vec<(usize, usize)> = pairs(m).collect();
    let rows = DMatrix::from_fn(num_directions, p, |r, c| {
        let (a, b) = pair_list[c];
        let norm = mats[r].frobenius_norm();
        if norm > 0.0 {
            pair_weight(a, b) * mats[r].get(a, b) / norm
        } else {
            0.0
        }
    });
    let null = numerical_nullspace(&rows, rel_tol)?;
    let cokernel_matrices: Vec<SymMatrix> = null
        .basis
        .iter()
        .map(|v| SymMatrix::devectorize(m, v))
        .collect::<Result<_, _>>()?;
    let mut residual_max = 0.0f64;
    for a in &cokernel_matrices {
        for mh in &mats {
            let denom = a.frobenius_norm() * mh.frobenius_norm();
            if denom > 0.0 {
                residual_max = residual_max.max(a.frobenius_dot(mh).abs() / denom);
            }
        }
    }
    let verdict = if cokernel_matrices.is_empty() {
        SahVerdict::Submersion
    } else {
        SahVerdict::SahFails
    };
    Ok(SahReport {
        mode,
        seed,
        num_directions,
        radius,
        rel_tol,
        residual_max,
        cokernel_dim: cokernel_matrices.len(),
        cokernel_matrices,
        singular_values: null.singular_values,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{enumerate_spectrum, Lattice};

    fn flat_cluster(norm_sq: f64) -> (MetricField, EigenspaceBasis) {
        let lattice = Lattice::integer(2).unwrap();
        let eig = enumerate_spectrum(&lattice, norm_sq + 0.5)
            .unwrap()
            .into_iter()
            .find(|e| (e.norm_sq - norm_sq).abs() < 1e-9)
            .unwrap();
        (MetricField::flat(lattice.clone()), EigenspaceBasis::flat_torus(&lattice, &eig))
    }

    /// Component of `expected` outside the span of `found`, relative.
    fn outside_span(found: &[SymMatrix], expected: &SymMatrix) -> f64 {
        let mut rest = expected.clone();
        // found is orthonormal in the packed (unweighted) inner product
        let packed = |s: &SymMatrix| s.as_packed().to_vec();
        for f in found {
            let c: f64 = packed(f).iter().zip(packed(&rest)).map(|(a, b)| a * b).sum();
            rest = rest.axpy(-c, f);
        }
        rest.max_abs() / expected.max_abs()
    }

    #[test]
    fn unit_shell_full_mode_is_submersion() {
        let (metric, basis) = flat_cluster(1.0);
        let r = sah_cokernel_test(&metric, &basis, SahMode::Full, 20, 1).unwrap();
        assert_eq!(r.verdict, SahVerdict::Submersion);
    }

    #[test]
    fn unit_shell_conformal_mode_finds_circle_relation() {
        let (metric, basis) = flat_cluster(1.0);
        let r = sah_cokernel_test(&metric, &basis, SahMode::Conformal, 20, 2).unwrap();
        assert_eq!(r.cokernel_dim, 1);
        assert!(r.residual_max < 1e-8);
        let expected = SymMatrix::from_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        assert!(outside_span(&r.cokernel_matrices, &expected) < 1e-8);
    }

    #[test]
    fn shell_five_full_mode_contains_lattice_witness() {
        let (metric, basis) = flat_cluster(5.0);
        let r = sah_cokernel_test(&metric, &basis, SahMode::Full, 50, 3).unwrap();
        assert_eq!(r.verdict, SahVerdict::SahFails);
        assert_eq!(r.cokernel_dim, 1);
        assert!(r.residual_max < 1e-8);
        let expected = SymMatrix::from_diagonal(&[1.0, 1.0, -1.0, -1.0, -1.0, -1.0, 1.0, 1.0]);
        assert!(outside_span(&r.cokernel_matrices, &expected) < 1e-8);
    }

    #[test]
    fn too_few_directions_rejected() {
        let (metric, basis) = flat_cluster(1.0);
        let err = sah_cokernel_test(&metric, &basis, SahMode::Full, 9, 0).unwrap_err();
        assert_eq!(err, PerturbError::TooFewDirections { given: 9, required: 10 });
    }
}
