use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::assemble::{assemble, GalerkinOptions, TrigBasis};
use super::metric::MetricField;
use super::GalerkinError;
use crate::linalg::generalized_sym_eigh;
use crate::perturb::{BasisSource, EigenspaceBasis};

/// Eigenvalues closer than this (relative) count as one cluster in reports.
pub const CLUSTER_REL_TOL: f64 = 1e-6;
/// A requested cluster must be separated from the rest of the spectrum by at
/// least this multiple of its own width.
pub const ISOLATION_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSlice {
    /// `lambda_i = -nu_i`, ordered by increasing `nu` (so `0` comes first and
    /// the values decrease).
    pub eigenvalues: Vec<f64>,
    pub basis_size: usize,
    pub window: Option<(f64, f64)>,
}

/// Full Galerkin eigen-decomposition; column `i` of `vectors` is
/// mass-orthonormal and belongs to `lambdas[i]`.
#[derive(Debug, Clone)]
pub struct GalerkinEigen {
    pub lambdas: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub basis: TrigBasis,
}

pub fn solve(metric: &MetricField, opts: &GalerkinOptions) -> Result<GalerkinEigen, GalerkinError> {
    let asm = assemble(metric, opts)?;
    let eig = generalized_sym_eigh(&asm.stiffness, &asm.mass)?;
    Ok(GalerkinEigen {
        lambdas: eig.values.iter().map(|nu| -nu).collect(),
        vectors: eig.vectors,
        basis: asm.basis,
    })
}

/// Eigenvalues of `Delta_g`, optionally restricted to `lo <= lambda <= hi`.
pub fn spectrum(
    metric: &MetricField,
    opts: &GalerkinOptions,
    window: Option<(f64, f64)>,
) -> Result<SpectrumSlice, GalerkinError> {
    let eig = solve(metric, opts)?;
    let eigenvalues = match window {
        Some((lo, hi)) => eig
            .lambdas
            .into_iter()
            .filter(|l| *l >= lo && *l <= hi)
            .collect(),
        None => eig.lambdas,
    };
    Ok(SpectrumSlice {
        eigenvalues,
        basis_size: eig.basis.len(),
        window,
    })
}

/// The `m` eigenvalues nearest a target, with the cluster's width and its
/// distance to the nearest eigenvalue outside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub width: f64,
    pub gap: f64,
}

pub fn nearest_cluster(values: &[f64], target: f64, m: usize) -> Option<Cluster> {
    if m == 0 || values.len() < m {
        return None;
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        (values[a] - target)
            .abs()
            .total_cmp(&(values[b] - target).abs())
            .then(a.cmp(&b))
    });
    let mut indices: Vec<usize> = order[..m].to_vec();
    indices.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let members: Vec<f64> = indices.iter().map(|&i| values[i]).collect();
    let lo = members[0];
    let hi = members[m - 1];
    let gap = order[m..]
        .iter()
        .map(|&i| {
            let v = values[i];
            if v < lo {
                lo - v
            } else if v > hi {
                v - hi
            } else {
                0.0
            }
        })
        .fold(f64::INFINITY, f64::min);
    Some(Cluster {
        indices,
        values: members,
        width: hi - lo,
        gap,
    })
}

/// Number of eigenvalues within relative [`CLUSTER_REL_TOL`] of `target`.
fn cluster_count(values: &[f64], target: f64) -> usize {
    let tol = CLUSTER_REL_TOL * target.abs().max(1.0);
    values.iter().filter(|v| (*v - target).abs() <= tol).count()
}

/// Mass-orthonormal basis of the `mult_expected` eigenfunctions nearest
/// `lambda_target`, as trigonometric polynomials.
pub fn eigenspace_samples(
    metric: &MetricField,
    opts: &GalerkinOptions,
    lambda_target: f64,
    mult_expected: usize,
) -> Result<EigenspaceBasis, GalerkinError> {
    let eig = solve(metric, opts)?;
    let mismatch = |cluster: Option<&Cluster>| GalerkinError::ClusterMismatch {
        target: lambda_target,
        expected: mult_expected,
        found: cluster_count(&eig.lambdas, lambda_target),
        width: cluster.map_or(f64::NAN, |c| c.width),
        gap: cluster.map_or(f64::NAN, |c| c.gap),
    };
    let cluster = nearest_cluster(&eig.lambdas, lambda_target, mult_expected)
        .ok_or_else(|| mismatch(None))?;
    if !(cluster.gap >= ISOLATION_FACTOR * cluster.width) || cluster.gap == 0.0 {
        return Err(mismatch(Some(&cluster)));
    }
    let functions = cluster
        .indices
        .iter()
        .map(|&i| {
            let col: Vec<f64> = eig.vectors.column(i).iter().copied().collect();
            let scale = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            eig.basis.to_field(&col).pruned(1e-15 * scale)
        })
        .collect();
    let mean = cluster.values.iter().sum::<f64>() / mult_expected as f64;
    Ok(EigenspaceBasis {
        lambda: mean,
        eigenvalues: cluster.values,
        functions,
        source: BasisSource::GridSamples,
    })
}
