use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::galerkin::{minimal_grid, Grid, MetricField};
use crate::linalg::{numerical_nullspace, pair_count, pair_weight, pairs, SymMatrix};
use crate::torus::{Classification, DegeneracyReport, Witness};

use super::{BasisSamples, EigenspaceBasis, PerturbError};

/// Largest accepted deviation of the basis Gram matrix from the identity.
pub const GRAM_TOL: f64 = 1e-6;

/// Grid on which every product `u_a u_b` is resolved, with a factor two of
/// oversampling.
fn relation_grid(basis: &EigenspaceBasis) -> Grid {
    Grid::new(basis.extents().iter().map(|e| 2 * (4 * *e as usize + 1)).collect())
}

fn check_orthonormal(metric: &MetricField, basis: &EigenspaceBasis) -> Result<(), PerturbError> {
    let grid = crate::galerkin::resolve_grid(None, minimal_grid(&basis.extents(), &metric.extents()))?;
    let gram = basis.gram(metric, &grid)?;
    let deviation = gram.axpy(-1.0, &SymMatrix::identity(basis.m())).max_abs();
    if !(deviation <= GRAM_TOL) {
        return Err(PerturbError::NotOrthonormal {
            deviation,
            allowed: GRAM_TOL,
        });
    }
    Ok(())
}

/// Rows are grid nodes, columns packed pairs `a <= b`, so a null vector is
/// the packed coefficient matrix `A` of a relation `sum A_ab u_a u_b = 0`.
fn function_rows(s: &BasisSamples, m: usize, nodes: usize) -> DMatrix<f64> {
    let pl: Vec<(usize, usize)> = pairs(m).collect();
    DMatrix::from_fn(nodes, pl.len(), |i, c| {
        let (a, b) = pl[c];
        pair_weight(a, b) * s.values[a][i] * s.values[b][i]
    })
}

/// One block per component `(j, k)` of `sum A_ab du_a (x) du_b`, scaled by
/// `1 / |lambda|` to match the function rows.
fn gradient_rows(s: &BasisSamples, m: usize, n: usize, nodes: usize, lambda: f64) -> DMatrix<f64> {
    let pl: Vec<(usize, usize)> = pairs(m).collect();
    let comps: Vec<(usize, usize)> = pairs(n).collect();
    let scale = 1.0 / lambda.abs().max(f64::MIN_POSITIVE);
    DMatrix::from_fn(nodes * comps.len(), pl.len(), |r, c| {
        let (j, k) = comps[r / nodes];
        let i = r % nodes;
        let (a, b) = pl[c];
        let g = &s.grads;
        let sym = 0.5 * (g[a][j][i] * g[b][k][i] + g[a][k][i] * g[b][j][i]);
        pair_weight(a, b) * sym * scale
    })
}

fn to_witnesses(m: usize, basis: &[Vec<f64>]) -> Result<Vec<SymMatrix>, PerturbError> {
    Ok(basis
        .iter()
        .map(|v| SymMatrix::devectorize(m, v))
        .collect::<Result<_, _>>()?)
}

/// Conformal and full degeneracy of a sampled eigenbasis, from the null
/// spaces of its grid-evaluated products and gradient products.
pub fn classify_from_samples(
    metric: &MetricField,
    basis: &EigenspaceBasis,
    rel_tol: f64,
) -> Result<DegeneracyReport, PerturbError> {
    check_orthonormal(metric, basis)?;
    let m = basis.m();
    let n = basis.dim();
    let grid = relation_grid(basis);
    let nodes = grid.len();
    let s = basis.sample(&metric.dual(), &grid);
    let f = function_rows(&s, m, nodes);
    let g = gradient_rows(&s, m, n, nodes, basis.lambda);
    let stacked = DMatrix::from_fn(f.nrows() + g.nrows(), f.ncols(), |r, c| {
        if r < f.nrows() {
            f[(r, c)]
        } else {
            g[(r - f.nrows(), c)]
        }
    });
    let conformal = numerical_nullspace(&f, rel_tol)?;
    let full = numerical_nullspace(&stacked, rel_tol)?;
    let wrap = |v: Vec<SymMatrix>| v.into_iter().map(Witness::Relation).collect::<Vec<_>>();
    Ok(DegeneracyReport {
        classification: Classification::from_nullities(conformal.nullity, full.nullity),
        conformal_nullity: conformal.nullity,
        full_nullity: full.nullity,
        witnesses: wrap(to_witnesses(m, &full.basis)?),
        conformal_witnesses: wrap(to_witnesses(m, &conformal.basis)?),
    })
}

/// Whether gradient relations force function relations on one basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationTestReport {
    /// Dimension of `{A : sum A_ab du_a (x) du_b = 0}`.
    pub gradient_nullity: usize,
    pub conformal_nullity: usize,
    /// `max_a |u_a|_inf^2` on the grid.
    pub scale: f64,
    /// Largest grid max-norm of `sum A_ab u_a u_b` over a unit-norm basis of
    /// gradient relations, divided by `scale`; 0 when there are none.
    pub relative_residual: f64,
    /// Largest distance of a unit gradient relation from the span of the
    /// function relations.
    pub inclusion_residual: f64,
    /// Smallest relative residual among random matrices with the function
    /// relations projected out; shows that the residual discriminates.
    pub control_residual: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub passed: bool,
}

/// Tolerance on [`RelationTestReport::relative_residual`].
pub const RELATION_TOL: f64 = 1e-8;

fn packed_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Removes the components along an orthonormal family.
fn project_out(v: &[f64], family: &[Vec<f64>]) -> Vec<f64> {
    let mut out = v.to_vec();
    for f in family {
        let c = packed_dot(&out, f);
        for (o, fi) in out.iter_mut().zip(f) {
            *o -= c * fi;
        }
    }
    out
}

fn relation_max(s: &BasisSamples, m: usize, a: &[f64], nodes: usize) -> f64 {
    let pl: Vec<(usize, usize)> = pairs(m).collect();
    (0..nodes)
        .map(|i| {
            pl.iter()
                .zip(a)
                .map(|(&(p, q), c)| pair_weight(p, q) * c * s.values[p][i] * s.values[q][i])
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max)
}

/// For every gradient-only relation `A`, evaluates the function relation
/// `sum A_ab u_a u_b` on the grid; `trials` random non-relations serve as a
/// control.
pub fn function_relation_test(
    metric: &MetricField,
    basis: &EigenspaceBasis,
    trials: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<RelationTestReport, PerturbError> {
    check_orthonormal(metric, basis)?;
    let m = basis.m();
    let grid = relation_grid(basis);
    let nodes = grid.len();
    let s = basis.sample(&metric.dual(), &grid);
    let gradient = numerical_nullspace(&gradient_rows(&s, m, basis.dim(), nodes, basis.lambda), rel_tol)?;
    let conformal = numerical_nullspace(&function_rows(&s, m, nodes), rel_tol)?;
    let scale = s
        .values
        .iter()
        .map(|v| v.iter().fold(0.0f64, |a, x| a.max(x.abs())).powi(2))
        .fold(0.0, f64::max);

    let mut relative_residual = 0.0f64;
    let mut inclusion_residual = 0.0f64;
    for a in &gradient.basis {
        relative_residual = relative_residual.max(relation_max(&s, m, a, nodes) / scale);
        let rest = project_out(a, &conformal.basis);
        inclusion_residual = inclusion_residual.max(packed_dot(&rest, &rest).sqrt());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut control: Option<f64> = None;
    for _ in 0..trials {
        let raw: Vec<f64> = (0..pair_count(m)).map(|_| StandardNormal.sample(&mut rng)).collect();
        let v = project_out(&raw, &conformal.basis);
        let norm = packed_dot(&v, &v).sqrt();
        if norm == 0.0 {
            continue;
        }
        let unit: Vec<f64> = v.iter().map(|x| x / norm).collect();
        let r = relation_max(&s, m, &unit, nodes) / scale;
        control = Some(control.map_or(r, |c| c.min(r)));
    }
    Ok(RelationTestReport {
        gradient_nullity: gradient.nullity,
        conformal_nullity: conformal.nullity,
        scale,
        relative_residual,
        inclusion_residual,
        control_residual: control,
        trials,
        seed,
        passed: relative_residual <= RELATION_TOL && inclusion_residual <= RELATION_TOL,
    })
}
