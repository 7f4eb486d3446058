use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::galerkin::{minimal_grid, GalerkinError, Grid, MetricField, PerturbationTensor};
use crate::linalg::SymMatrix;
use crate::torus::DualLattice;

use super::variation::{add_extents, product_grid, FunctionSamples, Geometry, Variation};
use super::{EigenspaceBasis, PerturbError};

/// Allowed difference between the tensor and direct assemblies, relative to
/// `max(max|M|, |lambda| max|h^{jk}|)`.
pub const PATH_AGREEMENT_TOL: f64 = 1e-9;

/// Nodes per parallel work unit; partial sums are reduced in a fixed order.
const CHUNK: usize = 2048;

/// First-order splitting matrix `M_ab = <u_a, D_h Delta_g u_b>` of one
/// eigenvalue cluster in one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingMatrix {
    pub entries: SymMatrix,
    pub lambda: f64,
    /// Max entrywise difference of the two assembly paths, when both ran.
    pub path_difference: Option<f64>,
    /// Max entrywise `|M_ab - M_ba|` of the tensor path before symmetrizing.
    pub asymmetry: f64,
}

/// Metric geometry and basis samples on one quadrature grid, shared across
/// many directions `h`.
pub struct SplittingContext {
    dual: DualLattice,
    grid: Grid,
    geom: Geometry,
    basis_extents: Vec<i64>,
    metric_extents: Vec<i64>,
    samples: Vec<FunctionSamples>,
    laplacians: Vec<Vec<f64>>,
    lambda: f64,
    volume: f64,
}

impl SplittingContext {
    /// Sizes the grid for directions with Fourier extents up to
    /// `direction_extents`; an explicit `grid` must be at least that large.
    pub fn new(
        metric: &MetricField,
        basis: &EigenspaceBasis,
        direction_extents: &[i64],
        grid: Option<&[usize]>,
    ) -> Result<Self, PerturbError> {
        let n = metric.dim();
        if basis.m() == 0 || basis.dim() != n || direction_extents.len() != n {
            return Err(PerturbError::BasisShape {
                found: basis.m(),
                dim: if basis.m() == 0 { 0 } else { basis.dim() },
                expected: n,
            });
        }
        let basis_extents = basis.extents();
        let metric_extents = metric.extents();
        let grid = product_grid(
            grid,
            &basis_extents,
            &add_extents(&metric_extents, direction_extents),
        )?;
        let dual = metric.dual();
        let geom = Geometry::new(metric, &grid)?;
        let samples: Vec<FunctionSamples> = basis
            .functions
            .par_iter()
            .map(|f| FunctionSamples::new(f, &dual, &grid))
            .collect();
        let laplacians = samples.iter().map(|s| geom.laplacian(s)).collect();
        Ok(Self {
            dual,
            grid,
            geom,
            basis_extents,
            metric_extents,
            samples,
            laplacians,
            lambda: basis.lambda,
            volume: metric.lattice().covolume(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn m(&self) -> usize {
        self.samples.len()
    }

    fn check_direction(&self, h: &PerturbationTensor) -> Result<(), PerturbError> {
        let required = minimal_grid(
            &self.basis_extents,
            &add_extents(&self.metric_extents, &h.extents()),
        );
        if h.tensor().dim() != self.geom.dim
            || required.iter().zip(self.grid.shape()).any(|(r, g)| r > g)
        {
            return Err(GalerkinError::GridTooSmall {
                required,
                given: self.grid.shape().to_vec(),
            }
            .into());
        }
        Ok(())
    }

    /// `sum_i f(i) over nodes`, scaled to the integral, as an `m x m` matrix.
    fn integrate<F>(&self, node_term: F) -> DMatrix<f64>
    where
        F: Fn(usize, &mut DMatrix<f64>) + Sync,
    {
        let m = self.m();
        let nodes = self.grid.len();
        let partials: Vec<DMatrix<f64>> = (0..nodes.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut acc = DMatrix::zeros(m, m);
                for i in c * CHUNK..((c + 1) * CHUNK).min(nodes) {
                    node_term(i, &mut acc);
                }
                acc
            })
            .collect();
        let total = partials
            .into_iter()
            .fold(DMatrix::zeros(m, m), |a, b| a + b);
        total * (self.volume / nodes as f64)
    }

    /// Integrated-by-parts form
    /// `int [h^{jk} d_j u_a d_k u_b - 1/2 tr_g h (g(grad u_a, grad u_b) + u_a Delta u_b)] dmu`.
    fn tensor_path(&self, var: &Variation) -> DMatrix<f64> {
        let m = self.m();
        let n = self.geom.dim;
        self.integrate(|i, acc| {
            let w = self.geom.sqrt_det[i];
            let half_t = 0.5 * var.trace[i];
            let kernel = &var.h_up[i] - &self.geom.g_inv[i] * half_t;
            let grads: Vec<_> = self.samples.iter().map(|s| s.grad_at(i)).collect();
            let pushed: Vec<_> = grads.iter().map(|g| &kernel * g).collect();
            for a in 0..m {
                let ua = self.samples[a].values[i];
                for b in 0..m {
                    let mut v = 0.0;
                    for j in 0..n {
                        v += grads[a][j] * pushed[b][j];
                    }
                    acc[(a, b)] += w * (v - half_t * ua * self.laplacians[b][i]);
                }
            }
        })
    }

    /// `int u_a (D_h Delta_g u_b) dmu` from the pointwise variation.
    fn direct_path(&self, var: &Variation) -> DMatrix<f64> {
        let m = self.m();
        let applied: Vec<Vec<f64>> = self
            .samples
            .iter()
            .map(|s| var.apply(s, self.geom.dim))
            .collect();
        self.integrate(|i, acc| {
            let w = self.geom.sqrt_det[i];
            for a in 0..m {
                let ua = w * self.samples[a].values[i];
                for b in 0..m {
                    acc[(a, b)] += ua * applied[b][i];
                }
            }
        })
    }

    fn finish(&self, tensor: &DMatrix<f64>, path_difference: Option<f64>) -> SplittingMatrix {
        SplittingMatrix {
            entries: SymMatrix::symmetrized(tensor),
            lambda: self.lambda,
            path_difference,
            asymmetry: (tensor - tensor.transpose()).amax(),
        }
    }

    /// Both assembly paths, required to agree to [`PATH_AGREEMENT_TOL`].
    pub fn matrix(&self, h: &PerturbationTensor) -> Result<SplittingMatrix, PerturbError> {
        self.check_direction(h)?;
        let var = Variation::new(&self.geom, h, &self.dual, &self.grid, true);
        let tensor = self.tensor_path(&var);
        let direct = self.direct_path(&var);
        let difference = (&tensor - &direct).amax();
        let allowed = PATH_AGREEMENT_TOL * tensor.amax().max(self.lambda.abs() * var.scale);
        if !(difference <= allowed) {
            return Err(PerturbError::PathMismatch {
                difference,
                allowed,
            });
        }
        Ok(self.finish(&tensor, Some(difference)))
    }

    /// Tensor path only, for bulk direction sweeps once the paths have been
    /// cross-checked.
    pub fn tensor_matrix(&self, h: &PerturbationTensor) -> Result<SplittingMatrix, PerturbError> {
        self.check_direction(h)?;
        let var = Variation::new(&self.geom, h, &self.dual, &self.grid, false);
        Ok(self.finish(&self.tensor_path(&var), None))
    }
}

/// Splitting matrix of `basis` in direction `h`, assembled both by the
/// integrated tensor formula and by direct quadrature of `u_a D_h Delta u_b`.
pub fn splitting_matrix(
    metric: &MetricField,
    basis: &EigenspaceBasis,
    h: &PerturbationTensor,
    grid: Option<&[usize]>,
) -> Result<SplittingMatrix, PerturbError> {
    SplittingContext::new(metric, basis, &h.extents(), grid)?.matrix(h)
}
