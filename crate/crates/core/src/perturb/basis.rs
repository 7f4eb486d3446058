use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::galerkin::{Grid, MetricField, MetricSamples, TrigField};
use crate::linalg::SymMatrix;
use crate::torus::{DualLattice, Lattice, TorusEigenvalue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisSource {
    /// Exact flat-torus eigenfunctions `sqrt(2/V) cos`, `sqrt(2/V) sin`.
    TorusFrequency,
    /// Eigenvectors of a Galerkin discretization, evaluated on grids.
    GridSamples,
}

/// Orthonormal real basis of one eigenvalue cluster. Every function is a
/// trigonometric polynomial, so grid values and derivatives are exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenspaceBasis {
    /// Cluster centre; exact for flat tori.
    pub lambda: f64,
    /// Eigenvalue attached to each function (all equal for exact bases).
    pub eigenvalues: Vec<f64>,
    pub functions: Vec<TrigField>,
    pub source: BasisSource,
}

/// Values and Cartesian gradients of a basis at every grid node.
#[derive(Debug, Clone)]
pub struct BasisSamples {
    pub values: Vec<Vec<f64>>,
    /// `grads[alpha][j][node]`.
    pub grads: Vec<Vec<Vec<f64>>>,
}

impl EigenspaceBasis {
    /// Ordered basis `(cos 2 pi kappa_1.x, sin 2 pi kappa_1.x, cos 2 pi
    /// kappa_2.x, ..)`, normalized in `L^2` of the flat metric.
    pub fn flat_torus(lattice: &Lattice, eig: &TorusEigenvalue) -> Self {
        let amp = (2.0 / lattice.covolume()).sqrt();
        let functions = eig
            .coefficients
            .iter()
            .flat_map(|k| [TrigField::cos(k, amp), TrigField::sin(k, amp)])
            .collect::<Vec<_>>();
        Self {
            lambda: eig.lambda,
            eigenvalues: vec![eig.lambda; functions.len()],
            functions,
            source: BasisSource::TorusFrequency,
        }
    }

    pub fn m(&self) -> usize {
        self.functions.len()
    }

    pub fn dim(&self) -> usize {
        self.functions[0].dim()
    }

    /// Basis `u'_b = sum_a q[(a, b)] u_a` for orthogonal `q`.
    pub fn rotated(&self, q: &DMatrix<f64>) -> Self {
        let m = self.m();
        assert_eq!(q.shape(), (m, m));
        let functions = (0..m)
            .map(|b| {
                (0..m).fold(TrigField::zero(self.dim()), |acc, a| {
                    acc.axpy(q[(a, b)], &self.functions[a])
                })
            })
            .collect();
        Self {
            functions,
            ..self.clone()
        }
    }

    pub fn extents(&self) -> Vec<i64> {
        let mut e = vec![0; self.dim()];
        for f in &self.functions {
            for (ei, fi) in e.iter_mut().zip(f.extents()) {
                *ei = (*ei).max(fi);
            }
        }
        e
    }

    pub fn sample(&self, dual: &DualLattice, grid: &Grid) -> BasisSamples {
        let n = self.dim();
        BasisSamples {
            values: self.functions.iter().map(|f| f.sample(grid)).collect(),
            grads: self
                .functions
                .iter()
                .map(|f| {
                    (0..n)
                        .map(|j| f.cartesian_derivative(dual, j).sample(grid))
                        .collect()
                })
                .collect(),
        }
    }

    /// `int u_a u_b dmu_g` by trapezoidal quadrature on `grid`.
    pub fn gram(&self, metric: &MetricField, grid: &Grid) -> Result<SymMatrix, crate::galerkin::GalerkinError> {
        let samples = MetricSamples::new(metric, grid)?;
        let values: Vec<Vec<f64>> = self.functions.iter().map(|f| f.sample(grid)).collect();
        let volume = metric.lattice().covolume();
        let nodes = grid.len() as f64;
        let mut gram = SymMatrix::zeros(self.m());
        for a in 0..self.m() {
            for b in a..self.m() {
                let s: f64 = (0..grid.len())
                    .map(|i| samples.sqrt_det[i] * values[a][i] * values[b][i])
                    .sum();
                gram.set(a, b, volume * s / nodes);
            }
        }
        Ok(gram)
    }
}
