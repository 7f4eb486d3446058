use nalgebra::{DMatrix, DVector};

use crate::galerkin::{
    resolve_grid, sample_tensor, Grid, MetricField, PerturbationTensor, SymTensorField, TrigField,
};
use crate::linalg::{pair_index, pairs};
use crate::torus::DualLattice;

use super::PerturbError;

/// Values, Cartesian gradient and Hessian of a trigonometric polynomial at
/// every grid node, all exact.
#[derive(Debug, Clone)]
pub struct FunctionSamples {
    pub values: Vec<f64>,
    /// `grad[j][node]`.
    pub grad: Vec<Vec<f64>>,
    /// Packed `j <= k`: `hess[pair][node]`.
    pub hess: Vec<Vec<f64>>,
}

impl FunctionSamples {
    pub fn new(f: &TrigField, dual: &DualLattice, grid: &Grid) -> Self {
        let n = f.dim();
        let first: Vec<TrigField> = (0..n).map(|j| f.cartesian_derivative(dual, j)).collect();
        Self {
            values: f.sample(grid),
            grad: first.iter().map(|d| d.sample(grid)).collect(),
            hess: pairs(n)
                .map(|(j, k)| first[j].cartesian_derivative(dual, k).sample(grid))
                .collect(),
        }
    }

    pub(crate) fn grad_at(&self, i: usize) -> DVector<f64> {
        DVector::from_iterator(self.grad.len(), self.grad.iter().map(|g| g[i]))
    }

    fn hess_at(&self, i: usize, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |j, k| self.hess[pair_index(n, j, k)][i])
    }
}

/// Samples of a symmetric tensor and its Cartesian derivatives.
struct TensorWithDerivatives {
    value: Vec<DMatrix<f64>>,
    /// `d[c][node]` is `d/dx_c` of the tensor.
    d: Vec<Vec<DMatrix<f64>>>,
}

impl TensorWithDerivatives {
    fn new(t: &SymTensorField, dual: &DualLattice, grid: &Grid) -> Self {
        Self {
            value: sample_tensor(t, grid),
            d: (0..t.dim())
                .map(|c| sample_tensor(&t.cartesian_derivative(dual, c), grid))
                .collect(),
        }
    }
}

/// Pointwise metric quantities: `g^{-1}`, `sqrt|g|` and the first-order
/// coefficients of `Delta_g`, all from exact derivatives of `g`.
pub(crate) struct Geometry {
    pub dim: usize,
    pub g_inv: Vec<DMatrix<f64>>,
    pub sqrt_det: Vec<f64>,
    /// `d_c g^{-1} = -g^{-1} (d_c g) g^{-1}`, as `dg_inv[c][node]`.
    dg_inv: Vec<Vec<DMatrix<f64>>>,
    /// `d_c log sqrt|g| = 1/2 tr(g^{-1} d_c g)`, as `dlog_w[c][node]`.
    dlog_w: Vec<Vec<f64>>,
    /// First-order coefficient of `Delta_g`.
    drift: Vec<DVector<f64>>,
}

impl Geometry {
    pub fn new(metric: &MetricField, grid: &Grid) -> Result<Self, PerturbError> {
        let samples = crate::galerkin::MetricSamples::new(metric, grid)?;
        let dual = metric.dual();
        let g = TensorWithDerivatives::new(metric.tensor(), &dual, grid);
        let n = metric.dim();
        let nodes = grid.len();
        let dg_inv: Vec<Vec<DMatrix<f64>>> = (0..n)
            .map(|c| {
                (0..nodes)
                    .map(|i| -(&samples.g_inv[i] * &g.d[c][i] * &samples.g_inv[i]))
                    .collect()
            })
            .collect();
        let dlog_w: Vec<Vec<f64>> = (0..n)
            .map(|c| {
                (0..nodes)
                    .map(|i| 0.5 * (&samples.g_inv[i] * &g.d[c][i]).trace())
                    .collect()
            })
            .collect();
        let drift = (0..nodes)
            .map(|i| divergence_drift(&samples.g_inv[i], |c| &dg_inv[c][i], |c| dlog_w[c][i]))
            .collect();
        Ok(Self {
            dim: n,
            g_inv: samples.g_inv,
            sqrt_det: samples.sqrt_det,
            dg_inv,
            dlog_w,
            drift,
        })
    }

    /// `Delta_g u` at node `i`.
    fn laplacian_at(&self, u: &FunctionSamples, i: usize) -> f64 {
        let grad = u.grad_at(i);
        let hess = u.hess_at(i, self.dim);
        self.g_inv[i].component_mul(&hess).sum() + self.drift[i].dot(&grad)
    }

    pub fn laplacian(&self, u: &FunctionSamples) -> Vec<f64> {
        (0..self.g_inv.len()).map(|i| self.laplacian_at(u, i)).collect()
    }
}

/// For `L_A u = |g|^{-1/2} d_j(|g|^{1/2} A^{jk} d_k u)`, the coefficient of
/// `d_k u`: `sum_j d_j A^{jk} + (d_j log sqrt|g|) A^{jk}`.
fn divergence_drift<'a>(
    a: &DMatrix<f64>,
    da: impl Fn(usize) -> &'a DMatrix<f64>,
    dlog_w: impl Fn(usize) -> f64,
) -> DVector<f64> {
    let n = a.nrows();
    DVector::from_fn(n, |k, _| {
        (0..n).map(|j| da(j)[(j, k)] + dlog_w(j) * a[(j, k)]).sum()
    })
}

/// Pointwise data of `D_h Delta_g` in one direction `h`.
pub(crate) struct Variation {
    /// Raised tensor `h^{jk} = g^{ja} h_ab g^{bk}`.
    pub h_up: Vec<DMatrix<f64>>,
    /// `tr_g h`.
    pub trace: Vec<f64>,
    /// Largest entry of `h^{jk}` over the grid.
    pub scale: f64,
    /// Coefficient of `d_k u` in `D_h Delta_g u`; skipped when only the
    /// integrated form is needed.
    drift: Option<Vec<DVector<f64>>>,
}

impl Variation {
    pub fn new(
        geom: &Geometry,
        h: &PerturbationTensor,
        dual: &DualLattice,
        grid: &Grid,
        with_drift: bool,
    ) -> Self {
        let n = geom.dim;
        let nodes = grid.len();
        if !with_drift {
            let value = sample_tensor(h.tensor(), grid);
            let h_up: Vec<DMatrix<f64>> = (0..nodes)
                .map(|i| &geom.g_inv[i] * &value[i] * &geom.g_inv[i])
                .collect();
            let trace = (0..nodes)
                .map(|i| (&geom.g_inv[i] * &value[i]).trace())
                .collect();
            let scale = h_up.iter().fold(0.0f64, |m, x| m.max(x.amax()));
            return Self {
                h_up,
                trace,
                scale,
                drift: None,
            };
        }
        let hs = TensorWithDerivatives::new(h.tensor(), dual, grid);
        let mut h_up = Vec::with_capacity(nodes);
        let mut trace = Vec::with_capacity(nodes);
        let mut drift = Vec::with_capacity(nodes);
        for i in 0..nodes {
            let gi = &geom.g_inv[i];
            let hi = &hs.value[i];
            let up = gi * hi * gi;
            let d_up: Vec<DMatrix<f64>> = (0..n)
                .map(|c| {
                    let dgi = &geom.dg_inv[c][i];
                    dgi * hi * gi + gi * &hs.d[c][i] * gi + gi * hi * dgi
                })
                .collect();
            let d_trace: Vec<f64> = (0..n)
                .map(|c| (&geom.dg_inv[c][i] * hi).trace() + (gi * &hs.d[c][i]).trace())
                .collect();
            let div = divergence_drift(&up, |c| &d_up[c], |c| geom.dlog_w[c][i]);
            // 1/2 d_j(tr h) g^{jk} d_k u  -  L_{h^up} u
            let half_grad_trace = gi * DVector::from_vec(d_trace) * 0.5;
            drift.push(half_grad_trace - div);
            trace.push((gi * hi).trace());
            h_up.push(up);
        }
        let scale = h_up.iter().fold(0.0f64, |m, x: &DMatrix<f64>| m.max(x.amax()));
        Self {
            h_up,
            trace,
            scale,
            drift: Some(drift),
        }
    }

    /// `D_h Delta_g u` at every node.
    pub fn apply(&self, u: &FunctionSamples, n: usize) -> Vec<f64> {
        let drift = self
            .drift
            .as_ref()
            .expect("variation built without first-order coefficients");
        (0..self.h_up.len())
            .map(|i| drift[i].dot(&u.grad_at(i)) - self.h_up[i].component_mul(&u.hess_at(i, n)).sum())
            .collect()
    }
}

/// Quadrature grid resolving products of two functions of extents
/// `function_extents` against fields of extents `field_extents`.
pub(crate) fn product_grid(
    requested: Option<&[usize]>,
    function_extents: &[i64],
    field_extents: &[i64],
) -> Result<Grid, PerturbError> {
    let minimal = crate::galerkin::minimal_grid(function_extents, field_extents);
    Ok(resolve_grid(requested, minimal)?)
}

pub(crate) fn add_extents(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Grid values of `D_h Delta_g u` from the pointwise formula
/// `1/2 d_j(tr_g h) g^{jk} d_k u - |g|^{-1/2} d_j(|g|^{1/2} h^{jk} d_k u)`.
///
/// `u` is a trigonometric polynomial, so all its derivatives are exact; the
/// grid defaults to twice the size resolving `u` against `g` and `h`.
pub fn variation_apply(
    metric: &MetricField,
    h: &PerturbationTensor,
    u: &TrigField,
    grid: Option<&[usize]>,
) -> Result<(Grid, Vec<f64>), PerturbError> {
    let grid = product_grid(grid, &u.extents(), &add_extents(&metric.extents(), &h.extents()))?;
    let dual = metric.dual();
    let geom = Geometry::new(metric, &grid)?;
    let var = Variation::new(&geom, h, &dual, &grid, true);
    let samples = FunctionSamples::new(u, &dual, &grid);
    let values = var.apply(&samples, metric.dim());
    Ok((grid, values))
}

/// Grid values of `Delta_g u`.
pub fn laplacian_apply(
    metric: &MetricField,
    u: &TrigField,
    grid: &Grid,
) -> Result<Vec<f64>, PerturbError> {
    let geom = Geometry::new(metric, grid)?;
    Ok(geom.laplacian(&FunctionSamples::new(u, &metric.dual(), grid)))
}
