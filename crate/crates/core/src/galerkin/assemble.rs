use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::field::TrigField;
use super::grid::Grid;
use super::metric::{MetricField, MetricSamples};
use super::GalerkinError;
use crate::linalg::{pair_index, pairs, SymMatrix};
use crate::torus::enumerate_spectrum;

pub const DEFAULT_MAX_MODES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalerkinOptions {
    /// Keep modes with `|kappa| <= max_freq`.
    pub max_freq: f64,
    /// Quadrature grid; defaults to twice the minimal exact grid per side.
    #[serde(default)]
    pub grid: Option<Vec<usize>>,
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
}

fn default_max_modes() -> usize {
    DEFAULT_MAX_MODES
}

impl GalerkinOptions {
    pub fn new(max_freq: f64) -> Self {
        Self {
            max_freq,
            grid: None,
            max_modes: DEFAULT_MAX_MODES,
        }
    }

    pub fn with_grid(mut self, grid: Vec<usize>) -> Self {
        self.grid = Some(grid);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Constant,
    Cos,
    Sin,
}

/// One real basis function `cos(2 pi k.y)`, `sin(2 pi k.y)` or `1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: Vec<i64>,
    pub kappa: Vec<f64>,
    pub kind: ModeKind,
}

/// Real trigonometric basis: the constant, then a cos/sin pair for every
/// antipodal class with `0 < |kappa| <= max_freq`, by increasing `|kappa|`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigBasis {
    pub modes: Vec<Mode>,
}

impl TrigBasis {
    pub fn new(metric: &MetricField, max_freq: f64) -> Result<Self, GalerkinError> {
        if !(max_freq > 0.0) || !max_freq.is_finite() {
            return Err(GalerkinError::InvalidMaxFreq(max_freq));
        }
        let dim = metric.dim();
        let mut modes = vec![Mode {
            k: vec![0; dim],
            kappa: vec![0.0; dim],
            kind: ModeKind::Constant,
        }];
        for shell in enumerate_spectrum(metric.lattice(), max_freq * max_freq)? {
            for (k, kappa) in shell.coefficients.iter().zip(&shell.representatives) {
                for kind in [ModeKind::Cos, ModeKind::Sin] {
                    modes.push(Mode {
                        k: k.clone(),
                        kappa: kappa.clone(),
                        kind,
                    });
                }
            }
        }
        Ok(Self { modes })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn extents(&self) -> Vec<i64> {
        let dim = self.modes[0].k.len();
        let mut e = vec![0; dim];
        for m in &self.modes {
            for (ei, ki) in e.iter_mut().zip(&m.k) {
                *ei = (*ei).max(ki.abs());
            }
        }
        e
    }

    /// The function `sum_a coeffs[a] phi_a`.
    pub fn to_field(&self, coeffs: &[f64]) -> TrigField {
        let dim = self.modes[0].k.len();
        let mut f = TrigField::zero(dim);
        for (m, &c) in self.modes.iter().zip(coeffs) {
            match m.kind {
                ModeKind::Constant | ModeKind::Cos => f.add_term(&m.k, c, 0.0),
                ModeKind::Sin => f.add_term(&m.k, 0.0, c),
            }
        }
        f
    }
}

/// Smallest grid on which trapezoidal quadrature integrates products of two
/// basis functions against a field of the given extents exactly:
/// `2 (2 e_i + c_i) + 1` per side.
pub fn minimal_grid(basis_extents: &[i64], field_extents: &[i64]) -> Vec<usize> {
    basis_extents
        .iter()
        .zip(field_extents)
        .map(|(&e, &c)| (2 * (2 * e + c) + 1) as usize)
        .collect()
}

/// Resolves the requested grid against the minimal one.
pub fn resolve_grid(requested: Option<&[usize]>, minimal: Vec<usize>) -> Result<Grid, GalerkinError> {
    match requested {
        None => Ok(Grid::new(minimal.iter().map(|g| 2 * g).collect())),
        Some(r) => {
            if r.len() != minimal.len() || r.iter().zip(&minimal).any(|(a, b)| a < b) {
                return Err(GalerkinError::GridTooSmall {
                    required: minimal,
                    given: r.to_vec(),
                });
            }
            Ok(Grid::new(r.to_vec()))
        }
    }
}

/// Fourier coefficients of a sampled weight, with integrals of products of
/// two trigonometric basis functions against it.
pub(crate) struct WeightSpectrum<'a> {
    grid: &'a Grid,
    coeffs: Vec<Complex<f64>>,
}

impl<'a> WeightSpectrum<'a> {
    pub(crate) fn new(grid: &'a Grid, values: &[f64]) -> Self {
        Self {
            grid,
            coeffs: grid.coefficients(values),
        }
    }

    /// Mean of `w cos(2 pi m.y)`.
    fn cos_moment(&self, m: &[i64]) -> f64 {
        self.coeffs[self.grid.frequency_slot(m)].re
    }

    /// Mean of `w sin(2 pi m.y)`.
    fn sin_moment(&self, m: &[i64]) -> f64 {
        -self.coeffs[self.grid.frequency_slot(m)].im
    }

    /// Mean of `w phi_a phi_b`; `Constant` behaves as `cos` of frequency 0.
    pub(crate) fn product(&self, ka: &[i64], a: ModeKind, kb: &[i64], b: ModeKind) -> f64 {
        let sum: Vec<i64> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
        let diff: Vec<i64> = ka.iter().zip(kb).map(|(x, y)| x - y).collect();
        use ModeKind::*;
        match (a, b) {
            (Constant | Cos, Constant | Cos) => {
                0.5 * (self.cos_moment(&diff) + self.cos_moment(&sum))
            }
            (Sin, Sin) => 0.5 * (self.cos_moment(&diff) - self.cos_moment(&sum)),
            (Constant | Cos, Sin) => 0.5 * (self.sin_moment(&sum) - self.sin_moment(&diff)),
            (Sin, Constant | Cos) => 0.5 * (self.sin_moment(&sum) + self.sin_moment(&diff)),
        }
    }
}

/// Derivative of a mode is `sign * 2 pi kappa_j * (swapped mode)`.
fn derivative_shape(kind: ModeKind) -> Option<(f64, ModeKind)> {
    match kind {
        ModeKind::Constant => None,
        ModeKind::Cos => Some((-1.0, ModeKind::Sin)),
        ModeKind::Sin => Some((1.0, ModeKind::Cos)),
    }
}

#[derive(Debug, Clone)]
pub struct Assembly {
    pub stiffness: SymMatrix,
    pub mass: SymMatrix,
    pub basis: TrigBasis,
    pub grid: Grid,
}

/// Stiffness `S_ab = int g^{jk} d_j phi_a d_k phi_b dmu_g` and mass
/// `B_ab = int phi_a phi_b dmu_g` over a fundamental domain.
pub fn assemble(metric: &MetricField, opts: &GalerkinOptions) -> Result<Assembly, GalerkinError> {
    let basis = TrigBasis::new(metric, opts.max_freq)?;
    if basis.len() > opts.max_modes {
        return Err(GalerkinError::TooManyModes {
            modes: basis.len(),
            limit: opts.max_modes,
        });
    }
    let grid = resolve_grid(
        opts.grid.as_deref(),
        minimal_grid(&basis.extents(), &metric.extents()),
    )?;
    let samples = MetricSamples::new(metric, &grid)?;
    let dim = metric.dim();
    let volume = metric.lattice().covolume();

    let mass_weight = WeightSpectrum::new(&grid, &samples.sqrt_det);
    let stiff_weights: Vec<WeightSpectrum> = pairs(dim)
        .map(|(j, k)| {
            let values: Vec<f64> = samples
                .g_inv
                .iter()
                .zip(&samples.sqrt_det)
                .map(|(gi, w)| w * gi[(j, k)])
                .collect();
            WeightSpectrum::new(&grid, &values)
        })
        .collect();

    let n = basis.len();
    let modes = &basis.modes;
    let rows: Vec<Vec<(f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|a| {
            (a..n)
                .map(|b| {
                    let (ma, mb) = (&modes[a], &modes[b]);
                    let mass = volume * mass_weight.product(&ma.k, ma.kind, &mb.k, mb.kind);
                    let stiff = match (derivative_shape(ma.kind), derivative_shape(mb.kind)) {
                        (Some((sa, ka)), Some((sb, kb))) => {
                            let mut s = 0.0;
                            for (j, k) in pairs(dim) {
                                let coupling = if j == k {
                                    ma.kappa[j] * mb.kappa[k]
                                } else {
                                    ma.kappa[j] * mb.kappa[k] + ma.kappa[k] * mb.kappa[j]
                                };
                                if coupling != 0.0 {
                                    s += coupling
                                        * stiff_weights[pair_index(dim, j, k)]
                                            .product(&ma.k, ka, &mb.k, kb);
                                }
                            }
                            4.0 * PI * PI * volume * sa * sb * s
                        }
                        _ => 0.0,
                    };
                    (stiff, mass)
                })
                .collect()
        })
        .collect();

    let mut stiffness = SymMatrix::zeros(n);
    let mut mass = SymMatrix::zeros(n);
    for (a, row) in rows.into_iter().enumerate() {
        for (offset, (s, m)) in row.into_iter().enumerate() {
            stiffness.set(a, a + offset, s);
            mass.set(a, a + offset, m);
        }
    }
    Ok(Assembly {
        stiffness,
        mass,
        basis,
        grid,
    })
}

/// Stiffness and mass by direct summation over the grid nodes, without FFTs;
/// a slow oracle for [`assemble`].
pub fn assemble_by_quadrature(
    metric: &MetricField,
    basis: &TrigBasis,
    grid: &Grid,
) -> Result<(DMatrix<f64>, DMatrix<f64>), GalerkinError> {
    let samples = MetricSamples::new(metric, grid)?;
    let dual = metric.dual();
    let dim = metric.dim();
    let volume = metric.lattice().covolume();
    let nodes = grid.len();
    let fields: Vec<TrigField> = (0..basis.len())
        .map(|a| {
            let mut c = vec![0.0; basis.len()];
            c[a] = 1.0;
            basis.to_field(&c)
        })
        .collect();
    let values: Vec<Vec<f64>> = fields.iter().map(|f| f.sample(grid)).collect();
    let grads: Vec<Vec<Vec<f64>>> = fields
        .iter()
        .map(|f| {
            (0..dim)
                .map(|j| f.cartesian_derivative(&dual, j).sample(grid))
                .collect()
        })
        .collect();
    let n = basis.len();
    let mut s = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    for a in 0..n {
        for c in 0..n {
            let mut sm = 0.0;
            let mut bm = 0.0;
            for i in 0..nodes {
                let w = samples.sqrt_det[i];
                bm += w * values[a][i] * values[c][i];
                let gi = &samples.g_inv[i];
                for j in 0..dim {
                    for k in 0..dim {
                        sm += w * gi[(j, k)] * grads[a][j][i] * grads[c][k][i];
                    }
                }
            }
            s[(a, c)] = volume * sm / nodes as f64;
            b[(a, c)] = volume * bm / nodes as f64;
        }
    }
    Ok((s, b))
}
