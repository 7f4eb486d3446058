use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::field::{SymTensorField, TrigField};
use super::grid::Grid;
use super::GalerkinError;
use crate::torus::{dual_lattice, DualLattice, Lattice};

/// Smallest admissible eigenvalue of `g` at a quadrature node.
pub const SPD_FLOOR: f64 = 1e-10;

/// One Fourier term of one tensor component; `jk` is 0-based and `freq` is in
/// dual-basis integer coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorTerm {
    pub jk: [usize; 2],
    pub freq: Vec<i64>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

fn tensor_from_terms(dim: usize, terms: &[TensorTerm]) -> Result<SymTensorField, GalerkinError> {
    let mut t = SymTensorField::zero(dim);
    for term in terms {
        if term.jk[0] >= dim || term.jk[1] >= dim || term.freq.len() != dim {
            return Err(GalerkinError::InvalidField(format!(
                "term {:?} does not fit dimension {dim}",
                term
            )));
        }
        t.add_term(term.jk[0], term.jk[1], &term.freq, term.cos, term.sin);
    }
    Ok(t)
}

fn terms_of(t: &SymTensorField) -> Vec<TensorTerm> {
    t.pairs()
        .flat_map(|(j, k)| {
            t.component(j, k).terms().map(move |term| TensorTerm {
                jk: [j, k],
                freq: term.freq,
                cos: term.cos,
                sin: term.sin,
            })
        })
        .collect()
}

/// Riemannian metric on `R^n / Lambda` as truncated Fourier series of its
/// Cartesian components `g_jk`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MetricRepr", into = "MetricRepr")]
pub struct MetricField {
    lattice: Lattice,
    tensor: SymTensorField,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MetricRepr {
    lattice: Lattice,
    terms: Vec<TensorTerm>,
}

impl TryFrom<MetricRepr> for MetricField {
    type Error = GalerkinError;

    fn try_from(r: MetricRepr) -> Result<Self, Self::Error> {
        let tensor = tensor_from_terms(r.lattice.dim(), &r.terms)?;
        Ok(Self {
            lattice: r.lattice,
            tensor,
        })
    }
}

impl From<MetricField> for MetricRepr {
    fn from(m: MetricField) -> Self {
        MetricRepr {
            terms: terms_of(&m.tensor),
            lattice: m.lattice,
        }
    }
}

impl MetricField {
    pub fn new(lattice: Lattice, tensor: SymTensorField) -> Result<Self, GalerkinError> {
        if tensor.dim() != lattice.dim() {
            return Err(GalerkinError::InvalidField(format!(
                "tensor of dimension {} on a lattice of dimension {}",
                tensor.dim(),
                lattice.dim()
            )));
        }
        Ok(Self { lattice, tensor })
    }

    /// The Euclidean metric on the torus.
    pub fn flat(lattice: Lattice) -> Self {
        let dim = lattice.dim();
        Self {
            lattice,
            tensor: SymTensorField::identity(dim),
        }
    }

    /// `f * delta`; positivity of `f` is checked at assembly.
    pub fn conformally_flat(lattice: Lattice, factor: &TrigField) -> Result<Self, GalerkinError> {
        Self::new(lattice, SymTensorField::scalar_multiple(factor))
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dual(&self) -> DualLattice {
        dual_lattice(&self.lattice).expect("validated lattice has a dual")
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn tensor(&self) -> &SymTensorField {
        &self.tensor
    }

    /// `g + t h`.
    pub fn perturbed(&self, t: f64, h: &PerturbationTensor) -> Self {
        Self {
            lattice: self.lattice.clone(),
            tensor: self.tensor.add(&h.tensor.scale(t)),
        }
    }

    /// Largest `|k_i|` per lattice direction over all components.
    pub fn extents(&self) -> Vec<i64> {
        self.tensor.extents()
    }

    /// Largest Cartesian frequency norm present.
    pub fn bandwidth(&self) -> f64 {
        let dual = self.dual();
        self.tensor
            .components()
            .iter()
            .flat_map(|c| c.terms())
            .map(|t| dual.vector(&t.freq).iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Symmetric (0,2)-tensor direction `h`; conformal directions remember the
/// scalar factor `f` with `h = f g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PerturbationRepr", into = "PerturbationRepr")]
pub struct PerturbationTensor {
    tensor: SymTensorField,
    conformal_factor: Option<TrigField>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PerturbationRepr {
    dim: usize,
    terms: Vec<TensorTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    conformal_factor: Option<TrigField>,
}

impl TryFrom<PerturbationRepr> for PerturbationTensor {
    type Error = GalerkinError;

    fn try_from(r: PerturbationRepr) -> Result<Self, Self::Error> {
        Ok(Self {
            tensor: tensor_from_terms(r.dim, &r.terms)?,
            conformal_factor: r.conformal_factor,
        })
    }
}

impl From<PerturbationTensor> for PerturbationRepr {
    fn from(p: PerturbationTensor) -> Self {
        PerturbationRepr {
            dim: p.tensor.dim(),
            terms: terms_of(&p.tensor),
            conformal_factor: p.conformal_factor,
        }
    }
}

impl PerturbationTensor {
    pub fn general(tensor: SymTensorField) -> Self {
        Self {
            tensor,
            conformal_factor: None,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::general(SymTensorField::zero(dim))
    }

    /// `h = f g`, formed exactly by trigonometric products.
    pub fn conformal(metric: &MetricField, factor: &TrigField) -> Self {
        Self {
            tensor: metric.tensor.mul_scalar_field(factor),
            conformal_factor: Some(factor.clone()),
        }
    }

    /// `h = g`.
    pub fn metric_itself(metric: &MetricField) -> Self {
        Self::conformal(metric, &TrigField::constant(metric.dim(), 1.0))
    }

    pub fn tensor(&self) -> &SymTensorField {
        &self.tensor
    }

    pub fn conformal_factor(&self) -> Option<&TrigField> {
        self.conformal_factor.as_ref()
    }

    pub fn is_conformal(&self) -> bool {
        self.conformal_factor.is_some()
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            tensor: self.tensor.scale(a),
            conformal_factor: self.conformal_factor.as_ref().map(|f| f.scale(a)),
        }
    }

    /// `self + a other`; stays conformal only if both are.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        let conformal_factor = match (&self.conformal_factor, &other.conformal_factor) {
            (Some(f), Some(g)) => Some(f.axpy(a, g)),
            _ => None,
        };
        Self {
            tensor: self.tensor.add(&other.tensor.scale(a)),
            conformal_factor,
        }
    }

    pub fn extents(&self) -> Vec<i64> {
        self.tensor.extents()
    }
}

/// Pointwise metric data on a grid, with derivatives computed exactly from
/// the Fourier representation.
#[derive(Debug, Clone)]
pub struct MetricSamples {
    pub g: Vec<DMatrix<f64>>,
    pub g_inv: Vec<DMatrix<f64>>,
    pub sqrt_det: Vec<f64>,
}

fn node_matrices(samples: &[Vec<f64>], dim: usize, nodes: usize) -> Vec<DMatrix<f64>> {
    (0..nodes)
        .map(|i| {
            DMatrix::from_fn(dim, dim, |j, k| {
                samples[crate::linalg::pair_index(dim, j, k)][i]
            })
        })
        .collect()
}

/// Samples any symmetric tensor field as one matrix per node.
pub fn sample_tensor(t: &SymTensorField, grid: &Grid) -> Vec<DMatrix<f64>> {
    node_matrices(&t.sample(grid), t.dim(), grid.len())
}

impl MetricSamples {
    /// Evaluates `g` on the grid and rejects nodes where it is not positive
    /// definite.
    pub fn new(metric: &MetricField, grid: &Grid) -> Result<Self, GalerkinError> {
        let g = sample_tensor(&metric.tensor, grid);
        let mut g_inv = Vec::with_capacity(g.len());
        let mut sqrt_det = Vec::with_capacity(g.len());
        for (i, gi) in g.iter().enumerate() {
            let min_eig = gi.clone().symmetric_eigenvalues().min();
            if !(min_eig > SPD_FLOOR) {
                return Err(GalerkinError::NotPositiveDefinite {
                    node: grid.multi_index(i),
                    min_eigenvalue: min_eig,
                });
            }
            let chol = gi.clone().cholesky().ok_or(GalerkinError::NotPositiveDefinite {
                node: grid.multi_index(i),
                min_eigenvalue: min_eig,
            })?;
            let det: f64 = chol.l().diagonal().iter().map(|x| x * x).product();
            sqrt_det.push(det.sqrt());
            g_inv.push(chol.inverse());
        }
        Ok(Self { g, g_inv, sqrt_det })
    }
}
