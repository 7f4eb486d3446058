//! Experiment configuration: one JSON document with a section per command,
//! adjusted by `--section.key=value` overrides.

use std::path::Path;

use degenlab_core::galerkin::MetricField;
use degenlab_core::linalg::SAMPLED_INPUT_REL_TOL;
use degenlab_core::sphere::DEFAULT_CELL_BUDGET;
use degenlab_core::torus::Lattice;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::LabError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for every pseudo-random draw; generated when absent.
    pub seed: Option<u64>,
    pub torus: TorusConfig,
    pub sphere: SphereConfig,
    pub perturb: PerturbConfig,
    pub noncross: NoncrossConfig,
}

fn square() -> Lattice {
    Lattice::integer(2).expect("identity basis is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TorusConfig {
    pub lattice: Lattice,
    pub norm_sq_max: f64,
}

impl Default for TorusConfig {
    fn default() -> Self {
        Self {
            lattice: square(),
            norm_sq_max: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SphereConfig {
    /// Sphere dimension; polynomials live in `n + 1` variables.
    pub n: usize,
    pub ell_min: usize,
    pub ell_max: usize,
    pub gradient: bool,
    /// Largest `rows x cols` of an exact elimination before a degree is skipped.
    pub cell_budget: u128,
    /// Upper end of the 3-sphere dimension-count table.
    pub table_max_ell: usize,
}

impl Default for SphereConfig {
    fn default() -> Self {
        Self {
            n: 2,
            ell_min: 1,
            ell_max: 5,
            gradient: true,
            cell_budget: DEFAULT_CELL_BUDGET,
            table_max_ell: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// Exact cos/sin eigenfunctions; flat metrics only.
    Exact,
    /// Galerkin eigenvectors of the configured metric.
    Galerkin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbConfig {
    /// Base metric; the flat square torus when absent.
    pub metric: Option<MetricField>,
    /// Target cluster `lambda = -4 pi^2 norm_sq`.
    pub norm_sq: f64,
    /// Cluster size; taken from the flat lattice when absent.
    pub multiplicity: Option<usize>,
    pub basis: BasisKind,
    /// Galerkin frequency cutoff for the validation spectra; defaults to
    /// `max(8, 2 sqrt(norm_sq) + 6)`.
    pub max_freq: Option<f64>,
    pub t_grid: Vec<f64>,
    /// Random directions use frequencies with `|kappa| <=` this radius.
    pub direction_radius: f64,
    /// Directions for the cokernel test; defaults to `max(60, m(m+1)/2 + 10)`.
    pub num_directions: Option<usize>,
    pub rel_tol: f64,
    pub relation_trials: usize,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        Self {
            metric: None,
            norm_sq: 1.0,
            multiplicity: None,
            basis: BasisKind::Exact,
            max_freq: None,
            t_grid: vec![10f64.powf(-1.5), 1e-2, 10f64.powf(-2.5), 1e-3],
            direction_radius: 3.0,
            num_directions: None,
            rel_tol: SAMPLED_INPUT_REL_TOL,
            relation_trials: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `g(s) = (1 + eps f_0 + s a f_1) delta` from a random conformal start.
    Conformal,
    /// `g(s) = delta` for every `s`.
    Constant,
    /// `g(s) = (1 + s a f_1) delta`, flat at `s = 0`.
    ThroughFlat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoncrossConfig {
    pub lattice: Lattice,
    pub family: FamilyKind,
    pub runs: usize,
    /// Samples of `s` over `[0, 1]`, endpoints included.
    pub samples: usize,
    pub num_eigenvalues: usize,
    pub max_freq: f64,
    /// Frequency radius of the random conformal factors.
    pub factor_radius: f64,
    /// Sup-norm of the start perturbation `eps f_0`.
    pub start_amplitude: f64,
    /// Sup-norm of the family direction `a f_1`.
    pub direction_amplitude: f64,
    /// A gap `<= zero_gap_rel * max(1, |lambda|)` counts as a crossing.
    pub zero_gap_rel: f64,
}

impl Default for NoncrossConfig {
    fn default() -> Self {
        Self {
            lattice: square(),
            family: FamilyKind::Conformal,
            runs: 10,
            samples: 200,
            num_eigenvalues: 12,
            max_freq: 6.0,
            factor_radius: 2.0,
            start_amplitude: 0.1,
            direction_amplitude: 0.1,
            zero_gap_rel: 1e-9,
        }
    }
}

impl ExperimentConfig {
    /// Reads `path` (or starts from defaults) and applies `overrides`.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, LabError> {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| LabError::Config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str::<Value>(&text)
                    .map_err(|e| LabError::Config(format!("{}: {e}", p.display())))?
            }
            None => serde_json::to_value(Self::default()).expect("defaults serialize"),
        };
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        let config: Self = serde_json::from_value(value).map_err(|e| LabError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |m: String| Err(LabError::Config(m));
        if !(self.torus.norm_sq_max > 0.0) {
            return bad(format!("torus.norm_sq_max must be positive, got {}", self.torus.norm_sq_max));
        }
        if !(2..=3).contains(&self.sphere.n) {
            return bad(format!("sphere.n must be 2 or 3, got {}", self.sphere.n));
        }
        if self.sphere.ell_min == 0 || self.sphere.ell_min > self.sphere.ell_max {
            return bad("sphere.ell_min must satisfy 1 <= ell_min <= ell_max".into());
        }
        let p = &self.perturb;
        if !(p.norm_sq > 0.0) {
            return bad(format!("perturb.norm_sq must be positive, got {}", p.norm_sq));
        }
        if p.t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return bad(format!("perturb.t_grid must hold nonnegative values, got {:?}", p.t_grid));
        }
        if !(p.rel_tol > 0.0 && p.rel_tol < 1.0) {
            return bad(format!("perturb.rel_tol must lie in (0, 1), got {}", p.rel_tol));
        }
        let n = &self.noncross;
        if n.samples < 2 || n.num_eigenvalues < 2 || n.runs == 0 {
            return bad("noncross needs runs >= 1, samples >= 2 and num_eigenvalues >= 2".into());
        }
        if !(n.start_amplitude >= 0.0 && n.direction_amplitude >= 0.0)
            || n.start_amplitude + n.direction_amplitude >= 1.0
        {
            return bad("noncross amplitudes must be nonnegative with sum below 1".into());
        }
        Ok(())
    }
}

/// Applies `section.key=value` (a leading `--` is accepted). The value is
/// parsed as JSON when possible and kept as a string otherwise.
pub fn apply_override(root: &mut Value, spec: &str) -> Result<(), LabError> {
    let spec = spec.trim_start_matches("--");
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| LabError::Config(format!("override `{spec}` is not of the form key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        if key.is_empty() {
            return Err(LabError::Config(format!("empty key in override `{spec}`")));
        }
        let obj = match node {
            Value::Object(map) => map,
            Value::Null => {
                *node = Value::Object(Default::default());
                node.as_object_mut().expect("just created")
            }
            _ => return Err(LabError::Config(format!("`{path}` does not name an object field"))),
        };
        if i + 1 == keys.len() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        node = obj.entry(key.to_string()).or_insert(Value::Null);
    }
    unreachable!("split yields at least one key")
}
