use std::collections::BTreeMap;
use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::linalg::{pair_count, pair_index, pairs};
use crate::torus::DualLattice;

/// One term `cos * cos(2 pi k.y) + sin * sin(2 pi k.y)` in lattice coordinates
/// `y`, so `k.y = kappa.x` for the dual vector `kappa` with integer
/// coordinates `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: Vec<i64>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Real trigonometric polynomial on the torus. Frequencies are stored once per
/// antipodal pair (first nonzero coordinate positive), so the representation
/// is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigFieldRepr", into = "TrigFieldRepr")]
pub struct TrigField {
    dim: usize,
    terms: BTreeMap<Vec<i64>, [f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TrigFieldRepr {
    dim: usize,
    terms: Vec<TrigTerm>,
}

impl TryFrom<TrigFieldRepr> for TrigField {
    type Error = String;

    fn try_from(r: TrigFieldRepr) -> Result<Self, Self::Error> {
        if r.terms.iter().any(|t| t.freq.len() != r.dim) {
            return Err(format!("every freq must have {} entries", r.dim));
        }
        Ok(Self::from_terms(r.dim, r.terms))
    }
}

impl From<TrigField> for TrigFieldRepr {
    fn from(f: TrigField) -> Self {
        TrigFieldRepr {
            dim: f.dim,
            terms: f.terms().collect(),
        }
    }
}

fn is_canonical(k: &[i64]) -> bool {
    k.iter().find(|&&x| x != 0).is_none_or(|&x| x > 0)
}

impl TrigField {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(&vec![0; dim], c, 0.0);
        f
    }

    pub fn cos(k: &[i64], amp: f64) -> Self {
        let mut f = Self::zero(k.len());
        f.add_term(k, amp, 0.0);
        f
    }

    pub fn sin(k: &[i64], amp: f64) -> Self {
        let mut f = Self::zero(k.len());
        f.add_term(k, 0.0, amp);
        f
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = TrigTerm>) -> Self {
        let mut f = Self::zero(dim);
        for t in terms {
            f.add_term(&t.freq, t.cos, t.sin);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c cos(2 pi k.y) + s sin(2 pi k.y)`, folding `k` into the
    /// canonical half space.
    pub fn add_term(&mut self, k: &[i64], c: f64, s: f64) {
        assert_eq!(k.len(), self.dim, "frequency dimension mismatch");
        let (key, c, s) = if k.iter().all(|&x| x == 0) {
            (k.to_vec(), c, 0.0)
        } else if is_canonical(k) {
            (k.to_vec(), c, s)
        } else {
            (k.iter().map(|x| -x).collect(), c, -s)
        };
        if c == 0.0 && s == 0.0 {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_insert([0.0, 0.0]);
        slot[0] += c;
        slot[1] += s;
        if slot[0] == 0.0 && slot[1] == 0.0 {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = TrigTerm> + '_ {
        self.terms.iter().map(|(k, v)| TrigTerm {
            freq: k.clone(),
            cos: v[0],
            sin: v[1],
        })
    }

    /// Coefficient pair `(cos, sin)` of the canonical frequency `k`.
    pub fn coefficient(&self, k: &[i64]) -> (f64, f64) {
        self.terms.get(k).map_or((0.0, 0.0), |v| (v[0], v[1]))
    }

    /// Mean value over the torus.
    pub fn mean(&self) -> f64 {
        self.coefficient(&vec![0; self.dim]).0
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k, v[0], v[1]);
        }
        out
    }

    pub fn scale(&self, a: f64) -> Self {
        if a == 0.0 {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), [a * v[0], a * v[1]]))
                .collect(),
        }
    }

    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        self.add(&other.scale(a))
    }

    /// Exact product via the angle-sum identities.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (ka, a) in &self.terms {
            for (kb, b) in &other.terms {
                let (c1, s1, c2, s2) = (a[0], a[1], b[0], b[1]);
                let sum: Vec<i64> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                let diff: Vec<i64> = ka.iter().zip(kb).map(|(x, y)| x - y).collect();
                out.add_term(&sum, 0.5 * (c1 * c2 - s1 * s2), 0.5 * (c1 * s2 + s1 * c2));
                out.add_term(&diff, 0.5 * (c1 * c2 + s1 * s2), 0.5 * (s1 * c2 - c1 * s2));
            }
        }
        out
    }

    /// Drops terms whose coefficients are both below `tol` in magnitude.
    pub fn pruned(&self, tol: f64) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(_, v)| v[0].abs() > tol || v[1].abs() > tol)
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Largest `|k_i|` per lattice direction.
    pub fn extents(&self) -> Vec<i64> {
        let mut e = vec![0; self.dim];
        for k in self.terms.keys() {
            for (ei, ki) in e.iter_mut().zip(k) {
                *ei = (*ei).max(ki.abs());
            }
        }
        e
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms
            .values()
            .fold(0.0, |m, v| m.max(v[0].abs()).max(v[1].abs()))
    }

    /// Value at lattice coordinates `y`.
    pub fn eval(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, v)| {
                let phase = 2.0 * PI * k.iter().zip(y).map(|(&a, b)| a as f64 * b).sum::<f64>();
                v[0] * phase.cos() + v[1] * phase.sin()
            })
            .sum()
    }

    /// `d/dx_j` in Cartesian coordinates: `kappa = D k` for the dual basis `D`.
    pub fn cartesian_derivative(&self, dual: &DualLattice, j: usize) -> Self {
        let d = dual.basis();
        let mut out = Self::zero(self.dim);
        for (k, v) in &self.terms {
            let kappa_j: f64 = (0..self.dim).map(|c| d[(j, c)] * k[c] as f64).sum();
            let w = 2.0 * PI * kappa_j;
            if w != 0.0 {
                out.add_term(k, w * v[1], -w * v[0]);
            }
        }
        out
    }

    /// Exact values at every grid node, by one inverse FFT.
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        assert_eq!(grid.dim(), self.dim);
        let mut data = vec![Complex::new(0.0, 0.0); grid.len()];
        for (k, v) in &self.terms {
            if k.iter().all(|&x| x == 0) {
                data[grid.frequency_slot(k)] += Complex::new(v[0], 0.0);
                continue;
            }
            // c cos + s sin = Re[(c - i s) e^{i theta}]
            let half = Complex::new(0.5 * v[0], -0.5 * v[1]);
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            data[grid.frequency_slot(k)] += half;
            data[grid.frequency_slot(&neg)] += half.conj();
        }
        grid.fft(&mut data, true);
        data.into_iter().map(|z| z.re).collect()
    }
}

/// Symmetric (0,2)-tensor field in Cartesian components, packed `j <= k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField {
    dim: usize,
    comps: Vec<TrigField>,
}

impl SymTensorField {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            comps: vec![TrigField::zero(dim); pair_count(dim)],
        }
    }

    /// Constant Euclidean metric `delta_jk`.
    pub fn identity(dim: usize) -> Self {
        Self::scalar_multiple(&TrigField::constant(dim, 1.0))
    }

    /// `f * delta_jk`.
    pub fn scalar_multiple(f: &TrigField) -> Self {
        let dim = f.dim();
        let mut out = Self::zero(dim);
        for j in 0..dim {
            out.comps[pair_index(dim, j, j)] = f.clone();
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, j: usize, k: usize) -> &TrigField {
        &self.comps[pair_index(self.dim, j, k)]
    }

    pub fn set_component(&mut self, j: usize, k: usize, f: TrigField) {
        assert_eq!(f.dim(), self.dim);
        self.comps[pair_index(self.dim, j, k)] = f;
    }

    pub fn add_term(&mut self, j: usize, k: usize, freq: &[i64], c: f64, s: f64) {
        self.comps[pair_index(self.dim, j, k)].add_term(freq, c, s);
    }

    pub fn components(&self) -> &[TrigField] {
        &self.comps
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            dim: self.dim,
            comps: self.comps.iter().map(|c| c.scale(a)).collect(),
        }
    }

    /// `f * T`, exact.
    pub fn mul_scalar_field(&self, f: &TrigField) -> Self {
        Self {
            dim: self.dim,
            comps: self.comps.iter().map(|c| c.mul(f)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(TrigField::is_zero)
    }

    pub fn extents(&self) -> Vec<i64> {
        let mut e = vec![0; self.dim];
        for c in &self.comps {
            for (ei, ci) in e.iter_mut().zip(c.extents()) {
                *ei = (*ei).max(ci);
            }
        }
        e
    }

    /// Component samples, packed `j <= k`, each over the whole grid.
    pub fn sample(&self, grid: &Grid) -> Vec<Vec<f64>> {
        self.comps.iter().map(|c| c.sample(grid)).collect()
    }

    /// `d/dx_j` of every component.
    pub fn cartesian_derivative(&self, dual: &DualLattice, j: usize) -> Self {
        Self {
            dim: self.dim,
            comps: self
                .comps
                .iter()
                .map(|c| c.cartesian_derivative(dual, j))
                .collect(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        pairs(self.dim)
    }
}
