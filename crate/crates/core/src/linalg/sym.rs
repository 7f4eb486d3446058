use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LinalgError;

/// Number of index pairs `(a, b)` with `a <= b` for an `m x m` symmetric matrix.
pub fn pair_count(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Position of the pair `(a, b)` in the packed upper-triangular ordering
/// `(0,0), (0,1), .., (0,m-1), (1,1), ..`.
pub fn pair_index(m: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    debug_assert!(b < m, "pair ({a}, {b}) out of range for dim {m}");
    // rows 0..a hold m, m-1, .., m-a+1 entries
    a * m - a * a.saturating_sub(1) / 2 + (b - a)
}

/// All index pairs `a <= b` in packed order.
pub fn pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |a| (a..m).map(move |b| (a, b)))
}

/// Multiplicity of the packed entry `(a, b)` in a full double sum over a
/// symmetric matrix: 1 on the diagonal, 2 off it.
pub fn pair_weight(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        2.0
    }
}

/// Real symmetric matrix stored as its upper triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; pair_count(dim)],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for a in 0..dim {
            out.set(a, a, 1.0);
        }
        out
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut out = Self::zeros(diag.len());
        for (a, &d) in diag.iter().enumerate() {
            out.set(a, a, d);
        }
        out
    }

    /// Packs a dense matrix, requiring symmetry to `rel_tol` of its largest entry.
    pub fn from_dense(mat: &DMatrix<f64>, rel_tol: f64) -> Result<Self, LinalgError> {
        if mat.nrows() != mat.ncols() {
            return Err(LinalgError::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let dim = mat.nrows();
        let scale = mat.amax().max(f64::MIN_POSITIVE);
        let mut out = Self::zeros(dim);
        for (a, b) in pairs(dim) {
            let (x, y) = (mat[(a, b)], mat[(b, a)]);
            if !x.is_finite() || !y.is_finite() {
                return Err(LinalgError::NonFinite);
            }
            if (x - y).abs() > rel_tol * scale {
                return Err(LinalgError::NotSymmetric { row: a, col: b });
            }
            out.set(a, b, 0.5 * (x + y));
        }
        Ok(out)
    }

    /// Packs `(mat + mat^T) / 2` without checking.
    pub fn symmetrized(mat: &DMatrix<f64>) -> Self {
        let dim = mat.nrows().min(mat.ncols());
        let mut out = Self::zeros(dim);
        for (a, b) in pairs(dim) {
            out.set(a, b, 0.5 * (mat[(a, b)] + mat[(b, a)]));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[pair_index(self.dim, a, b)]
    }

    pub fn set(&mut self, a: usize, b: usize, value: f64) {
        let idx = pair_index(self.dim, a, b);
        self.entries[idx] = value;
    }

    pub fn add_to(&mut self, a: usize, b: usize, value: f64) {
        let idx = pair_index(self.dim, a, b);
        self.entries[idx] += value;
    }

    /// Upper-triangular entries in packed order.
    pub fn vectorize(&self) -> Vec<f64> {
        self.entries.clone()
    }

    pub fn as_packed(&self) -> &[f64] {
        &self.entries
    }

    pub fn devectorize(dim: usize, packed: &[f64]) -> Result<Self, LinalgError> {
        if packed.len() != pair_count(dim) {
            return Err(LinalgError::DimensionMismatch {
                expected: pair_count(dim),
                found: packed.len(),
            });
        }
        Ok(Self {
            dim,
            entries: packed.to_vec(),
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |a, b| self.get(a, b))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|x| x * factor).collect(),
        }
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &SymMatrix) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in axpy");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| x + factor * y)
                .collect(),
        }
    }

    /// Frobenius inner product `tr(self * other)`.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in frobenius_dot");
        pairs(self.dim)
            .zip(self.entries.iter().zip(&other.entries))
            .map(|((a, b), (x, y))| pair_weight(a, b) * x * y)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// `Q^T self Q` for a square `Q` of matching size.
    pub fn congruence(&self, q: &DMatrix<f64>) -> Self {
        let dense = q.transpose() * self.to_dense() * q;
        Self::symmetrized(&dense)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|x| x.is_finite())
    }
}
