use nalgebra::{DMatrix, SVD};
use serde::{Deserialize, Serialize};

use super::LinalgError;

/// Right null space of a real matrix, with the full singular spectrum kept so
/// that borderline rank decisions can be audited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullspaceResult {
    pub nullity: usize,
    /// Orthonormal basis of the numerical null space, one vector per entry.
    pub basis: Vec<Vec<f64>>,
    /// All `cols` right singular values, nonincreasing.
    pub singular_values: Vec<f64>,
    /// Relative threshold: `sigma <= threshold_used * sigma_max` counts as zero.
    pub threshold_used: f64,
}

impl NullspaceResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len() - self.nullity
    }

    /// Smallest singular value counted as nonzero, if any.
    pub fn smallest_retained(&self) -> Option<f64> {
        self.singular_values.get(self.rank().checked_sub(1)?).copied()
    }

    /// Largest singular value counted as zero, if any.
    pub fn largest_discarded(&self) -> Option<f64> {
        self.singular_values.get(self.rank()).copied()
    }
}

/// Null space of `matrix` by SVD: `nullity` counts singular values
/// `sigma_i <= rel_tol * sigma_max`; a zero matrix is entirely null.
pub fn numerical_nullspace(
    matrix: &DMatrix<f64>,
    rel_tol: f64,
) -> Result<NullspaceResult, LinalgError> {
    let (rows, cols) = matrix.shape();
    if rows == 0 || cols == 0 {
        return Err(LinalgError::Empty);
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(LinalgError::InvalidTolerance(rel_tol));
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }

    // Tall inputs: R from a QR factorization has the same right singular
    // structure and is much cheaper to decompose.
    let mut work = if rows > 2 * cols {
        matrix.clone().qr().r()
    } else {
        matrix.clone()
    };
    if work.nrows() < cols {
        work = work.resize_vertically(cols, 0.0);
    }

    let svd = SVD::new(work, false, true);
    let v_t = svd.v_t.ok_or(LinalgError::NonFinite)?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);

    let basis: Vec<Vec<f64>> = if sigma_max == 0.0 {
        (0..cols)
            .map(|i| {
                let mut e = vec![0.0; cols];
                e[i] = 1.0;
                e
            })
            .collect()
    } else {
        let cutoff = rel_tol * sigma_max;
        order
            .iter()
            .filter(|&&i| svd.singular_values[i] <= cutoff)
            .map(|&i| v_t.row(i).iter().copied().collect())
            .collect()
    };

    Ok(NullspaceResult {
        nullity: basis.len(),
        basis,
        singular_values,
        threshold_used: rel_tol,
    })
}
