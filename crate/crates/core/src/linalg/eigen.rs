use nalgebra::{DMatrix, SymmetricEigen};

use super::{LinalgError, SymMatrix};

/// Eigen-decomposition with eigenvalues ascending and eigenvectors as columns.
///
/// Inside a repeated eigenvalue the basis is orthonormal but otherwise
/// arbitrary; callers must not depend on it.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

fn sorted(values: &[f64], vectors: &DMatrix<f64>) -> SymEigen {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    SymEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: DMatrix::from_fn(vectors.nrows(), order.len(), |r, c| vectors[(r, order[c])]),
    }
}

pub fn sym_eig(matrix: &SymMatrix) -> SymEigen {
    let eig = SymmetricEigen::new(matrix.to_dense());
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    sorted(&values, &eig.eigenvectors)
}

/// Solves `S v = nu B v` by Cholesky reduction `B = L L^T`; eigenvectors are
/// returned `B`-orthonormal.
pub fn generalized_sym_eigh(
    stiffness: &SymMatrix,
    mass: &SymMatrix,
) -> Result<SymEigen, LinalgError> {
    if stiffness.dim() != mass.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: stiffness.dim(),
            found: mass.dim(),
        });
    }
    if !stiffness.is_finite() || !mass.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let chol = mass
        .to_dense()
        .cholesky()
        .ok_or(LinalgError::NotPositiveDefinite)?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&stiffness.to_dense())
        .ok_or(LinalgError::NotPositiveDefinite)?;
    let reduced = l
        .solve_lower_triangular(&x.transpose())
        .ok_or(LinalgError::NotPositiveDefinite)?;
    let eig = sym_eig(&SymMatrix::symmetrized(&reduced));
    let vectors = l
        .transpose()
        .solve_upper_triangular(&eig.vectors)
        .ok_or(LinalgError::NotPositiveDefinite)?;
    Ok(SymEigen {
        values: eig.values,
        vectors,
    })
}

/// Eigenvalues of the pencil `(stiffness, mass)`, ascending.
pub fn generalized_sym_eig(
    stiffness: &SymMatrix,
    mass: &SymMatrix,
) -> Result<Vec<f64>, LinalgError> {
    generalized_sym_eigh(stiffness, mass).map(|e| e.values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_swap() {
        let e = sym_eig(&SymMatrix::from_diagonal(&[3.0, 1.0, 2.0]));
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        let mut m = SymMatrix::zeros(2);
        m.set(0, 1, 1.0);
        let e = sym_eig(&m);
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generalized_with_identity_mass() {
        let s = SymMatrix::from_diagonal(&[4.0, 9.0]);
        let v = generalized_sym_eig(&s, &SymMatrix::identity(2)).unwrap();
        assert!((v[0] - 4.0).abs() < 1e-14 && (v[1] - 9.0).abs() < 1e-14);
    }

    #[test]
    fn proportional_pencil() {
        let mut b = SymMatrix::identity(3);
        b.set(0, 1, 0.3);
        b.set(1, 2, -0.2);
        b.set(2, 2, 2.0);
        let s = b.scale(2.0);
        for v in generalized_sym_eig(&s, &b).unwrap() {
            assert!((v - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn indefinite_mass_is_rejected() {
        let b = SymMatrix::from_diagonal(&[1.0, -1.0]);
        assert_eq!(
            generalized_sym_eig(&SymMatrix::identity(2), &b),
            Err(LinalgError::NotPositiveDefinite)
        );
    }

    #[test]
    fn generalized_vectors_are_mass_orthonormal() {
        let mut b = SymMatrix::identity(3);
        b.set(0, 2, 0.4);
        b.set(1, 1, 3.0);
        let mut s = SymMatrix::from_diagonal(&[1.0, 2.0, 5.0]);
        s.set(0, 1, 0.7);
        let e = generalized_sym_eigh(&s, &b).unwrap();
        let gram = e.vectors.transpose() * b.to_dense() * &e.vectors;
        assert!((gram - DMatrix::identity(3, 3)).amax() < 1e-13);
        let resid = s.to_dense() * &e.vectors
            - b.to_dense() * &e.vectors * DMatrix::from_diagonal(&e.values.clone().into());
        assert!(resid.amax() < 1e-12);
    }
}
