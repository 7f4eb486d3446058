use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LatticeError;

/// Full-rank lattice in R^n, n in {2, 3, 4}; columns of `basis` generate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeSpec", into = "LatticeSpec")]
pub struct Lattice {
    basis: DMatrix<f64>,
}

/// JSON form `{"dim": n, "basis": [[..], ..]}` with one inner array per column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub dim: usize,
    pub basis: Vec<Vec<f64>>,
}

impl TryFrom<LatticeSpec> for Lattice {
    type Error = LatticeError;

    fn try_from(spec: LatticeSpec) -> Result<Self, Self::Error> {
        if spec.basis.len() != spec.dim || spec.basis.iter().any(|c| c.len() != spec.dim) {
            return Err(LatticeError::Shape {
                dim: spec.dim,
                detail: "basis must hold `dim` columns of length `dim`".into(),
            });
        }
        let cols: Vec<&[f64]> = spec.basis.iter().map(Vec::as_slice).collect();
        Lattice::from_columns(&cols)
    }
}

impl From<Lattice> for LatticeSpec {
    fn from(l: Lattice) -> Self {
        LatticeSpec {
            dim: l.dim(),
            basis: l
                .basis
                .column_iter()
                .map(|c| c.iter().copied().collect())
                .collect(),
        }
    }
}

impl Lattice {
    pub fn new(basis: DMatrix<f64>) -> Result<Self, LatticeError> {
        let n = basis.nrows();
        if basis.ncols() != n || !(2..=4).contains(&n) {
            return Err(LatticeError::Shape {
                dim: n,
                detail: format!("need a square basis of size 2..=4, got {}x{}", n, basis.ncols()),
            });
        }
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(LatticeError::Shape {
                dim: n,
                detail: "basis has non-finite entries".into(),
            });
        }
        let det = basis.determinant();
        let scale = basis.norm().powi(n as i32);
        if !(det.abs() > 1e-12 * scale) {
            return Err(LatticeError::Singular { det });
        }
        Ok(Self { basis })
    }

    pub fn from_columns(columns: &[&[f64]]) -> Result<Self, LatticeError> {
        let n = columns.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(LatticeError::Shape {
                dim: n,
                detail: "columns must have length equal to their count".into(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |r, c| columns[c][r]))
    }

    /// The integer lattice Z^n.
    pub fn integer(n: usize) -> Result<Self, LatticeError> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn diagonal(scales: &[f64]) -> Result<Self, LatticeError> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(scales)))
    }

    /// Hexagonal lattice spanned by (1, 0) and (-1/2, sqrt(3)/2).
    pub fn triangular() -> Self {
        Self::from_columns(&[&[1.0, 0.0], &[-0.5, 3f64.sqrt() / 2.0]])
            .expect("triangular basis is invertible")
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Volume of a fundamental domain.
    pub fn covolume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, LatticeError> {
        Self::new(&self.basis * factor)
    }

    /// Same lattice, new generators `basis * u` for a unimodular integer `u`.
    pub fn rebased(&self, u: &DMatrix<i64>) -> Result<Self, LatticeError> {
        let n = self.dim();
        if u.nrows() != n || u.ncols() != n {
            return Err(LatticeError::Shape {
                dim: n,
                detail: "change of basis must be n x n".into(),
            });
        }
        let uf = u.map(|x| x as f64);
        if (uf.determinant().abs() - 1.0).abs() > 1e-9 {
            return Err(LatticeError::NotUnimodular);
        }
        Self::new(&self.basis * uf)
    }
}

/// Dual lattice `{kappa : kappa . v in Z for all v in the lattice}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualLattice {
    basis: DMatrix<f64>,
}

impl DualLattice {
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Cartesian coordinates of the dual vector with integer coordinates `k`.
    pub fn vector(&self, k: &[i64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|r| (0..n).map(|c| self.basis[(r, c)] * k[c] as f64).sum())
            .collect()
    }

    /// Gram matrix `D^T D`; `|kappa|^2 = k^T G k`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.basis.transpose() * &self.basis
    }
}

/// Dual basis `(basis^{-1})^T`.
pub fn dual_lattice(lattice: &Lattice) -> Result<DualLattice, LatticeError> {
    let inv = lattice
        .basis
        .clone()
        .try_inverse()
        .ok_or(LatticeError::Singular {
            det: lattice.basis.determinant(),
        })?;
    Ok(DualLattice {
        basis: inv.transpose(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) {
        assert!((a - b).amax() < tol, "{a} vs {b}");
    }

    #[test]
    fn square_lattice_is_self_dual() {
        let d = dual_lattice(&Lattice::integer(2).unwrap()).unwrap();
        assert_close(d.basis(), &DMatrix::identity(2, 2), 1e-15);
    }

    #[test]
    fn rectangular_dual() {
        let d = dual_lattice(&Lattice::diagonal(&[1.0, 2.0]).unwrap()).unwrap();
        assert_close(
            d.basis(),
            &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]),
            1e-15,
        );
    }

    #[test]
    fn triangular_dual_pairs_integrally() {
        let l = Lattice::triangular();
        let d = dual_lattice(&l).unwrap();
        let s3 = 3f64.sqrt();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0 / s3, 2.0 / s3]);
        assert_close(d.basis(), &expected, 1e-12);
        // every generator pairing is an integer (here: identity)
        let pairing = l.basis().transpose() * d.basis();
        assert_close(&pairing, &DMatrix::identity(2, 2), 1e-12);
    }

    #[test]
    fn singular_and_bad_shapes_rejected() {
        assert!(matches!(
            Lattice::from_columns(&[&[1.0, 2.0], &[2.0, 4.0]]),
            Err(LatticeError::Singular { .. })
        ));
        assert!(matches!(
            Lattice::new(DMatrix::identity(5, 5)),
            Err(LatticeError::Shape { .. })
        ));
    }

    #[test]
    fn json_round_trip_uses_columns() {
        let json = r#"{"dim":2,"basis":[[1.0,0.0],[-0.5,0.8660254037844386]]}"#;
        let l: Lattice = serde_json::from_str(json).unwrap();
        assert_eq!(l.basis()[(0, 1)], -0.5);
        let back = serde_json::to_string(&l).unwrap();
        assert_eq!(back, json);
    }
}
