use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{LatticeError, TorusEigenvalue};
use crate::linalg::{exact_nullspace, exact_rank, ExactMatrix, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Nondegenerate,
    ConformallyDegenerate,
    Degenerate,
}

impl Classification {
    pub fn from_nullities(conformal: usize, full: usize) -> Self {
        if full >= 1 {
            Self::Degenerate
        } else if conformal >= 1 {
            Self::ConformallyDegenerate
        } else {
            Self::Nondegenerate
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Nondegenerate => "nondegenerate",
            Self::ConformallyDegenerate => "conformally_degenerate",
            Self::Degenerate => "degenerate",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A relation certificate: either coefficients `mu` over antipodal pairs of a
/// flat-torus eigenvalue, or a symmetric matrix `A` over an eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    PairCoefficients(Vec<f64>),
    Relation(SymMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub classification: Classification,
    pub conformal_nullity: usize,
    pub full_nullity: usize,
    /// Basis of the function-and-gradient relations.
    pub witnesses: Vec<Witness>,
    /// Basis of the function-only relations.
    pub conformal_witnesses: Vec<Witness>,
}

/// Degeneracy of a flat-torus eigenvalue from its lattice data alone.
///
/// With `kappa = D k` for the dual basis `D`, the relation
/// `sum mu_j kappa_j kappa_j^T = 0` holds iff `sum mu_j k_j k_j^T = 0`, so
/// both nullities are computed exactly over the integers. For n >= 3 these
/// count only relations diagonal in the cos/sin eigenbasis.
pub fn torus_degeneracy(eig: &TorusEigenvalue) -> Result<DegeneracyReport, LatticeError> {
    if !(eig.norm_sq > 0.0) || eig.coefficients.is_empty() {
        return Err(LatticeError::ZeroEigenvalue);
    }
    let reps = &eig.coefficients;
    let r = reps.len();
    let n = reps[0].len();

    let conformal_witnesses: Vec<Witness> = (1..r)
        .map(|j| {
            let mut mu = vec![0.0; r];
            mu[0] = 1.0;
            mu[j] = -1.0;
            Witness::PairCoefficients(mu)
        })
        .collect();

    let rows: Vec<Vec<i64>> = (0..n)
        .flat_map(|a| (a..n).map(move |b| (a, b)))
        .map(|(a, b)| reps.iter().map(|k| k[a] * k[b]).collect())
        .collect();
    let system = ExactMatrix::from_integer_rows(&rows);
    let rank = exact_rank(&system);
    let witnesses: Vec<Witness> = exact_nullspace(&system)
        .into_iter()
        .map(|v| {
            let mut mu: Vec<f64> = v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
            let max = mu.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let sign = mu.iter().find(|x| **x != 0.0).map_or(1.0, |x| x.signum());
            for x in &mut mu {
                *x *= sign / max;
            }
            Witness::PairCoefficients(mu)
        })
        .collect();
    debug_assert_eq!(witnesses.len(), r - rank);

    let conformal_nullity = r - 1;
    let full_nullity = r - rank;
    Ok(DegeneracyReport {
        classification: Classification::from_nullities(conformal_nullity, full_nullity),
        conformal_nullity,
        full_nullity,
        witnesses,
        conformal_witnesses,
    })
}

/// `diag(mu_1, mu_1, mu_2, mu_2, ..)` in the eigenbasis
/// `(cos 2 pi kappa_1.x, sin 2 pi kappa_1.x, cos 2 pi kappa_2.x, ..)`.
pub fn relation_to_eigenbasis_matrix(
    eig: &TorusEigenvalue,
    mu: &[f64],
) -> Result<SymMatrix, LatticeError> {
    if mu.len() != eig.representatives.len() {
        return Err(LatticeError::WitnessLength {
            expected: eig.representatives.len(),
            found: mu.len(),
        });
    }
    let diag: Vec<f64> = mu.iter().flat_map(|&m| [m, m]).collect();
    Ok(SymMatrix::from_diagonal(&diag))
}
