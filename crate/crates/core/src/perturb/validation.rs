use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::galerkin::{nearest_cluster, solve, GalerkinOptions, MetricField, PerturbationTensor};
use crate::linalg::sym_eig;

use super::{splitting_matrix, EigenspaceBasis, PerturbError, SplittingMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub t: f64,
    /// `lambda + t mu_i` for the eigenvalues `mu_i` of `M(h)`, ascending.
    pub predicted: Vec<f64>,
    /// Galerkin cluster of `g + t h`, ascending.
    pub actual: Vec<f64>,
    /// `max_i |predicted_i - actual_i|`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub lambda: f64,
    pub m: usize,
    pub splitting: SplittingMatrix,
    /// Eigenvalues of `M(h)`, ascending.
    pub splitting_eigenvalues: Vec<f64>,
    pub rows: Vec<ValidationRow>,
    /// Least-squares slope of `log deviation` against `log t` over rows with
    /// both positive; `None` with fewer than two such rows.
    pub slope: Option<f64>,
}

/// Compares the first-order model `lambda + t sigma(M(h))` with the
/// recomputed cluster of `g + t h` at each `t`, matching sorted values.
///
/// The cluster at each `t` is the `m` Galerkin eigenvalues nearest
/// `lambda`; it must stay separated from the rest of the spectrum by more
/// than twice its width.
pub fn first_order_validation(
    metric: &MetricField,
    basis: &EigenspaceBasis,
    h: &PerturbationTensor,
    t_values: &[f64],
    galerkin: &GalerkinOptions,
) -> Result<ValidationReport, PerturbError> {
    if t_values.iter().filter(|t| **t > 0.0).count() < 2 || t_values.iter().any(|t| !(*t >= 0.0)) {
        return Err(PerturbError::TooFewSteps(t_values.to_vec()));
    }
    let lambda = basis.lambda;
    let m = basis.m();
    let splitting = splitting_matrix(metric, basis, h, None)?;
    let mu = sym_eig(&splitting.entries).values;

    let rows: Vec<ValidationRow> = t_values
        .par_iter()
        .map(|&t| {
            let eig = solve(&metric.perturbed(t, h), galerkin)?;
            let cluster = nearest_cluster(&eig.lambdas, lambda, m).ok_or(
                PerturbError::ClusterMerged {
                    t,
                    lambda,
                    m,
                    width: f64::NAN,
                    gap: f64::NAN,
                },
            )?;
            if !(cluster.gap > 2.0 * cluster.width) {
                return Err(PerturbError::ClusterMerged {
                    t,
                    lambda,
                    m,
                    width: cluster.width,
                    gap: cluster.gap,
                });
            }
            let predicted: Vec<f64> = mu.iter().map(|x| lambda + t * x).collect();
            let deviation = predicted
                .iter()
                .zip(&cluster.values)
                .map(|(p, a)| (p - a).abs())
                .fold(0.0, f64::max);
            Ok(ValidationRow {
                t,
                predicted,
                actual: cluster.values,
                deviation,
            })
        })
        .collect::<Result<_, PerturbError>>()?;

    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.t > 0.0 && r.deviation > 0.0)
        .map(|r| (r.t.ln(), r.deviation.ln()))
        .collect();
    Ok(ValidationReport {
        lambda,
        m,
        splitting,
        splitting_eigenvalues: mu,
        rows,
        slope: fit_slope(&points),
    })
}

fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galerkin::TrigField;
    use crate::torus::{enumerate_spectrum, Lattice};

    fn unit_shell() -> (MetricField, EigenspaceBasis) {
        let lattice = Lattice::integer(2).unwrap();
        let eig = enumerate_spectrum(&lattice, 1.0).unwrap().remove(0);
        (MetricField::flat(lattice.clone()), EigenspaceBasis::flat_torus(&lattice, &eig))
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|t: &f64| (t.ln(), (3.0 * t * t).ln()))
            .collect();
        assert!((fit_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(fit_slope(&pts[..1]), None);
    }

    #[test]
    fn scaling_direction_matches_closed_form() {
        let (metric, basis) = unit_shell();
        let c = 0.5;
        let h = PerturbationTensor::metric_itself(&metric).scale(c);
        let ts = [0.0, 1e-2, 1e-3];
        let report =
            first_order_validation(&metric, &basis, &h, &ts, &GalerkinOptions::new(2.5)).unwrap();
        let lam = basis.lambda.abs();
        assert!(report.rows[0].deviation < 1e-12 * lam);
        for row in &report.rows[1..] {
            let t = row.t;
            let expected = lam * (1.0 / (1.0 + t * c) - (1.0 - t * c));
            assert!((row.deviation - expected).abs() < 1e-9 * lam, "{t}");
        }
        assert!((report.slope.unwrap() - 2.0).abs() < 0.01);
    }

    #[test]
    fn conformal_bump_is_second_order() {
        let (metric, basis) = unit_shell();
        let h = PerturbationTensor::conformal(&metric, &TrigField::cos(&[1, 1], 1.0).add(&TrigField::sin(&[2, 0], 0.5)));
        let ts = [10f64.powf(-1.5), 1e-2, 10f64.powf(-2.5), 1e-3];
        let report =
            first_order_validation(&metric, &basis, &h, &ts, &GalerkinOptions::new(8.0)).unwrap();
        assert!(report.slope.unwrap() >= 1.9, "slope {:?}", report.slope);
    }

    #[test]
    fn needs_two_positive_steps() {
        let (metric, basis) = unit_shell();
        let h = PerturbationTensor::metric_itself(&metric);
        let err = first_order_validation(&metric, &basis, &h, &[0.0, 1e-2], &GalerkinOptions::new(2.0))
            .unwrap_err();
        assert!(matches!(err, PerturbError::TooFewSteps(_)));
    }
}
