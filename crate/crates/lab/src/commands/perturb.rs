use std::f64::consts::PI;

use degenlab_core::galerkin::{eigenspace_samples, GalerkinOptions, MetricField};
use degenlab_core::linalg::pair_count;
use degenlab_core::perturb::{
    classify_from_samples, first_order_validation, function_relation_test, normalize_pointwise,
    random_direction, sah_cokernel_test_with, splitting_matrix, EigenspaceBasis, PerturbError,
    SahMode,
};
use degenlab_core::torus::{enumerate_spectrum, torus_degeneracy, Lattice};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::BasisKind;
use crate::record::{num, Table};
use crate::{ExperimentConfig, LabError, RunOutput};

/// Slope of the log-log deviation fit required in acceptance mode.
pub const MIN_SLOPE: f64 = 1.9;

fn perturb_error(e: PerturbError) -> LabError {
    match e {
        PerturbError::TooFewSteps(_) => LabError::Config(e.to_string()),
        e => LabError::computation(e),
    }
}

/// Splitting matrix, first-order validation, cokernel tests and degeneracy
/// classification for one eigenvalue cluster.
pub fn cmd_perturb(config: &ExperimentConfig) -> Result<RunOutput, LabError> {
    let c = &config.perturb;
    let seed = config.seed.unwrap_or(0);
    let metric = c
        .metric
        .clone()
        .unwrap_or_else(|| MetricField::flat(Lattice::integer(2).expect("identity basis")));
    let lattice = metric.lattice().clone();
    let is_flat = metric == MetricField::flat(lattice.clone());
    let lambda = -4.0 * PI * PI * c.norm_sq;
    let flat_eig = enumerate_spectrum(&lattice, c.norm_sq * (1.0 + 1e-9))
        .map_err(LabError::computation)?
        .into_iter()
        .find(|e| (e.norm_sq - c.norm_sq).abs() <= 1e-9 * c.norm_sq);
    let m = match (c.multiplicity, &flat_eig) {
        (Some(m), _) => m,
        (None, Some(e)) => e.multiplicity,
        (None, None) => {
            return Err(LabError::Config(format!(
                "norm_sq {} is not attained on the lattice; set perturb.multiplicity",
                c.norm_sq
            )))
        }
    };
    let max_freq = c.max_freq.unwrap_or((2.0 * c.norm_sq.sqrt() + 6.0).max(8.0));
    let galerkin = GalerkinOptions::new(max_freq);

    let basis = match c.basis {
        BasisKind::Exact => {
            let eig = flat_eig.as_ref().filter(|_| is_flat).ok_or_else(|| {
                LabError::Config("exact bases need a flat metric and an attained norm_sq".into())
            })?;
            if eig.multiplicity != m {
                return Err(LabError::Config(format!(
                    "flat multiplicity is {}, configured {m}",
                    eig.multiplicity
                )));
            }
            EigenspaceBasis::flat_torus(&lattice, eig)
        }
        BasisKind::Galerkin => {
            eigenspace_samples(&metric, &galerkin, lambda, m).map_err(LabError::computation)?
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = random_direction(&metric, false, c.direction_radius, &mut rng).map_err(LabError::computation)?;
    let h = normalize_pointwise(&metric, &raw).map_err(LabError::computation)?;

    let mut out = RunOutput::default();
    out.summarize("lambda", basis.lambda);
    out.summarize("multiplicity", m);
    out.report("direction", &h);

    let split = splitting_matrix(&metric, &basis, &h, None).map_err(perturb_error)?;
    out.report("splitting_matrix", &split);

    let validation =
        first_order_validation(&metric, &basis, &h, &c.t_grid, &galerkin).map_err(perturb_error)?;
    let mut vt = Table::new("validation", &["t", "deviation", "relative_deviation"]);
    for r in &validation.rows {
        vt.push(vec![num(r.t), num(r.deviation), num(r.deviation / basis.lambda.abs())]);
    }
    out.tables.push(vt);
    out.summarize("slope", validation.slope);
    let smallest = validation
        .rows
        .iter()
        .filter(|r| r.t > 0.0)
        .min_by(|a, b| a.t.total_cmp(&b.t));
    if let Some(r) = smallest {
        out.summarize("deviation_at_smallest_t", r.deviation);
    }
    out.assert("first_order_slope", validation.slope.is_some_and(|s| s >= MIN_SLOPE));
    out.report("validation", &validation);

    let directions = c.num_directions.unwrap_or((pair_count(m) + 10).max(60));
    let mut st = Table::new(
        "sah",
        &["mode", "num_directions", "cokernel_dim", "residual_max", "verdict"],
    );
    let mut sah = Vec::new();
    for (i, mode) in [SahMode::Full, SahMode::Conformal].into_iter().enumerate() {
        let report = sah_cokernel_test_with(
            &metric,
            &basis,
            mode,
            directions,
            seed.wrapping_add(1 + i as u64),
            c.rel_tol,
            None,
        )
        .map_err(perturb_error)?;
        st.push(vec![
            mode.as_str().into(),
            directions.to_string(),
            report.cokernel_dim.to_string(),
            num(report.residual_max),
            report.verdict.as_str().into(),
        ]);
        out.summarize(&format!("{}_cokernel_dim", mode.as_str()), report.cokernel_dim);
        out.summarize(&format!("{}_residual_max", mode.as_str()), report.residual_max);
        out.summarize(&format!("{}_verdict", mode.as_str()), report.verdict);
        sah.push(report);
    }
    out.tables.push(st);

    let classification = classify_from_samples(&metric, &basis, c.rel_tol).map_err(perturb_error)?;
    out.summarize("classification", classification.classification);
    out.summarize("k_c", classification.conformal_nullity);
    out.summarize("k_f", classification.full_nullity);
    out.assert("cokernel_matches_full_nullity", sah[0].cokernel_dim == classification.full_nullity);
    out.assert(
        "cokernel_matches_conformal_nullity",
        sah[1].cokernel_dim == classification.conformal_nullity,
    );

    let relations = function_relation_test(
        &metric,
        &basis,
        c.relation_trials,
        seed.wrapping_add(3),
        c.rel_tol,
    )
    .map_err(perturb_error)?;
    out.summarize("relation_residual", relations.relative_residual);
    out.assert("gradient_relations_imply_function_relations", relations.passed);

    if let (true, Some(eig)) = (is_flat, &flat_eig) {
        let exact = torus_degeneracy(eig).map_err(LabError::computation)?;
        let agrees = exact.full_nullity == classification.full_nullity
            && exact.conformal_nullity == classification.conformal_nullity
            && exact.classification == classification.classification;
        out.summarize("lattice_agreement", agrees);
        out.assert("lattice_agreement", agrees);
        out.report("lattice", &exact);
    }
    out.report("sah", &sah);
    out.report("classification", &classification);
    out.report("relations", &relations);
    Ok(out)
}
