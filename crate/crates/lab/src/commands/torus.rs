use degenlab_core::torus::{enumerate_spectrum, torus_degeneracy, LatticeError};
use serde::Serialize;

use crate::record::{num, Table};
use crate::{ExperimentConfig, LabError, RunOutput};

#[derive(Debug, Serialize)]
struct Row {
    norm_sq: f64,
    lambda: f64,
    multiplicity: usize,
    k_c: usize,
    k_f: usize,
    classification: String,
    exact: bool,
    witnesses: Vec<degenlab_core::torus::Witness>,
}

/// Classifies every flat-torus eigenvalue up to `torus.norm_sq_max`.
pub fn cmd_torus(config: &ExperimentConfig) -> Result<RunOutput, LabError> {
    let lattice = &config.torus.lattice;
    let n = lattice.dim();
    let spectrum = match enumerate_spectrum(lattice, config.torus.norm_sq_max) {
        Ok(s) => s,
        Err(e @ LatticeError::InvalidBound(_)) => return Err(LabError::Config(e.to_string())),
        Err(e) => return Err(LabError::computation(e)),
    };
    let mut out = RunOutput::default();
    let mut table = Table::new(
        "torus_spectrum",
        &["norm_sq", "lambda", "multiplicity", "k_c", "k_f", "classification"],
    );
    let mut rows = Vec::new();
    let mut low_ok = true;
    let mut high_ok = true;
    for eig in &spectrum {
        let r = torus_degeneracy(eig).map_err(LabError::computation)?;
        if eig.multiplicity < 7 && r.full_nullity != 0 {
            low_ok = false;
        }
        if eig.multiplicity >= n * (n + 1) + 2 && r.full_nullity == 0 {
            high_ok = false;
        }
        table.push(vec![
            num(eig.norm_sq),
            num(eig.lambda),
            eig.multiplicity.to_string(),
            r.conformal_nullity.to_string(),
            r.full_nullity.to_string(),
            r.classification.to_string(),
        ]);
        rows.push(Row {
            norm_sq: eig.norm_sq,
            lambda: eig.lambda,
            multiplicity: eig.multiplicity,
            k_c: r.conformal_nullity,
            k_f: r.full_nullity,
            classification: r.classification.to_string(),
            exact: eig.exact,
            witnesses: r.witnesses,
        });
    }
    let count = |c: &str| rows.iter().filter(|r| r.classification == c).count();
    out.summarize("eigenvalues", rows.len());
    out.summarize("nondegenerate", count("nondegenerate"));
    out.summarize("conformally_degenerate", count("conformally_degenerate"));
    out.summarize("degenerate", count("degenerate"));
    out.summarize(
        "degenerate_norm_sq",
        rows.iter()
            .filter(|r| r.classification == "degenerate")
            .map(|r| r.norm_sq)
            .collect::<Vec<_>>(),
    );
    out.assert("multiplicity_below_7_has_no_full_relation", low_ok);
    out.assert("multiplicity_at_least_n(n+1)+2_is_degenerate", high_ok);
    out.summarize("checks_passed", low_ok && high_ok);
    out.report("spectrum", &rows);
    out.tables.push(table);
    Ok(out)
}
