//! Whitespace-separated `.dat` files for gnuplot-style plotting, derived
//! from the deterministic `summary.json` of a run.
//!
//! * perturb: `plot/deviation.dat` with columns `t deviation`.
//! * noncross: `plot/eigenvalue_NN.dat` with column `s` and one column per run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::{LabError, RunRecord};

pub fn emit_plot_data(record: &RunRecord, dir: &Path) -> Result<Vec<PathBuf>, LabError> {
    emit_from_summary(&record.summary_json(), dir)
}

/// Regenerates the plot files of an existing run directory.
pub fn emit_for_run_dir(dir: &Path) -> Result<Vec<PathBuf>, LabError> {
    let path = dir.join("summary.json");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
    let summary: Value =
        serde_json::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
    emit_from_summary(&summary, dir)
}

pub fn emit_from_summary(summary: &Value, dir: &Path) -> Result<Vec<PathBuf>, LabError> {
    let files = match summary["command"].as_str() {
        Some("perturb") => deviation_file(&summary["reports"]),
        Some("noncross") => eigenvalue_files(&summary["reports"]),
        _ => Vec::new(),
    };
    if files.is_empty() {
        return Ok(Vec::new());
    }
    let plot = dir.join("plot");
    std::fs::create_dir_all(&plot)?;
    let mut written = Vec::new();
    for (name, body) in files {
        let path = plot.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .map(|a| a.iter().filter_map(Value::as_f64).collect())
        .unwrap_or_default()
}

fn deviation_file(reports: &Value) -> Vec<(String, String)> {
    let Some(rows) = reports["validation"]["rows"].as_array() else {
        return Vec::new();
    };
    let mut body = String::from("# t deviation\n");
    for r in rows {
        if let (Some(t), Some(d)) = (r["t"].as_f64(), r["deviation"].as_f64()) {
            writeln!(body, "{t:e} {d:e}").expect("string write");
        }
    }
    vec![("deviation.dat".into(), body)]
}

fn eigenvalue_files(reports: &Value) -> Vec<(String, String)> {
    let Some(runs) = reports["runs"].as_array().filter(|r| !r.is_empty()) else {
        return Vec::new();
    };
    let samples = floats(&runs[0]["samples"]);
    let count = runs[0]["eigenvalues"][0].as_array().map_or(0, Vec::len);
    let seeds: Vec<String> = runs.iter().map(|r| r["seed"].to_string()).collect();
    (0..count)
        .map(|i| {
            let mut body = format!("# s {}\n", seeds.iter().map(|s| format!("seed_{s}")).collect::<Vec<_>>().join(" "));
            for (j, s) in samples.iter().enumerate() {
                let _ = write!(body, "{s:e}");
                for r in runs {
                    let lam = r["eigenvalues"][j][i].as_f64().unwrap_or(f64::NAN);
                    let _ = write!(body, " {lam:e}");
                }
                body.push('\n');
            }
            (format!("eigenvalue_{i:02}.dat"), body)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn unknown_commands_write_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let written = emit_from_summary(&json!({"command": "torus", "reports": {}}), dir.path()).unwrap();
        assert!(written.is_empty());
        assert!(!dir.path().join("plot").exists());
    }

    #[test]
    fn noncross_columns_follow_runs() {
        let dir = tempfile::tempdir().unwrap();
        let summary = json!({
            "command": "noncross",
            "reports": {"runs": [
                {"seed": 1, "samples": [0.0, 1.0], "eigenvalues": [[0.0, -1.0], [0.0, -2.0]]},
                {"seed": 2, "samples": [0.0, 1.0], "eigenvalues": [[0.0, -3.0], [0.0, -4.0]]}
            ]}
        });
        let written = emit_from_summary(&summary, dir.path()).unwrap();
        assert_eq!(written.len(), 2);
        let text = std::fs::read_to_string(dir.path().join("plot/eigenvalue_01.dat")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# s seed_1 seed_2");
        assert_eq!(lines[2], "1e0 -2e0 -4e0");
    }
}
