//! Run records and their on-disk layout: `config.json`, `summary.json`
//! (deterministic), `meta.json` (timestamps) and `tables/*.csv`.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::{ExperimentConfig, LabError};

/// A CSV table; cells are preformatted so output is locale-free.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// What a command produces before it is wrapped into a [`RunRecord`].
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    /// Per-operation reports, keyed by operation.
    pub reports: serde_json::Map<String, Value>,
    /// Verdicts and headline numbers, each also present in `reports`.
    pub summary: serde_json::Map<String, Value>,
    pub tables: Vec<Table>,
    /// Named checks enforced in acceptance mode.
    pub assertions: Vec<(String, bool)>,
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn report(&mut self, key: &str, value: impl Serialize) {
        self.reports.insert(key.to_string(), to_value(value));
    }

    pub fn summarize(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.to_string(), to_value(value));
    }

    pub fn assert(&mut self, name: &str, ok: bool) {
        self.assertions.push((name.to_string(), ok));
    }

    pub fn failed_assertions(&self) -> Vec<&str> {
        self.assertions
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub command: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub started: String,
    pub finished: String,
    pub output: RunOutput,
}

impl RunRecord {
    /// The deterministic part of the record.
    pub fn summary_json(&self) -> Value {
        json!({
            "command": self.command,
            "summary": Value::Object(self.output.summary.clone()),
            "reports": Value::Object(self.output.reports.clone()),
        })
    }

    pub fn meta_json(&self) -> Value {
        json!({
            "command": self.command,
            "version": self.version,
            "started": self.started,
            "finished": self.finished,
            "threads": rayon::current_num_threads(),
            "warnings": self.output.warnings,
        })
    }

    /// Writes the run directory and returns the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, LabError> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: &str, v: &Value| -> Result<(), LabError> {
            let path = dir.join(name);
            let text = serde_json::to_string_pretty(v).map_err(LabError::computation)?;
            std::fs::write(&path, text + "\n")?;
            written.push(path);
            Ok(())
        };
        put("config.json", &to_value(&self.config))?;
        put("summary.json", &self.summary_json())?;
        put("meta.json", &self.meta_json())?;
        if !self.output.tables.is_empty() {
            let tables = dir.join("tables");
            std::fs::create_dir_all(&tables)?;
            for t in &self.output.tables {
                let path = tables.join(format!("{}.csv", t.name));
                write_csv(&path, t)?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

fn write_csv(path: &Path, t: &Table) -> Result<(), LabError> {
    let mut w = csv::Writer::from_path(path).map_err(LabError::computation)?;
    w.write_record(&t.header).map_err(LabError::computation)?;
    for r in &t.rows {
        w.write_record(r).map_err(LabError::computation)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip decimal form with `.` as separator.
pub fn num(x: f64) -> String {
    format!("{x}")
}
