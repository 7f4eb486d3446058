//! One module per subcommand; each turns a validated configuration into a
//! [`RunOutput`].

mod perturb;
mod sphere;
mod torus;

use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::{noncross, plotdata, ExperimentConfig, LabError, RunOutput, RunRecord};

pub use perturb::cmd_perturb;
pub use sphere::cmd_sphere;
pub use torus::cmd_torus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Torus,
    Sphere,
    Perturb,
    Noncross,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Torus => "torus",
            Self::Sphere => "sphere",
            Self::Perturb => "perturb",
            Self::Noncross => "noncross",
        }
    }
}

pub fn dispatch(command: Command, config: &ExperimentConfig) -> Result<RunOutput, LabError> {
    match command {
        Command::Torus => cmd_torus(config),
        Command::Sphere => cmd_sphere(config),
        Command::Perturb => cmd_perturb(config),
        Command::Noncross => noncross::cmd_noncross(config),
    }
}

/// Runs `command`, writes the run directory and its plot tables, and in
/// acceptance mode turns failed checks into [`LabError::Assertion`] after
/// everything has been written.
pub fn execute(
    command: Command,
    config: &ExperimentConfig,
    out_dir: &Path,
    acceptance: bool,
) -> Result<RunRecord, LabError> {
    let started = chrono::Utc::now().to_rfc3339();
    let output = dispatch(command, config)?;
    let record = RunRecord {
        command: command.as_str().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        started,
        finished: chrono::Utc::now().to_rfc3339(),
        output,
    };
    record.write(out_dir)?;
    plotdata::emit_plot_data(&record, out_dir)?;
    if acceptance {
        let failed = record.output.failed_assertions();
        if !failed.is_empty() {
            return Err(LabError::Assertion(failed.join(", ")));
        }
    }
    Ok(record)
}
