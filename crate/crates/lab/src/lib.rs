//! Experiment runner around `degenlab-core`: configuration, per-command
//! orchestration, run directories and plot tables.

pub mod commands;
pub mod config;
pub mod noncross;
pub mod plotdata;
pub mod record;

use thiserror::Error;

pub use config::ExperimentConfig;
pub use record::{RunOutput, RunRecord};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const COMPUTATION: i32 = 3;
    pub const ASSERTION: i32 = 4;
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Computation(String),
    #[error("acceptance assertion failed: {0}")]
    Assertion(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => exit::CONFIG,
            Self::Assertion(_) => exit::ASSERTION,
            Self::Computation(_) | Self::Io(_) => exit::COMPUTATION,
        }
    }

    pub fn computation(e: impl std::fmt::Display) -> Self {
        Self::Computation(e.to_string())
    }
}
