//! Configuration, initial data, run orchestration and persistence.

mod config;
mod initial;
mod runner;

use std::path::PathBuf;

use thiserror::Error;

use crate::diagnostics::DiagnosticsError;
use crate::experiments::ExperimentError;
use crate::spectral::FieldError;
use crate::stepper::StepError;

pub use config::{
    apply_override, load_config, output_path, parse_config, GridConfig, InitialDataConfig,
    ModelConfig, OutputConfig, PerturbationSpec, RunConfig, SteppingConfig, OUTPUT_ROOT_ENV,
};
pub use initial::{load_snapshot, make_initial_data};
pub use runner::{resume, run, save_snapshot, snapshot_name, RunSummary, Simulation};

/// Process exit codes.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const PICARD: i32 = 10;
    pub const PRINCIPLE: i32 = 11;
    pub const NON_FINITE: i32 = 12;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("{message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("Picard iteration failed at step {step} after {iterations} iterations")]
    Picard {
        step: u64,
        iterations: usize,
        residual_history: Vec<f64>,
    },
    #[error("principle violation at step {step}: {message}")]
    Principle { step: u64, message: String },
    #[error("non-finite value detected at step {step}")]
    NonFinite { step: u64 },
    #[error("diagnostics failed at step {step}: {source}")]
    Diagnostics { step: u64, source: DiagnosticsError },
    #[error(transparent)]
    Step(StepError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

impl From<FieldError> for RunError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::InvalidGrid(message) => ConfigError::Invalid {
                key: "grid".into(),
                message,
            }
            .into(),
            other => RunError::Io(other.to_string()),
        }
    }
}

impl From<StepError> for RunError {
    fn from(e: StepError) -> Self {
        match e {
            StepError::InvalidConfig(message) => ConfigError::Invalid {
                key: "stepping".into(),
                message,
            }
            .into(),
            other => RunError::Step(other),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => exit_code::CONFIG,
            RunError::Picard { .. } => exit_code::PICARD,
            RunError::Principle { .. } => exit_code::PRINCIPLE,
            RunError::NonFinite { .. } => exit_code::NON_FINITE,
            RunError::Experiment(ExperimentError::Config(_)) => exit_code::CONFIG,
            _ => exit_code::IO,
        }
    }

    /// Machine-readable description for stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({ "error": self.to_string(), "exit_code": self.exit_code() });
        match self {
            RunError::Picard {
                step,
                iterations,
                residual_history,
            } => {
                v["kind"] = "picard_failure".into();
                v["step"] = (*step).into();
                v["iterations"] = (*iterations).into();
                v["residual_history"] = residual_history
                    .iter()
                    .map(|r| serde_json::Value::from(*r))
                    .collect();
            }
            RunError::NonFinite { step } | RunError::Principle { step, .. } => {
                v["step"] = (*step).into();
            }
            RunError::Config(ConfigError::Invalid { key, .. }) => v["key"] = key.clone().into(),
            _ => {}
        }
        v
    }
}
