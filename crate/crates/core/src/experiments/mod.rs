//! Verification experiments: manufactured-solution convergence, continuous
//! dependence on data, and Galerkin mode refinement.

mod mms;
mod refinement;
mod uniqueness;

use thiserror::Error;

use crate::diagnostics::DiagnosticsError;
use crate::spectral::FieldError;
use crate::stepper::StepError;

pub use mms::{
    manufactured_convergence, manufactured_run, ConvergenceTable, ErrorRow, Manufactured,
    ManufacturedForcing, MmsConfig,
};
pub use refinement::{gaussian_velocity, mode_refinement_study, RefinementConfig, RefinementTable};
pub use uniqueness::{
    difference_norm_sq, smooth_perturbation, uniqueness_experiment, MeanOnlyReport,
    StabilityReport, UniquenessConfig,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("experiment configuration: {0}")]
    Config(String),
    #[error("manufactured temperature dips {margin} below the floor {floor}")]
    ManufacturedBelowFloor { margin: f64, floor: f64 },
    #[error("cutoff {cutoff} exceeds the largest resolved mode {max}")]
    CutoffAboveNyquist { cutoff: i64, max: i64 },
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Field(#[from] FieldError),
}
