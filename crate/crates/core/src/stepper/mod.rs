//! Time stepping: director, temperature and velocity substeps composed into
//! a Picard fixed-point iteration, followed by a pressure recovery.

mod config;
mod forcing;
mod galerkin;
mod picard;
mod pressure;
mod state;
mod substeps;

use thiserror::Error;

use crate::spectral::FieldError;

pub use config::{AdvectionForm, Splitting, StepConfig, TimeOrder};
pub use forcing::Forcing;
pub use galerkin::{
    galerkin_ode_coefficients, low_mode_basis, project_onto, synthesize, GalerkinSystem,
};
pub use picard::{picard_advance, StepOutcome, Stepper};
pub use pressure::pressure_solve;
pub use state::{State, STATE_COMPONENTS};
pub use substeps::{director_substep, temperature_substep, velocity_substep};

#[derive(Debug, Error)]
pub enum StepError {
    #[error("invalid step configuration: {0}")]
    InvalidConfig(String),
    #[error("Picard iteration did not converge after {iterations} iterations")]
    PicardFailure {
        iterations: usize,
        residual_history: Vec<f64>,
    },
    #[error("Galerkin basis is not orthonormal: pairing ({i}, {j}) = {value}")]
    NonOrthonormalBasis { i: usize, j: usize, value: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}
