use std::sync::Arc;

use crate::spectral::{Grid, ScalarField, VectorField};

/// Body forces added to the right-hand sides, evaluated at the end of the
/// step. Used to inject manufactured-solution residuals.
///
/// Returning `None` means no forcing for that equation.
pub trait Forcing: Send + Sync {
    fn velocity(&self, grid: &Arc<Grid>, t: f64) -> Option<VectorField>;
    fn temperature(&self, grid: &Arc<Grid>, t: f64) -> Option<ScalarField>;
    fn director(&self, grid: &Arc<Grid>, t: f64) -> Option<VectorField>;
}

/// All three forcings at one time.
#[derive(Debug, Clone, Default)]
pub(crate) struct ForcingTerms {
    pub velocity: Option<VectorField>,
    pub temperature: Option<ScalarField>,
    pub director: Option<VectorField>,
}

impl ForcingTerms {
    pub fn evaluate(forcing: Option<&dyn Forcing>, grid: &Arc<Grid>, t: f64) -> Self {
        match forcing {
            None => ForcingTerms::default(),
            Some(f) => ForcingTerms {
                velocity: f.velocity(grid, t),
                temperature: f.temperature(grid, t),
                director: f.director(grid, t),
            },
        }
    }
}
