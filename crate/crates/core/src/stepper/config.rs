use serde::{Deserialize, Serialize};

use super::StepError;

/// How diffusion is split from the rest of the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Splitting {
    /// Implicit constant-coefficient diffusion, explicit remainder, Picard
    /// iteration over the substep composition.
    #[default]
    Imex,
    /// Everything explicit, a single pass over the substeps.
    FullyExplicit,
}

/// Form of the transport terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AdvectionForm {
    /// `u . grad f`.
    #[default]
    Convective,
    /// `(u . grad f + div(u f)) / 2`.
    SkewSymmetric,
}

/// Temporal order of the committed step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TimeOrder {
    #[default]
    First,
    /// Two half steps combined with one full step by Richardson
    /// extrapolation.
    SecondExtrapolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub dt: f64,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub splitting: Splitting,
    pub dealias_on: bool,
    /// Dealias the cubic penalty with the 1/2 rule instead of the 2/3 rule.
    pub exact_cubic: bool,
    pub advection: AdvectionForm,
    pub time_order: TimeOrder,
    /// Keep only velocity modes with `|m_j| <= cutoff` after every step.
    pub velocity_cutoff: Option<i64>,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            dt: 1e-3,
            picard_tol: 1e-10,
            picard_max: 50,
            splitting: Splitting::Imex,
            dealias_on: true,
            exact_cubic: false,
            advection: AdvectionForm::Convective,
            time_order: TimeOrder::First,
            velocity_cutoff: None,
        }
    }
}

impl StepConfig {
    pub fn with_dt(dt: f64) -> Self {
        StepConfig {
            dt,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), StepError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(StepError::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.picard_tol > 0.0 && self.picard_tol < 1.0) {
            return Err(StepError::InvalidConfig(format!(
                "picard_tol must lie in (0, 1), got {}",
                self.picard_tol
            )));
        }
        if self.picard_max < 1 {
            return Err(StepError::InvalidConfig(
                "picard_max must be at least 1".into(),
            ));
        }
        if matches!(self.velocity_cutoff, Some(c) if c < 0) {
            return Err(StepError::InvalidConfig(
                "velocity cutoff must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}
