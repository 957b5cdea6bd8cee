use std::sync::Arc;

use crate::coefficients::CoefficientModel;
use crate::spectral::ops::l2_norm_sq;
use crate::spectral::{DirectorField, ScalarField, VectorField};

use super::config::{Splitting, StepConfig, TimeOrder};
use super::forcing::{Forcing, ForcingTerms};
use super::pressure::pressure_solve;
use super::state::State;
use super::substeps::{
    jacobian_nodal, DirectorStage, TemperatureStage, VelocityNodal, VelocityStage,
};
use super::StepError;

/// A committed step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: State,
    /// Passes over the substep composition (summed over sub-steps when the
    /// step is extrapolated).
    pub iterations: usize,
    /// Relative velocity change of every pass,
    /// `||v_{j+1} - v_j|| / max(||v_{j+1}||, 1)`.
    pub residual_history: Vec<f64>,
}

/// Owns the model, the step configuration and an optional forcing.
#[derive(Clone)]
pub struct Stepper {
    model: CoefficientModel,
    config: StepConfig,
    forcing: Option<Arc<dyn Forcing>>,
}

impl std::fmt::Debug for Stepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stepper")
            .field("model", &self.model)
            .field("config", &self.config)
            .field("forced", &self.forcing.is_some())
            .finish()
    }
}

impl Stepper {
    pub fn new(model: CoefficientModel, config: StepConfig) -> Result<Self, StepError> {
        config.validate()?;
        Ok(Stepper {
            model,
            config,
            forcing: None,
        })
    }

    pub fn with_forcing(mut self, forcing: Arc<dyn Forcing>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn model(&self) -> &CoefficientModel {
        &self.model
    }

    pub fn config(&self) -> &StepConfig {
        &self.config
    }

    /// Advance by one `dt`.
    pub fn advance(&self, state: &State) -> Result<StepOutcome, StepError> {
        match self.config.time_order {
            TimeOrder::First => self.advance_first_order(state, &self.config),
            TimeOrder::SecondExtrapolated => self.advance_extrapolated(state),
        }
    }

    fn advance_first_order(
        &self,
        state: &State,
        config: &StepConfig,
    ) -> Result<StepOutcome, StepError> {
        let model = &self.model;
        let grid = state.grid();
        let t_next = state.t() + config.dt;
        let forcing = ForcingTerms::evaluate(self.forcing.as_deref(), grid, t_next);
        let director = DirectorStage::new(state.d(), config);
        let temperature = TemperatureStage::new(state.theta(), model, config);
        let velocity = VelocityStage::new(state.u(), config);
        let passes = match config.splitting {
            Splitting::Imex => config.picard_max,
            Splitting::FullyExplicit => 1,
        };

        let mut v = state.u().clone();
        let mut residual_history = Vec::new();
        for pass in 1..=passes {
            let v_nodal = VelocityNodal::new(&v);
            let d = director.apply(&v_nodal.values, forcing.director.as_ref());
            let grad_d = jacobian_nodal(&d);
            let theta = temperature.apply(&v_nodal, &grad_d, forcing.temperature.as_ref());
            let v_next = velocity.apply(
                &theta.to_physical(),
                &grad_d,
                model,
                forcing.velocity.as_ref(),
            );

            let change = l2_norm_sq(&v_next.sub(&v)).sqrt();
            let residual = change / l2_norm_sq(&v_next).sqrt().max(1.0);
            residual_history.push(residual);
            if !residual.is_finite() {
                break;
            }
            if residual <= config.picard_tol || config.splitting == Splitting::FullyExplicit {
                let next = State::from_fields(v_next, theta, d, ScalarField::zeros(grid), t_next);
                let p = pressure_solve(&next, model);
                return Ok(StepOutcome {
                    state: next.with_pressure(p),
                    iterations: pass,
                    residual_history,
                });
            }
            v = v_next;
        }
        Err(StepError::PicardFailure {
            iterations: residual_history.len(),
            residual_history,
        })
    }

    // Richardson extrapolation: 2 * (two half steps) - (one full step).
    fn advance_extrapolated(&self, state: &State) -> Result<StepOutcome, StepError> {
        let full = self.config;
        let half = StepConfig {
            dt: 0.5 * full.dt,
            ..full
        };
        let a = self.advance_first_order(state, &half)?;
        let b = self.advance_first_order(&a.state, &half)?;
        let c = self.advance_first_order(state, &full)?;
        let combine_vector = |x: &VectorField, y: &VectorField| {
            let mut out = x.clone();
            out.scale(2.0);
            out.axpy(-1.0, y);
            out
        };
        let u = combine_vector(b.state.u(), c.state.u());
        let d = DirectorField::new(combine_vector(b.state.d(), c.state.d()));
        let mut theta = b.state.theta().scaled(2.0);
        theta.axpy(-1.0, c.state.theta());
        let next = State::from_fields(
            u,
            theta,
            d,
            ScalarField::zeros(state.grid()),
            state.t() + full.dt,
        );
        let p = pressure_solve(&next, &self.model);
        let mut residual_history = a.residual_history;
        residual_history.extend(b.residual_history);
        residual_history.extend(c.residual_history);
        Ok(StepOutcome {
            state: next.with_pressure(p),
            iterations: a.iterations + b.iterations + c.iterations,
            residual_history,
        })
    }
}

/// One step of the fixed-point composition without forcing.
pub fn picard_advance(
    state: &State,
    model: &CoefficientModel,
    config: &StepConfig,
) -> Result<StepOutcome, StepError> {
    Stepper::new(*model, *config)?.advance(state)
}
