//! Runtime versions of the a priori estimates: the energy functional and
//! its dissipation, maximum principles, higher-order functionals and the
//! blow-up monitor.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficients::{CoefficientError, CoefficientModel};
use crate::spectral::ops::{
    dealias_in_place, derivative, divergence_residual, laplacian, quadrature, sobolev_norm,
    weighted_norm_sq,
};
use crate::spectral::{DealiasRule, ScalarField, VectorField};
use crate::stepper::State;

/// Per-step tolerance of the maximum principles.
pub const PRINCIPLE_TOL: f64 = 1e-8;
/// Tolerance on the worst violation accumulated over a run.
pub const CUMULATIVE_TOL: f64 = 1e-6;
/// Largest admitted spectral divergence of the velocity.
pub const DIV_TOL: f64 = 1e-10;
/// Fewest samples accepted by [`blowup_monitor`].
pub const BLOWUP_MIN_SAMPLES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("temperature {theta_min} is below the floor {floor} beyond tolerance")]
    BelowFloor { theta_min: f64, floor: f64 },
    #[error("blow-up monitor needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("time series is malformed: {0}")]
    BadSeries(String),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
}

/// Spatial integrals of the energy density, split by origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParts {
    /// `(K+1)/2 |u|^2`.
    pub kinetic: f64,
    /// `(K+1) theta - Lambda(theta)`.
    pub thermal: f64,
    /// `|grad d|^2 / 2`.
    pub elastic: f64,
    /// `(|d|^2 - 1)^2 / 4`.
    pub penalty: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.thermal + self.elastic + self.penalty
    }
}

// Lambda is only defined above the floor. Temperatures that undershoot it by
// less than the principle tolerance use the tangent line at the floor.
fn capital_lambda_tolerant(model: &CoefficientModel, theta: f64) -> Result<f64, DiagnosticsError> {
    let floor = model.theta_floor;
    if theta >= floor {
        return Ok(model.capital_lambda(theta)?);
    }
    if theta >= floor - PRINCIPLE_TOL {
        return Ok((theta - floor) / model.lambda(floor));
    }
    Err(DiagnosticsError::BelowFloor {
        theta_min: theta,
        floor,
    })
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn director_gradient_sq(state: &State) -> Vec<f64> {
    let n = state.grid().len();
    let mut out = vec![0.0; n];
    for comp in state.d().components() {
        for axis in 0..3 {
            let g = derivative(comp, axis).to_physical();
            out.iter_mut().zip(&g).for_each(|(o, v)| *o += v * v);
        }
    }
    out
}

pub fn energy_parts(
    state: &State,
    model: &CoefficientModel,
    k: f64,
) -> Result<EnergyParts, DiagnosticsError> {
    let grid = state.grid();
    let n = grid.len();
    let theta = state.nodal(3);
    let theta_min = min_of(theta);
    if theta_min < model.theta_floor - PRINCIPLE_TOL || theta_min.is_nan() {
        return Err(DiagnosticsError::BelowFloor {
            theta_min,
            floor: model.theta_floor,
        });
    }
    let (u, d) = (
        [state.nodal(0), state.nodal(1), state.nodal(2)],
        [state.nodal(4), state.nodal(5), state.nodal(6)],
    );
    let mut kinetic = vec![0.0; n];
    let mut thermal = vec![0.0; n];
    let mut penalty = vec![0.0; n];
    for x in 0..n {
        kinetic[x] = 0.5 * (k + 1.0) * (u[0][x] * u[0][x] + u[1][x] * u[1][x] + u[2][x] * u[2][x]);
        thermal[x] = (k + 1.0) * theta[x] - capital_lambda_tolerant(model, theta[x])?;
        let w = d[0][x] * d[0][x] + d[1][x] * d[1][x] + d[2][x] * d[2][x] - 1.0;
        penalty[x] = 0.25 * w * w;
    }
    let elastic: Vec<f64> = director_gradient_sq(state)
        .into_iter()
        .map(|g| 0.5 * g)
        .collect();
    Ok(EnergyParts {
        kinetic: quadrature(grid, &kinetic),
        thermal: quadrature(grid, &thermal),
        elastic: quadrature(grid, &elastic),
        penalty: quadrature(grid, &penalty),
    })
}

/// Integral of `(K+1)/2 |u|^2 + (K+1) theta - Lambda(theta) + W(d)/4 + |grad d|^2/2`.
pub fn total_energy(
    state: &State,
    model: &CoefficientModel,
    k: f64,
) -> Result<f64, DiagnosticsError> {
    energy_parts(state, model, k).map(|p| p.total())
}

/// `Delta d - (|d|^2 - 1) d` on the grid, one vector per component.
fn director_tension(state: &State) -> [Vec<f64>; 3] {
    let d = [state.nodal(4), state.nodal(5), state.nodal(6)];
    [0, 1, 2].map(|i| {
        let lap = laplacian(state.d().component(i)).to_physical();
        lap.iter()
            .enumerate()
            .map(|(x, l)| {
                let w = d[0][x] * d[0][x] + d[1][x] * d[1][x] + d[2][x] * d[2][x] - 1.0;
                l - w * d[i][x]
            })
            .collect()
    })
}

/// Integral of
/// `lambda'/lambda^2 |grad theta|^2 + mu/(2 lambda) |grad u + grad u^T|^2 + |Delta d - (|d|^2-1) d|^2`.
pub fn dissipation(state: &State, model: &CoefficientModel) -> Result<f64, DiagnosticsError> {
    let grid = state.grid();
    let n = grid.len();
    let theta = state.nodal(3);
    let theta_min = min_of(theta);
    if theta_min < model.theta_floor - PRINCIPLE_TOL || theta_min.is_nan() {
        return Err(DiagnosticsError::BelowFloor {
            theta_min,
            floor: model.theta_floor,
        });
    }
    let grad_theta = [0, 1, 2].map(|j| derivative(state.theta(), j).to_physical());
    let jac =
        [0, 1, 2].map(|i| [0, 1, 2].map(|j| derivative(state.u().component(i), j).to_physical()));
    let tension = director_tension(state);
    let mut density = vec![0.0; n];
    for x in 0..n {
        let (mu, lambda, lambda_d1) = (
            model.mu(theta[x]),
            model.lambda(theta[x]),
            model.lambda_d1(theta[x]),
        );
        let heat = grad_theta.iter().map(|g| g[x] * g[x]).sum::<f64>();
        let mut strain = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let e = jac[i][j][x] + jac[j][i][x];
                strain += e * e;
            }
        }
        let relax = tension.iter().map(|t| t[x] * t[x]).sum::<f64>();
        density[x] = lambda_d1 / (lambda * lambda) * heat + mu / (2.0 * lambda) * strain + relax;
    }
    Ok(quadrature(grid, &density))
}

/// Discrete energy-law defect `(E_next - E_prev)/dt + (D_prev + D_next)/2`.
pub fn energy_balance_residual(prev: &DiagnosticsRecord, next: &DiagnosticsRecord, dt: f64) -> f64 {
    (next.total_energy - prev.total_energy) / dt + 0.5 * (prev.dissipation + next.dissipation)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipleReport {
    pub d_ok: bool,
    pub theta_ok: bool,
    pub div_ok: bool,
    pub d_max: f64,
    pub theta_min: f64,
    /// `max |d| - 1`; nonpositive when the principle holds exactly.
    pub d_excess: f64,
    /// `min theta - theta_floor`; nonnegative when the principle holds exactly.
    pub theta_margin: f64,
    pub div_residual: f64,
}

pub fn principle_checks(state: &State, theta_floor: f64, tol: f64) -> PrincipleReport {
    let d_max = state
        .director_magnitude()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let theta_min = min_of(state.nodal(3));
    let div = divergence_residual(state.u());
    PrincipleReport {
        d_ok: d_max <= 1.0 + tol,
        theta_ok: theta_min >= theta_floor - tol,
        div_ok: div < DIV_TOL,
        d_max,
        theta_min,
        d_excess: d_max - 1.0,
        theta_margin: theta_min - theta_floor,
        div_residual: div,
    }
}

/// Worst principle violations seen over a run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PrincipleTracker {
    pub worst_d_excess: f64,
    pub worst_theta_deficit: f64,
    pub worst_div_residual: f64,
}

impl PrincipleTracker {
    pub fn observe(&mut self, report: &PrincipleReport) {
        self.worst_d_excess = self.worst_d_excess.max(report.d_excess);
        self.worst_theta_deficit = self.worst_theta_deficit.max(-report.theta_margin);
        self.worst_div_residual = self.worst_div_residual.max(report.div_residual);
    }

    /// Whether a violation exceeds the cumulative budget.
    pub fn exceeded(&self, tol: f64) -> bool {
        self.worst_d_excess > tol
            || self.worst_theta_deficit > tol
            || self.worst_div_residual >= DIV_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighOrder {
    pub f: f64,
    pub h: f64,
}

/// `F = ||grad u||_{H^1}^2 + ||grad theta||_{H^1}^2 + ||Delta d||_{H^1}^2 + 1` and
/// `H = ||Delta u||_{H^1}^2 + ||Delta theta||_{H^1}^2 + ||grad Delta d||^2 + ||Delta d_t||^2`.
///
/// `d_rate` is the time derivative of the director; the last term of `H` is
/// dropped when it is `None`.
pub fn high_order_functionals(state: &State, d_rate: Option<&VectorField>) -> HighOrder {
    let grad_h1 = |k2: f64| k2 + k2 * k2;
    let lap_h1 = |k2: f64| k2 * k2 + k2 * k2 * k2;
    let f = weighted_norm_sq(state.u(), grad_h1)
        + weighted_norm_sq(state.theta(), grad_h1)
        + weighted_norm_sq(state.d(), lap_h1)
        + 1.0;
    let rate = d_rate.map_or(0.0, |r| weighted_norm_sq(r, |k2| k2 * k2));
    let h = weighted_norm_sq(state.u(), lap_h1)
        + weighted_norm_sq(state.theta(), lap_h1)
        + weighted_norm_sq(state.d(), |k2| k2 * k2 * k2)
        + rate;
    HighOrder { f, h }
}

/// `(d_next - d_prev) / (t_next - t_prev)`.
pub fn director_rate_increment(prev: &State, next: &State) -> VectorField {
    let mut rate = next.d().sub(prev.d()).into_vector();
    rate.scale(1.0 / (next.t() - prev.t()));
    rate
}

/// `Delta d - u . grad d - (|d|^2 - 1) d`, products dealiased.
pub fn director_rate_rhs(state: &State) -> VectorField {
    let grid = state.grid().clone();
    let u = [state.nodal(0), state.nodal(1), state.nodal(2)];
    let d = [state.nodal(4), state.nodal(5), state.nodal(6)];
    let comps = [0, 1, 2].map(|i| {
        let comp = state.d().component(i);
        let grad = [0, 1, 2].map(|j| derivative(comp, j).to_physical());
        let values: Vec<f64> = (0..grid.len())
            .map(|x| {
                let w = d[0][x] * d[0][x] + d[1][x] * d[1][x] + d[2][x] * d[2][x] - 1.0;
                u[0][x] * grad[0][x] + u[1][x] * grad[1][x] + u[2][x] * grad[2][x] + w * d[i][x]
            })
            .collect();
        let mut nonlinear =
            ScalarField::from_physical(&grid, &values).expect("values match the grid");
        dealias_in_place(nonlinear.coeffs_mut(), &grid, DealiasRule::TwoThirds);
        let mut out = laplacian(comp);
        out.axpy(-1.0, &nonlinear);
        out
    });
    VectorField::from_components(comps).expect("components share a grid")
}

/// Advisory blow-up horizon fitted to an `F(t)` series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupEstimate {
    pub c_fit: f64,
    /// `1 / (3 C F(0)^3)`; infinite when `C = 0`.
    pub t_star: f64,
}

/// Fit `C` in `dF/dt <= C F^4`.
///
/// On each interval the exact average of `F'/F^4` is
/// `-(F_{i+1}^{-3} - F_i^{-3}) / (3 dt_i)`; negative averages are clamped to
/// zero and the rest combined as a least-squares constant weighted by the
/// interval lengths.
pub fn blowup_monitor(times: &[f64], values: &[f64]) -> Result<BlowupEstimate, DiagnosticsError> {
    if times.len() != values.len() {
        return Err(DiagnosticsError::BadSeries(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if times.len() < BLOWUP_MIN_SAMPLES {
        return Err(DiagnosticsError::TooFewSamples {
            needed: BLOWUP_MIN_SAMPLES,
            got: times.len(),
        });
    }
    if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(DiagnosticsError::BadSeries(
            "F must be positive and finite".into(),
        ));
    }
    let (mut weighted, mut span) = (0.0, 0.0);
    for i in 0..times.len() - 1 {
        let dt = times[i + 1] - times[i];
        if !(dt > 0.0) {
            return Err(DiagnosticsError::BadSeries(
                "times must increase strictly".into(),
            ));
        }
        let c = -(values[i + 1].powi(-3) - values[i].powi(-3)) / (3.0 * dt);
        weighted += c.max(0.0) * dt;
        span += dt;
    }
    let c_fit = weighted / span;
    let t_star = if c_fit > 0.0 {
        1.0 / (3.0 * c_fit * values[0].powi(3))
    } else {
        f64::INFINITY
    };
    Ok(BlowupEstimate { c_fit, t_star })
}

/// One line of the diagnostics stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub t: f64,
    pub total_energy: f64,
    pub dissipation: f64,
    pub kinetic: f64,
    pub thermal: f64,
    pub elastic: f64,
    pub penalty: f64,
    pub d_max_norm: f64,
    pub theta_min: f64,
    pub div_residual: f64,
    #[serde(rename = "F_functional")]
    pub f_functional: f64,
    #[serde(rename = "H_functional")]
    pub h_functional: f64,
    pub picard_iters: usize,
    /// Energy-law defect against the previous record.
    pub energy_residual: Option<f64>,
    pub pressure_h1: f64,
    pub d_ok: bool,
    pub theta_ok: bool,
    pub div_ok: bool,
}

/// How `Delta d_t` in `H` is approximated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectorRateForm {
    /// Committed increment `(d_new - d_old) / dt`.
    #[default]
    Increment,
    /// Right-hand side of the director equation at the new state.
    Equation,
}

/// Evaluate every diagnostic of `state`. With `prev`, the energy defect and
/// the increment form of `d_t` refer to that earlier step.
pub fn record(
    state: &State,
    model: &CoefficientModel,
    step: u64,
    picard_iters: usize,
    prev: Option<(&State, &DiagnosticsRecord)>,
    rate_form: DirectorRateForm,
) -> Result<DiagnosticsRecord, DiagnosticsError> {
    let k = model.gronwall_constant()?;
    let parts = energy_parts(state, model, k)?;
    let total_energy = parts.total();
    let dissipation = dissipation(state, model)?;
    let principles = principle_checks(state, model.theta_floor, PRINCIPLE_TOL);
    let rate = match (rate_form, prev) {
        (DirectorRateForm::Increment, Some((p, _))) => director_rate_increment(p, state),
        _ => director_rate_rhs(state),
    };
    let high = high_order_functionals(state, Some(&rate));
    let mut out = DiagnosticsRecord {
        step,
        t: state.t(),
        total_energy,
        dissipation,
        kinetic: parts.kinetic,
        thermal: parts.thermal,
        elastic: parts.elastic,
        penalty: parts.penalty,
        d_max_norm: principles.d_max,
        theta_min: principles.theta_min,
        div_residual: principles.div_residual,
        f_functional: high.f,
        h_functional: high.h,
        picard_iters,
        energy_residual: None,
        pressure_h1: sobolev_norm(state.p(), 1).expect("order 1 is supported"),
        d_ok: principles.d_ok,
        theta_ok: principles.theta_ok,
        div_ok: principles.div_ok,
    };
    if let Some((p, prev_record)) = prev {
        out.energy_residual = Some(energy_balance_residual(
            prev_record,
            &out,
            state.t() - p.t(),
        ));
    }
    Ok(out)
}
