//! Continuous dependence on the data: two runs from nearby initial states,
//! tracking `N(t) = ||u1 - u2||^2 + ||grad(d1 - d2)||^2 + ||theta1 - theta2||^2`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{record, DiagnosticsRecord, DirectorRateForm};
use crate::spectral::ops::{l2_norm_sq, leray_project, truncate_in_place, weighted_norm_sq};
use crate::spectral::{DirectorField, ScalarField, VectorField};
use crate::stepper::{State, Stepper};

use super::ExperimentError;

/// Largest mode index of the smooth perturbations.
const PERTURBATION_MODES: i64 = 2;
/// Allowed spread of `sup N(delta) / sup N(delta / 2)` around 4.
const SCALING_SLACK: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UniquenessConfig {
    pub delta: f64,
    pub steps: usize,
    pub seed: u64,
    /// Also run `delta / 2` and report the ratio of the suprema.
    pub check_scaling: bool,
    /// Also run the pressure-only and mean-director perturbations.
    pub check_degenerate: bool,
}

impl Default for UniquenessConfig {
    fn default() -> Self {
        UniquenessConfig {
            delta: 1e-6,
            steps: 20,
            seed: 7,
            check_scaling: true,
            check_degenerate: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanOnlyReport {
    pub initial_gap_sq: f64,
    /// `sup ||d1 - d2||^2 / ||d1(0) - d2(0)||^2`.
    pub sup_ratio: f64,
    /// Largest per-step growth rate of `||d1 - d2||^2`.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub delta: f64,
    pub n: usize,
    pub dt: f64,
    pub times: Vec<f64>,
    pub n_series: Vec<f64>,
    pub n0: f64,
    pub sup_n: f64,
    /// Growth rate `B`: the largest per-step logarithmic growth of `N`.
    pub fit_b: f64,
    /// `A = sup N(t) / (N(0) e^{B t})`.
    pub fit_a: f64,
    /// `sup N(delta) / sup N(delta / 2)` when requested.
    pub scaling_ratio: Option<f64>,
    pub scaling_ok: Option<bool>,
    /// Zero-perturbation twins produced identical diagnostics.
    pub bitwise_identical: Option<bool>,
    /// A pressure-only perturbation left `(u, theta, d)` untouched.
    pub pressure_only_identical: Option<bool>,
    pub mean_only: Option<MeanOnlyReport>,
}

pub fn difference_norm_sq(a: &State, b: &State) -> f64 {
    let du = a.u().sub(b.u());
    let dd = a.d().sub(b.d());
    let dt = a.theta().sub(b.theta());
    l2_norm_sq(&du) + weighted_norm_sq(&dd, |k2| k2) + l2_norm_sq(&dt)
}

fn smooth_scalar(field: ScalarField) -> ScalarField {
    let mut f = field;
    let grid = f.grid().clone();
    truncate_in_place(f.coeffs_mut(), &grid, PERTURBATION_MODES);
    f.coeffs_mut()[0] = Default::default();
    f
}

/// Seeded perturbation with modes `|m_j| <= 2`, mean zero, divergence-free
/// velocity, scaled so that `||u||^2 + ||grad d||^2 + ||theta||^2 = 1`.
pub fn smooth_perturbation(
    reference: &State,
    seed: u64,
) -> (VectorField, ScalarField, VectorField) {
    let grid = reference.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let smooth_vector = |v: VectorField| {
        let [a, b, c] = v.into_components();
        VectorField::from_components([smooth_scalar(a), smooth_scalar(b), smooth_scalar(c)])
            .expect("same grid")
    };
    let mut u = leray_project(&smooth_vector(VectorField::random(grid, &mut rng)));
    let mut theta = smooth_scalar(ScalarField::random(grid, &mut rng));
    let mut d = smooth_vector(VectorField::random(grid, &mut rng));
    let size = (l2_norm_sq(&u) + weighted_norm_sq(&d, |k2| k2) + l2_norm_sq(&theta)).sqrt();
    u.scale(1.0 / size);
    theta.scale(1.0 / size);
    d.scale(1.0 / size);
    (u, theta, d)
}

fn perturbed(state: &State, delta: f64, p: &(VectorField, ScalarField, VectorField)) -> State {
    if delta == 0.0 {
        return state.clone();
    }
    let mut u = state.u().clone();
    u.axpy(delta, &p.0);
    let mut theta = state.theta().clone();
    theta.axpy(delta, &p.1);
    let mut d = state.d().as_vector().clone();
    d.axpy(delta, &p.2);
    State::from_fields(
        u,
        theta,
        DirectorField::new(d),
        state.p().clone(),
        state.t(),
    )
}

fn trajectory(
    stepper: &Stepper,
    start: State,
    steps: usize,
) -> Result<Vec<State>, ExperimentError> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start);
    for _ in 0..steps {
        let next = stepper.advance(out.last().expect("nonempty"))?.state;
        out.push(next);
    }
    Ok(out)
}

fn records(stepper: &Stepper, states: &[State]) -> Result<Vec<DiagnosticsRecord>, ExperimentError> {
    let mut out: Vec<DiagnosticsRecord> = Vec::with_capacity(states.len());
    for (i, s) in states.iter().enumerate() {
        let prev = if i == 0 {
            None
        } else {
            Some((&states[i - 1], &out[i - 1]))
        };
        let rec = record(
            s,
            stepper.model(),
            i as u64,
            0,
            prev,
            DirectorRateForm::Increment,
        )?;
        out.push(rec);
    }
    Ok(out)
}

fn same_records(a: &[DiagnosticsRecord], b: &[DiagnosticsRecord]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| serde_json::to_string(x).ok() == serde_json::to_string(y).ok())
}

fn growth(series: &[f64], dt: f64) -> f64 {
    series
        .windows(2)
        .filter(|w| w[0] > 0.0 && w[1] > 0.0)
        .map(|w| (w[1] / w[0]).ln() / dt)
        .fold(0.0, f64::max)
}

pub fn uniqueness_experiment(
    initial: &State,
    stepper: &Stepper,
    config: &UniquenessConfig,
) -> Result<StabilityReport, ExperimentError> {
    if !(config.delta >= 0.0 && config.delta.is_finite()) {
        return Err(ExperimentError::Config(format!(
            "delta must be finite and nonnegative, got {}",
            config.delta
        )));
    }
    let dt = stepper.config().dt;
    let perturbation = smooth_perturbation(initial, config.seed);
    let base = trajectory(stepper, initial.clone(), config.steps)?;
    let run = |delta: f64| {
        trajectory(
            stepper,
            perturbed(initial, delta, &perturbation),
            config.steps,
        )
    };
    let other = run(config.delta)?;

    let times: Vec<f64> = base.iter().map(State::t).collect();
    let n_series: Vec<f64> = base
        .iter()
        .zip(&other)
        .map(|(a, b)| difference_norm_sq(a, b))
        .collect();
    let n0 = n_series[0];
    let sup_n = n_series.iter().cloned().fold(0.0, f64::max);
    let fit_b = growth(&n_series, dt);
    let fit_a = if n0 > 0.0 {
        n_series
            .iter()
            .zip(&times)
            .map(|(v, t)| v / (n0 * (fit_b * (t - times[0])).exp()))
            .fold(0.0, f64::max)
    } else {
        0.0
    };

    let (scaling_ratio, scaling_ok) = if config.check_scaling && config.delta > 0.0 {
        let half = run(0.5 * config.delta)?;
        let sup_half = base
            .iter()
            .zip(&half)
            .map(|(a, b)| difference_norm_sq(a, b))
            .fold(0.0, f64::max);
        let ratio = sup_n / sup_half;
        (
            Some(ratio),
            Some((4.0 / SCALING_SLACK..=4.0 * SCALING_SLACK).contains(&ratio)),
        )
    } else {
        (None, None)
    };

    let bitwise_identical = if config.delta == 0.0 {
        Some(same_records(
            &records(stepper, &base)?,
            &records(stepper, &other)?,
        ))
    } else {
        None
    };

    let (pressure_only_identical, mean_only) = if config.check_degenerate {
        let delta = if config.delta > 0.0 {
            config.delta
        } else {
            1e-6
        };
        let mut p = initial.p().clone();
        p.axpy(delta, &perturbation.1);
        let shifted = initial.clone().with_pressure(p);
        let moved = trajectory(stepper, shifted, config.steps)?;
        let identical = base
            .iter()
            .zip(&moved)
            .all(|(a, b)| (0..7).all(|c| a.nodal(c) == b.nodal(c)));

        let mut d = initial.d().as_vector().clone();
        d.components_mut()[0].coeffs_mut()[0].re += delta;
        let start = State::from_fields(
            initial.u().clone(),
            initial.theta().clone(),
            DirectorField::new(d),
            initial.p().clone(),
            initial.t(),
        );
        let mean_run = trajectory(stepper, start, config.steps)?;
        let gaps: Vec<f64> = base
            .iter()
            .zip(&mean_run)
            .map(|(a, b)| l2_norm_sq(&a.d().sub(b.d())))
            .collect();
        let report = MeanOnlyReport {
            initial_gap_sq: gaps[0],
            sup_ratio: gaps.iter().cloned().fold(0.0, f64::max) / gaps[0],
            rate: growth(&gaps, dt),
        };
        (Some(identical), Some(report))
    } else {
        (None, None)
    };

    Ok(StabilityReport {
        delta: config.delta,
        n: initial.grid().n(),
        dt,
        times,
        n_series,
        n0,
        sup_n,
        fit_b,
        fit_a,
        scaling_ratio,
        scaling_ok,
        bitwise_identical,
        pressure_only_identical,
        mean_only,
    })
}
