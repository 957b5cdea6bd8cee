//! Galerkin mode refinement: the same data advanced with the velocity
//! confined to `|m_j| <= m` for increasing `m`, compared in `H^1` against
//! the largest cutoff.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientModel;
use crate::spectral::ops::{leray_project, sobolev_norm, truncate_in_place};
use crate::spectral::{Grid, ScalarField, VectorField};
use crate::stepper::{State, StepConfig, Stepper};

use super::ExperimentError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RefinementConfig {
    pub cutoffs: Vec<i64>,
    pub steps: usize,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig {
            cutoffs: vec![4, 8, 16],
            steps: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementTable {
    pub cutoffs: Vec<i64>,
    /// `max_t ||u_m - u_ref||_{H^1}` for every cutoff but the last.
    pub differences: Vec<f64>,
    /// Successive ratios of `differences`.
    pub ratios: Vec<f64>,
    pub monotone: bool,
}

/// Random divergence-free velocity whose spectrum decays like
/// `exp(-|m|^2 / (2 width^2))` in the integer mode index `m`.
pub fn gaussian_velocity(grid: &Arc<Grid>, width: f64, amplitude: f64, seed: u64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = (grid.half_width() / std::f64::consts::PI).powi(2);
    let m2: Vec<f64> = grid.k_squared().iter().map(|k| k * scale).collect();
    let comps: [ScalarField; 3] = std::array::from_fn(|_| {
        let mut f = ScalarField::random(grid, &mut rng);
        for (c, &kk) in f.coeffs_mut().iter_mut().zip(&m2) {
            *c *= amplitude * (-kk / (2.0 * width * width)).exp();
        }
        f.coeffs_mut()[0] = Default::default();
        f
    });
    leray_project(&VectorField::from_components(comps).expect("same grid"))
}

fn truncated(u: &VectorField, cutoff: i64) -> VectorField {
    let grid = u.grid().clone();
    let mut out = u.clone();
    for c in out.components_mut() {
        truncate_in_place(c.coeffs_mut(), &grid, cutoff);
    }
    leray_project(&out)
}

pub fn mode_refinement_study(
    initial: &State,
    model: &CoefficientModel,
    step: &StepConfig,
    config: &RefinementConfig,
) -> Result<RefinementTable, ExperimentError> {
    let cutoffs = &config.cutoffs;
    if cutoffs.len() < 2 || cutoffs.windows(2).any(|w| w[0] >= w[1]) || cutoffs[0] < 1 {
        return Err(ExperimentError::Config(format!(
            "cutoffs must be positive and increasing, got {cutoffs:?}"
        )));
    }
    let max = initial.grid().n() as i64 / 2 - 1;
    if let Some(&cutoff) = cutoffs.iter().find(|&&m| m > max) {
        return Err(ExperimentError::CutoffAboveNyquist { cutoff, max });
    }
    let steppers = cutoffs
        .iter()
        .map(|&m| {
            Stepper::new(
                *model,
                StepConfig {
                    velocity_cutoff: Some(m),
                    ..*step
                },
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut states: Vec<State> = cutoffs
        .iter()
        .map(|&m| {
            let u = truncated(initial.u(), m);
            State::from_fields(
                u,
                initial.theta().clone(),
                initial.d().clone(),
                initial.p().clone(),
                initial.t(),
            )
        })
        .collect();
    let reference = cutoffs.len() - 1;
    let mut differences = vec![0.0f64; reference];
    for step_index in 0..=config.steps {
        if step_index > 0 {
            states = states
                .par_iter()
                .zip(&steppers)
                .map(|(s, stepper)| stepper.advance(s).map(|o| o.state))
                .collect::<Result<Vec<_>, _>>()?;
        }
        for (i, diff) in differences.iter_mut().enumerate() {
            let gap = sobolev_norm(&states[i].u().sub(states[reference].u()), 1)?;
            *diff = diff.max(gap);
        }
    }
    let ratios: Vec<f64> = differences.windows(2).map(|w| w[0] / w[1]).collect();
    let monotone = differences.windows(2).all(|w| w[1] <= w[0]);
    Ok(RefinementTable {
        cutoffs: cutoffs.clone(),
        differences,
        ratios,
        monotone,
    })
}
