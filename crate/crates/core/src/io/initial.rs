//! Initial-data presets and snapshot loading.

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::experiments::smooth_perturbation;
use crate::spectral::ops::{leray_project, truncate_in_place};
use crate::spectral::snapshot::read_snapshot;
use crate::spectral::{DirectorField, Grid, ScalarField, VectorField};
use crate::stepper::{State, STATE_COMPONENTS};

use super::config::RunConfig;
use super::{ConfigError, RunError};

const RANDOM_MODES: i64 = 2;

fn low_modes(grid: &Arc<Grid>, rng: &mut ChaCha8Rng) -> ScalarField {
    let mut f = ScalarField::random(grid, rng);
    truncate_in_place(f.coeffs_mut(), grid, RANDOM_MODES);
    f.coeffs_mut()[0] = Default::default();
    f
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn rest(grid: &Arc<Grid>, floor: f64) -> State {
    State::from_fields(
        VectorField::zeros(grid),
        ScalarField::constant(grid, floor),
        DirectorField::uniform(grid, [1.0, 0.0, 0.0]),
        ScalarField::zeros(grid),
        0.0,
    )
}

fn shear_twist(grid: &Arc<Grid>, floor: f64, amplitude: f64, alpha: f64, bump: f64) -> State {
    let s = PI / grid.half_width();
    State::from_fields(
        VectorField::from_fn(grid, |x| [amplitude * (s * x[1]).sin(), 0.0, 0.0]),
        ScalarField::from_fn(grid, |x| floor + 0.5 * bump * (1.0 + (s * x[2]).cos())),
        DirectorField::from_fn(grid, |x| {
            let a = alpha * s * x[0];
            [a.cos(), a.sin(), 0.0]
        }),
        ScalarField::zeros(grid),
        0.0,
    )
}

fn random_smooth(grid: &Arc<Grid>, floor: f64, amplitude: f64, bump: f64, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = [
        low_modes(grid, &mut rng),
        low_modes(grid, &mut rng),
        low_modes(grid, &mut rng),
    ];
    let mut u = leray_project(&VectorField::from_components(raw).expect("same grid"));
    let [u1, u2, u3] = u.to_physical();
    let peak = max_abs(&u1).max(max_abs(&u2)).max(max_abs(&u3));
    if peak > 0.0 {
        u.scale(amplitude / peak);
    }

    let t = low_modes(grid, &mut rng).to_physical();
    let (lo, hi) = t
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let theta: Vec<f64> = t.iter().map(|v| floor + bump * (v - lo) / span).collect();

    let w: Vec<Vec<f64>> = (0..3)
        .map(|_| low_modes(grid, &mut rng).to_physical())
        .collect();
    let wmax = w
        .iter()
        .map(|c| max_abs(c))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut d = vec![vec![0.0; grid.len()]; 3];
    for i in 0..grid.len() {
        // e1 plus a tilt of at most 0.5 in each component cannot vanish
        let v = [
            1.0 + 0.5 * w[0][i] / wmax,
            0.5 * w[1][i] / wmax,
            0.5 * w[2][i] / wmax,
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        for c in 0..3 {
            d[c][i] = v[c] / norm;
        }
    }
    let [u1, u2, u3] = u.to_physical();
    let nodal = vec![
        u1,
        u2,
        u3,
        theta,
        d[0].clone(),
        d[1].clone(),
        d[2].clone(),
        vec![0.0; grid.len()],
    ];
    State::from_nodal(grid, nodal, 0.0).expect("sizes match")
}

/// Read a snapshot written by a run on the same grid.
pub fn load_snapshot(path: &Path, grid: &Arc<Grid>) -> Result<State, RunError> {
    let file = File::open(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    let (header, nodal) = read_snapshot(BufReader::new(file))?;
    if header.n != grid.n() || header.half_width != grid.half_width() {
        return Err(ConfigError::Invalid {
            key: "initial_data.snapshot".into(),
            message: format!(
                "snapshot grid n={} D={} differs from the configured n={} D={}",
                header.n,
                header.half_width,
                grid.n(),
                grid.half_width()
            ),
        }
        .into());
    }
    if header.component_count != STATE_COMPONENTS.len() {
        return Err(RunError::Io(format!(
            "{}: expected {} components, found {}",
            path.display(),
            STATE_COMPONENTS.len(),
            header.component_count
        )));
    }
    Ok(State::from_nodal(grid, nodal, header.time)?)
}

pub fn make_initial_data(config: &RunConfig) -> Result<State, RunError> {
    let grid = Grid::new(config.grid.n, config.grid.half_width)?;
    let init = &config.initial_data;
    let floor = config.model.theta_floor;
    let state = match (&init.snapshot, init.preset.as_str()) {
        (Some(path), _) => load_snapshot(path, &grid)?,
        (None, "rest") => rest(&grid, floor),
        (None, "shear-twist") => shear_twist(&grid, floor, init.amplitude, init.alpha, init.bump),
        (None, "random-smooth") => {
            random_smooth(&grid, floor, init.amplitude, init.bump, init.seed)
        }
        (None, other) => {
            return Err(ConfigError::Invalid {
                key: "initial_data.preset".into(),
                message: format!("unknown initial_data.preset {other:?}"),
            }
            .into())
        }
    };
    Ok(match &init.perturbation {
        Some(p) if p.delta > 0.0 => {
            let (du, dtheta, dd) = smooth_perturbation(&state, p.seed);
            let mut u = state.u().clone();
            u.axpy(p.delta, &du);
            let mut theta = state.theta().clone();
            theta.axpy(p.delta, &dtheta);
            let mut d = state.d().as_vector().clone();
            d.axpy(p.delta, &dd);
            State::from_fields(
                u,
                theta,
                DirectorField::new(d),
                state.p().clone(),
                state.t(),
            )
        }
        _ => state,
    })
}
