//! Manufactured-solution convergence study on `[-pi, pi]^3`.
//!
//! The exact fields are
//!
//! ```text
//! g(t)  = 1 + wobble_t sin(omega t)
//! u     = U g (sin x2, sin x3, sin x1)
//! theta = floor + offset + amp (g / g_max) sin x1 sin x2 sin x3
//! d     = (cos psi, sin psi, 0),   psi = twist x3 + wobble g sin x1
//! ```
//!
//! and the residual of every equation is injected as a forcing. With
//! `omega = 0` the solution is steady, which the first-order scheme
//! reproduces exactly in time, so the error is purely spatial.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientModel;
use crate::spectral::ops::l2_norm_sq;
use crate::spectral::{DirectorField, Grid, ScalarField, VectorField};
use crate::stepper::{Forcing, State, StepConfig, Stepper};

use super::ExperimentError;

const TIME_AMPLITUDE: f64 = 0.5;

/// Parameters of the manufactured solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Manufactured {
    pub velocity_amplitude: f64,
    pub theta_offset: f64,
    pub theta_amplitude: f64,
    /// Integer winding of the director along `x3`.
    pub twist: f64,
    pub wobble: f64,
    pub omega: f64,
}

impl Default for Manufactured {
    fn default() -> Self {
        Manufactured {
            velocity_amplitude: 0.5,
            theta_offset: 0.5,
            theta_amplitude: 0.25,
            twist: 1.0,
            wobble: 0.5,
            omega: 0.0,
        }
    }
}

/// Point values of the exact solution and the derivatives the forcings need.
struct Jet {
    u: [f64; 3],
    u_t: [f64; 3],
    /// `grad_u[i][j] = d_j u_i`.
    grad_u: [[f64; 3]; 3],
    lap_u: [f64; 3],
    theta: f64,
    theta_t: f64,
    grad_theta: [f64; 3],
    lap_theta: f64,
    psi: f64,
    psi_t: f64,
    grad_psi: [f64; 3],
    hess_psi: [[f64; 3]; 3],
    lap_psi: f64,
}

impl Manufactured {
    pub fn validate(&self, model: &CoefficientModel) -> Result<(), ExperimentError> {
        let min = self.theta_offset - self.theta_amplitude.abs();
        if min < 0.0 {
            return Err(ExperimentError::ManufacturedBelowFloor {
                margin: min,
                floor: model.theta_floor,
            });
        }
        if self.twist.fract() != 0.0 {
            return Err(ExperimentError::Config(format!(
                "twist must be an integer, got {}",
                self.twist
            )));
        }
        Ok(())
    }

    fn g(&self, t: f64) -> (f64, f64) {
        let (s, c) = (self.omega * t).sin_cos();
        (1.0 + TIME_AMPLITUDE * s, TIME_AMPLITUDE * self.omega * c)
    }

    fn jet(&self, floor: f64, x: [f64; 3], t: f64) -> Jet {
        let (g, g_t) = self.g(t);
        let (s1, c1) = x[0].sin_cos();
        let (s2, c2) = x[1].sin_cos();
        let (s3, c3) = x[2].sin_cos();
        let amp = self.velocity_amplitude;
        let u = [amp * g * s2, amp * g * s3, amp * g * s1];
        let u_t = [amp * g_t * s2, amp * g_t * s3, amp * g_t * s1];
        let mut grad_u = [[0.0; 3]; 3];
        grad_u[0][1] = amp * g * c2;
        grad_u[1][2] = amp * g * c3;
        grad_u[2][0] = amp * g * c1;
        let lap_u = [-u[0], -u[1], -u[2]];

        let a = self.theta_amplitude / (1.0 + TIME_AMPLITUDE);
        let s = s1 * s2 * s3;
        let theta = floor + self.theta_offset + a * g * s;
        let theta_t = a * g_t * s;
        let grad_theta = [
            a * g * c1 * s2 * s3,
            a * g * s1 * c2 * s3,
            a * g * s1 * s2 * c3,
        ];
        let lap_theta = -3.0 * a * g * s;

        let w = self.wobble;
        let psi = self.twist * x[2] + w * g * s1;
        let psi_t = w * g_t * s1;
        let grad_psi = [w * g * c1, 0.0, self.twist];
        let mut hess_psi = [[0.0; 3]; 3];
        hess_psi[0][0] = -w * g * s1;
        Jet {
            u,
            u_t,
            grad_u,
            lap_u,
            theta,
            theta_t,
            grad_theta,
            lap_theta,
            psi,
            psi_t,
            grad_psi,
            hess_psi,
            lap_psi: -w * g * s1,
        }
    }

    pub fn state(&self, grid: &Arc<Grid>, model: &CoefficientModel, t: f64) -> State {
        let floor = model.theta_floor;
        let jets: Vec<Jet> = (0..grid.len())
            .map(|i| self.jet(floor, grid.point(i), t))
            .collect();
        let nodal = |f: &dyn Fn(&Jet) -> f64| jets.iter().map(f).collect::<Vec<f64>>();
        let u = VectorField::from_physical(
            grid,
            [
                &nodal(&|j| j.u[0]),
                &nodal(&|j| j.u[1]),
                &nodal(&|j| j.u[2]),
            ],
        )
        .expect("sizes match");
        let u = crate::spectral::ops::leray_project(&u);
        let theta = ScalarField::from_physical(grid, &nodal(&|j| j.theta)).expect("sizes match");
        let d = VectorField::from_physical(
            grid,
            [
                &nodal(&|j| j.psi.cos()),
                &nodal(&|j| j.psi.sin()),
                &vec![0.0; grid.len()],
            ],
        )
        .expect("sizes match");
        State::from_fields(u, theta, DirectorField::new(d), ScalarField::zeros(grid), t)
    }
}

/// Residual forcings of a [`Manufactured`] solution for one model.
#[derive(Debug, Clone)]
pub struct ManufacturedForcing {
    pub solution: Manufactured,
    pub model: CoefficientModel,
}

impl ManufacturedForcing {
    fn sample<const C: usize>(
        &self,
        grid: &Arc<Grid>,
        t: f64,
        f: impl Fn(&Jet) -> [f64; C],
    ) -> Vec<Vec<f64>> {
        let floor = self.model.theta_floor;
        let mut out = vec![Vec::with_capacity(grid.len()); C];
        for i in 0..grid.len() {
            let v = f(&self.solution.jet(floor, grid.point(i), t));
            for c in 0..C {
                out[c].push(v[c]);
            }
        }
        out
    }

    fn momentum(&self, j: &Jet) -> [f64; 3] {
        let m = &self.model;
        let (mu, mu_d1) = (m.mu(j.theta), m.mu_d1(j.theta));
        let (lambda, lambda_d1) = (m.lambda(j.theta), m.lambda_d1(j.theta));
        let p = &j.grad_psi;
        let theta_dot_psi: f64 = (0..3).map(|k| j.grad_theta[k] * p[k]).sum();
        std::array::from_fn(|i| {
            let transport: f64 = (0..3).map(|k| j.u[k] * j.grad_u[i][k]).sum();
            let viscous = mu_d1
                * (0..3)
                    .map(|k| j.grad_theta[k] * (j.grad_u[i][k] + j.grad_u[k][i]))
                    .sum::<f64>()
                + mu * j.lap_u[i];
            let hess_dot: f64 = (0..3).map(|k| j.hess_psi[i][k] * p[k]).sum();
            let elastic =
                -lambda_d1 * theta_dot_psi * p[i] - lambda * (hess_dot + p[i] * j.lap_psi);
            j.u_t[i] + transport - viscous - elastic
        })
    }

    fn heat(&self, j: &Jet) -> f64 {
        let m = &self.model;
        let (mu, lambda) = (m.mu(j.theta), m.lambda(j.theta));
        let mut shear = 0.0;
        let mut elastic = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let e = j.grad_u[a][b] + j.grad_u[b][a];
                shear += e * e;
                elastic += j.grad_psi[a] * j.grad_psi[b] * j.grad_u[a][b];
            }
        }
        let transport: f64 = (0..3).map(|k| j.u[k] * j.grad_theta[k]).sum();
        j.theta_t + transport - j.lap_theta - (0.5 * mu * shear - lambda * elastic)
    }

    fn director(&self, j: &Jet) -> [f64; 3] {
        let (s, c) = j.psi.sin_cos();
        let transport: f64 = (0..3).map(|k| j.u[k] * j.grad_psi[k]).sum();
        let normal = j.psi_t + transport - j.lap_psi;
        let tangent = j.grad_psi.iter().map(|v| v * v).sum::<f64>();
        [-s * normal + c * tangent, c * normal + s * tangent, 0.0]
    }
}

impl Forcing for ManufacturedForcing {
    fn velocity(&self, grid: &Arc<Grid>, t: f64) -> Option<VectorField> {
        let v = self.sample(grid, t, |j| self.momentum(j));
        Some(VectorField::from_physical(grid, [&v[0], &v[1], &v[2]]).expect("sizes match"))
    }

    fn temperature(&self, grid: &Arc<Grid>, t: f64) -> Option<ScalarField> {
        let v = self.sample(grid, t, |j| [self.heat(j)]);
        Some(ScalarField::from_physical(grid, &v[0]).expect("sizes match"))
    }

    fn director(&self, grid: &Arc<Grid>, t: f64) -> Option<VectorField> {
        let v = self.sample(grid, t, |j| self.director(j));
        Some(VectorField::from_physical(grid, [&v[0], &v[1], &v[2]]).expect("sizes match"))
    }
}

/// `L^2` errors of one run against the exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub n: usize,
    pub dt: f64,
    pub steps: usize,
    pub error_u: f64,
    pub error_theta: f64,
    pub error_d: f64,
    pub error_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsConfig {
    pub solution: Manufactured,
    pub resolutions: Vec<usize>,
    /// Time step and number of steps of the spatial study (steady solution).
    pub spatial_dt: f64,
    pub spatial_steps: usize,
    /// Grid, time steps and end time of the temporal study.
    pub temporal_n: usize,
    pub dts: Vec<f64>,
    pub t_end: f64,
    pub temporal_omega: f64,
    pub step: StepConfig,
}

impl Default for MmsConfig {
    fn default() -> Self {
        MmsConfig {
            solution: Manufactured::default(),
            resolutions: vec![8, 16, 32],
            spatial_dt: 1e-3,
            spatial_steps: 10,
            temporal_n: 32,
            dts: vec![0.02, 0.01, 0.005],
            t_end: 0.2,
            temporal_omega: 4.0,
            step: StepConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub spatial: Vec<ErrorRow>,
    pub temporal: Vec<ErrorRow>,
    /// Coarsest over finest spatial error.
    pub spatial_drop: f64,
    /// `log2` of successive temporal error ratios.
    pub temporal_orders: Vec<f64>,
}

fn errors(computed: &State, exact: &State, dt: f64, steps: usize) -> ErrorRow {
    let eu = l2_norm_sq(&computed.u().sub(exact.u())).sqrt();
    let et = l2_norm_sq(&computed.theta().sub(exact.theta())).sqrt();
    let ed = l2_norm_sq(&computed.d().sub(exact.d())).sqrt();
    ErrorRow {
        n: computed.grid().n(),
        dt,
        steps,
        error_u: eu,
        error_theta: et,
        error_d: ed,
        error_total: (eu * eu + et * et + ed * ed).sqrt(),
    }
}

/// Run the forced system from the exact data and compare at the end.
pub fn manufactured_run(
    solution: &Manufactured,
    n: usize,
    dt: f64,
    steps: usize,
    model: &CoefficientModel,
    step: &StepConfig,
) -> Result<ErrorRow, ExperimentError> {
    solution.validate(model)?;
    let grid = Grid::new(n, PI)?;
    let forcing = ManufacturedForcing {
        solution: *solution,
        model: *model,
    };
    let stepper = Stepper::new(*model, StepConfig { dt, ..*step })?.with_forcing(Arc::new(forcing));
    let mut state = solution.state(&grid, model, 0.0);
    for _ in 0..steps {
        state = stepper.advance(&state)?.state;
    }
    let exact = solution.state(&grid, model, state.t());
    Ok(errors(&state, &exact, dt, steps))
}

pub fn manufactured_convergence(
    config: &MmsConfig,
    model: &CoefficientModel,
) -> Result<ConvergenceTable, ExperimentError> {
    if config.resolutions.is_empty() || config.dts.is_empty() {
        return Err(ExperimentError::Config(
            "resolutions and dts must be nonempty".into(),
        ));
    }
    let steady = Manufactured {
        omega: 0.0,
        ..config.solution
    };
    let spatial = config
        .resolutions
        .iter()
        .map(|&n| {
            manufactured_run(
                &steady,
                n,
                config.spatial_dt,
                config.spatial_steps,
                model,
                &config.step,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let moving = Manufactured {
        omega: config.temporal_omega,
        ..config.solution
    };
    let temporal = config
        .dts
        .iter()
        .map(|&dt| {
            let steps = (config.t_end / dt).round() as usize;
            manufactured_run(&moving, config.temporal_n, dt, steps, model, &config.step)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let spatial_drop = spatial[0].error_total / spatial[spatial.len() - 1].error_total;
    let temporal_orders = temporal
        .windows(2)
        .map(|w| (w[0].error_total / w[1].error_total).ln() / (w[0].dt / w[1].dt).ln())
        .collect();
    Ok(ConvergenceTable {
        spatial,
        temporal,
        spatial_drop,
        temporal_orders,
    })
}
