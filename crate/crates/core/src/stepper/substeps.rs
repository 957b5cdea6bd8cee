//! The three substeps of one time step.
//!
//! Each substep is split into a stage built once per step from the old
//! field (gradients, coefficient values, the parts of the right-hand side
//! that do not depend on the Picard iterate) and an `apply` that consumes the
//! current iterate. Products are formed on the grid and dealiased after the
//! forward transform.

use std::sync::Arc;

use crate::coefficients::CoefficientModel;
use crate::spectral::ops::{
    dealias_in_place, derivative, divergence, helmholtz_solve, helmholtz_solve_vector, laplacian,
    leray_project, truncate_in_place,
};
use crate::spectral::{DealiasRule, DirectorField, Grid, ScalarField, VectorField};

use super::config::{AdvectionForm, Splitting, StepConfig};

pub(crate) type Nodal3 = [Vec<f64>; 3];
/// `jac[i][j] = d_j f_i` on the grid.
pub(crate) type Jacobian = [[Vec<f64>; 3]; 3];

/// A velocity iterate on the grid: values and Jacobian.
pub(crate) struct VelocityNodal {
    pub values: Nodal3,
    pub jacobian: Jacobian,
}

impl VelocityNodal {
    pub fn new(v: &VectorField) -> Self {
        VelocityNodal {
            values: v.to_physical(),
            jacobian: jacobian_nodal(v),
        }
    }
}

pub(crate) fn gradient_nodal(f: &ScalarField) -> Nodal3 {
    [0, 1, 2].map(|j| derivative(f, j).to_physical())
}

pub(crate) fn jacobian_nodal(v: &VectorField) -> Jacobian {
    [0, 1, 2].map(|i| gradient_nodal(v.component(i)))
}

/// `sum_l (∂_i d_l)(∂_j d_l)` at one grid point.
#[inline]
pub(crate) fn director_stress_at(grad_d: &Jacobian, x: usize) -> [[f64; 3]; 3] {
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = (0..3)
                .map(|l| grad_d[l][i][x] * grad_d[l][j][x])
                .sum::<f64>();
            s[i][j] = v;
            s[j][i] = v;
        }
    }
    s
}

/// Forward transform of grid values, dealiased when enabled.
pub(crate) fn product(grid: &Arc<Grid>, values: &[f64], rule: Option<DealiasRule>) -> ScalarField {
    let mut f = ScalarField::from_physical(grid, values).expect("values match the grid");
    if let Some(rule) = rule {
        dealias_in_place(f.coeffs_mut(), grid, rule);
    }
    f
}

pub(crate) fn quadratic_rule(config: &StepConfig) -> Option<DealiasRule> {
    config.dealias_on.then_some(DealiasRule::TwoThirds)
}

fn cubic_rule(config: &StepConfig) -> Option<DealiasRule> {
    config.dealias_on.then_some(if config.exact_cubic {
        DealiasRule::Half
    } else {
        DealiasRule::TwoThirds
    })
}

/// Transport term `v . grad f` (or its skew-symmetric form) in spectral form.
pub(crate) fn advect(
    grid: &Arc<Grid>,
    v: &Nodal3,
    grad_f: &Nodal3,
    f: &[f64],
    form: AdvectionForm,
    rule: Option<DealiasRule>,
) -> ScalarField {
    let conv: Vec<f64> = (0..grid.len())
        .map(|x| v[0][x] * grad_f[0][x] + v[1][x] * grad_f[1][x] + v[2][x] * grad_f[2][x])
        .collect();
    let mut out = product(grid, &conv, rule);
    if form == AdvectionForm::SkewSymmetric {
        let flux = [0, 1, 2].map(|j| {
            let vf: Vec<f64> = v[j].iter().zip(f).map(|(a, b)| a * b).collect();
            product(grid, &vf, rule)
        });
        let flux = VectorField::from_components(flux).expect("components share a grid");
        out.scale(0.5);
        out.axpy(0.5, &divergence(&flux));
    }
    out
}

fn implicit(config: &StepConfig) -> bool {
    config.splitting == Splitting::Imex
}

/// Old-director data for the director substep.
pub(crate) struct DirectorStage {
    grid: Arc<Grid>,
    config: StepConfig,
    nodal: Nodal3,
    grad: Jacobian,
    base: [ScalarField; 3],
}

impl DirectorStage {
    pub fn new(d_old: &DirectorField, config: &StepConfig) -> Self {
        let grid = d_old.grid().clone();
        let nodal = d_old.to_physical();
        let grad = jacobian_nodal(d_old);
        let dt = config.dt;
        let rule = cubic_rule(config);
        let norm_sq: Vec<f64> = (0..grid.len())
            .map(|x| {
                nodal[0][x] * nodal[0][x] + nodal[1][x] * nodal[1][x] + nodal[2][x] * nodal[2][x]
                    - 1.0
            })
            .collect();
        let base = [0, 1, 2].map(|i| {
            let cubic: Vec<f64> = norm_sq.iter().zip(&nodal[i]).map(|(w, d)| w * d).collect();
            let mut b = d_old.component(i).clone();
            b.axpy(-dt, &product(&grid, &cubic, rule));
            if !implicit(config) {
                b.axpy(dt, &laplacian(d_old.component(i)));
            }
            b
        });
        DirectorStage {
            grid,
            config: *config,
            nodal,
            grad,
            base,
        }
    }

    pub fn apply(&self, v: &Nodal3, forcing: Option<&VectorField>) -> DirectorField {
        let dt = self.config.dt;
        let rule = quadratic_rule(&self.config);
        let comps = [0, 1, 2].map(|i| {
            let mut rhs = self.base[i].clone();
            let adv = advect(
                &self.grid,
                v,
                &self.grad[i],
                &self.nodal[i],
                self.config.advection,
                rule,
            );
            rhs.axpy(-dt, &adv);
            if let Some(f) = forcing {
                rhs.axpy(dt, f.component(i));
            }
            if implicit(&self.config) {
                helmholtz_solve(&rhs, dt)
            } else {
                rhs
            }
        });
        DirectorField::new(VectorField::from_components(comps).expect("components share a grid"))
    }
}

/// Old-temperature data for the temperature substep.
pub(crate) struct TemperatureStage {
    grid: Arc<Grid>,
    config: StepConfig,
    nodal: Vec<f64>,
    grad: Nodal3,
    mu: Vec<f64>,
    lambda: Vec<f64>,
    base: ScalarField,
}

impl TemperatureStage {
    pub fn new(theta_old: &ScalarField, model: &CoefficientModel, config: &StepConfig) -> Self {
        let grid = theta_old.grid().clone();
        let nodal = theta_old.to_physical();
        let mu = nodal.iter().map(|&t| model.mu(t)).collect();
        let lambda = nodal.iter().map(|&t| model.lambda(t)).collect();
        let mut base = theta_old.clone();
        if !implicit(config) {
            base.axpy(config.dt, &laplacian(theta_old));
        }
        TemperatureStage {
            grid,
            config: *config,
            grad: gradient_nodal(theta_old),
            nodal,
            mu,
            lambda,
            base,
        }
    }

    /// Heat source `(mu/2)|grad v + grad v^T|^2 - lambda (grad d . grad d) : grad v`
    /// on the grid, with coefficients at the old temperature.
    pub fn heat_source(&self, v: &Jacobian, grad_d: &Jacobian) -> Vec<f64> {
        (0..self.grid.len())
            .map(|x| {
                let s = director_stress_at(grad_d, x);
                let mut shear = 0.0;
                let mut elastic = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        let e = v[i][j][x] + v[j][i][x];
                        shear += e * e;
                        elastic += s[i][j] * v[i][j][x];
                    }
                }
                0.5 * self.mu[x] * shear - self.lambda[x] * elastic
            })
            .collect()
    }

    pub fn apply(
        &self,
        v: &VelocityNodal,
        grad_d: &Jacobian,
        forcing: Option<&ScalarField>,
    ) -> ScalarField {
        let dt = self.config.dt;
        let rule = quadratic_rule(&self.config);
        let mut rhs = self.base.clone();
        rhs.axpy(
            -dt,
            &advect(
                &self.grid,
                &v.values,
                &self.grad,
                &self.nodal,
                self.config.advection,
                rule,
            ),
        );
        rhs.axpy(
            dt,
            &product(&self.grid, &self.heat_source(&v.jacobian, grad_d), rule),
        );
        if let Some(f) = forcing {
            rhs.axpy(dt, f);
        }
        if implicit(&self.config) {
            helmholtz_solve(&rhs, dt)
        } else {
            rhs
        }
    }
}

/// Old-velocity data for the velocity substep.
pub(crate) struct VelocityStage {
    grid: Arc<Grid>,
    config: StepConfig,
    u_old: VectorField,
    /// Symmetric gradient `grad u + grad u^T` of the old velocity.
    strain: [[Vec<f64>; 3]; 3],
    /// Dealiased `u . grad u` of the old velocity.
    transport: VectorField,
}

impl VelocityStage {
    pub fn new(u_old: &VectorField, config: &StepConfig) -> Self {
        let grid = u_old.grid().clone();
        let values = u_old.to_physical();
        let jac = jacobian_nodal(u_old);
        let rule = quadratic_rule(config);
        let transport =
            [0, 1, 2].map(|i| advect(&grid, &values, &jac[i], &values[i], config.advection, rule));
        let transport = VectorField::from_components(transport).expect("components share a grid");
        let strain = [0, 1, 2].map(|i| {
            [0, 1, 2].map(|j| {
                jac[i][j]
                    .iter()
                    .zip(&jac[j][i])
                    .map(|(a, b)| a + b)
                    .collect()
            })
        });
        VelocityStage {
            grid,
            config: *config,
            u_old: u_old.clone(),
            strain,
            transport,
        }
    }

    /// `u*` given the temperature and director gradient of the current
    /// iterate.
    pub fn apply(
        &self,
        theta: &[f64],
        grad_d: &Jacobian,
        model: &CoefficientModel,
        forcing: Option<&VectorField>,
    ) -> VectorField {
        let dt = self.config.dt;
        let rule = quadratic_rule(&self.config);
        let mu: Vec<f64> = theta.iter().map(|&t| model.mu(t)).collect();
        let lambda: Vec<f64> = theta.iter().map(|&t| model.lambda(t)).collect();
        let mu0 = if implicit(&self.config) {
            mu.iter().copied().fold(f64::INFINITY, f64::min)
        } else {
            0.0
        };

        // Explicit stress: variable-viscosity remainder plus the elastic
        // stress, assembled on the grid before transforming.
        let n = self.grid.len();
        let mut stress: [[Vec<f64>; 3]; 3] = Default::default();
        for row in stress.iter_mut() {
            for entry in row.iter_mut() {
                *entry = vec![0.0; n];
            }
        }
        for x in 0..n {
            let s = director_stress_at(grad_d, x);
            for i in 0..3 {
                for j in i..3 {
                    stress[i][j][x] = (mu[x] - mu0) * self.strain[i][j][x] - lambda[x] * s[i][j];
                }
            }
        }
        let mut hat: [[Option<ScalarField>; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in i..3 {
                let t = product(&self.grid, &stress[i][j], rule);
                hat[j][i] = Some(t.clone());
                hat[i][j] = Some(t);
            }
        }
        let div_stress = [0, 1, 2].map(|i| {
            let row = VectorField::from_components(
                [0, 1, 2].map(|j| hat[i][j].clone().expect("filled above")),
            )
            .expect("components share a grid");
            divergence(&row)
        });
        let mut rhs = VectorField::from_components(div_stress).expect("components share a grid");
        rhs.axpy(-1.0, &self.transport);
        if let Some(f) = forcing {
            rhs.axpy(1.0, f);
        }
        let mut u = self.u_old.clone();
        u.axpy(dt, &leray_project(&rhs));
        if mu0 > 0.0 {
            u = helmholtz_solve_vector(&u, dt * mu0);
        }
        let mut u = leray_project(&u);
        if let Some(cutoff) = self.config.velocity_cutoff {
            let grid = self.grid.clone();
            for c in u.components_mut() {
                truncate_in_place(c.coeffs_mut(), &grid, cutoff);
            }
            u = u.mark_solenoidal(true);
        }
        u
    }
}

/// One director substep with `v` as the transporting velocity.
pub fn director_substep(
    d_old: &DirectorField,
    v: &VectorField,
    config: &StepConfig,
) -> DirectorField {
    DirectorStage::new(d_old, config).apply(&v.to_physical(), None)
}

/// One temperature substep; `d` is the already advanced director.
pub fn temperature_substep(
    theta_old: &ScalarField,
    v: &VectorField,
    d: &DirectorField,
    model: &CoefficientModel,
    config: &StepConfig,
) -> ScalarField {
    TemperatureStage::new(theta_old, model, config).apply(
        &VelocityNodal::new(v),
        &jacobian_nodal(d),
        None,
    )
}

/// One velocity substep driven by the advanced temperature and director.
pub fn velocity_substep(
    u_old: &VectorField,
    theta: &ScalarField,
    d: &DirectorField,
    model: &CoefficientModel,
    config: &StepConfig,
) -> VectorField {
    VelocityStage::new(u_old, config).apply(&theta.to_physical(), &jacobian_nodal(d), model, None)
}
