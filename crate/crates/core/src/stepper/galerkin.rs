//! Explicit finite-basis form of the velocity equation,
//! `g_k' = -sum_i A_i^k g_i - sum_ij e_ij^k g_i g_j + f^k`, assembled by grid
//! quadrature. Only meant for small bases, as an independent check of the
//! spectral velocity substep.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::coefficients::CoefficientModel;
use crate::spectral::ops::{inner_product, leray_project};
use crate::spectral::{DirectorField, Grid, ScalarField, VectorField};

use super::substeps::{director_stress_at, jacobian_nodal, Jacobian, Nodal3};
use super::StepError;

const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinSystem {
    /// `a[i][k] = int mu (grad phi_i + grad phi_i^T) : grad phi_k`.
    pub a: Vec<Vec<f64>>,
    /// `e[i][j][k] = int (phi_i . grad) phi_j . phi_k`.
    pub e: Vec<Vec<Vec<f64>>>,
    /// `f[k] = int lambda (grad d . grad d) : grad phi_k`.
    pub f: Vec<f64>,
}

impl GalerkinSystem {
    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn rhs(&self, g: &[f64]) -> Vec<f64> {
        let m = self.dim();
        (0..m)
            .map(|k| {
                let mut r = self.f[k];
                for i in 0..m {
                    r -= self.a[i][k] * g[i];
                    for j in 0..m {
                        r -= self.e[i][j][k] * g[i] * g[j];
                    }
                }
                r
            })
            .collect()
    }

    pub fn euler_step(&self, g: &[f64], dt: f64) -> Vec<f64> {
        g.iter().zip(self.rhs(g)).map(|(x, r)| x + dt * r).collect()
    }

    /// `sum_ijk e_ij^k g_i g_j g_k`, zero for divergence-free bases.
    pub fn trilinear(&self, g: &[f64]) -> f64 {
        let m = self.dim();
        let mut sum = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    sum += self.e[i][j][k] * g[i] * g[j] * g[k];
                }
            }
        }
        sum
    }
}

/// Six orthonormal divergence-free trigonometric modes with `|m_j| <= 1`.
pub fn low_mode_basis(grid: &Arc<Grid>) -> Vec<VectorField> {
    let c = (2.0 / grid.volume()).sqrt();
    let s = PI / grid.half_width();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let modes: [([f64; 3], [f64; 3], bool); 6] = [
        ([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], true),
        ([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], false),
        ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], true),
        ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], false),
        ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], true),
        ([1.0, 1.0, 0.0], [r, -r, 0.0], true),
    ];
    modes
        .iter()
        .map(|&(m, a, sine)| {
            let field = VectorField::from_fn(grid, |x| {
                let phase = s * (m[0] * x[0] + m[1] * x[1] + m[2] * x[2]);
                let w = c * if sine { phase.sin() } else { phase.cos() };
                [a[0] * w, a[1] * w, a[2] * w]
            });
            leray_project(&field)
        })
        .collect()
}

/// Coordinates of `u` in `basis` by `L^2` pairing.
pub fn project_onto(basis: &[VectorField], u: &VectorField) -> Result<Vec<f64>, StepError> {
    basis
        .iter()
        .map(|phi| inner_product(u, phi).map_err(StepError::from))
        .collect()
}

pub fn synthesize(basis: &[VectorField], g: &[f64]) -> VectorField {
    let mut out = VectorField::zeros(basis[0].grid());
    for (phi, &c) in basis.iter().zip(g) {
        out.axpy(c, phi);
    }
    out
}

pub fn galerkin_ode_coefficients(
    basis: &[VectorField],
    theta: &ScalarField,
    d: &DirectorField,
    model: &CoefficientModel,
) -> Result<GalerkinSystem, StepError> {
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let value = inner_product(a, b)?;
            let target = if i == j { 1.0 } else { 0.0 };
            if (value - target).abs() > ORTHONORMAL_TOL {
                return Err(StepError::NonOrthonormalBasis { i, j, value });
            }
        }
    }
    let grid = theta.grid().clone();
    let n = grid.len();
    let w = grid.volume() / n as f64;
    let theta_nodal = theta.to_physical();
    let mu: Vec<f64> = theta_nodal.iter().map(|&t| model.mu(t)).collect();
    let lambda: Vec<f64> = theta_nodal.iter().map(|&t| model.lambda(t)).collect();
    let grad_d = jacobian_nodal(d);
    let values: Vec<Nodal3> = basis.iter().map(VectorField::to_physical).collect();
    let jac: Vec<Jacobian> = basis.iter().map(jacobian_nodal).collect();
    let m = basis.len();

    let mut a = vec![vec![0.0; m]; m];
    let mut e = vec![vec![vec![0.0; m]; m]; m];
    let mut f = vec![0.0; m];
    for x in 0..n {
        let s = director_stress_at(&grad_d, x);
        for k in 0..m {
            let jk = &jac[k];
            let mut fk = 0.0;
            for l in 0..3 {
                for q in 0..3 {
                    fk += s[l][q] * jk[l][q][x];
                }
            }
            f[k] += lambda[x] * fk * w;
            for i in 0..m {
                let ji = &jac[i];
                let mut aik = 0.0;
                for l in 0..3 {
                    for q in 0..3 {
                        aik += (ji[l][q][x] + ji[q][l][x]) * jk[l][q][x];
                    }
                }
                a[i][k] += mu[x] * aik * w;
                for j in 0..m {
                    // (phi_i . grad) phi_j . phi_k
                    let mut eijk = 0.0;
                    for q in 0..3 {
                        let transport = (0..3)
                            .map(|l| values[i][l][x] * jac[j][q][l][x])
                            .sum::<f64>();
                        eijk += transport * values[k][q][x];
                    }
                    e[i][j][k] += eijk * w;
                }
            }
        }
    }
    Ok(GalerkinSystem { a, e, f })
}
