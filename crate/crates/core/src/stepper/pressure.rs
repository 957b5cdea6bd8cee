use rustfft::num_complex::Complex64;

use crate::coefficients::CoefficientModel;
use crate::spectral::{DealiasRule, ScalarField};

use super::state::State;
use super::substeps::{director_stress_at, jacobian_nodal, product};

/// Pressure from the divergence of the momentum equation:
/// `Lap p = div div(mu (grad u + grad u^T) - lambda grad d . grad d) - div(u . grad u)`,
/// solved mode by mode with zero mean. Products are always dealiased.
pub fn pressure_solve(state: &State, model: &CoefficientModel) -> ScalarField {
    let grid = state.grid().clone();
    let rule = Some(DealiasRule::TwoThirds);
    let n = grid.len();
    let theta = state.nodal(3);
    let u: [&[f64]; 3] = [state.nodal(0), state.nodal(1), state.nodal(2)];
    let ju = jacobian_nodal(state.u());
    let jd = jacobian_nodal(state.d());

    let mut stress: [[Vec<f64>; 3]; 3] = Default::default();
    let mut transport: [Vec<f64>; 3] = Default::default();
    for i in 0..3 {
        transport[i] = vec![0.0; n];
        for j in 0..3 {
            stress[i][j] = vec![0.0; n];
        }
    }
    for x in 0..n {
        let (mu, lambda) = (model.mu(theta[x]), model.lambda(theta[x]));
        let s = director_stress_at(&jd, x);
        for i in 0..3 {
            for j in i..3 {
                stress[i][j][x] = mu * (ju[i][j][x] + ju[j][i][x]) - lambda * s[i][j];
            }
            transport[i][x] = u[0][x] * ju[i][0][x] + u[1][x] * ju[i][1][x] + u[2][x] * ju[i][2][x];
        }
    }

    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..3 {
        for j in i..3 {
            let t = product(&grid, &stress[i][j], rule);
            let weight = if i == j { 1.0 } else { 2.0 };
            for (idx, r) in rhs.iter_mut().enumerate() {
                let k = grid.deriv_k(idx);
                *r -= t.coeffs()[idx] * (weight * k[i] * k[j]);
            }
        }
        let a = product(&grid, &transport[i], rule);
        for (idx, r) in rhs.iter_mut().enumerate() {
            let k = grid.deriv_k(idx);
            *r -= Complex64::new(0.0, k[i]) * a.coeffs()[idx];
        }
    }
    for (idx, r) in rhs.iter_mut().enumerate() {
        let k = grid.k(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        *r = if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            -*r / k2
        };
    }
    ScalarField::from_coeffs(&grid, rhs).expect("coefficients match the grid")
}
