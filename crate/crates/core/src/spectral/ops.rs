//! Mode-wise operators: derivatives, Leray projection, dealiasing, norms.

use rustfft::num_complex::Complex64;

use super::field::{ScalarField, SpectralField, VectorField};
use super::grid::{DealiasRule, Grid};
use super::FieldError;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `d/dx_axis`. Nyquist coefficients are zeroed.
pub fn derivative(f: &ScalarField, axis: usize) -> ScalarField {
    let g = f.grid();
    let k = g.deriv_wavenumbers();
    let mut out = f.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let kk = k[g.unflatten(idx)[axis]];
        *c *= I * kk;
    }
    out
}

pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField::from_components([derivative(f, 0), derivative(f, 1), derivative(f, 2)])
        .expect("components share a grid")
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let g = v.grid().clone();
    let mut out = ScalarField::zeros(&g);
    let comps = v.components();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = g.deriv_k(idx);
        *c = I
            * (comps[0].coeffs()[idx] * k[0]
                + comps[1].coeffs()[idx] * k[1]
                + comps[2].coeffs()[idx] * k[2]);
    }
    out
}

/// Multiplication by `-|k|^2` (Nyquist included).
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid().clone();
    let mut out = f.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = g.k(idx);
        *c *= -(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    }
    out
}

pub fn vector_laplacian(v: &VectorField) -> VectorField {
    let [a, b, c] = v.components();
    VectorField::from_components([laplacian(a), laplacian(b), laplacian(c)])
        .expect("components share a grid")
        .mark_solenoidal(v.is_solenoidal())
}

/// Solve `(I - coeff * Laplacian) x = rhs` mode by mode.
pub fn helmholtz_solve(rhs: &ScalarField, coeff: f64) -> ScalarField {
    let g = rhs.grid().clone();
    let mut out = rhs.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = g.k(idx);
        *c /= 1.0 + coeff * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    }
    out
}

pub fn helmholtz_solve_vector(rhs: &VectorField, coeff: f64) -> VectorField {
    let [a, b, c] = rhs.components();
    VectorField::from_components([
        helmholtz_solve(a, coeff),
        helmholtz_solve(b, coeff),
        helmholtz_solve(c, coeff),
    ])
    .expect("components share a grid")
    .mark_solenoidal(rhs.is_solenoidal())
}

/// Remove the gradient part of `v`: `v(k) - k (k . v(k)) / |k|^2`.
///
/// Uses the same Nyquist-zeroed wavevector as [`divergence`], so the output
/// has zero discrete divergence. The mean mode passes through.
pub fn leray_project(v: &VectorField) -> VectorField {
    let g = v.grid().clone();
    let [mut a, mut b, mut c] = v.clone().into_components();
    for idx in 0..g.len() {
        let k = g.deriv_k(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let (va, vb, vc) = (a.coeffs()[idx], b.coeffs()[idx], c.coeffs()[idx]);
        let along = (va * k[0] + vb * k[1] + vc * k[2]) / k2;
        a.coeffs_mut()[idx] = va - along * k[0];
        b.coeffs_mut()[idx] = vb - along * k[1];
        c.coeffs_mut()[idx] = vc - along * k[2];
    }
    VectorField::from_components([a, b, c])
        .expect("components share a grid")
        .mark_solenoidal(true)
}

/// Largest `|k . v(k)|` over all modes.
pub fn divergence_residual(v: &VectorField) -> f64 {
    let g = v.grid();
    let comps = v.components();
    (0..g.len())
        .map(|idx| {
            let k = g.deriv_k(idx);
            (comps[0].coeffs()[idx] * k[0]
                + comps[1].coeffs()[idx] * k[1]
                + comps[2].coeffs()[idx] * k[2])
                .norm()
        })
        .fold(0.0, f64::max)
}

/// Zero every mode outside the cube `|m_j| <= cutoff`.
pub fn truncate_in_place(coeffs: &mut [Complex64], grid: &Grid, cutoff: i64) {
    for (idx, c) in coeffs.iter_mut().enumerate() {
        if !grid.within_cutoff(idx, cutoff) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

pub fn dealias_in_place(coeffs: &mut [Complex64], grid: &Grid, rule: DealiasRule) {
    truncate_in_place(coeffs, grid, grid.band_limit(rule));
}

/// Two-thirds rule: zero every mode with some `|m_j| > n/3`.
pub fn dealias(f: &ScalarField) -> ScalarField {
    let mut out = f.clone();
    let g = out.grid().clone();
    dealias_in_place(out.coeffs_mut(), &g, DealiasRule::TwoThirds);
    out
}

pub fn dealias_vector(v: &VectorField) -> VectorField {
    let [a, b, c] = v.components();
    VectorField::from_components([dealias(a), dealias(b), dealias(c)])
        .expect("components share a grid")
        .mark_solenoidal(v.is_solenoidal())
}

/// `sum_k w(|k|^2) |f(k)|^2 * volume`, summed over components.
pub fn weighted_norm_sq<F: SpectralField + ?Sized>(f: &F, weight: impl Fn(f64) -> f64) -> f64 {
    let g = f.field_grid();
    let k2 = g.k_squared();
    let sum: f64 = f
        .scalar_components()
        .iter()
        .map(|comp| {
            comp.coeffs()
                .iter()
                .zip(&k2)
                .map(|(c, &kk)| weight(kk) * c.norm_sqr())
                .sum::<f64>()
        })
        .sum();
    sum * g.volume()
}

/// `||f||^2_{H^s} = sum_k (1 + |k|^2)^s |f(k)|^2 (2D)^3` for `s` in 0..=3.
pub fn sobolev_norm_sq<F: SpectralField + ?Sized>(f: &F, order: u32) -> Result<f64, FieldError> {
    if order > 3 {
        return Err(FieldError::UnsupportedOrder(order));
    }
    Ok(weighted_norm_sq(f, |k2| (1.0 + k2).powi(order as i32)))
}

pub fn sobolev_norm<F: SpectralField + ?Sized>(f: &F, order: u32) -> Result<f64, FieldError> {
    sobolev_norm_sq(f, order).map(f64::sqrt)
}

pub fn l2_norm_sq<F: SpectralField + ?Sized>(f: &F) -> f64 {
    weighted_norm_sq(f, |_| 1.0)
}

/// `L^2` pairing via Parseval, summed over components.
pub fn inner_product<F: SpectralField + ?Sized>(f: &F, g: &F) -> Result<f64, FieldError> {
    let (fc, gc) = (f.scalar_components(), g.scalar_components());
    if fc.len() != gc.len() || **f.field_grid() != **g.field_grid() {
        return Err(FieldError::GridMismatch);
    }
    let volume = f.field_grid().volume();
    let sum: f64 = fc
        .iter()
        .zip(gc)
        .map(|(a, b)| {
            a.coeffs()
                .iter()
                .zip(b.coeffs())
                .map(|(x, y)| (x * y.conj()).re)
                .sum::<f64>()
        })
        .sum();
    Ok(sum * volume)
}

/// Grid quadrature `sum_x f(x) (2D)^3 / n^3`.
pub fn quadrature(grid: &Grid, values: &[f64]) -> f64 {
    values.iter().sum::<f64>() * grid.volume() / grid.len() as f64
}
