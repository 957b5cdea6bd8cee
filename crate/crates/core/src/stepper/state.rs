use std::sync::Arc;

use crate::spectral::ops::{divergence_residual, l2_norm_sq};
use crate::spectral::{DirectorField, FieldError, Grid, ScalarField, VectorField};

/// Component order of the nodal representation and of snapshots.
pub const STATE_COMPONENTS: [&str; 8] = ["u1", "u2", "u3", "theta", "d1", "d2", "d3", "p"];

/// Full solution snapshot `(u, theta, d, p)` at time `t`.
///
/// The nodal (physical-space) values are authoritative: the spectral fields
/// are always the forward transform of the stored nodal values, so writing
/// a snapshot and reloading it reproduces the state bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    u: VectorField,
    theta: ScalarField,
    d: DirectorField,
    p: ScalarField,
    t: f64,
    nodal: Vec<Vec<f64>>,
}

impl State {
    /// Commit spectral fields, canonicalizing them through physical space.
    ///
    /// The pressure keeps its spectral coefficients; it is diagnostic only.
    pub fn from_fields(
        u: VectorField,
        theta: ScalarField,
        d: DirectorField,
        mut p: ScalarField,
        t: f64,
    ) -> Self {
        let solenoidal = u.is_solenoidal();
        let [u1, u2, u3] = u.to_physical();
        let [d1, d2, d3] = d.to_physical();
        p.coeffs_mut()[0] = Default::default();
        let nodal = vec![u1, u2, u3, theta.to_physical(), d1, d2, d3, p.to_physical()];
        let grid = theta.grid().clone();
        let mut state = Self::spectral_from_nodal(&grid, nodal, t).expect("sizes match the grid");
        state.u = state.u.mark_solenoidal(solenoidal);
        state.p = p;
        state
    }

    /// Rebuild a state from nodal values in [`STATE_COMPONENTS`] order.
    pub fn from_nodal(grid: &Arc<Grid>, nodal: Vec<Vec<f64>>, t: f64) -> Result<Self, FieldError> {
        if nodal.len() != STATE_COMPONENTS.len() {
            return Err(FieldError::SizeMismatch {
                expected: STATE_COMPONENTS.len(),
                got: nodal.len(),
            });
        }
        let mut state = Self::spectral_from_nodal(grid, nodal, t)?;
        state.p.coeffs_mut()[0] = Default::default();
        let scale = l2_norm_sq(&state.u).sqrt() / grid.volume().sqrt();
        let solenoidal = divergence_residual(&state.u) <= 1e-10 * scale.max(1.0);
        state.u = state.u.mark_solenoidal(solenoidal);
        Ok(state)
    }

    fn spectral_from_nodal(
        grid: &Arc<Grid>,
        nodal: Vec<Vec<f64>>,
        t: f64,
    ) -> Result<Self, FieldError> {
        let u = VectorField::from_physical(grid, [&nodal[0], &nodal[1], &nodal[2]])?;
        let theta = ScalarField::from_physical(grid, &nodal[3])?;
        let d = DirectorField::new(VectorField::from_physical(
            grid,
            [&nodal[4], &nodal[5], &nodal[6]],
        )?);
        let p = ScalarField::from_physical(grid, &nodal[7])?;
        Ok(State {
            u,
            theta,
            d,
            p,
            t,
            nodal,
        })
    }

    #[inline]
    pub fn grid(&self) -> &Arc<Grid> {
        self.theta.grid()
    }

    #[inline]
    pub fn u(&self) -> &VectorField {
        &self.u
    }

    #[inline]
    pub fn theta(&self) -> &ScalarField {
        &self.theta
    }

    #[inline]
    pub fn d(&self) -> &DirectorField {
        &self.d
    }

    #[inline]
    pub fn p(&self) -> &ScalarField {
        &self.p
    }

    #[inline]
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Nodal values of one component, see [`STATE_COMPONENTS`].
    pub fn nodal(&self, component: usize) -> &[f64] {
        &self.nodal[component]
    }

    pub fn nodal_components(&self) -> Vec<&[f64]> {
        self.nodal.iter().map(Vec::as_slice).collect()
    }

    /// Nodal values of `|d|`.
    pub fn director_magnitude(&self) -> Vec<f64> {
        (0..self.grid().len())
            .map(|i| {
                let (a, b, c) = (self.nodal[4][i], self.nodal[5][i], self.nodal[6][i]);
                (a * a + b * b + c * c).sqrt()
            })
            .collect()
    }

    /// Same evolution fields, different pressure.
    pub fn with_pressure(mut self, p: ScalarField) -> Self {
        let mut p = p;
        p.coeffs_mut()[0] = Default::default();
        self.nodal[7] = p.to_physical();
        self.p = p;
        self
    }

    /// Whether any nodal value is NaN or infinite.
    pub fn has_non_finite(&self) -> bool {
        self.nodal.iter().any(|c| c.iter().any(|v| !v.is_finite()))
    }
}
