use std::ops::Deref;
use std::sync::Arc;

use rand::Rng;
use rustfft::num_complex::Complex64;

use super::grid::Grid;
use super::FieldError;

/// Real scalar field stored by its Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        ScalarField {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Result<Self, FieldError> {
        if coeffs.len() != grid.len() {
            return Err(FieldError::SizeMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(ScalarField {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn from_physical(grid: &Arc<Grid>, values: &[f64]) -> Result<Self, FieldError> {
        Ok(ScalarField {
            grid: grid.clone(),
            coeffs: grid.forward(values)?,
        })
    }

    /// Sample `f` at every grid point and transform.
    pub fn from_fn<F: Fn([f64; 3]) -> f64>(grid: &Arc<Grid>, f: F) -> Self {
        let values: Vec<f64> = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::from_physical(grid, &values).expect("sampled values match the grid")
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        let mut field = Self::zeros(grid);
        field.coeffs[0] = Complex64::new(value, 0.0);
        field
    }

    /// Uniform random samples in `[-1, 1]`.
    pub fn random<R: Rng>(grid: &Arc<Grid>, rng: &mut R) -> Self {
        let values: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Self::from_physical(grid, &values).expect("sampled values match the grid")
    }

    #[inline]
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn to_physical(&self) -> Vec<f64> {
        self.grid
            .backward(&self.coeffs)
            .expect("coefficients match the grid")
    }

    /// Spatial mean (the zero mode).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn scale(&mut self, factor: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= factor);
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &ScalarField) {
        debug_assert!(Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid);
        self.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a += b * factor);
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Largest violation of `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let n = g.n();
        (0..g.len())
            .map(|idx| {
                let [a, b, c] = g.unflatten(idx);
                let mirror = (((n - c) % n) * n + (n - b) % n) * n + (n - a) % n;
                (self.coeffs[idx] - self.coeffs[mirror].conj()).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Three-component real vector field in spectral form.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: [ScalarField; 3],
    solenoidal: bool,
}

impl VectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        VectorField {
            components: [
                ScalarField::zeros(grid),
                ScalarField::zeros(grid),
                ScalarField::zeros(grid),
            ],
            solenoidal: true,
        }
    }

    pub fn from_components(components: [ScalarField; 3]) -> Result<Self, FieldError> {
        let g = components[0].grid();
        if components.iter().any(|c| **c.grid() != **g) {
            return Err(FieldError::GridMismatch);
        }
        Ok(VectorField {
            components,
            solenoidal: false,
        })
    }

    pub fn from_fn<F: Fn([f64; 3]) -> [f64; 3]>(grid: &Arc<Grid>, f: F) -> Self {
        let samples: Vec<[f64; 3]> = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        let comp = |j: usize| {
            let values: Vec<f64> = samples.iter().map(|v| v[j]).collect();
            ScalarField::from_physical(grid, &values).expect("sampled values match the grid")
        };
        VectorField {
            components: [comp(0), comp(1), comp(2)],
            solenoidal: false,
        }
    }

    pub fn from_physical(grid: &Arc<Grid>, values: [&[f64]; 3]) -> Result<Self, FieldError> {
        Ok(VectorField {
            components: [
                ScalarField::from_physical(grid, values[0])?,
                ScalarField::from_physical(grid, values[1])?,
                ScalarField::from_physical(grid, values[2])?,
            ],
            solenoidal: false,
        })
    }

    pub fn random<R: Rng>(grid: &Arc<Grid>, rng: &mut R) -> Self {
        VectorField {
            components: [
                ScalarField::random(grid, rng),
                ScalarField::random(grid, rng),
                ScalarField::random(grid, rng),
            ],
            solenoidal: false,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Arc<Grid> {
        self.components[0].grid()
    }

    #[inline]
    pub fn component(&self, j: usize) -> &ScalarField {
        &self.components[j]
    }

    #[inline]
    pub fn components(&self) -> &[ScalarField; 3] {
        &self.components
    }

    /// Mutable access drops the solenoidal tag.
    pub fn components_mut(&mut self) -> &mut [ScalarField; 3] {
        self.solenoidal = false;
        &mut self.components
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.components
    }

    /// Whether the field came out of a Leray projection.
    #[inline]
    pub fn is_solenoidal(&self) -> bool {
        self.solenoidal
    }

    pub(crate) fn mark_solenoidal(mut self, solenoidal: bool) -> Self {
        self.solenoidal = solenoidal;
        self
    }

    pub fn to_physical(&self) -> [Vec<f64>; 3] {
        [
            self.components[0].to_physical(),
            self.components[1].to_physical(),
            self.components[2].to_physical(),
        ]
    }

    /// Scaling keeps the solenoidal tag.
    pub fn scale(&mut self, factor: f64) {
        self.components.iter_mut().for_each(|c| c.scale(factor));
    }

    /// `self += factor * other`; the result is solenoidal iff both are.
    pub fn axpy(&mut self, factor: f64, other: &VectorField) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.axpy(factor, b);
        }
        self.solenoidal &= other.solenoidal;
    }

    pub fn sub(&self, other: &VectorField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }
}

/// Director (orientation) field. The penalized model lets `|d|` leave 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectorField(VectorField);

impl DirectorField {
    pub fn new(field: VectorField) -> Self {
        DirectorField(field.mark_solenoidal(false))
    }

    pub fn from_fn<F: Fn([f64; 3]) -> [f64; 3]>(grid: &Arc<Grid>, f: F) -> Self {
        DirectorField(VectorField::from_fn(grid, f))
    }

    /// Spatially constant director.
    pub fn uniform(grid: &Arc<Grid>, value: [f64; 3]) -> Self {
        let components = value.map(|v| ScalarField::constant(grid, v));
        DirectorField(VectorField {
            components,
            solenoidal: false,
        })
    }

    pub fn as_vector(&self) -> &VectorField {
        &self.0
    }

    pub fn as_vector_mut(&mut self) -> &mut VectorField {
        &mut self.0
    }

    pub fn into_vector(self) -> VectorField {
        self.0
    }

    pub fn sub(&self, other: &DirectorField) -> DirectorField {
        DirectorField(self.0.sub(&other.0))
    }
}

impl Deref for DirectorField {
    type Target = VectorField;

    fn deref(&self) -> &VectorField {
        &self.0
    }
}

/// Common view over scalar, vector and director fields as a list of scalar
/// components.
pub trait SpectralField {
    fn scalar_components(&self) -> &[ScalarField];

    fn field_grid(&self) -> &Arc<Grid> {
        self.scalar_components()[0].grid()
    }
}

impl SpectralField for ScalarField {
    fn scalar_components(&self) -> &[ScalarField] {
        std::slice::from_ref(self)
    }
}

impl SpectralField for VectorField {
    fn scalar_components(&self) -> &[ScalarField] {
        &self.components
    }
}

impl SpectralField for DirectorField {
    fn scalar_components(&self) -> &[ScalarField] {
        &self.0.components
    }
}
