use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::FieldError;

/// Grids at or above this size run the FFT line passes on the rayon pool.
const PARALLEL_MIN_N: usize = 32;

/// Which modes survive dealiasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DealiasRule {
    /// Keep `|m_j| <= n/3` on every axis.
    TwoThirds,
    /// Keep `|m_j| <= n/4` on every axis (exact for cubic products).
    Half,
}

/// Uniform periodic grid on the box `[-D, D)^3` with `n` points per axis.
///
/// Spectral arrays use DFT ordering on every axis and are stored with the
/// first axis fastest: index `(i3 * n + i2) * n + i1`. Coefficients are
/// normalized so that the zero mode equals the mean.
pub struct Grid {
    n: usize,
    half_width: f64,
    modes: Vec<i64>,
    wavenumbers: Vec<f64>,
    deriv_wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("half_width", &self.half_width)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_width == other.half_width
    }
}

impl Grid {
    pub fn new(n: usize, half_width: f64) -> Result<Arc<Self>, FieldError> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(FieldError::InvalidGrid(format!(
                "n must be even and >= 8, got {n}"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(FieldError::InvalidGrid(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        let modes: Vec<i64> = (0..n)
            .map(|j| {
                if j < n / 2 {
                    j as i64
                } else {
                    j as i64 - n as i64
                }
            })
            .collect();
        let base = std::f64::consts::PI / half_width;
        let wavenumbers: Vec<f64> = modes.iter().map(|&m| base * m as f64).collect();
        let nyquist = -(n as i64 / 2);
        let deriv_wavenumbers = modes
            .iter()
            .zip(&wavenumbers)
            .map(|(&m, &k)| if m == nyquist { 0.0 } else { k })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            n,
            half_width,
            modes,
            wavenumbers,
            deriv_wavenumbers,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Number of grid points, `n^3`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Box volume `(2D)^3`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(3)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Physical coordinate of grid index `i` along any axis.
    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Coordinates of the point with flat index `idx`.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        [
            self.coordinate(idx % n),
            self.coordinate((idx / n) % n),
            self.coordinate(idx / (n * n)),
        ]
    }

    /// Signed mode index per axis in DFT order.
    #[inline]
    pub fn modes(&self) -> &[i64] {
        &self.modes
    }

    /// Wavenumber per DFT index, Nyquist included.
    #[inline]
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Wavenumber used for odd-order derivatives: zero at the Nyquist index.
    #[inline]
    pub fn deriv_wavenumbers(&self) -> &[f64] {
        &self.deriv_wavenumbers
    }

    /// `(i1, i2, i3)` for a flat index.
    #[inline]
    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx % n, (idx / n) % n, idx / (n * n)]
    }

    /// `|k|^2` for every flat spectral index.
    pub fn k_squared(&self) -> Vec<f64> {
        let k = &self.wavenumbers;
        (0..self.len())
            .map(|idx| {
                let [a, b, c] = self.unflatten(idx);
                k[a] * k[a] + k[b] * k[b] + k[c] * k[c]
            })
            .collect()
    }

    /// Derivative wavevector at a flat index.
    #[inline]
    pub fn deriv_k(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.unflatten(idx);
        let k = &self.deriv_wavenumbers;
        [k[a], k[b], k[c]]
    }

    /// Full wavevector at a flat index.
    #[inline]
    pub fn k(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.unflatten(idx);
        let k = &self.wavenumbers;
        [k[a], k[b], k[c]]
    }

    /// Largest `|m|` kept on each axis by a dealiasing rule.
    pub fn band_limit(&self, rule: DealiasRule) -> i64 {
        match rule {
            DealiasRule::TwoThirds => self.n as i64 / 3,
            DealiasRule::Half => self.n as i64 / 4,
        }
    }

    /// Whether the mode at a flat index lies in the cube `|m_j| <= cutoff`.
    #[inline]
    pub fn within_cutoff(&self, idx: usize, cutoff: i64) -> bool {
        let [a, b, c] = self.unflatten(idx);
        self.modes[a].abs() <= cutoff
            && self.modes[b].abs() <= cutoff
            && self.modes[c].abs() <= cutoff
    }

    /// Mode with signed indices `m` as a flat index.
    pub fn flat_index(&self, m: [i64; 3]) -> usize {
        let n = self.n as i64;
        let wrap = |v: i64| (((v % n) + n) % n) as usize;
        (wrap(m[2]) * self.n + wrap(m[1])) * self.n + wrap(m[0])
    }

    /// Normalized forward transform of real samples.
    pub fn forward(&self, values: &[f64]) -> Result<Vec<Complex64>, FieldError> {
        self.check_len(values.len())?;
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft3(&mut data, &self.forward);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        Ok(data)
    }

    /// Inverse transform; the imaginary residue of Hermitian input is dropped.
    pub fn backward(&self, coeffs: &[Complex64]) -> Result<Vec<f64>, FieldError> {
        self.check_len(coeffs.len())?;
        let mut data = coeffs.to_vec();
        self.fft3(&mut data, &self.inverse);
        Ok(data.into_iter().map(|c| c.re).collect())
    }

    fn check_len(&self, len: usize) -> Result<(), FieldError> {
        if len != self.len() {
            return Err(FieldError::SizeMismatch {
                expected: self.len(),
                got: len,
            });
        }
        Ok(())
    }

    // Transform along the contiguous axis, then rotate axes so the next one
    // becomes contiguous; three rotations restore the original layout.
    fn fft3(&self, data: &mut Vec<Complex64>, plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let parallel = n >= PARALLEL_MIN_N;
        let mut scratch = vec![Complex64::new(0.0, 0.0); data.len()];
        for _ in 0..3 {
            if parallel {
                data.par_chunks_mut(n * n)
                    .for_each(|plane| plan.process(plane));
            } else {
                plan.process(data);
            }
            rotate_axes(data, &mut scratch, n, parallel);
            std::mem::swap(data, &mut scratch);
        }
    }
}

// dst[r][p][q] = src[p][q][r]
fn rotate_axes(src: &[Complex64], dst: &mut [Complex64], n: usize, parallel: bool) {
    let fill = |r: usize, block: &mut [Complex64]| {
        for p in 0..n {
            for q in 0..n {
                block[p * n + q] = src[(p * n + q) * n + r];
            }
        }
    };
    if parallel {
        dst.par_chunks_mut(n * n)
            .enumerate()
            .for_each(|(r, block)| fill(r, block));
    } else {
        dst.chunks_mut(n * n)
            .enumerate()
            .for_each(|(r, block)| fill(r, block));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(7, PI).is_err());
        assert!(Grid::new(6, PI).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, PI).is_ok());
    }

    #[test]
    fn geometry() {
        let g = Grid::new(16, 2.0).unwrap();
        assert_eq!(g.len(), 4096);
        assert!((g.spacing() - 0.25).abs() < 1e-15);
        assert_eq!(g.coordinate(0), -2.0);
        assert_eq!(g.wavenumbers()[0], 0.0);
        assert!((g.wavenumbers()[1] - PI / 2.0).abs() < 1e-15);
        assert_eq!(g.modes()[8], -8);
        assert_eq!(g.deriv_wavenumbers()[8], 0.0);
        assert_eq!(g.flat_index([-1, 2, 3]), (3 * 16 + 2) * 16 + 15);
    }

    #[test]
    fn parallel_and_serial_paths_agree() {
        // n = 32 takes the parallel path; compare with a direct DFT on one mode
        let g = Grid::new(32, PI).unwrap();
        let values: Vec<f64> = (0..g.len())
            .map(|i| {
                let [x, y, z] = g.point(i);
                (2.0 * x + y).cos() + 0.5 * (3.0 * z).sin()
            })
            .collect();
        let c = g.forward(&values).unwrap();
        let idx = g.flat_index([2, 1, 0]);
        // cos(2x + y) with x = -pi + ..., phase (-1)^(2+1) = -1
        assert!((c[idx] - Complex64::new(-0.5, 0.0)).norm() < 1e-13);
        let back = g.backward(&c).unwrap();
        let err = back
            .iter()
            .zip(&values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-13);
    }
}
