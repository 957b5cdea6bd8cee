//! Periodic-box geometry, Fourier field types and mode-wise operators.

mod field;
mod grid;
pub mod ops;
pub mod snapshot;

use thiserror::Error;

pub use field::{DirectorField, ScalarField, SpectralField, VectorField};
pub use grid::{DealiasRule, Grid};

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("Sobolev order {0} is not supported (0..=3)")]
    UnsupportedOrder(u32),
    #[error("snapshot format: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
