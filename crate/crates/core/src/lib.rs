//! Pseudospectral Galerkin solver for the non-isothermal, penalized
//! Ericksen-Leslie system on a periodic box, with the a priori estimates of
//! the model turned into runtime diagnostics.

pub mod coefficients;
pub mod diagnostics;
pub mod experiments;
pub mod io;
pub mod quadrature;
pub mod spectral;
pub mod stepper;
