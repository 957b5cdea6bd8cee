//! Temperature-dependent material coefficients.
//!
//! A [`CoefficientModel`] pairs a viscosity law `mu(theta)` with an
//! elastic-coupling law `lambda(theta)`, a temperature floor, and the declared
//! bounds every production model must respect. The thermal potential
//! `Lambda(theta) = int_{floor}^{theta} ds / lambda(s)` and the constant
//! `K = 1 / lambda(floor)` used by the energy functional live here as well.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature;

/// Relative tolerance used when `Lambda` has no closed form.
pub const CAPITAL_LAMBDA_REL_TOL: f64 = 1e-10;

/// Absolute tolerance on `lambda(0) = 0`.
pub const LAMBDA_AT_ZERO_TOL: f64 = 1e-12;

// Margins are computed in floating point; values that sit exactly on a bound
// can land an ulp or two on the wrong side.
const ROUNDING_SLACK: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoefficientError {
    #[error("temperature sample set is empty")]
    EmptySamples,
    #[error("temperature sample {0} is negative")]
    NegativeTemperature(f64),
    #[error("Lambda is only defined above the temperature floor: theta = {theta} < {floor}")]
    BelowFloor { theta: f64, floor: f64 },
    #[error("lambda(theta_floor) = {0} is not positive; the model is invalid")]
    NonPositiveCoupling(f64),
    #[error("temperature floor must be positive, got {0}")]
    InvalidFloor(f64),
    #[error("invalid coefficient parameter: {0}")]
    InvalidParameter(String),
}

/// Viscosity law `mu(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum ViscosityLaw {
    /// `lo + (hi - lo) exp(-theta)`.
    Exponential { lo: f64, hi: f64 },
    /// Constant viscosity; only admitted in relaxed models.
    Constant { value: f64 },
}

/// Elastic-coupling law `lambda(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum CouplingLaw {
    /// `bar (1 - exp(-rate theta))`.
    Saturating { bar: f64, rate: f64 },
    /// `bar tanh(rate theta)`. Its potential is integrated numerically.
    Tanh { bar: f64, rate: f64 },
    /// `slope theta`; unbounded, so it fails validation for `theta > 1`.
    Linear { slope: f64 },
    /// Constant coupling; violates `lambda(0) = 0`, relaxed models only.
    Constant { value: f64 },
}

impl ViscosityLaw {
    pub fn value(&self, theta: f64) -> f64 {
        match *self {
            ViscosityLaw::Exponential { lo, hi } => lo + (hi - lo) * (-theta).exp(),
            ViscosityLaw::Constant { value } => value,
        }
    }

    pub fn d1(&self, theta: f64) -> f64 {
        match *self {
            ViscosityLaw::Exponential { lo, hi } => -(hi - lo) * (-theta).exp(),
            ViscosityLaw::Constant { .. } => 0.0,
        }
    }

    pub fn d2(&self, theta: f64) -> f64 {
        match *self {
            ViscosityLaw::Exponential { lo, hi } => (hi - lo) * (-theta).exp(),
            ViscosityLaw::Constant { .. } => 0.0,
        }
    }
}

impl CouplingLaw {
    pub fn value(&self, theta: f64) -> f64 {
        match *self {
            CouplingLaw::Saturating { bar, rate } => -bar * (-rate * theta).exp_m1(),
            CouplingLaw::Tanh { bar, rate } => bar * (rate * theta).tanh(),
            CouplingLaw::Linear { slope } => slope * theta,
            CouplingLaw::Constant { value } => value,
        }
    }

    pub fn d1(&self, theta: f64) -> f64 {
        match *self {
            CouplingLaw::Saturating { bar, rate } => bar * rate * (-rate * theta).exp(),
            CouplingLaw::Tanh { bar, rate } => {
                let sech = 1.0 / (rate * theta).cosh();
                bar * rate * sech * sech
            }
            CouplingLaw::Linear { slope } => slope,
            CouplingLaw::Constant { .. } => 0.0,
        }
    }

    pub fn d2(&self, theta: f64) -> f64 {
        match *self {
            CouplingLaw::Saturating { bar, rate } => -bar * rate * rate * (-rate * theta).exp(),
            CouplingLaw::Tanh { bar, rate } => {
                let sech = 1.0 / (rate * theta).cosh();
                -2.0 * bar * rate * rate * sech * sech * (rate * theta).tanh()
            }
            CouplingLaw::Linear { .. } | CouplingLaw::Constant { .. } => 0.0,
        }
    }
}

/// Declared bounds on the coefficient functions and their derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBounds {
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub mu_d1_max: f64,
    pub mu_d2_max: f64,
    pub lambda_max: f64,
    pub lambda_d1_max: f64,
    pub lambda_d2_max: f64,
}

impl CoefficientBounds {
    /// Tight analytic bounds for the given laws.
    pub fn for_laws(viscosity: &ViscosityLaw, coupling: &CouplingLaw) -> Self {
        let (mu_lo, mu_hi, mu_d1_max, mu_d2_max) = match *viscosity {
            ViscosityLaw::Exponential { lo, hi } => (lo, hi, hi - lo, hi - lo),
            ViscosityLaw::Constant { value } => (value, value, 0.0, 0.0),
        };
        let (lambda_max, lambda_d1_max, lambda_d2_max) = match *coupling {
            CouplingLaw::Saturating { bar, rate } => (bar, bar * rate, bar * rate * rate),
            // max of sech^2 tanh is 2 / (3 sqrt 3)
            CouplingLaw::Tanh { bar, rate } => (
                bar,
                bar * rate,
                4.0 / (3.0 * 3f64.sqrt()) * bar * rate * rate,
            ),
            CouplingLaw::Linear { slope } => (slope, slope, slope),
            CouplingLaw::Constant { value } => (value, 0.0, 0.0),
        };
        CoefficientBounds {
            mu_lo,
            mu_hi,
            mu_d1_max,
            mu_d2_max,
            lambda_max,
            lambda_d1_max,
            lambda_d2_max,
        }
    }
}

/// Viscosity and coupling laws with their temperature floor.
///
/// Immutable after construction; cheap to copy and share between threads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientModel {
    pub viscosity: ViscosityLaw,
    pub coupling: CouplingLaw,
    pub theta_floor: f64,
    pub bounds: CoefficientBounds,
    /// Set for constant-coefficient oracle models that intentionally
    /// violate `lambda(0) = 0`.
    pub relaxed: bool,
}

impl CoefficientModel {
    pub fn new(
        viscosity: ViscosityLaw,
        coupling: CouplingLaw,
        theta_floor: f64,
    ) -> Result<Self, CoefficientError> {
        if !(theta_floor > 0.0) || !theta_floor.is_finite() {
            return Err(CoefficientError::InvalidFloor(theta_floor));
        }
        let relaxed = matches!(viscosity, ViscosityLaw::Constant { .. })
            || matches!(coupling, CouplingLaw::Constant { .. });
        check_law_parameters(&viscosity, &coupling)?;
        Ok(CoefficientModel {
            viscosity,
            coupling,
            theta_floor,
            bounds: CoefficientBounds::for_laws(&viscosity, &coupling),
            relaxed,
        })
    }

    /// The production default: `lambda = 1 - exp(-theta)`,
    /// `mu = 0.1 + 0.9 exp(-theta)`.
    pub fn default_with_floor(theta_floor: f64) -> Result<Self, CoefficientError> {
        Self::new(
            ViscosityLaw::Exponential { lo: 0.1, hi: 1.0 },
            CouplingLaw::Saturating {
                bar: 1.0,
                rate: 1.0,
            },
            theta_floor,
        )
    }

    /// Constant `mu` and `lambda`, for comparisons against classical solvers.
    pub fn constant(mu: f64, lambda: f64, theta_floor: f64) -> Result<Self, CoefficientError> {
        Self::new(
            ViscosityLaw::Constant { value: mu },
            CouplingLaw::Constant { value: lambda },
            theta_floor,
        )
    }

    /// Replace the declared bounds (used to test validation itself).
    pub fn with_bounds(mut self, bounds: CoefficientBounds) -> Self {
        self.bounds = bounds;
        self
    }

    #[inline]
    pub fn mu(&self, theta: f64) -> f64 {
        self.viscosity.value(theta)
    }

    #[inline]
    pub fn mu_d1(&self, theta: f64) -> f64 {
        self.viscosity.d1(theta)
    }

    #[inline]
    pub fn mu_d2(&self, theta: f64) -> f64 {
        self.viscosity.d2(theta)
    }

    #[inline]
    pub fn lambda(&self, theta: f64) -> f64 {
        self.coupling.value(theta)
    }

    #[inline]
    pub fn lambda_d1(&self, theta: f64) -> f64 {
        self.coupling.d1(theta)
    }

    #[inline]
    pub fn lambda_d2(&self, theta: f64) -> f64 {
        self.coupling.d2(theta)
    }

    /// `Lambda(theta) = int_{theta_floor}^{theta} ds / lambda(s)`.
    pub fn capital_lambda(&self, theta: f64) -> Result<f64, CoefficientError> {
        let floor = self.theta_floor;
        if theta < floor || theta.is_nan() {
            return Err(CoefficientError::BelowFloor { theta, floor });
        }
        let value = match self.coupling {
            CouplingLaw::Saturating { bar, rate } => {
                let antiderivative = |s: f64| (s + (-(-rate * s).exp()).ln_1p() / rate) / bar;
                antiderivative(theta) - antiderivative(floor)
            }
            CouplingLaw::Linear { slope } => (theta / floor).ln() / slope,
            CouplingLaw::Constant { value } => (theta - floor) / value,
            CouplingLaw::Tanh { .. } => {
                let law = self.coupling;
                quadrature::integrate(|s| 1.0 / law.value(s), floor, theta, CAPITAL_LAMBDA_REL_TOL)
                    .0
            }
        };
        Ok(value)
    }

    /// `K = 1 / lambda(theta_floor)`, which makes `K theta - Lambda(theta)`
    /// nonnegative above the floor.
    pub fn gronwall_constant(&self) -> Result<f64, CoefficientError> {
        if !(self.theta_floor > 0.0) {
            return Err(CoefficientError::InvalidFloor(self.theta_floor));
        }
        let at_floor = self.lambda(self.theta_floor);
        if !(at_floor > 0.0) {
            return Err(CoefficientError::NonPositiveCoupling(at_floor));
        }
        Ok(1.0 / at_floor)
    }
}

fn check_law_parameters(
    viscosity: &ViscosityLaw,
    coupling: &CouplingLaw,
) -> Result<(), CoefficientError> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(CoefficientError::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )))
        }
    };
    match *viscosity {
        ViscosityLaw::Exponential { lo, hi } => {
            positive("mu_lo", lo)?;
            positive("mu_hi", hi)?;
            if hi < lo {
                return Err(CoefficientError::InvalidParameter(format!(
                    "mu_hi ({hi}) must not be below mu_lo ({lo})"
                )));
            }
        }
        ViscosityLaw::Constant { value } => positive("mu", value)?,
    }
    match *coupling {
        CouplingLaw::Saturating { bar, rate } | CouplingLaw::Tanh { bar, rate } => {
            positive("lambda_bar", bar)?;
            positive("lambda_rate", rate)?;
        }
        CouplingLaw::Linear { slope } => positive("lambda_slope", slope)?,
        CouplingLaw::Constant { value } => positive("lambda", value)?,
    }
    Ok(())
}

/// One checked inequality and its worst margin over the samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub worst_margin: f64,
    /// Temperature at which the worst margin occurred.
    pub worst_theta: f64,
    pub passed: bool,
    /// Waived for relaxed models.
    pub waived: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<BoundCheck>,
    pub passed: bool,
    pub relaxed: bool,
}

impl ValidationReport {
    /// Names of the checks that failed and were not waived.
    pub fn violations(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed && !c.waived)
            .map(|c| c.name)
            .collect()
    }
}

/// Check every structural assumption on `mu` and `lambda` at the given
/// temperatures and report the worst margin of each.
pub fn validate_assumptions(
    model: &CoefficientModel,
    theta_samples: &[f64],
) -> Result<ValidationReport, CoefficientError> {
    if theta_samples.is_empty() {
        return Err(CoefficientError::EmptySamples);
    }
    if let Some(&bad) = theta_samples.iter().find(|t| !(**t >= 0.0)) {
        return Err(CoefficientError::NegativeTemperature(bad));
    }
    let b = &model.bounds;
    let relaxed = model.relaxed;

    let sampled = |name: &'static str, margin: &dyn Fn(f64) -> f64| {
        let (worst_margin, worst_theta) = theta_samples.iter().map(|&t| (margin(t), t)).fold(
            (f64::INFINITY, f64::NAN),
            |acc, x| if x.0 < acc.0 { x } else { acc },
        );
        BoundCheck {
            name,
            worst_margin,
            worst_theta,
            passed: worst_margin >= -ROUNDING_SLACK,
            waived: false,
        }
    };

    let lambda0 = model.lambda(0.0);
    let lambda0_d1 = model.lambda_d1(0.0);
    let min_bound = [
        b.mu_lo,
        b.mu_hi,
        b.mu_d1_max,
        b.mu_d2_max,
        b.lambda_max,
        b.lambda_d1_max,
        b.lambda_d2_max,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);

    let mut checks = vec![
        BoundCheck {
            name: "lambda(0) = 0",
            worst_margin: LAMBDA_AT_ZERO_TOL - lambda0.abs(),
            worst_theta: 0.0,
            passed: lambda0.abs() <= LAMBDA_AT_ZERO_TOL,
            waived: relaxed,
        },
        BoundCheck {
            name: "lambda'(0) > 0",
            worst_margin: lambda0_d1,
            worst_theta: 0.0,
            passed: lambda0_d1 > 0.0,
            waived: relaxed,
        },
        BoundCheck {
            name: "bounds are positive",
            worst_margin: min_bound,
            worst_theta: f64::NAN,
            passed: min_bound > 0.0,
            waived: relaxed,
        },
        sampled("lambda(theta) <= lambda_max", &|t| {
            b.lambda_max - model.lambda(t)
        }),
        sampled("lambda'(theta) >= 0", &|t| model.lambda_d1(t)),
        sampled("lambda'(theta) <= lambda_d1_max", &|t| {
            b.lambda_d1_max - model.lambda_d1(t)
        }),
        sampled("|lambda''(theta)| <= lambda_d2_max", &|t| {
            b.lambda_d2_max - model.lambda_d2(t).abs()
        }),
        sampled("mu(theta) >= mu_lo", &|t| model.mu(t) - b.mu_lo),
        sampled("mu(theta) <= mu_hi", &|t| b.mu_hi - model.mu(t)),
        sampled("|mu'(theta)| <= mu_d1_max", &|t| {
            b.mu_d1_max - model.mu_d1(t).abs()
        }),
        sampled("|mu''(theta)| <= mu_d2_max", &|t| {
            b.mu_d2_max - model.mu_d2(t).abs()
        }),
    ];
    for c in checks.iter_mut() {
        if c.worst_margin.is_nan() {
            c.passed = false;
        }
    }
    let passed = checks.iter().all(|c| c.passed || c.waived);
    Ok(ValidationReport {
        checks,
        passed,
        relaxed,
    })
}

/// Uniform samples `0, step, 2 step, ...` up to and including `upper`, with
/// the floor inserted.
pub fn temperature_samples(upper: f64, step: f64, theta_floor: f64) -> Vec<f64> {
    let count = (upper / step).round() as usize;
    let mut samples: Vec<f64> = (0..=count).map(|i| i as f64 * step).collect();
    samples.push(theta_floor);
    samples
}

/// Ginzburg-Landau penalty at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GinzburgLandau {
    /// `W(d) = (|d|^2 - 1)^2`.
    pub energy: f64,
    /// `(|d|^2 - 1) d`, the gradient of `W / 4`.
    pub force: [f64; 3],
}

pub fn ginzburg_landau(d: [f64; 3]) -> GinzburgLandau {
    let excess = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - 1.0;
    GinzburgLandau {
        energy: excess * excess,
        force: [excess * d[0], excess * d[1], excess * d[2]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_model() -> CoefficientModel {
        CoefficientModel::default_with_floor(1.0).unwrap()
    }

    #[test]
    fn saturating_model_passes() {
        let model = default_model();
        let report = validate_assumptions(&model, &temperature_samples(100.0, 1e-3, 1.0)).unwrap();
        assert!(report.passed, "{:?}", report.violations());
        assert_eq!(model.lambda(0.0), 0.0);
        assert!(model.lambda_d1(0.0) > 0.0);
    }

    #[test]
    fn exponential_viscosity_margins_match_dense_sampling() {
        // independent recomputation of each margin from the closed forms
        let (lo, hi) = (0.1, 1.0);
        let model = default_model();
        let report = validate_assumptions(&model, &temperature_samples(100.0, 1e-3, 1.0)).unwrap();
        let get = |name: &str| {
            report
                .checks
                .iter()
                .find(|c| c.name == name)
                .unwrap()
                .worst_margin
        };
        let mut worst_hi = f64::INFINITY;
        let mut worst_lo = f64::INFINITY;
        for i in 0..=100_000 {
            let t = i as f64 * 1e-3;
            let mu = lo + (hi - lo) * (-t).exp();
            worst_hi = worst_hi.min(hi - mu);
            worst_lo = worst_lo.min(mu - lo);
        }
        assert!((get("mu(theta) <= mu_hi") - worst_hi).abs() < 1e-15);
        assert!((get("mu(theta) >= mu_lo") - worst_lo).abs() < 1e-15);
        assert!(get("|mu'(theta)| <= mu_d1_max") >= -1e-14);
        assert!(report.passed);
    }

    #[test]
    fn linear_coupling_fails_named_bound() {
        let model = CoefficientModel::new(
            ViscosityLaw::Exponential { lo: 0.1, hi: 1.0 },
            CouplingLaw::Linear { slope: 1.0 },
            1.0,
        )
        .unwrap();
        let report = validate_assumptions(&model, &[0.0, 1.0, 1.5, 3.0]).unwrap();
        assert!(!report.passed);
        assert_eq!(report.violations(), vec!["lambda(theta) <= lambda_max"]);
        let check = report
            .checks
            .iter()
            .find(|c| c.name == "lambda(theta) <= lambda_max")
            .unwrap();
        assert_eq!(check.worst_theta, 3.0);
        assert!((check.worst_margin + 2.0).abs() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        let model = default_model();
        assert_eq!(
            validate_assumptions(&model, &[]),
            Err(CoefficientError::EmptySamples)
        );
        assert_eq!(
            validate_assumptions(&model, &[0.0, -1.0]),
            Err(CoefficientError::NegativeTemperature(-1.0))
        );
    }

    #[test]
    fn relaxed_model_waives_zero_condition() {
        let model = CoefficientModel::constant(0.5, 0.25, 1.0).unwrap();
        assert!(model.relaxed);
        let report = validate_assumptions(&model, &[0.0, 1.0, 10.0]).unwrap();
        assert!(report.passed);
        let zero = report
            .checks
            .iter()
            .find(|c| c.name == "lambda(0) = 0")
            .unwrap();
        assert!(!zero.passed && zero.waived);
    }

    #[test]
    fn capital_lambda_anchor_and_errors() {
        let model = default_model();
        assert_eq!(model.capital_lambda(1.0).unwrap(), 0.0);
        assert!(matches!(
            model.capital_lambda(0.5),
            Err(CoefficientError::BelowFloor { .. })
        ));
    }

    #[test]
    fn capital_lambda_closed_form_matches_quadrature() {
        let model = default_model();
        let (oracle, _) = quadrature::integrate(|s: f64| 1.0 / (1.0 - (-s).exp()), 1.0, 2.0, 1e-13);
        let value = model.capital_lambda(2.0).unwrap();
        assert!((value - oracle).abs() <= 1e-10 * oracle.abs());
    }

    #[test]
    fn capital_lambda_tanh_quadrature_matches_closed_form() {
        let (bar, rate) = (0.8, 1.7);
        let model = CoefficientModel::new(
            ViscosityLaw::Exponential { lo: 0.1, hi: 1.0 },
            CouplingLaw::Tanh { bar, rate },
            0.5,
        )
        .unwrap();
        // d/ds ln sinh(rate s) / (bar rate) = 1 / (bar tanh(rate s))
        let closed = |s: f64| (rate * s).sinh().ln() / (bar * rate);
        for &theta in &[0.5, 0.7, 2.0, 10.0, 80.0] {
            let expected = closed(theta) - closed(0.5);
            let got = model.capital_lambda(theta).unwrap();
            assert!(
                (got - expected).abs() <= 1e-10 * expected.abs().max(1e-300),
                "{theta}"
            );
        }
    }

    #[test]
    fn capital_lambda_derivative_is_reciprocal_coupling() {
        let model = default_model();
        let h = 1e-5;
        for &theta in &[1.1, 1.7, 3.0, 12.0, 60.0] {
            let fd = (model.capital_lambda(theta + h).unwrap()
                - model.capital_lambda(theta - h).unwrap())
                / (2.0 * h);
            let exact = 1.0 / model.lambda(theta);
            assert!(
                (fd - exact).abs() / exact < 1e-8,
                "{theta}: {fd} vs {exact}"
            );
        }
    }

    #[test]
    fn gronwall_constant_values() {
        // lambda(floor) = 0.5 at floor = ln 2 for the (1, 1) saturating law
        let model = CoefficientModel::default_with_floor(2f64.ln()).unwrap();
        assert!((model.gronwall_constant().unwrap() - 2.0).abs() < 1e-14);

        let constant = CoefficientModel::constant(1.0, 0.4, 0.3).unwrap();
        let k = constant.gronwall_constant().unwrap();
        for &theta in &[0.3, 1.0, 5.0] {
            let gap = k * theta - constant.capital_lambda(theta).unwrap();
            assert!((gap - 0.3 / 0.4).abs() < 1e-14);
        }
    }

    #[test]
    fn gronwall_gap_nonnegative_on_range() {
        let model = default_model();
        let k = model.gronwall_constant().unwrap();
        let floor = model.theta_floor;
        for i in 0..=5000 {
            let theta = floor + i as f64 * (49.0 * floor) / 5000.0;
            assert!(k * theta - model.capital_lambda(theta).unwrap() >= 0.0);
        }
    }

    #[test]
    fn ginzburg_landau_examples() {
        let unit = ginzburg_landau([1.0, 0.0, 0.0]);
        assert_eq!(unit.energy, 0.0);
        assert_eq!(unit.force, [0.0; 3]);
        let zero = ginzburg_landau([0.0; 3]);
        assert_eq!(zero.energy, 1.0);
        assert_eq!(zero.force, [0.0; 3]);
        let big = ginzburg_landau([2.0, 0.0, 0.0]);
        assert_eq!(big.energy, 9.0);
        assert_eq!(big.force, [6.0, 0.0, 0.0]);
        let h = 1e-6;
        let fd = (ginzburg_landau([2.0 + h, 0.0, 0.0]).energy
            - ginzburg_landau([2.0 - h, 0.0, 0.0]).energy)
            / (8.0 * h);
        assert!((fd - 6.0).abs() < 1e-6);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(CoefficientModel::default_with_floor(0.0).is_err());
        assert!(CoefficientModel::new(
            ViscosityLaw::Exponential { lo: 1.0, hi: 0.5 },
            CouplingLaw::Saturating {
                bar: 1.0,
                rate: 1.0
            },
            1.0
        )
        .is_err());
    }
}
