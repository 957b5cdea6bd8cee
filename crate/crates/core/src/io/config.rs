//! Run configuration: strict JSON schema, defaults, dotted-key overrides.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coefficients::{CoefficientModel, CouplingLaw, ViscosityLaw};
use crate::stepper::{Splitting, StepConfig};

use super::ConfigError;

/// Environment variable naming the directory relative output paths live in.
pub const OUTPUT_ROOT_ENV: &str = "NEMATIC_OUTPUT_ROOT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "D")]
    pub half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: 16,
            half_width: PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// `saturating`, `tanh` or `constant`.
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub theta_floor: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            name: "saturating".into(),
            params: BTreeMap::new(),
            theta_floor: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialDataConfig {
    /// `rest`, `shear-twist` or `random-smooth`; ignored when `snapshot` is set.
    pub preset: String,
    pub snapshot: Option<PathBuf>,
    pub seed: u64,
    /// Velocity amplitude.
    pub amplitude: f64,
    /// Director winding number.
    pub alpha: f64,
    /// Height of the temperature bump above the floor.
    pub bump: f64,
    pub perturbation: Option<PerturbationSpec>,
}

impl Default for InitialDataConfig {
    fn default() -> Self {
        InitialDataConfig {
            preset: "rest".into(),
            snapshot: None,
            seed: 42,
            amplitude: 1.0,
            alpha: 1.0,
            bump: 0.5,
            perturbation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SteppingConfig {
    pub dt: f64,
    pub t_end: f64,
    pub splitting: Splitting,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub dealias_on: bool,
}

impl Default for SteppingConfig {
    fn default() -> Self {
        let s = StepConfig::default();
        SteppingConfig {
            dt: s.dt,
            t_end: 10.0 * s.dt,
            splitting: s.splitting,
            picard_tol: s.picard_tol,
            picard_max: s.picard_max,
            dealias_on: s.dealias_on,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Snapshot period in steps; 0 writes only the final state.
    pub snapshot_every: u64,
    pub diagnostics_path: PathBuf,
    pub snapshot_dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            snapshot_every: 0,
            diagnostics_path: "diagnostics.jsonl".into(),
            snapshot_dir: "snapshots".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub model: ModelConfig,
    pub initial_data: InitialDataConfig,
    pub stepping: SteppingConfig,
    pub output: OutputConfig,
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

fn positive(key: &str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("{key} must be positive, got {value}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = self.grid.n;
        if n < 8 || !n.is_multiple_of(2) {
            return Err(invalid("grid.n", "grid.n must be even and ≥ 8"));
        }
        positive("grid.D", self.grid.half_width)?;
        positive("model.theta_floor", self.model.theta_floor)?;
        positive("stepping.dt", self.stepping.dt)?;
        positive("stepping.t_end", self.stepping.t_end)?;
        if !(self.stepping.picard_tol > 0.0 && self.stepping.picard_tol < 1.0) {
            return Err(invalid(
                "stepping.picard_tol",
                "stepping.picard_tol must lie in (0, 1)",
            ));
        }
        if self.stepping.picard_max == 0 {
            return Err(invalid(
                "stepping.picard_max",
                "stepping.picard_max must be at least 1",
            ));
        }
        if self.initial_data.snapshot.is_none()
            && !["rest", "shear-twist", "random-smooth"]
                .contains(&self.initial_data.preset.as_str())
        {
            return Err(invalid(
                "initial_data.preset",
                format!("unknown initial_data.preset {:?}", self.initial_data.preset),
            ));
        }
        if self.initial_data.alpha.fract() != 0.0 {
            return Err(invalid(
                "initial_data.alpha",
                "initial_data.alpha must be an integer",
            ));
        }
        if !(self.initial_data.bump >= 0.0) {
            return Err(invalid(
                "initial_data.bump",
                "initial_data.bump must be nonnegative",
            ));
        }
        if let Some(p) = &self.initial_data.perturbation {
            if !(p.delta >= 0.0 && p.delta.is_finite()) {
                return Err(invalid(
                    "initial_data.perturbation.delta",
                    "perturbation delta must be nonnegative",
                ));
            }
        }
        self.coefficient_model()?;
        Ok(())
    }

    pub fn coefficient_model(&self) -> Result<CoefficientModel, ConfigError> {
        let m = &self.model;
        let names: &[&str] = match m.name.as_str() {
            "saturating" | "tanh" => &["mu_lo", "mu_hi", "lambda_bar", "rate"],
            "constant" => &["mu", "lambda"],
            other => {
                return Err(invalid(
                    "model.name",
                    format!("unknown model.name {other:?}"),
                ))
            }
        };
        if let Some(key) = m.params.keys().find(|k| !names.contains(&k.as_str())) {
            let key = format!("model.params.{key}");
            return Err(invalid(
                &key,
                format!("unknown parameter {key} for model {:?}", m.name),
            ));
        }
        let get = |k: &str, default: f64| m.params.get(k).copied().unwrap_or(default);
        let built = match m.name.as_str() {
            "constant" => {
                CoefficientModel::constant(get("mu", 1.0), get("lambda", 1.0), m.theta_floor)
            }
            name => {
                let viscosity = ViscosityLaw::Exponential {
                    lo: get("mu_lo", 0.1),
                    hi: get("mu_hi", 1.0),
                };
                let (bar, rate) = (get("lambda_bar", 1.0), get("rate", 1.0));
                let coupling = if name == "tanh" {
                    CouplingLaw::Tanh { bar, rate }
                } else {
                    CouplingLaw::Saturating { bar, rate }
                };
                CoefficientModel::new(viscosity, coupling, m.theta_floor)
            }
        };
        built.map_err(|e| invalid("model", e.to_string()))
    }

    pub fn step_config(&self) -> StepConfig {
        let s = &self.stepping;
        StepConfig {
            dt: s.dt,
            picard_tol: s.picard_tol,
            picard_max: s.picard_max,
            splitting: s.splitting,
            dealias_on: s.dealias_on,
            ..StepConfig::default()
        }
    }

    /// Number of steps to reach `t_end`.
    pub fn total_steps(&self) -> u64 {
        (self.stepping.t_end / self.stepping.dt).round().max(1.0) as u64
    }
}

/// Set `a.b.c = value` in a JSON tree; the value is parsed as JSON when
/// possible and kept as a string otherwise.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment.split_once('=').ok_or_else(|| {
        invalid(
            "--override",
            format!("expected key=value, got {assignment:?}"),
        )
    })?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let map = match node {
            Value::Object(map) => map,
            _ => {
                return Err(invalid(
                    key,
                    format!("{} is not a section", parts[..i].join(".")),
                ))
            }
        };
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Err(invalid(key, "empty key"))
}

pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut value: Value =
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let config: RunConfig =
        serde_json::from_value(value).map_err(|e| ConfigError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_config(&text, overrides)
}

/// Resolve a configured path against the output root.
pub fn output_path(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) => Path::new(&root).join(path),
        None => path.to_path_buf(),
    }
}
