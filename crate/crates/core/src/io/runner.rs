//! Run orchestration: stepping, diagnostics stream, snapshots, resume.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostics::{
    principle_checks, record, DiagnosticsError, DiagnosticsRecord, DirectorRateForm,
    PrincipleTracker, CUMULATIVE_TOL, DIV_TOL, PRINCIPLE_TOL,
};
use crate::spectral::snapshot::{write_snapshot, SnapshotHeader};
use crate::spectral::Grid;
use crate::stepper::{pressure_solve, State, StepError, Stepper, STATE_COMPONENTS};

use super::config::{output_path, RunConfig};
use super::initial::{load_snapshot, make_initial_data};
use super::RunError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub steps: u64,
    pub t: f64,
    pub diagnostics_path: PathBuf,
    pub last_snapshot: Option<PathBuf>,
}

pub fn snapshot_name(step: u64) -> String {
    format!("snapshot_{step:08}.bin")
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError::Io(format!("{}: {e}", path.display()))
}

pub fn save_snapshot(state: &State, path: &Path) -> Result<(), RunError> {
    let grid = state.grid();
    let header = SnapshotHeader {
        n: grid.n(),
        half_width: grid.half_width(),
        component_count: STATE_COMPONENTS.len(),
        time: state.t(),
    };
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    write_snapshot(BufWriter::new(file), &header, &state.nodal_components())?;
    Ok(())
}

struct Output {
    diagnostics: BufWriter<File>,
    diagnostics_path: PathBuf,
    snapshot_dir: PathBuf,
    snapshot_every: u64,
    last_snapshot: Option<PathBuf>,
}

impl Output {
    fn open(config: &RunConfig, append: bool) -> Result<Self, RunError> {
        let diagnostics_path = output_path(&config.output.diagnostics_path);
        let snapshot_dir = output_path(&config.output.snapshot_dir);
        if let Some(parent) = diagnostics_path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
        {
            fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
        }
        fs::create_dir_all(&snapshot_dir).map_err(|e| io_error(&snapshot_dir, e))?;
        let file = OpenOptions::new()
            .create(true)
            .write(true)
            .append(append)
            .truncate(!append)
            .open(&diagnostics_path)
            .map_err(|e| io_error(&diagnostics_path, e))?;
        Ok(Output {
            diagnostics: BufWriter::new(file),
            diagnostics_path,
            snapshot_dir,
            snapshot_every: config.output.snapshot_every,
            last_snapshot: None,
        })
    }

    fn write_record(&mut self, rec: &DiagnosticsRecord) -> Result<(), RunError> {
        let line = serde_json::to_string(rec).map_err(|e| RunError::Io(e.to_string()))?;
        writeln!(self.diagnostics, "{line}")
            .and_then(|_| self.diagnostics.flush())
            .map_err(|e| io_error(&self.diagnostics_path, e))
    }

    fn maybe_snapshot(&mut self, state: &State, step: u64, last: bool) -> Result<(), RunError> {
        let periodic = self.snapshot_every > 0 && step.is_multiple_of(self.snapshot_every);
        if periodic || last {
            let path = self.snapshot_dir.join(snapshot_name(step));
            save_snapshot(state, &path)?;
            self.last_snapshot = Some(path);
        }
        Ok(())
    }
}

fn diagnostics_failure(step: u64, e: DiagnosticsError) -> RunError {
    match e {
        DiagnosticsError::BelowFloor { theta_min, floor } => RunError::Principle {
            step,
            message: format!("temperature {theta_min} fell below the floor {floor}"),
        },
        other => RunError::Diagnostics {
            step,
            source: other,
        },
    }
}

/// Drop diagnostics lines past `step` so a resumed run continues the stream.
fn truncate_diagnostics(path: &Path, step: u64) -> Result<(), RunError> {
    let Ok(file) = File::open(path) else {
        return Ok(());
    };
    let mut kept = String::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| io_error(path, e))?;
        match serde_json::from_str::<DiagnosticsRecord>(&line) {
            Ok(rec) if rec.step <= step => {
                kept.push_str(&line);
                kept.push('\n');
            }
            _ => break,
        }
    }
    fs::write(path, kept).map_err(|e| io_error(path, e))
}

/// A run in progress: the committed state, its diagnostics record and the
/// accumulated principle violations.
pub struct Simulation {
    stepper: Stepper,
    state: State,
    step: u64,
    record: DiagnosticsRecord,
    tracker: PrincipleTracker,
}

impl Simulation {
    /// Start from the configured initial data at step 0.
    pub fn new(config: &RunConfig) -> Result<Self, RunError> {
        let initial = make_initial_data(config)?;
        let p = pressure_solve(&initial, &config.coefficient_model()?);
        Self::from_state(config, initial.with_pressure(p), 0)
    }

    /// Continue from a committed state at the given step.
    pub fn from_state(config: &RunConfig, state: State, step: u64) -> Result<Self, RunError> {
        let model = config.coefficient_model()?;
        let stepper = Stepper::new(model, config.step_config())?;
        if state.has_non_finite() {
            return Err(RunError::NonFinite { step });
        }
        let record = record(&state, &model, step, 0, None, DirectorRateForm::Increment)
            .map_err(|e| diagnostics_failure(step, e))?;
        let mut tracker = PrincipleTracker::default();
        tracker.observe(&principle_checks(&state, model.theta_floor, PRINCIPLE_TOL));
        Ok(Simulation {
            stepper,
            state,
            step,
            record,
            tracker,
        })
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn record(&self) -> &DiagnosticsRecord {
        &self.record
    }

    pub fn tracker(&self) -> &PrincipleTracker {
        &self.tracker
    }

    /// Advance one step. On error the simulation keeps its last good state.
    pub fn advance(&mut self) -> Result<&DiagnosticsRecord, RunError> {
        let step = self.step + 1;
        let model = *self.stepper.model();
        let outcome = self.stepper.advance(&self.state).map_err(|e| match e {
            StepError::PicardFailure {
                iterations,
                residual_history,
            } => RunError::Picard {
                step,
                iterations,
                residual_history,
            },
            other => RunError::Step(other),
        })?;
        let next = outcome.state;
        if next.has_non_finite() {
            return Err(RunError::NonFinite { step });
        }
        let rec = record(
            &next,
            &model,
            step,
            outcome.iterations,
            Some((&self.state, &self.record)),
            DirectorRateForm::Increment,
        )
        .map_err(|e| diagnostics_failure(step, e))?;
        self.tracker
            .observe(&principle_checks(&next, model.theta_floor, PRINCIPLE_TOL));
        self.state = next;
        self.step = step;
        self.record = rec;
        Ok(&self.record)
    }

    /// The cumulative principle budget, as an error when exhausted.
    pub fn check_principles(&self) -> Result<(), RunError> {
        let t = &self.tracker;
        if t.exceeded(CUMULATIVE_TOL) {
            return Err(RunError::Principle {
                step: self.step,
                message: format!(
                    "worst |d| excess {:.3e}, temperature deficit {:.3e}, divergence {:.3e} (limits {CUMULATIVE_TOL:e}, {CUMULATIVE_TOL:e}, {DIV_TOL:e})",
                    t.worst_d_excess, t.worst_theta_deficit, t.worst_div_residual
                ),
            });
        }
        Ok(())
    }
}

fn drive(
    config: &RunConfig,
    mut sim: Simulation,
    output: &mut Output,
) -> Result<RunSummary, RunError> {
    let total = config.total_steps();
    if sim.step() == 0 {
        output.write_record(sim.record())?;
        output.maybe_snapshot(sim.state(), 0, total == 0)?;
    }
    while sim.step() < total {
        let rec = sim.advance()?;
        output.write_record(rec)?;
        sim.check_principles()?;
        output.maybe_snapshot(sim.state(), sim.step(), sim.step() == total)?;
    }
    Ok(RunSummary {
        steps: total,
        t: sim.state().t(),
        diagnostics_path: output.diagnostics_path.clone(),
        last_snapshot: output.last_snapshot.clone(),
    })
}

pub fn run(config: &RunConfig) -> Result<RunSummary, RunError> {
    let sim = Simulation::new(config)?;
    let mut output = Output::open(config, false)?;
    drive(config, sim, &mut output)
}

/// Continue a run from one of its snapshots. The step index is recovered
/// from the snapshot time.
pub fn resume(config: &RunConfig, snapshot: &Path) -> Result<RunSummary, RunError> {
    let grid = Grid::new(config.grid.n, config.grid.half_width)?;
    let state = load_snapshot(snapshot, &grid)?;
    let step = (state.t() / config.stepping.dt).round() as u64;
    truncate_diagnostics(&output_path(&config.output.diagnostics_path), step)?;
    let sim = Simulation::from_state(config, state, step)?;
    let mut output = Output::open(config, true)?;
    drive(config, sim, &mut output)
}
