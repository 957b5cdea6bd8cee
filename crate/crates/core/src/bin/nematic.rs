use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nematic_core::experiments::{
    manufactured_convergence, mode_refinement_study, uniqueness_experiment, MmsConfig,
    RefinementConfig, UniquenessConfig,
};
use nematic_core::io::{
    exit_code, load_config, make_initial_data, output_path, resume, run, RunConfig, RunError,
};
use nematic_core::spectral::snapshot::read_snapshot;
use nematic_core::stepper::{Stepper, STATE_COMPONENTS};

#[derive(Parser)]
#[command(
    name = "nematic",
    version,
    about = "Non-isothermal nematic liquid crystal flow on a periodic box"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override a configuration value, e.g. `stepping.dt=1e-4`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration and print it with defaults filled in.
    ValidateConfig(ConfigArgs),
    /// Run from the configured initial data to `t_end`.
    Run(ConfigArgs),
    /// Continue a run from one of its snapshots.
    Resume {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        snapshot: PathBuf,
    },
    #[command(subcommand)]
    Experiment(Experiment),
    /// Print a snapshot header and per-component ranges.
    InspectSnapshot { path: PathBuf },
}

#[derive(Subcommand)]
enum Experiment {
    /// Manufactured-solution convergence study.
    Mms {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Two runs from nearby data.
    Uniqueness {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Velocity mode refinement.
    Refinement {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [4i64, 8, 16])]
        cutoffs: Vec<i64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn load(args: &ConfigArgs) -> Result<RunConfig, RunError> {
    Ok(load_config(&args.config, &args.overrides)?)
}

fn emit<T: Serialize>(value: &T, report: Option<&Path>) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| RunError::Io(e.to_string()))?;
    writeln!(std::io::stdout(), "{text}").map_err(|e| RunError::Io(format!("stdout: {e}")))?;
    if let Some(path) = report {
        let path = output_path(path);
        std::fs::write(&path, text)
            .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ComponentRange {
    name: &'static str,
    min: f64,
    max: f64,
    mean: f64,
}

fn inspect(path: &Path) -> Result<(), RunError> {
    let file = File::open(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    let (header, data) = read_snapshot(BufReader::new(file))?;
    let ranges: Vec<ComponentRange> = data
        .iter()
        .enumerate()
        .map(|(i, c)| ComponentRange {
            name: STATE_COMPONENTS.get(i).copied().unwrap_or("?"),
            min: c.iter().cloned().fold(f64::INFINITY, f64::min),
            max: c.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            mean: c.iter().sum::<f64>() / c.len().max(1) as f64,
        })
        .collect();
    emit(
        &serde_json::json!({ "header": header, "components": ranges }),
        None,
    )
}

fn experiment(which: Experiment) -> Result<(), RunError> {
    match which {
        Experiment::Mms { config, report } => {
            let cfg = load(&config)?;
            let mms = MmsConfig {
                step: cfg.step_config(),
                ..MmsConfig::default()
            };
            let table = manufactured_convergence(&mms, &cfg.coefficient_model()?)?;
            emit(&table, report.as_deref())
        }
        Experiment::Uniqueness {
            config,
            delta,
            seed,
            report,
        } => {
            let cfg = load(&config)?;
            let stepper = Stepper::new(cfg.coefficient_model()?, cfg.step_config())?;
            let initial = make_initial_data(&cfg)?;
            let u = UniquenessConfig {
                delta,
                seed,
                steps: cfg.total_steps() as usize,
                ..UniquenessConfig::default()
            };
            emit(
                &uniqueness_experiment(&initial, &stepper, &u)?,
                report.as_deref(),
            )
        }
        Experiment::Refinement {
            config,
            cutoffs,
            report,
        } => {
            let cfg = load(&config)?;
            let initial = make_initial_data(&cfg)?;
            let r = RefinementConfig {
                cutoffs,
                steps: cfg.total_steps() as usize,
            };
            let table =
                mode_refinement_study(&initial, &cfg.coefficient_model()?, &cfg.step_config(), &r)?;
            emit(&table, report.as_deref())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::ValidateConfig(args) => emit(&load(&args)?, None),
        Command::Run(args) => emit(&run(&load(&args)?)?, None),
        Command::Resume { config, snapshot } => emit(&resume(&load(&config)?, &snapshot)?, None),
        Command::Experiment(which) => experiment(which),
        Command::InspectSnapshot { path } => inspect(&path),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::from(exit_code::OK as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
