//! Command-line front end: config-driven preprocess / fit / report /
//! predict / simulate / scenario runs.
//!
//! Exit codes: 0 on success, 2 for input problems (config, files, names),
//! 3 for numerical failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use multistate::commands::{self, Overrides};
use multistate::config::AlgorithmChoice;
use multistate::error::{Error, ErrorCategory};

#[derive(Parser)]
#[command(
    name = "multistate",
    version,
    about = "Continuous-time multi-state models for panel-observed yield states"
)]
struct Cli {
    /// TOML run configuration (required by every subcommand).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Optimizer for `fit`: bfgs, nelder-mead or both.
    #[arg(long, global = true)]
    algorithm: Option<String>,

    /// Forecast horizon in days for `report`, `predict` and `scenario`.
    #[arg(long, global = true)]
    horizon: Option<f64>,

    /// Master seed; overrides the config (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn raw sensor and harvest CSVs into the analysis panel.
    Preprocess,
    /// Fit the model to a panel by maximum likelihood.
    Fit,
    /// Emit intensity, hazard-ratio, horizon and sojourn tables from a fit.
    Report,
    /// Forecast state probabilities over a horizon.
    Predict,
    /// Sample a synthetic panel from known parameters.
    Simulate,
    /// Compare forecasts between two covariate settings.
    Scenario,
}

fn run(cli: Cli) -> Result<(), Error> {
    let config_path = cli
        .config
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let algorithm = match cli.algorithm.as_deref() {
        Some(s) => Some(s.parse::<AlgorithmChoice>()?),
        None => None,
    };
    if let Some(h) = cli.horizon {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!(
                "--horizon must be positive, got {h}"
            )));
        }
    }
    let ctx = commands::load_context(
        &config_path,
        Overrides {
            algorithm,
            horizon: cli.horizon,
            seed: cli.seed,
            out: cli.out,
        },
    )?;
    match cli.command {
        Command::Preprocess => commands::run_preprocess(&ctx),
        Command::Fit => commands::run_fit(&ctx),
        Command::Report => commands::run_report(&ctx),
        Command::Predict => commands::run_predict(&ctx),
        Command::Simulate => commands::run_simulate(&ctx),
        Command::Scenario => commands::run_scenario(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err.category() {
                ErrorCategory::Input => ExitCode::from(2),
                ErrorCategory::Numerical => ExitCode::from(3),
            }
        }
    }
}
