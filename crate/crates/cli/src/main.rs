//! Command-line front end for the over-the-air timing simulator.
//!
//! Exit codes: 0 success, 1 usage error, 2 scenario validation error,
//! 3 budget FAIL under `--strict`.

mod commands;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::exit;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use thiserror::Error;

/// Environment variable selecting the default worker count.
const WORKERS_ENV: &str = "AIRSYNC_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("simulation error: {0}")]
    Sim(#[from] airsync::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("budget verdict FAIL (strict mode)")]
    StrictBudgetFail,
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario(_) | CliError::Sim(_) => 2,
            CliError::StrictBudgetFail => 3,
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "airsync",
    version,
    about = "Over-the-air timing acquisition and factory PTP distribution simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the SCS x range grid and emit CSV + JSON reports
    Table2 {
        /// Master seed for the whole grid
        #[arg(long)]
        seed: u64,
        /// Trials per grid cell
        #[arg(long, default_value_t = airsync::montecarlo::DEFAULT_TRIALS)]
        trials: usize,
        /// Calibration file produced by `calibrate`
        #[arg(long)]
        calibration: Option<PathBuf>,
        /// Directory for table2.csv and table2.json
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run one over-the-air experiment from a scenario file
    Experiment {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "experiment.json")]
        out: PathBuf,
    },
    /// Simulate factory distribution and judge the synchronicity budget
    Distribute {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "distribute.json")]
        out: PathBuf,
        /// Exit nonzero when the budget verdict is FAIL
        #[arg(long)]
        strict: bool,
    },
    /// Bisect the SNR anchor until the experiment p90 hits a target
    Calibrate {
        #[arg(long)]
        target_p90_ns: f64,
        #[arg(long)]
        distance_m: f64,
        /// Sub-carrier spacing in kHz
        #[arg(long, default_value_t = 15)]
        scs: u32,
        #[arg(long)]
        seed: u64,
        /// Trials per bisection step
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 3.0)]
        pathloss_exponent: f64,
        /// Relative convergence tolerance on p90
        #[arg(long, default_value_t = 0.10)]
        tolerance: f64,
        #[arg(long, default_value = "calibration.json")]
        out: PathBuf,
    },
    /// Emit the per-trial error CDF as CSV for external plotting
    Plotdata {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "cdf.csv")]
        out: PathBuf,
    },
}

fn configure_workers() -> Result<(), String> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let workers: usize = value
        .parse()
        .map_err(|_| format!("{WORKERS_ENV} must be a positive integer, got \"{value}\""))?;
    if workers == 0 {
        return Err(format!("{WORKERS_ENV} must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| format!("cannot configure {workers} workers: {e}"))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Table2 {
            seed,
            trials,
            calibration,
            out_dir,
        } => commands::table2(seed, trials, calibration.as_deref(), &out_dir),
        Command::Experiment { scenario, out } => commands::experiment(&scenario, &out),
        Command::Distribute {
            scenario,
            out,
            strict,
        } => commands::distribute(&scenario, &out, strict),
        Command::Calibrate {
            target_p90_ns,
            distance_m,
            scs,
            seed,
            trials,
            pathloss_exponent,
            tolerance,
            out,
        } => commands::calibrate(
            target_p90_ns,
            distance_m,
            scs,
            seed,
            trials,
            pathloss_exponent,
            tolerance,
            &out,
        ),
        Command::Plotdata { scenario, out } => commands::plotdata(&scenario, &out),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            exit(code);
        }
    };
    if let Err(message) = configure_workers() {
        eprintln!("{message}");
        exit(1);
    }
    if let Err(e) = run(cli) {
        eprintln!("{e}");
        exit(e.exit_code());
    }
}
