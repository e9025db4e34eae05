//! Command-line front end for the experiment runner.
//!
//! Two modes share one configuration surface (TOML file plus flags):
//!
//! - default: estimate the acceptance rate of the configured run and
//!   print a CSV table (`--out` redirects it to a file);
//! - `--paths K`: draw `K` exact posterior paths and write them as CSV,
//!   one row per accepted path.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ers::experiment::{
    emit_samples, load_config, render_csv, run_experiment, Estimator, ModelChoice, Overrides,
};

#[derive(Parser)]
#[command(
    name = "ers",
    version,
    about = "Acceptance-rate experiments and exact path sampling for state-space models"
)]
struct Cli {
    /// TOML config file ([experiment] and [model] sections); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model to run: conditioned-rw, nonlinear-ar, stoch-vol, or finite-state.
    #[arg(long)]
    model: Option<String>,
    /// Horizon (number of time steps).
    #[arg(long)]
    t: Option<usize>,
    /// Ensemble size (candidates per step); conflicts with --beta.
    #[arg(long)]
    n: Option<usize>,
    /// Ensemble size as a multiple of the horizon, N = ceil(beta * T).
    #[arg(long)]
    beta: Option<f64>,
    /// Number of trials behind the acceptance estimate.
    #[arg(long)]
    samples: Option<u64>,
    /// Root seed; identical configs and seeds reproduce byte-identical output.
    #[arg(long)]
    seed: Option<u64>,
    /// Observation CSV (header "index,value") for the observed models.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Estimator column(s): ratio-mean, frequency, or both.
    #[arg(long)]
    estimator: Option<String>,
    /// Allow runs past the quick desk-scale budget.
    #[arg(long)]
    extended: bool,
    /// Emit this many exact posterior paths instead of estimating rates.
    #[arg(long)]
    paths: Option<u64>,
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    let overrides = Overrides {
        model: cli.model.as_deref().map(str::parse::<ModelChoice>).transpose()?,
        horizon: cli.t,
        n: cli.n,
        beta: cli.beta,
        samples: cli.samples,
        seed: cli.seed,
        data: cli.data,
        workers: cli.workers,
        out: cli.out,
        estimator: cli.estimator.as_deref().map(str::parse::<Estimator>).transpose()?,
        extended: cli.extended,
    };
    let config = load_config(cli.config.as_deref(), overrides)?;

    let output = match cli.paths {
        Some(count) => {
            let mut text = String::new();
            let summary = emit_samples(&config, count, &mut text)?;
            for index in &summary.exhausted {
                eprintln!(
                    "path {index}: no acceptance within {} trials, skipped",
                    config.max_trials_per_path
                );
            }
            if summary.written < summary.requested {
                eprintln!("wrote {} of {} requested paths", summary.written, summary.requested);
            }
            text
        }
        None => render_csv(&run_experiment(&config)?),
    };
    match &config.out {
        Some(path) => std::fs::write(path, output).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{output}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::FAILURE
        }
    }
}
