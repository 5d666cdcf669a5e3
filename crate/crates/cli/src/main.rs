use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crospec::commands::{cmd_error_curves, cmd_filter_factors, cmd_simulate, cmd_verify_theorems};
use crospec::ExperimentConfig;

/// Reproducible experiments on regularized reconstruction of signals and
/// cross-power spectra from indirect linear measurements.
#[derive(Parser)]
#[command(name = "crospec", version)]
struct Cli {
    /// JSON experiment configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte Carlo replication count (overrides the config).
    #[arg(long, global = true)]
    replications: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate source, noise and measurement realizations to CSV.
    Simulate,
    /// Emit empirical and closed-form error curves with argmin summary.
    ErrorCurves,
    /// Check the optimal-parameter theorems; exit 1 on any failed check.
    VerifyTheorems,
    /// Emit the pair filter-factor tables for both estimators.
    FilterFactors,
}

fn load_config(cli: &Cli) -> crospec::Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.output.dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(replications) = cli.replications {
        config.replications = replications;
    }
    Ok(config)
}

fn run(cli: &Cli) -> crospec::Result<bool> {
    let config = load_config(cli)?;
    match cli.command {
        Command::Simulate => cmd_simulate(&config).map(|()| true),
        Command::ErrorCurves => cmd_error_curves(&config).map(|()| true),
        Command::VerifyTheorems => cmd_verify_theorems(&config),
        Command::FilterFactors => cmd_filter_factors(&config).map(|()| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed: see report.json");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
