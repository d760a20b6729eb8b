//! `fieldgen`: batch front-end for building, sampling and checking fields.
//!
//! Exit status: 0 on success, 1 when a verification fails (or a numerical
//! routine gives up), 2 for an invalid configuration or a field that does
//! not exist, 3 for I/O errors.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "fieldgen", version, about = "Gaussian random fields on manifolds from heat kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory receiving the output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Replaces every seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for the numerical kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Replaces the covariance tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Covariance matrix at the configured points.
    Gram,
    /// Ensemble of field samples.
    Sample,
    /// Binned variogram and log-log Hölder fit.
    Variogram,
    /// Property suite with a JSON report.
    Verify,
    /// Existence verdict for the configured field.
    Existence,
    /// Heat kernel values on the configured points.
    KernelProbe,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let path = cli
        .config
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let mut config = RunConfig::parse(&text)?;
    if let Some(t) = cli.tolerance {
        if !(t > 0.0) {
            return Err(CliError::Config(format!("tolerance must be positive, got {t}")));
        }
    }
    config.apply_overrides(cli.seed, cli.tolerance);
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    commands::ensure_dir(&cli.out_dir)?;
    let ctx = Context {
        config,
        out_dir: cli.out_dir,
        seed: cli.seed,
    };
    match cli.command {
        Command::Gram => commands::gram(&ctx),
        Command::Sample => commands::sample(&ctx),
        Command::Variogram => commands::variogram(&ctx),
        Command::Verify => commands::verify(&ctx),
        Command::Existence => commands::existence(&ctx),
        Command::KernelProbe => commands::kernel_probe(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fieldgen: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
