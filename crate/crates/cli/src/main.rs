mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Context, Outcome};
use config::RunConfig;
use error::CliError;

const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.toml");

/// Orlicz norms of trigonometric polynomials and checks of the sampling inequalities.
///
/// Exit status: 0 all hard checks pass, 1 an inequality is violated,
/// 2 usage or configuration error, 3 numerical non-convergence.
#[derive(Parser, Debug)]
#[command(name = "orlicz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration (the built-in default scan when omitted)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overrides `output_dir`
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Family seed, overrides `family.seed`
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The three norms of a polynomial file for every configured phi
    Norm { poly: PathBuf },
    /// Run the configured checks on one polynomial file
    Verify { poly: PathBuf },
    /// Run the configured checks over the test family
    Scan,
    /// Matuszewska-Orlicz indices
    Indices,
    /// Integral conditions at zero and infinity
    Conditions,
    /// Orlicz norms of Dirichlet kernels and their integral bracket
    Dirichlet,
    /// Sampling function and its sup variant
    SamplingFn,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::parse(DEFAULT_CONFIG)?,
    };
    if let Some(seed) = cli.seed {
        config.family.seed = seed;
    }
    let out = cli.out.clone().unwrap_or_else(|| config.output_dir.clone());
    let ctx = Context { config, out };
    let body = || match &cli.command {
        Command::Norm { poly } => commands::norm(&ctx, poly),
        Command::Verify { poly } => commands::verify(&ctx, poly),
        Command::Scan => commands::run_scan(&ctx),
        Command::Indices => commands::indices(&ctx),
        Command::Conditions => commands::conditions(&ctx),
        Command::Dirichlet => commands::dirichlet(&ctx),
        Command::SamplingFn => commands::sampling_fn(&ctx),
    };
    match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(body),
        None => body(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("orlicz: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
