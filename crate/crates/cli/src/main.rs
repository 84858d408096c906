//! specsplit: spectral computations on complex matrices from the command line.
//!
//! Exit codes: 0 success, 1 usage/input error, 2 verification failure,
//! 3 numerical abort (contour touches spectrum, ambiguous rank, ...).

mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use specsplit_core::Error;

#[derive(Parser)]
#[command(name = "specsplit", version, about = "Determinants, Brown measures, spectral projections and ordered Schur splits for dense complex matrices", max_term_width = 100)]
pub struct Cli {
    /// Worker thread cap (falls back to SPECSPLIT_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed recorded in output metadata and used by randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// JSON file with tolerance overrides (fields as in the docs).
    #[arg(long, global = true)]
    tolerances: Option<std::path::PathBuf>,

    /// Write the primary artifact here instead of stdout. The extension
    /// selects Matrix Market (.mtx) where supported.
    #[arg(long, short, global = true)]
    output: Option<std::path::PathBuf>,

    /// Output format for report-style artifacts.
    #[arg(long, global = true, value_parser = ["json", "csv"], default_value = "json")]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Fuglede-Kadison determinant, log F-norm and singular value profile.
    Det(commands::DetArgs),
    /// Brown measure: eigenvalue atoms or a grid-regularized density.
    Brown(commands::BrownArgs),
    /// Haagerup-Schultz spectral projection for a disk or region file.
    Hs(commands::HsArgs),
    /// Ordered Schur splitting T = N + Q along a spectral ordering.
    Split(commands::SplitArgs),
    /// Regularization convergence study from a JSON configuration.
    Ensemble(commands::EnsembleArgs),
    /// Run the named property suites and print a pass/fail table.
    Verify(commands::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are success paths; everything else is usage.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::ContourTouchesSpectrum { .. }
        | Error::AmbiguousRank { .. }
        | Error::BoundaryAmbiguous { .. }
        | Error::EigenNonConvergence { .. }
        | Error::SvdNonConvergence { .. }
        | Error::NotNilpotent { .. }
        | Error::InvarianceViolation { .. }
        | Error::SolveResidual { .. }
        | Error::SingularDenominator => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> specsplit_core::Result<ExitCode> {
    let threads = cli.threads.or_else(|| {
        std::env::var("SPECSPLIT_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }

    let tolerances = match &cli.tolerances {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let t: specsplit_core::Tolerances = serde_json::from_str(&text)?;
            t.validate()?;
            t
        }
        None => specsplit_core::Tolerances::default(),
    };

    let ctx = commands::Context {
        seed: cli.seed,
        tolerances,
        output: cli.output.clone(),
        format: cli.format.clone(),
    };
    match cli.command {
        Command::Det(args) => commands::det(&ctx, &args),
        Command::Brown(args) => commands::brown(&ctx, &args),
        Command::Hs(args) => commands::hs(&ctx, &args),
        Command::Split(args) => commands::split(&ctx, &args),
        Command::Ensemble(args) => commands::ensemble(&ctx, &args),
        Command::Verify(args) => commands::verify(&ctx, &args),
    }
}
