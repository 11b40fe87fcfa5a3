use std::path::PathBuf;
use std::process::ExitCode;

use ballschur_cli::{
    cmd_check, cmd_eval, cmd_selftest, cmd_solve, cmd_verify, render, Outcome, RunConfig, EXIT_INPUT,
};
use clap::{Parser, Subcommand};

/// Schur-class multipliers on the unit ball. Each subcommand reads JSON
/// documents and writes a JSON report.
#[derive(Debug, Parser)]
#[command(name = "ballschur", version)]
struct Cli {
    /// Seed for every sampled point set.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Number of sample points (or trials per identity in selftest).
    #[arg(long, global = true, default_value_t = 50)]
    samples: usize,

    /// Sample points are drawn with norm at most this value.
    #[arg(long = "radius-cap", global = true, default_value_t = 0.95)]
    radius_cap: f64,

    /// Tolerance for condition residuals and PSD checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pick matrix and stepwise strictness margins of a problem.
    Check { problem: PathBuf },
    /// Central solution of a problem, with its step log.
    Solve { problem: PathBuf },
    /// Values of a solution at a list of points.
    Eval { solution: PathBuf, points: PathBuf },
    /// Condition residuals, sampled Schur-class test and Poincare checks.
    Verify { solution: PathBuf, problem: PathBuf },
    /// Randomized identity suite.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        seed: cli.seed,
        samples: cli.samples,
        radius_cap: cli.radius_cap,
        tol: cli.tol,
        output_path: cli.out.clone(),
    };
    let outcome = match &cli.command {
        Command::Check { problem } => cmd_check(problem),
        Command::Solve { problem } => cmd_solve(problem, &config),
        Command::Eval { solution, points } => cmd_eval(solution, points),
        Command::Verify { solution, problem } => cmd_verify(solution, problem, &config),
        Command::Selftest => cmd_selftest(&config),
    };
    emit(&outcome, config.output_path.as_deref())
}

fn emit(outcome: &Outcome, out: Option<&std::path::Path>) -> ExitCode {
    let text = render(&outcome.report);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
        None => print!("{text}"),
    }
    if let Some(msg) = outcome.report.pointer("/error/message").and_then(|m| m.as_str()) {
        eprintln!("error: {msg}");
    }
    ExitCode::from(outcome.code as u8)
}
