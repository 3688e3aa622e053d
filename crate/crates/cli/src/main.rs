mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Ctx};
use config::RunConfig;

/// Maximum-modulus experiments and tract constructions.
///
/// Exit codes: 0 success, 1 verification failed, 2 bad input, 3 numerical failure.
#[derive(Parser)]
#[command(name = "maxmod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Grid spacing (overrides the configured spacing).
    #[arg(long, global = true)]
    grid: Option<f64>,
    /// Tolerance (overrides the configured tolerance).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// csv, svg or both.
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate log|f| and arg f on a rectangular grid.
    Eval,
    /// Maximum modulus and maximizing angles per radius.
    Maxmod,
    /// Track maximizing branches across radii.
    Trace,
    /// Locate jump discontinuities and isolated points of the maximizer.
    Discont,
    /// Strip index of the maximizer for a finite Polya sum.
    Polya,
    /// Build and dump the tract geometry.
    Tract,
    /// Solve the harmonic boundary problem on the tract.
    Solve,
    /// Tune the perturbation parameters and certify every sector.
    Tune,
    /// Run the acceptance criteria.
    Verify {
        /// fast or full.
        #[arg(default_value = "fast")]
        level: String,
    },
}

fn run(cli: Cli) -> commands::Status {
    if let Command::Verify { level } = &cli.command {
        return commands::verify(level);
    }
    let config = match &cli.config {
        Some(p) => config::load(p)?,
        None => RunConfig::default(),
    };
    let (out, format) = config.output(cli.out.as_deref(), cli.format.as_deref())?;
    if let Some(g) = cli.grid {
        if !(g.is_finite() && g > 0.0) {
            return Err(CliError::Config(format!("--grid: must be a positive number, got {g}")));
        }
    }
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Config(format!("--tol: must be a positive number, got {t}")));
        }
    }
    let ctx = Ctx { config, out, format, grid: cli.grid, tol: cli.tol };
    match cli.command {
        Command::Eval => commands::eval(&ctx),
        Command::Maxmod => commands::maxmod(&ctx),
        Command::Trace => commands::trace(&ctx),
        Command::Discont => commands::discont(&ctx),
        Command::Polya => commands::polya(&ctx),
        Command::Tract => commands::tract(&ctx),
        Command::Solve => commands::solve(&ctx),
        Command::Tune => commands::tune_cmd(&ctx),
        Command::Verify { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("maxmod: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
