use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracroot_cli::commands::{cmd_reproduce_tables, cmd_solve, cmd_sweep, Io, EXIT_CONFIG};
use fracroot_cli::config::{OutputFormat, Overrides};

/// Fractional pseudo-Newton solver for investment expansion/closing thresholds.
///
/// Reads flags and the config file only; no environment variables are consulted.
#[derive(Debug, Parser)]
#[command(name = "fracroot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one threshold scenario.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long = "max-iter")]
        max_iter: Option<usize>,
        /// Record and print every iterate.
        #[arg(long)]
        trace: bool,
        /// Machine-readable output file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Recompute the published scenario tables and compare.
    ReproduceTables {
        /// CSV output file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the fractional order from one start and report distinct roots.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "grid-step")]
        grid_step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    let mut io = Io { stdout: &mut stdout, stderr: &mut stderr };
    let code = match cli.command {
        Command::Solve { config, alpha, epsilon, max_iter, trace, out, format } => {
            let overrides = Overrides { alpha, epsilon, max_iter, trace, out, format, grid_step: None };
            cmd_solve(&config, &overrides, &mut io)
        }
        Command::ReproduceTables { out } => cmd_reproduce_tables(out.as_deref(), &mut io),
        Command::Sweep { config, grid_step, out } => {
            let overrides = Overrides { grid_step, out, ..Default::default() };
            cmd_sweep(&config, &overrides, &mut io)
        }
    };
    ExitCode::from(code)
}
