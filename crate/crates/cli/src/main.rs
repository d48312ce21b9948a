use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use minkflow_cli::{certify, selftest, simulate, CertifyArgs, SelftestArgs, SimulateArgs};

#[derive(Parser)]
#[command(name = "minkflow", version, about = "Curvature flow of convex curves in Minkowski planes")]
struct Cli {
    /// Suppress progress and summary output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the flow and write snapshots.csv, frames/ and report.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Snapshot cadence in steps; overrides the config.
        #[arg(long)]
        snapshots_every: Option<usize>,
        /// Grid size N; overrides the config.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Print the isoperimetric report of one curve as JSON.
    Certify {
        /// Supplies the unit ball, tolerances and (without --curve) the curve.
        #[arg(long)]
        config: PathBuf,
        /// Frame file with theta,x,y rows on the uniform grid.
        #[arg(long)]
        curve: Option<PathBuf>,
        /// Also write certify.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Run the acceptance suite and print one line per criterion.
    Selftest {
        /// Replace the suite's grid sizes (N = 256 becomes this value).
        #[arg(long)]
        grid: Option<usize>,
        /// Add this amount to the cached unit-ball area.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tamper_area: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = cli.quiet;
    let outcome = match cli.command {
        Command::Simulate {
            config,
            out,
            snapshots_every,
            grid,
        } => simulate(&SimulateArgs {
            config,
            out,
            snapshots_every,
            grid,
            quiet,
        }),
        Command::Certify { config, curve, out, grid } => certify(&CertifyArgs {
            config,
            curve,
            out,
            grid,
            quiet,
        }),
        Command::Selftest { grid, tamper_area } => selftest(&SelftestArgs { grid, tamper_area, quiet }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
