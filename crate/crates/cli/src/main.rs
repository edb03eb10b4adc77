//! `qdistill`: sweeps, traces and circuit dumps for stabilizer-state
//! distillation and ancilla saving.
//!
//! Exit codes: 0 on success, 1 for configuration errors, 2 for runtime
//! errors. `QDISTILL_THREADS` caps the worker pool.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "qdistill",
    version,
    about = "Pauli-frame simulation of stabilizer-state distillation"
)]
struct Cli {
    /// JSON code catalog, searched before the built-in codes.
    #[arg(long, global = true, value_name = "FILE")]
    catalog: Option<PathBuf>,

    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct SweepArgs {
    /// CSS code name.
    #[arg(long)]
    css: Option<String>,

    /// Noise grid: `a:b:logN`, a comma list, or one value.
    #[arg(long)]
    p: Option<String>,

    /// Trials per point, e.g. `1e6`.
    #[arg(long)]
    trials: Option<String>,

    #[arg(long)]
    seed: Option<u64>,

    /// Write the CSV here (plus a `.json` metadata sidecar) instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Post-distillation error rate of two-round Protocol I.
    Distill {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Classical code for the X round.
        #[arg(long)]
        code1: Option<String>,
        /// Classical code for the Z round (defaults to code1).
        #[arg(long)]
        code2: Option<String>,
        /// `zero` or `plus`.
        #[arg(long)]
        target: Option<String>,
        /// Emit the no-distillation reference curve instead.
        #[arg(long)]
        reference: bool,
    },
    /// Average channel fidelity under X flips, optionally with ancilla saving.
    Fidelity {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Classical code wiring the shared ancillas.
        #[arg(long)]
        save: Option<String>,
        /// Exact enumeration instead of sampling (no saving).
        #[arg(long)]
        exact: bool,
        /// Evaluate the saving scheme at its effective rate `r p / m`.
        #[arg(long)]
        effective: bool,
        /// Bisect for the crossover of the effective curve with the exact
        /// no-saving curve over the grid's range; prints JSON.
        #[arg(long)]
        crossover: bool,
        /// Bracket width at which bisection stops.
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Where the distillation curve crosses the no-distillation reference.
    Threshold {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        code1: Option<String>,
        #[arg(long)]
        code2: Option<String>,
        #[arg(long)]
        target: Option<String>,
        /// Read the distillation curve from this CSV instead of simulating.
        #[arg(long, requires = "reference_csv", value_name = "CSV")]
        curve: Option<PathBuf>,
        /// Reference curve CSV for `--curve`.
        #[arg(long = "reference", value_name = "CSV")]
        reference_csv: Option<PathBuf>,
    },
    /// JSON-lines replay of the worked three-block example.
    TraceExample1 {
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Print the synthesized encoding circuit of a CSS code.
    DumpCircuit {
        #[arg(long)]
        css: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// List every resolvable code with its parameters.
    Catalog,
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("QDISTILL_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Failure::config(format!("QDISTILL_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::runtime(format!("cannot start worker pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match configure_threads().and_then(|()| commands::run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
