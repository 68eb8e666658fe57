//! `qsteer`: steerability analysis of two-qubit states from the command line.

mod commands;
mod output;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use source::StateArgs;

#[derive(Parser, Debug)]
#[command(name = "qsteer", version, about = "Steerability of two-qubit states via hidden-state linear programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Measurement set, grid and solver shared by the LP-backed commands.
#[derive(Args, Debug, Clone)]
pub struct LpArgs {
    /// Measurement set: fib:<n>, nest:<n1,n2,..>, axes:xyz or file:<path>
    #[arg(long, default_value = "fib:16")]
    pub measurements: String,
    /// Icosphere subdivision level of the hidden-state grid
    #[arg(long, default_value_t = 3)]
    pub grid: u32,
    /// LP backend
    #[arg(long, default_value = "ipm")]
    pub solver: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal hidden-state mass for one state; writes a JSON report.
    ///
    /// Exit status: 0 unsteerable for the set, 2 steerable for the set, 3 inconclusive.
    Analyze {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        lp: LpArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimal mass along a one-parameter family; writes CSV `param,s_value,verdict,residual`.
    Sweep {
        /// `werner` or `mixture:<t1,t2,t3>` (singlet weight p against a Bell-diagonal state)
        #[arg(long, allow_hyphen_values = true)]
        family: String,
        /// Parameter range `start:stop:step`, both ends included
        #[arg(long, default_value = "0:1:0.1")]
        range: String,
        #[command(flatten)]
        lp: LpArgs,
        /// Concurrent LP solves
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary points `b/2 + T^t x/2` of the steering figure as CSV.
    Figure {
        #[command(flatten)]
        state: StateArgs,
        /// Icosphere level of the direction sample
        #[arg(long, default_value_t = 3)]
        directions: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimal mass over nested measurement sets and grid levels; exit 4 on a
    /// monotonicity violation.
    Converge {
        #[command(flatten)]
        state: StateArgs,
        /// Fibonacci counts, accumulated into nested sets
        #[arg(long, default_value = "4,8,16,32")]
        counts: String,
        /// Grid levels
        #[arg(long, default_value = "1,2,3")]
        levels: String,
        #[arg(long, default_value = "ipm")]
        solver: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analytic g-model for the singlet or a circular steering figure.
    Model {
        #[arg(long, value_enum)]
        kind: ModelKind,
        /// Circle radius (the Bell-diagonal state diag(-2r, -2r, 0))
        #[arg(long, default_value_t = 0.25)]
        radius: f64,
        /// Extra grid nodes on the equator (0 for none; the circle model needs them)
        #[arg(long, default_value_t = 720)]
        ring: usize,
        #[arg(long, default_value = "fib:16")]
        measurements: String,
        #[arg(long, default_value_t = 4)]
        grid: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convex mixture of g-models for a mixture of states.
    Mix {
        /// g-model files, one per component
        #[arg(long = "model", required = true)]
        models: Vec<PathBuf>,
        /// Component states (`werner:p`, `tstate:t1,t2,t3`, `seed:n` or a file), in model order
        #[arg(long = "target", required = true, allow_hyphen_values = true)]
        targets: Vec<String>,
        /// Mixing weights, comma separated
        #[arg(long)]
        weights: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The steering LP in plain triplet form.
    ExportLp {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        lp: LpArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModelKind {
    Singlet,
    Circle,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { state, lp, out } => commands::analyze(&state, &lp, out.as_deref()),
        Command::Sweep {
            family,
            range,
            lp,
            jobs,
            out,
        } => commands::sweep(&family, &range, &lp, jobs, out.as_deref()),
        Command::Figure { state, directions, out } => commands::figure(&state, directions, out.as_deref()),
        Command::Converge {
            state,
            counts,
            levels,
            solver,
            jobs,
            out,
        } => commands::converge(&state, &counts, &levels, &solver, jobs, out.as_deref()),
        Command::Model {
            kind,
            radius,
            ring,
            measurements,
            grid,
            out,
        } => commands::model(kind, radius, ring, &measurements, grid, out.as_deref()),
        Command::Mix {
            models,
            targets,
            weights,
            out,
        } => commands::mix(&models, &targets, &weights, out.as_deref()),
        Command::ExportLp { state, lp, out } => commands::export(&state, &lp, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
