//! `ncx`: classical, quantum, and generalized-probabilistic bounds for
//! exclusivity graphs, context hypergraphs, and two-party Bell scenarios.
//!
//! Three subcommands:
//! * `bounds` — independence number, Lovász theta, fractional packing, and
//!   the classical / normalized-quantum / no-signalling values of Bell
//!   functionals;
//! * `membership` — does a probability assignment belong to the classical,
//!   quantum, generalized, or no-signalling set;
//! * `reproduce` — re-derive the built-in reference table and compare
//!   against the expected values.
//!
//! Exit codes: 0 success, 1 reference-table failure, 2 input error,
//! 3 solver failure.

mod commands;
mod formats;
mod report;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "ncx",
    version,
    about = "Bounds and membership tests for exclusivity structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute bounds for a graph, hypergraph, or Bell scenario
    Bounds(BoundsArgs),
    /// Test membership of a probability assignment in one of the sets
    Membership(MembershipArgs),
    /// Recompute the reference table and check it against expectations
    Reproduce(ReproduceArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Built-in instance: chsh, i3322, kcbs5, or `ncycle:<n>`
    #[arg(long, conflicts_with_all = ["graph", "hypergraph", "scenario"])]
    builtin: Option<String>,
    /// Graph JSON file: {"n": .., "edges": [[i, j], ..]}
    #[arg(long, conflicts_with_all = ["hypergraph", "scenario"])]
    graph: Option<String>,
    /// Hypergraph JSON file: {"n": .., "contexts": [[..], ..]}
    #[arg(long, conflicts_with = "scenario")]
    hypergraph: Option<String>,
    /// Scenario JSON file: {"nA": .., "nB": .., "nX": .., "nY": .., "lambda": [..], "offset": 0.0}
    #[arg(long)]
    scenario: Option<String>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated list of alpha, theta, alphastar, classical, ns, qm1; or "all"
    #[arg(long, default_value = "all")]
    which: String,
    /// Relative duality-gap target for SDP solves
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Emit machine-readable JSON instead of the table
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct MembershipArgs {
    /// Point JSON file: {"p": [..]}
    #[arg(long)]
    point: String,
    #[command(flatten)]
    input: InputArgs,
    /// Which set: C, QM, GPT, or NS
    #[arg(long)]
    set: String,
    /// Membership tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Only run criterion groups whose name contains this substring
    #[arg(long, default_value = "")]
    only: String,
    /// Override the SDP duality-gap target used by the suite
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    json: bool,
}

/// Errors with their exit-code class.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> CliError {
        CliError {
            message: message.into(),
            exit_code: 2,
        }
    }

    pub fn solver(message: impl Into<String>) -> CliError {
        CliError {
            message: message.into(),
            exit_code: 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds(args) => commands::bounds(&args),
        Command::Membership(args) => commands::membership(&args),
        Command::Reproduce(args) => commands::reproduce(&args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code);
        }
    }
}
