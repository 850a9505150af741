//! `nap` — exact non-Archimedean probability at the command line.
//!
//! Subcommands: `check`, `query`, `decompose`, `convert`, `snapshot`,
//! `compare`. Exit codes: 0 on success, 1 on a semantic failure (axiom
//! violation, empty conditioning event, disagreeing orders), 2 on input
//! errors (unreadable or malformed files, bad expressions, usage errors).

mod commands;
mod model_file;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nap_core::bridge::BridgeError;
use nap_core::events::ModelError;
use nap_core::popper::PopperError;

#[derive(Debug)]
pub enum CliError {
    /// Malformed input or usage: exit code 2.
    Input(String),
    /// Semantically invalid request on valid input: exit code 1.
    Semantic(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Semantic(msg) => f.write_str(msg),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::EmptyCondition => CliError::Semantic(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PopperError> for CliError {
    fn from(e: PopperError) -> Self {
        match e {
            PopperError::NotAPopperFunction(_) => CliError::Semantic(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<BridgeError> for CliError {
    fn from(e: BridgeError) -> Self {
        match e {
            BridgeError::Popper(p) => p.into(),
            BridgeError::Model(m) => m.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Parser)]
#[command(name = "nap", version, about = "Exact non-Archimedean probability models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model file; for Popper tables, check the four axioms
    /// exhaustively.
    Check {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Override the atom cap for exhaustive checking (default 10).
        #[arg(long)]
        max_atoms: Option<usize>,
    },
    /// Exact probability of an event: exact value, standard part,
    /// valuation, and series expansion.
    Query {
        path: PathBuf,
        #[arg(long)]
        event: String,
        /// Conditioning event (defaults to unconditional probability).
        #[arg(long)]
        given: Option<String>,
        /// Series depth.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Additionally print a truncated decimal rendering of the
        /// standard part.
        #[arg(long)]
        approx: bool,
    },
    /// Lexicographic decomposition of an event's probability to a given
    /// depth (a query without a conditioning event).
    Decompose {
        path: PathBuf,
        #[arg(long)]
        event: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        approx: bool,
    },
    /// Convert between Popper tables and ranked models.
    Convert {
        path: PathBuf,
        #[arg(long, value_enum)]
        to: TargetKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Evaluate finite counting snapshots and their deviations from the
    /// standard part.
    Snapshot {
        path: PathBuf,
        /// Comma-separated stage list, each stage at least 2.
        #[arg(long, value_delimiter = ',', required = true)]
        stages: Vec<u64>,
        #[arg(long)]
        event: Option<String>,
        #[arg(long)]
        given: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compare two events' probabilities in the field order and the
    /// lexicographic order (they must agree).
    Compare {
        path: PathBuf,
        /// Event expression; pass exactly twice.
        #[arg(long = "event", num_args = 1)]
        events: Vec<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetKind {
    Nap,
    Popper,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check {
            path,
            format,
            max_atoms,
        } => commands::check(&path, format, max_atoms),
        Command::Query {
            path,
            event,
            given,
            depth,
            format,
            approx,
        } => commands::query(&path, &event, given.as_deref(), depth, format, approx),
        Command::Decompose {
            path,
            event,
            depth,
            format,
            approx,
        } => commands::query(&path, &event, None, depth, format, approx),
        Command::Convert {
            path,
            to,
            out,
            format,
        } => commands::convert(&path, to, &out, format),
        Command::Snapshot {
            path,
            stages,
            event,
            given,
            format,
        } => commands::snapshot(&path, &stages, event.as_deref(), given.as_deref(), format),
        Command::Compare {
            path,
            events,
            format,
        } => commands::compare(&path, &events, format),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Semantic(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
