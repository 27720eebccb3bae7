//! `kvnsim`: build, evolve and check truncated embeddings from JSON inputs.
//!
//! Exit codes: 0 success, 1 validation failure (invalid or malformed input
//! system, failed certificate), 2 usage error, 3 runtime or I/O failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "kvnsim",
    version,
    about = "Koopman-von Neumann embedding simulator"
)]
pub struct Cli {
    /// Write a JSON manifest of inputs, flags, versions and output hashes.
    #[arg(long, global = true, value_name = "PATH")]
    emit_manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a system file and print d, c and η.
    Validate {
        #[arg(long)]
        system: PathBuf,
    },
    /// Generate a system file from a model spec.
    Model {
        kind: ModelKind,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Required for `random`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Assemble H_m, write it as CSV and print its norm certificate.
    Build {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
        /// Certificate JSON; printed to stdout when omitted.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Propagate the encoded initial point and report norms (and the
    /// observable, if given).
    Evolve {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        observable: Option<PathBuf>,
    },
    /// Quantum output against the classical observable on a uniform grid.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        observable: PathBuf,
    },
    /// Max error of `compare` for each truncation in a list.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Strictly ascending, comma separated.
        #[arg(long = "m-list", value_delimiter = ',', required = true)]
        m_list: Vec<usize>,
        #[arg(long)]
        observable: PathBuf,
    },
    /// Truncation order, rescaling and query counts for a target accuracy.
    Estimate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long = "T")]
        t: f64,
        /// Order of the classical integrator in the baseline column.
        #[arg(long = "rk-order", default_value_t = 4)]
        rk_order: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Index of a basis word given as comma-separated symbols.
    Rank {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = false
        )]
        word: Vec<usize>,
    },
    /// Basis word at an index.
    Unrank {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        index: u64,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long = "T")]
    t: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Initial point; defaults to `x0` from the system file.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,
    /// Rescale the system by Δ before running.
    #[arg(long)]
    delta: Option<f64>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Kuramoto,
    Harmonic,
    Duffing,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}
