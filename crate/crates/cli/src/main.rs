//! `a2a`: run, verify and compare all-to-all encode protocols.
//!
//! Exit status: 0 on success, 1 when an output or replayed trace does not
//! match, 2 on a model violation, 3 on bad arguments or unmet
//! preconditions.

mod commands;
mod sources;

use std::path::PathBuf;
use std::process::ExitCode;

use a2a_core::{Algorithm, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "a2a", version, about = "All-to-all encode over prime fields in the p-port model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one protocol and check it against the matrix product.
    Run(RunArgs),
    /// Print lower bounds and predicted costs.
    Bounds(BoundsArgs),
    /// Run a protocol over a grid of (K, p) and print a CSV table.
    Sweep(SweepArgs),
    /// Encode K inputs into N outputs on N processors.
    Orchestrate(OrchestrateArgs),
    /// Re-run and compare against a previously written trace.
    Verify(RunArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Per-message startup cost.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Per-element transfer cost.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// JSONL trace file (written by `run`, read by `verify`).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_algo)]
    pub algo: Algorithm,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: u64,
    /// random | identity | ones | dft | vandermonde | PATH (universal only)
    #[arg(long)]
    pub matrix: Option<String>,
    /// random | comma-separated residues | PATH
    #[arg(long, default_value = "random")]
    pub input: String,
    /// Matrix seed, then input seed; one value seeds both.
    #[arg(long = "seed")]
    pub seeds: Vec<u64>,
    /// Grid exponents for vandermonde.
    #[arg(long, value_delimiter = ',')]
    pub phi: Option<Vec<usize>>,
    #[arg(long = "phi-omega", value_delimiter = ',')]
    pub phi_omega: Option<Vec<usize>>,
    #[arg(long = "phi-alpha", value_delimiter = ',')]
    pub phi_alpha: Option<Vec<usize>>,
    /// Run the inverse transform (dft, vandermonde).
    #[arg(long)]
    pub inverse: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct BoundsArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: usize,
    /// Field for the dft and vandermonde predictions.
    #[arg(long)]
    pub q: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_algo)]
    pub algo: Algorithm,
    /// Inclusive range `A-B` or list `A,B,C`.
    #[arg(long)]
    pub k: String,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub p: Vec<usize>,
    /// A prime, or `auto` for the smallest prime the algorithm accepts.
    #[arg(long, default_value = "auto")]
    pub q: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct OrchestrateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: u64,
    /// random | identity | ones | PATH, a K x N matrix
    #[arg(long, default_value = "random")]
    pub matrix: String,
    #[arg(long, default_value = "random")]
    pub input: String,
    #[arg(long = "seed")]
    pub seeds: Vec<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
pub enum Failure {
    Mismatch(String),
    Model(String),
    Usage(String),
}

impl Failure {
    /// Maps a library error to the exit class it belongs to, keeping the
    /// error's name in the message.
    pub fn core(e: Error) -> Failure {
        let debug = format!("{e:?}");
        let name: String = debug.chars().take_while(|c| c.is_alphanumeric()).collect();
        let msg = format!("{name}: {e}");
        match e {
            Error::Violation(_) | Error::NonTermination { .. } => Failure::Model(msg),
            _ => Failure::Usage(msg),
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Model(_) => 2,
            Failure::Usage(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Mismatch(m) | Failure::Model(m) | Failure::Usage(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => commands::run(&args),
        Command::Bounds(args) => commands::bounds(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Orchestrate(args) => commands::orchestrate(&args),
        Command::Verify(args) => commands::verify(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
