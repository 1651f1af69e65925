//! `cnmf` — command-line front end for QUBO-based convex non-negative
//! matrix factorization.
//!
//! Subcommands:
//! - `gen`: synthetic Gaussian-blob datasets as CSV (plus a `.labels` sidecar)
//! - `factorize`: run the alternating QUBO driver on a CSV dataset
//! - `bench`: time the annealing path against the classical baseline
//! - `embed`: tabulate physical-qubit costs for clique embedding on Chimera
//!
//! All file I/O lives here; the `cnmf-core` library is pure computation.

mod bench;
mod data;
mod embed;
mod factorize;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cnmf_core::CnmfError;

#[derive(Parser)]
#[command(
    name = "cnmf",
    version,
    about = "Convex non-negative matrix factorization via QUBO solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic Gaussian-blob dataset.
    ///
    /// Writes a CSV with one row per point and a `<out>.labels` sidecar
    /// holding the ground-truth blob index of each row.
    Gen(GenArgs),
    /// Factorize a CSV dataset (rows = observations) as X ~ X*W*G.
    ///
    /// Writes a JSON document with the factors, labels, centroids,
    /// objective trace, and timings.
    Factorize(FactorizeArgs),
    /// Benchmark the annealing path against the classical baseline.
    ///
    /// Emits a CSV with per-phase timings for both paths on shared
    /// synthetic datasets.
    Bench(BenchArgs),
    /// Tabulate clique-embedding costs on a Chimera processor grid.
    Embed(EmbedArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of data points (CSV rows).
    #[arg(long)]
    points: usize,
    /// Dimensions per point (CSV columns).
    #[arg(long)]
    dims: usize,
    /// Number of Gaussian blobs; centers are sampled uniformly in [0,1]^dims.
    #[arg(long)]
    clusters: usize,
    /// Standard deviation of each blob.
    #[arg(long, default_value_t = 0.05)]
    spread: f64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; ground truth goes to `<out>.labels`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FactorizeArgs {
    /// Input CSV: one row per observation, no header.
    #[arg(long)]
    input: PathBuf,
    /// Number of clusters K.
    #[arg(long)]
    k: usize,
    /// Bits per encoded factor entry.
    #[arg(long, default_value_t = 10)]
    bits: u32,
    /// Precision step of the fixed-point encoding: entries are alpha * level.
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
    /// Weight of the sum-to-one penalties.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Solver for each half-step.
    #[arg(long, value_enum, default_value_t = SolverArg::Sa)]
    solver: SolverArg,
    /// Alternating iterations (each runs one G and one W half-step).
    #[arg(long, default_value_t = 1)]
    iterations: usize,
    /// Cross-term construction for the W subproblem.
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// RNG seed (initialization and annealing).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the first G-subproblem QUBO in the text interchange format.
    #[arg(long)]
    dump_qubo: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated dataset sizes (points per dataset), e.g. 8,12,16.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Dimensions per point.
    #[arg(long, default_value_t = 2)]
    dims: usize,
    /// Number of clusters K (also the number of generated blobs).
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Repeats per size, each with fresh data.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Base RNG seed; per-run seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    /// Largest number of real variables to tabulate.
    #[arg(long, default_value_t = 8)]
    reals_max: usize,
    /// Bits per encoded real.
    #[arg(long, default_value_t = 10)]
    bits: usize,
    /// Processor grid as ROWSxCOLSxSHORE, e.g. 16x16x4.
    #[arg(long, default_value = "16x16x4")]
    grid: String,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    /// Multi-restart simulated annealing with a derived schedule.
    Sa,
    /// Full enumeration; limited to 24 bits per subproblem.
    Exhaustive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Full quadratic form; QUBO energy equals the penalized objective.
    Exact,
    /// Drop the partially-mixed W-subproblem couplings (historical form).
    Truncated,
}

/// Anything a subcommand can fail with, mapped to a distinct exit code.
#[derive(Debug)]
enum CliError {
    Core(CnmfError),
    Io(PathBuf, std::io::Error),
}

impl From<CnmfError> for CliError {
    fn from(e: CnmfError) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

impl CliError {
    fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Io(path.to_path_buf(), e)
    }

    /// Exit codes: 10 parse, 11 config/domain, 12 capacity, 13 I/O.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CnmfError::Parse(_)) => 10,
            CliError::Core(CnmfError::Capacity(_)) => 12,
            CliError::Core(_) => 11,
            CliError::Io(..) => 13,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => data::cmd_gen(&args),
        Command::Factorize(args) => factorize::cmd_factorize(&args),
        Command::Bench(args) => bench::cmd_bench(&args),
        Command::Embed(args) => embed::cmd_embed(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
