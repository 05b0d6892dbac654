//! The `weave` command line: solving crossing numbers, working with crossing
//! matrices, drawing motifs and building classification tables.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use weave_core::{SearchBounds, SolveResult};

pub mod classify;
pub mod matrix_cmd;
pub mod motif_cmd;
pub mod solve;
pub mod specfile;

pub use specfile::{parse_spec, BoundsOverride, SpecDocument};

/// Exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const NEGATIVE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const BOUNDS: i32 = 3;
    pub const MISMATCH: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Bounds(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) | CliError::Usage(_) => exit::USAGE,
            CliError::Bounds(_) => exit::BOUNDS,
            CliError::Mismatch(_) => exit::MISMATCH,
        }
    }
}

/// What a command prints, and the exit code it asks for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    pub fn ok(stdout: String) -> Self {
        Self { stdout, code: exit::OK }
    }
}

#[derive(Debug, Parser)]
#[command(name = "weave", version, about = "Crossing numbers, crossing matrices and motifs of periodic weaves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise and total crossing numbers of a spec.
    Solve(solve::SolveArgs),
    /// Generate, validate, compare and measure crossing matrices.
    #[command(subcommand)]
    Matrix(matrix_cmd::MatrixCommand),
    /// Build a motif and analyse it.
    Motif(motif_cmd::MotifArgs),
    /// Classification tables for the square or kagome family.
    Classify(classify::ClassifyArgs),
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct BoundsArgs {
    /// Largest |a| or |b| of a slope.
    #[arg(long)]
    pub max_slope: Option<u64>,
    /// Largest number of parallel curves per set.
    #[arg(long)]
    pub max_copies: Option<u64>,
    /// Largest multiplier k per pair.
    #[arg(long)]
    pub max_multiplier: Option<u64>,
}

impl From<BoundsArgs> for BoundsOverride {
    fn from(b: BoundsArgs) -> Self {
        BoundsOverride {
            max_slope: b.max_slope,
            max_copies: b.max_copies,
            max_multiplier: b.max_multiplier,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Square,
    Kagome,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Square => "square",
            Family::Kagome => "kagome",
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Solve(a) => solve::run(&a),
        Command::Matrix(c) => matrix_cmd::run(&c),
        Command::Motif(a) => motif_cmd::run(&a),
        Command::Classify(a) => classify::run(&a),
    }
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn load_spec(path: &Path) -> Result<SpecDocument, CliError> {
    parse_spec(&read(path)?).map_err(|e| match e {
        CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        e => e,
    })
}

pub(crate) fn bounds_error(bounds: SearchBounds) -> CliError {
    CliError::Bounds(format!("no solution within bounds ({bounds})"))
}

pub(crate) fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|t| t.to_string()).collect::<Vec<_>>().join(sep)
}

/// `total=4, slopes=(2,1)/(-2,1), copies=1/1, k=1`; copies and multipliers
/// are listed per set and per pair `(1,2), (1,3), ...`.
pub fn format_solution(sol: &SolveResult) -> String {
    format!(
        "total={}, slopes={}, copies={}, k={}",
        sol.total,
        join(&sol.slopes, "/"),
        join(&sol.copies, "/"),
        join(sol.multipliers.values(), "/"),
    )
}
