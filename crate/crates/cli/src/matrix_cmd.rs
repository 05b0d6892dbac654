use std::fmt::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use weave_core::{
    equivalent_sets, gen_block, gen_diagonal, gen_satin, parse_matrices, rank, render_design,
    validate_matrix, CrossingMatrix, MatrixBlock, MatrixError, MatrixSet,
};

use crate::{exit, read, write, CliError, Outcome};

#[derive(Debug, Subcommand)]
pub enum MatrixCommand {
    /// Write a generated matrix.
    Gen(GenArgs),
    /// Check every matrix in a file against its sequence.
    Validate { file: PathBuf },
    /// Whether two matrix files are related by one shift/rotation.
    Equiv { a: PathBuf, b: PathBuf },
    /// Rank of every matrix in a file.
    Rank { file: PathBuf },
    /// Draw the design (black/grey grid) of every matrix in a file as SVG.
    Design {
        file: PathBuf,
        /// Output SVG; with several matrices the pair is appended to the name.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Diagonal,
    Block,
    Satin,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub kind: Generator,
    #[arg(long)]
    pub p: u32,
    /// Under-crossings per period (diagonal only; defaults to p).
    #[arg(long)]
    pub q: Option<u32>,
    /// Satin step, coprime to p + 1.
    #[arg(long)]
    pub a: Option<u32>,
    /// Diagonal direction, +1 or -1.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub direction: i8,
    /// Pair the matrix belongs to, 1-based.
    #[arg(long, value_parser = parse_pair, default_value = "1,2")]
    pub pair: (usize, usize),
    /// Write the matrix here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also draw the design as SVG.
    #[arg(long)]
    pub design: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (i, j) = s.split_once(',').ok_or("expected I,J")?;
    let i: usize = i.trim().parse().map_err(|_| format!("bad set index '{i}'"))?;
    let j: usize = j.trim().parse().map_err(|_| format!("bad set index '{j}'"))?;
    if i == 0 || j == 0 || i == j {
        return Err("set indices are distinct and 1-based".into());
    }
    Ok((i - 1, j - 1))
}

pub fn run(cmd: &MatrixCommand) -> Result<Outcome, CliError> {
    match cmd {
        MatrixCommand::Gen(a) => gen(a),
        MatrixCommand::Validate { file } => validate(file),
        MatrixCommand::Equiv { a, b } => equiv(a, b),
        MatrixCommand::Rank { file } => ranks(file),
        MatrixCommand::Design { file, out } => design(file, out),
    }
}

fn gen(a: &GenArgs) -> Result<Outcome, CliError> {
    let m = match a.kind {
        Generator::Diagonal => gen_diagonal(a.p, a.q.unwrap_or(a.p), a.direction),
        Generator::Block => gen_block(a.p),
        Generator::Satin => {
            let step = a.a.ok_or_else(|| CliError::Usage("satin needs --a".into()))?;
            gen_satin(a.p, step)
        }
    }
    .map_err(|e| CliError::Usage(e.to_string()))?
    .with_pair(a.pair);
    let text = m.to_text();
    if let Some(path) = &a.design {
        write(path, &render_design(&m))?;
    }
    match &a.out {
        Some(path) => {
            write(path, &text)?;
            Ok(Outcome::ok(format!("wrote {}\n", path.display())))
        }
        None => Ok(Outcome::ok(text)),
    }
}

fn load_blocks(path: &Path) -> Result<Vec<MatrixBlock>, CliError> {
    let blocks = parse_matrices(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if blocks.is_empty() {
        return Err(CliError::Parse(format!("{}: no matrices", path.display())));
    }
    Ok(blocks)
}

/// The matrices of a file as one set; the number of sets is the largest
/// index mentioned.
pub fn load_set(path: &Path) -> Result<MatrixSet, CliError> {
    let blocks = load_blocks(path)?;
    let n = blocks
        .iter()
        .map(|b| b.matrix.pair().0.max(b.matrix.pair().1) + 1)
        .max()
        .unwrap_or(2);
    MatrixSet::new(n, blocks.into_iter().map(|b| b.matrix))
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn pair_label(m: &CrossingMatrix) -> String {
    format!("pair {},{}", m.pair().0 + 1, m.pair().1 + 1)
}

fn validate(path: &Path) -> Result<Outcome, CliError> {
    let mut out = String::new();
    let mut all = true;
    for b in load_blocks(path)? {
        let ok = validate_matrix(&b.matrix, b.sequence).map_err(|e| match e {
            MatrixError::ModuleMismatch { .. } => CliError::Mismatch(e.to_string()),
            e => CliError::Parse(e.to_string()),
        })?;
        all &= ok;
        let verdict = if ok { "valid" } else { "INVALID" };
        writeln!(out, "{} seq={}: {verdict}", pair_label(&b.matrix), b.sequence).unwrap();
    }
    Ok(Outcome {
        stdout: out,
        code: if all { exit::OK } else { exit::NEGATIVE },
    })
}

fn equiv(a: &Path, b: &Path) -> Result<Outcome, CliError> {
    let (sa, sb) = (load_set(a)?, load_set(b)?);
    match equivalent_sets(&sa, &sb) {
        Ok(Some(t)) => Ok(Outcome::ok(format!("EQUIVALENT {t}\n"))),
        Ok(None) => Ok(Outcome {
            stdout: "NOT EQUIVALENT\n".into(),
            code: exit::NEGATIVE,
        }),
        Err(e) => Err(CliError::Mismatch(e.to_string())),
    }
}

fn ranks(path: &Path) -> Result<Outcome, CliError> {
    let mut out = String::new();
    for b in load_blocks(path)? {
        writeln!(out, "{} rank={}", pair_label(&b.matrix), rank(&b.matrix)).unwrap();
    }
    Ok(Outcome::ok(out))
}

fn design(path: &Path, out: &Path) -> Result<Outcome, CliError> {
    let blocks = load_blocks(path)?;
    let mut report = String::new();
    for b in &blocks {
        let target = if blocks.len() == 1 {
            out.to_path_buf()
        } else {
            let (i, j) = b.matrix.pair();
            let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("design");
            out.with_file_name(format!("{stem}_{}_{}.svg", i + 1, j + 1))
        };
        write(&target, &render_design(&b.matrix))?;
        writeln!(report, "wrote {}", target.display()).unwrap();
    }
    Ok(Outcome::ok(report))
}
