//! Classification tables: every assignment of crossing sequences with module
//! at most M to the pairs of a base tiling, under every matrix generator
//! that fits all pairs, solved and analysed.

use std::fmt::Write;
use std::path::PathBuf;

use clap::Args;
use num::Integer;
use rayon::prelude::*;
use weave_core::{
    a_triangle_count, all_pairwise, equivalent_sets, extract_matrices, gen_block, gen_diagonal,
    gen_satin, is_entangled, realize_matrices, CrossingMatrix, CrossingSequence, MatrixSet,
    SearchBounds, WeaveSpec,
};

use crate::{exit, format_solution, join, write, CliError, Family, Outcome};

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Largest module of a crossing sequence.
    #[arg(long, value_name = "M")]
    pub max_module: u32,
    /// Solutions tried per row before it is marked UNSOLVED.
    #[arg(long, value_name = "K", default_value_t = 1)]
    pub solutions: usize,
    /// Times to double the copy and multiplier bounds when no solution fits.
    #[arg(long, default_value_t = 0)]
    pub widen: u32,
    /// Directory for the CSV and Markdown tables; without it the Markdown
    /// table goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solved {
    pub solution: String,
    pub total: u64,
    /// Crossings per pair, in pair order.
    pub pair_totals: Vec<u64>,
    pub class: usize,
    pub a_triangles: usize,
    pub entangled: bool,
    matrices: MatrixSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationRow {
    pub family: Family,
    pub sequences: Vec<CrossingSequence>,
    /// Pairwise crossing numbers, in pair order.
    pub pairwise: Vec<u64>,
    pub generator: String,
    /// `Err` holds why the row is unsolved.
    pub result: Result<Solved, String>,
}

pub fn base_spec(family: Family, seqs: &[CrossingSequence]) -> WeaveSpec {
    match family {
        Family::Square => WeaveSpec::square(seqs[0]),
        Family::Kagome => WeaveSpec::kagome(seqs[0], seqs[1], seqs[2]),
    }
}

/// Crossing sequences with module in `2..=max_module`, by module then `p`.
pub fn crossing_sequences(max_module: u32) -> Vec<CrossingSequence> {
    (2..=max_module)
        .flat_map(|m| (1..m).map(move |p| CrossingSequence::new(p, m - p).expect("p, q >= 1")))
        .collect()
}

fn assignments(family: Family, max_module: u32) -> Vec<Vec<CrossingSequence>> {
    let seqs = crossing_sequences(max_module);
    let pairs = match family {
        Family::Square => 1,
        Family::Kagome => 3,
    };
    let mut out: Vec<Vec<CrossingSequence>> = vec![vec![]];
    for _ in 0..pairs {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                seqs.iter().map(move |&s| {
                    let mut v = prefix.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

/// Each generator that applies to every pair, with its matrix set.
pub fn generators(spec: &WeaveSpec, max_module: u32) -> Vec<(String, MatrixSet)> {
    let build = |f: &dyn Fn(CrossingSequence) -> Option<CrossingMatrix>| -> Option<MatrixSet> {
        let mats: Option<Vec<_>> = spec
            .sequences()
            .iter()
            .map(|(&pair, &s)| f(s).map(|m| m.with_pair(pair)))
            .collect();
        MatrixSet::new(spec.n_sets(), mats?).ok()
    };
    let mut out = Vec::new();
    for dir in [1i8, -1] {
        if let Some(set) = build(&|s| gen_diagonal(s.p(), s.q(), dir).ok()) {
            out.push((format!("diagonal{dir:+}"), set));
        }
    }
    if let Some(set) = build(&|s| (s.p() == s.q()).then(|| gen_block(s.p()).ok()).flatten()) {
        out.push(("block".to_string(), set));
    }
    for a in 1..max_module {
        let satin = |s: CrossingSequence| {
            (s.q() == 1 && a < s.module() && a.gcd(&s.module()) == 1)
                .then(|| gen_satin(s.p(), a).ok())
                .flatten()
        };
        if let Some(set) = build(&satin) {
            out.push((format!("satin{a}"), set));
        }
    }
    out
}

fn solve_row(
    family: Family,
    seqs: Vec<CrossingSequence>,
    generator: String,
    matrices: MatrixSet,
    solutions: usize,
    widen: u32,
) -> ClassificationRow {
    let spec = base_spec(family, &seqs);
    let pairwise = all_pairwise(&spec)
        .map(|v| v.iter().map(|p| p.c).collect())
        .unwrap_or_default();
    let result = SearchBounds::default_for(&spec)
        .map_err(|e| e.to_string())
        .and_then(|bounds| {
            realize_matrices(&spec, &matrices, bounds, solutions, widen).map_err(|e| e.to_string())
        })
        .and_then(|(sol, motif, _)| {
            let extracted = extract_matrices(&motif).map_err(|e| e.to_string())?;
            Ok(Solved {
                solution: format_solution(&sol),
                total: sol.total,
                pair_totals: sol.totals.values().copied().collect(),
                class: 0,
                a_triangles: a_triangle_count(&motif),
                entangled: is_entangled(&motif),
                matrices: extracted,
            })
        });
    ClassificationRow {
        family,
        sequences: seqs,
        pairwise,
        generator,
        result,
    }
}

/// All rows in deterministic order, with equivalence classes numbered from
/// 1 in order of first appearance. Rows are solved in parallel.
pub fn classify_rows(family: Family, max_module: u32, solutions: usize, widen: u32) -> Vec<ClassificationRow> {
    let jobs: Vec<(Vec<CrossingSequence>, String, MatrixSet)> = assignments(family, max_module)
        .into_iter()
        .flat_map(|seqs| {
            let spec = base_spec(family, &seqs);
            generators(&spec, max_module)
                .into_iter()
                .map(move |(name, set)| (seqs.clone(), name, set))
        })
        .collect();
    let mut rows: Vec<ClassificationRow> = jobs
        .into_par_iter()
        .map(|(seqs, name, set)| solve_row(family, seqs, name, set, solutions, widen))
        .collect();

    // Representatives: (sequences, total, matrices, class id).
    let mut reps: Vec<(Vec<CrossingSequence>, u64, MatrixSet, usize)> = Vec::new();
    for row in &mut rows {
        let Ok(solved) = &mut row.result else { continue };
        let found = reps.iter().find(|(s, t, m, _)| {
            *s == row.sequences
                && *t == solved.total
                && matches!(equivalent_sets(m, &solved.matrices), Ok(Some(_)))
        });
        solved.class = match found {
            Some(r) => r.3,
            None => {
                let id = reps.len() + 1;
                reps.push((row.sequences.clone(), solved.total, solved.matrices.clone(), id));
                id
            }
        };
    }
    rows
}

pub const HEADER: [&str; 11] = [
    "family",
    "sequences",
    "pairwise",
    "generator",
    "status",
    "total",
    "pair_totals",
    "solution",
    "class",
    "a_triangles",
    "entangled",
];

impl ClassificationRow {
    pub fn fields(&self) -> [String; 11] {
        let head = [
            self.family.name().to_string(),
            join(&self.sequences, "/"),
            join(&self.pairwise, "/"),
            self.generator.clone(),
        ];
        let tail = match &self.result {
            Ok(s) => [
                "ok".to_string(),
                s.total.to_string(),
                join(&s.pair_totals, "/"),
                s.solution.clone(),
                format!("C{}", s.class),
                s.a_triangles.to_string(),
                s.entangled.to_string(),
            ],
            Err(e) => [
                "UNSOLVED".to_string(),
                String::new(),
                String::new(),
                e.clone(),
                String::new(),
                String::new(),
                String::new(),
            ],
        };
        let mut out: [String; 11] = Default::default();
        for (slot, v) in out.iter_mut().zip(head.into_iter().chain(tail)) {
            *slot = v;
        }
        out
    }
}

pub fn to_csv(rows: &[ClassificationRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).expect("write to memory");
    for r in rows {
        w.write_record(r.fields()).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields")
}

pub fn to_markdown(rows: &[ClassificationRow]) -> String {
    let cell = |s: &str| s.replace('|', "\\|");
    let mut out = String::new();
    writeln!(out, "| {} |", HEADER.join(" | ")).unwrap();
    writeln!(out, "|{}", "---|".repeat(HEADER.len())).unwrap();
    for r in rows {
        let f: Vec<String> = r.fields().iter().map(|s| cell(s)).collect();
        writeln!(out, "| {} |", f.join(" | ")).unwrap();
    }
    out
}

pub fn run(args: &ClassifyArgs) -> Result<Outcome, CliError> {
    if args.max_module < 2 {
        return Err(CliError::Usage("--max-module must be at least 2".into()));
    }
    if args.solutions < 1 {
        return Err(CliError::Usage("--solutions must be at least 1".into()));
    }
    let rows = classify_rows(args.family, args.max_module, args.solutions, args.widen);
    let unsolved = rows.iter().filter(|r| r.result.is_err()).count();
    let classes = rows
        .iter()
        .filter_map(|r| r.result.as_ref().ok().map(|s| s.class))
        .max()
        .unwrap_or(0);
    let summary = format!(
        "family={} max_module={} rows={} classes={classes} unsolved={unsolved}\n",
        args.family.name(),
        args.max_module,
        rows.len()
    );
    let mut out = String::new();
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.clone(),
                source,
            })?;
            let stem = format!("{}_m{}", args.family.name(), args.max_module);
            let csv_path = dir.join(format!("{stem}.csv"));
            let md_path = dir.join(format!("{stem}.md"));
            write(&csv_path, &to_csv(&rows))?;
            write(&md_path, &to_markdown(&rows))?;
            writeln!(out, "wrote {}", csv_path.display()).unwrap();
            writeln!(out, "wrote {}", md_path.display()).unwrap();
        }
        None => out.push_str(&to_markdown(&rows)),
    }
    out.push_str(&summary);
    let code = if !rows.is_empty() && unsolved == rows.len() {
        exit::BOUNDS
    } else {
        exit::OK
    };
    Ok(Outcome { stdout: out, code })
}
