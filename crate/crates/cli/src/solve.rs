use std::fmt::Write;
use std::path::PathBuf;

use clap::Args;
use weave_core::{all_pairwise, SolveError, Solver};

use crate::{bounds_error, format_solution, load_spec, BoundsArgs, BoundsOverride, CliError, Outcome};

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Spec file.
    pub spec: PathBuf,
    /// Also report the k-th solution after the first.
    #[arg(long, value_name = "K")]
    pub next: Option<usize>,
    #[command(flatten)]
    pub bounds: BoundsArgs,
}

pub fn run(args: &SolveArgs) -> Result<Outcome, CliError> {
    let doc = load_spec(&args.spec)?;
    let spec = &doc.spec;
    let bounds = BoundsOverride::from(args.bounds).or(doc.bounds).resolve(spec)?;
    let mut out = String::new();
    for w in &doc.warnings {
        writeln!(out, "{w}").unwrap();
    }
    let pairwise = all_pairwise(spec).map_err(|e| CliError::Parse(e.to_string()))?;
    for pc in &pairwise {
        let seq = spec.sequence(pc.i, pc.j).expect("validated spec has every pair");
        writeln!(
            out,
            "pair {},{} seq={seq} v={} zeta={},{} C={}",
            pc.i + 1,
            pc.j + 1,
            pc.v,
            pc.zeta_i,
            pc.zeta_j,
            pc.c
        )
        .unwrap();
    }
    writeln!(out, "bounds {bounds}").unwrap();

    let solver = Solver::new(spec, bounds).map_err(|e| match e {
        SolveError::NoSolutionWithinBounds(b) => bounds_error(b),
        e => CliError::Parse(e.to_string()),
    })?;
    let wanted = args.next.unwrap_or(0);
    let sols: Vec<_> = solver.iter_from(0).take(wanted + 1).collect();
    let Some(first) = sols.first() else {
        return Err(bounds_error(bounds));
    };
    writeln!(out, "first: {}", format_solution(first)).unwrap();
    for ((i, j), t) in &first.totals {
        writeln!(out, "  pair {},{} crossings={t}", i + 1, j + 1).unwrap();
    }
    if let Some(k) = args.next {
        let Some(sol) = sols.get(k) else {
            return Err(CliError::Bounds(format!(
                "only {} solution(s) within bounds ({bounds}), no next {k}",
                sols.len()
            )));
        };
        writeln!(out, "next {k}: {}", format_solution(sol)).unwrap();
        for ((i, j), t) in &sol.totals {
            writeln!(out, "  pair {},{} crossings={t}", i + 1, j + 1).unwrap();
        }
    }
    Ok(Outcome::ok(out))
}
