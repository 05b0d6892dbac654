use std::fmt::Write;
use std::path::PathBuf;

use clap::Args;
use weave_core::{
    a_triangle_count, gen_diagonal, is_entangled, realize_matrices, render_motif_svg, render_text,
    validate_tiling, MatrixSet, MotifError, RenderOptions, SolveError,
};

use crate::matrix_cmd::load_set;
use crate::{bounds_error, format_solution, load_spec, write, BoundsArgs, BoundsOverride, CliError, Outcome};

#[derive(Debug, Args)]
pub struct MotifArgs {
    /// Spec file.
    pub spec: PathBuf,
    /// Matrix file; overrides matrices in the spec. Without either, every
    /// pair uses the +1 diagonal.
    #[arg(long)]
    pub matrices: Option<PathBuf>,
    /// Write the motif file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a plain-text crossing listing here.
    #[arg(long)]
    pub text: Option<PathBuf>,
    /// Write an SVG drawing here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Tile the SVG drawing N x N times.
    #[arg(long, default_value_t = 1)]
    pub repeat: u32,
    /// Side of one cell in the SVG drawing, in pixels.
    #[arg(long, default_value_t = 512)]
    pub cell_pixels: u32,
    /// Solutions to try before giving up on the matrices.
    #[arg(long, default_value_t = 64)]
    pub candidates: usize,
    /// Times to double the copy and multiplier bounds when no candidate fits.
    #[arg(long, default_value_t = 3)]
    pub widen: u32,
    #[command(flatten)]
    pub bounds: BoundsArgs,
}

pub(crate) fn motif_error(e: MotifError) -> CliError {
    match e {
        MotifError::MatrixModuleMismatch(_) | MotifError::SolutionMismatch(_) => CliError::Mismatch(e.to_string()),
        MotifError::Solve(SolveError::NoSolutionWithinBounds(b)) => bounds_error(b),
        MotifError::Solve(SolveError::InvalidSpec(_)) | MotifError::Solve(SolveError::InvalidBounds(_)) => {
            CliError::Parse(e.to_string())
        }
        e => CliError::Bounds(e.to_string()),
    }
}

pub fn run(args: &MotifArgs) -> Result<Outcome, CliError> {
    let doc = load_spec(&args.spec)?;
    let spec = &doc.spec;
    let bounds = BoundsOverride::from(args.bounds).or(doc.bounds).resolve(spec)?;
    let matrices = match (&args.matrices, doc.matrices) {
        (Some(path), _) => load_set(path)?,
        (None, Some(m)) => m,
        (None, None) => {
            let mats = spec.sequences().iter().map(|(&pair, s)| {
                gen_diagonal(s.p(), s.q(), 1).expect("valid sequence").with_pair(pair)
            });
            MatrixSet::new(spec.n_sets(), mats).map_err(|e| CliError::Parse(e.to_string()))?
        }
    };
    if matrices.n_sets() != spec.n_sets() {
        return Err(CliError::Mismatch(format!(
            "matrices cover {} sets, spec has {}",
            matrices.n_sets(),
            spec.n_sets()
        )));
    }
    let (sol, motif, used) =
        realize_matrices(spec, &matrices, bounds, args.candidates, args.widen).map_err(motif_error)?;

    let mut out = String::new();
    writeln!(out, "solution: {}", format_solution(&sol)).unwrap();
    if used != bounds {
        writeln!(out, "bounds widened to {used}").unwrap();
    }
    let diagnostics = validate_tiling(&motif);
    if diagnostics.is_empty() {
        writeln!(out, "tiling: ok").unwrap();
    }
    for d in &diagnostics {
        writeln!(out, "tiling: {d}").unwrap();
    }
    writeln!(
        out,
        "crossings={} entangled={} a_triangles={}",
        motif.crossings().len(),
        is_entangled(&motif),
        a_triangle_count(&motif)
    )
    .unwrap();

    if let Some(path) = &args.out {
        write(path, &motif.to_text())?;
    }
    if let Some(path) = &args.text {
        write(path, &render_text(&motif))?;
    }
    if let Some(path) = &args.svg {
        let opts = RenderOptions {
            repeat: args.repeat,
            cell_pixels: args.cell_pixels,
            ..RenderOptions::default()
        };
        let svg = render_motif_svg(&motif, &opts).map_err(|e| CliError::Usage(e.to_string()))?;
        write(path, &svg)?;
    }
    Ok(Outcome::ok(out))
}
