//! Classification of doubly periodic untwisted (p,q)-weaves by crossing
//! number and crossing matrices.

pub mod analysis;
pub mod intersect;
pub mod matrix;
pub mod motif;
pub mod render;
pub mod solver;
pub mod weave;

pub use analysis::{a_triangle_count, blocking_crossings, find_a_triangles, is_entangled, ATriangle, AnalysisError};
pub use intersect::{all_pairwise, geometric_intersection, pairwise_crossing_number, PairwiseCrossing};
pub use matrix::{
    apply_transform, complement_matrix, equivalent_sets, gen_block, gen_diagonal, gen_satin,
    parse_matrices, rank, transform_group, validate_matrix, CrossingMatrix, MatrixBlock,
    MatrixError, MatrixSet, MatrixTransform, Rotation,
};
pub use motif::{
    build_motif, extract_matrices, first_realizable, parse_motif, realize_matrices, translate_cell, validate_tiling,
    Crossing, Motif, MotifError, Point, Strand, StrandId, Q,
};
pub use render::{render_design, render_motif_svg, render_text, RenderError, RenderOptions, DEFAULT_PALETTE};
pub use solver::{enumerate_solutions, solve_min, solve_next, SearchBounds, SolveError, SolveResult, Solver};
pub use weave::{
    complement, has_errors, normalize_slope, validate_spec, CrossingSequence, Diagnostic, Severity, Slope,
    WeaveError, WeaveSpec,
};
