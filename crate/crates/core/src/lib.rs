//! Numerical evaluation, verification and counterexample search for
//! edge-length inequalities of triangles and tetrahedra.
//!
//! * [`geometry`]: validated shapes and their measures (Heron area,
//!   Cayley-Menger volume, inradii).
//! * [`inequalities`]: both sides and oriented gaps of every inequality.
//! * [`search`]: grid plus Nelder-Mead counterexample search, best-constant
//!   estimation and violation-region maps.
//! * [`reproduction`]: the fixed verification suite.

pub mod geometry;
pub mod inequalities;
pub mod reproduction;
pub mod search;
pub mod simplex;

pub use geometry::{is_valid_triangle, GeometryError, Shape, ShapeScale, Tetrahedron, Triangle};
pub use inequalities::{evaluate, EvalReport, Exponent, InequalityError, InequalityId, Verdict};
pub use reproduction::{run_paper_suite, PaperCheck};
pub use search::{
    estimate_best_constant, grid_then_refine, ConstantEstimate, Domain, SearchConfig, SearchError,
    SearchResult,
};
