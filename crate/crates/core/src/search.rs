//! Counterexample search and best-constant estimation.
//!
//! Every inequality here is homogeneous of degree one, so the search runs on
//! a single scale slice (unit perimeter by default) of shape space:
//!
//! * triangles are parameterized by `(u, v)` in the open unit simplex, giving
//!   sides `(u, v, 1 - u - v)`;
//! * tetrahedra by five coordinates with `A = 0`, `B = (1, 0, 0)`,
//!   `C = (x_c, y_c, 0)`, `D = (x_d, y_d, z_d)`, which removes rigid motions
//!   and scale. Distances are extracted under the fixed edge labeling.
//!
//! A search is a coarse grid over the parameter box followed by multistart
//! Nelder-Mead refinement from the best cells. All randomness comes from
//! per-start ChaCha streams derived from the configured seed, and results are
//! merged in start order, so the outcome does not depend on the number of
//! worker threads.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Shape, ShapeScale, Tetrahedron, Triangle, FACE_EDGES};
use crate::inequalities::{self, EvalReport, InequalityId, ShapeKind, K0};
use crate::simplex::{self, SimplexOptions};

/// Window over which the tetrahedron sampler measures its rejection rate.
pub const SAMPLER_WINDOW: usize = 10_000;
/// Minimum budget accepted by [`estimate_best_constant`].
pub const MIN_CONSTANT_BUDGET: u64 = 10_000;
/// Evaluations allotted to each multistart of the constant estimator.
pub const EVALS_PER_START: u64 = 4_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("tetrahedron sampler starved: {rejected} of {window} candidates rejected")]
    SamplerStarved { rejected: usize, window: usize },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("no valid shape in the search grid")]
    EmptyGrid,
    #[error("could not build worker pool: {0}")]
    WorkerPool(String),
}

/// Splits `seed` into an independent stream for sub-task `index`
/// (SplitMix64 finalizer).
pub fn substream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, index))
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool
/// when `workers` is `None`.
pub fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, SearchError> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| SearchError::WorkerPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

// ---------------------------------------------------------------------------
// parameterizations

/// Sides `(u, v, 1 - u - v)` rescaled to `scale`; `None` when `(u, v)` is
/// outside the open simplex or the sides violate the triangle inequality.
pub fn parameterize_triangle(u: f64, v: f64, scale: ShapeScale) -> Option<Triangle> {
    if !(u > 0.0 && v > 0.0 && u + v < 1.0) {
        return None;
    }
    Triangle::new(u, v, 1.0 - u - v)
        .ok()?
        .normalized(scale)
        .ok()
}

/// Inverse of [`parameterize_triangle`]: the simplex point of `t`.
pub fn triangle_parameters(t: &Triangle) -> (f64, f64) {
    let p = t.perimeter();
    (t.a() / p, t.b() / p)
}

/// Vertices for the canonical tetrahedron parameters
/// `[x_c, y_c, x_d, y_d, z_d]`.
pub fn tetrahedron_vertices(p: &[f64]) -> [[f64; 3]; 4] {
    [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [p[0], p[1], 0.0],
        [p[2], p[3], p[4]],
    ]
}

pub fn parameterize_tetrahedron(p: &[f64], scale: ShapeScale) -> Option<Tetrahedron> {
    if p.len() != 5 || p.iter().any(|x| !x.is_finite()) {
        return None;
    }
    Tetrahedron::from_vertices(&tetrahedron_vertices(p))
        .ok()?
        .normalized(scale)
        .ok()
}

/// Grid box of the canonical tetrahedron parameters. With `AB` the longest
/// edge and unit length, every tetrahedron up to similarity has a
/// representative inside it.
const TET_BOX: [(f64, f64); 5] = [(0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (-1.0, 1.0), (0.0, 1.0)];

/// A tetrahedron together with the coordinates it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTetrahedron {
    pub tetrahedron: Tetrahedron,
    pub vertices: [[f64; 3]; 4],
}

/// Draws four vertices uniformly in the unit cube until they span a valid
/// tetrahedron.
pub fn sample_tetrahedron<R: Rng + ?Sized>(rng: &mut R) -> Result<SampledTetrahedron, SearchError> {
    let mut rejected = 0;
    for _ in 0..SAMPLER_WINDOW {
        let vertices: [[f64; 3]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.random::<f64>()));
        match Tetrahedron::from_vertices(&vertices) {
            Ok(tetrahedron) => {
                return Ok(SampledTetrahedron {
                    tetrahedron,
                    vertices,
                })
            }
            Err(_) => rejected += 1,
        }
    }
    Err(SearchError::SamplerStarved {
        rejected,
        window: SAMPLER_WINDOW,
    })
}

/// Draws three vertices uniformly in the unit square until they span a valid
/// triangle, and returns its side lengths.
pub fn sample_triangle<R: Rng + ?Sized>(rng: &mut R) -> Result<Triangle, SearchError> {
    let mut rejected = 0;
    for _ in 0..SAMPLER_WINDOW {
        let p: [[f64; 2]; 3] = std::array::from_fn(|_| [rng.random::<f64>(), rng.random::<f64>()]);
        let d = |i: usize, j: usize| (p[i][0] - p[j][0]).hypot(p[i][1] - p[j][1]);
        match Triangle::new(d(0, 1), d(1, 2), d(2, 0)) {
            Ok(t) => return Ok(t),
            Err(_) => rejected += 1,
        }
    }
    Err(SearchError::SamplerStarved {
        rejected,
        window: SAMPLER_WINDOW,
    })
}

// ---------------------------------------------------------------------------
// counterexample search

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Triangle,
    Tetrahedron,
}

impl Domain {
    pub fn dimension(self) -> usize {
        match self {
            Domain::Triangle => 2,
            Domain::Tetrahedron => 5,
        }
    }

    fn kind(self) -> ShapeKind {
        match self {
            Domain::Triangle => ShapeKind::Triangle,
            Domain::Tetrahedron => ShapeKind::Tetrahedron,
        }
    }
}

impl From<ShapeKind> for Domain {
    fn from(k: ShapeKind) -> Self {
        match k {
            ShapeKind::Triangle => Domain::Triangle,
            ShapeKind::Tetrahedron => Domain::Tetrahedron,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub target: InequalityId,
    pub domain: Domain,
    pub normalization: ShapeScale,
    /// Grid points per free parameter.
    pub grid_resolution: usize,
    /// Nelder-Mead iterations per multistart.
    pub refine_iters: usize,
    /// Nelder-Mead shrink coefficient.
    pub refine_shrink: f64,
    pub multistart_count: usize,
    pub rng_seed: u64,
    /// Stop as soon as a gap `<= -margin_floor` has been found.
    pub margin_floor: Option<f64>,
    pub record_trace: bool,
}

impl SearchConfig {
    /// Default configuration for `target`; the domain follows the target.
    pub fn new(target: InequalityId) -> Self {
        let domain = Domain::from(target.kind());
        let grid_resolution = match domain {
            Domain::Triangle => 100,
            Domain::Tetrahedron => 8,
        };
        Self {
            target,
            domain,
            normalization: ShapeScale::UnitPerimeter,
            grid_resolution,
            refine_iters: 200,
            refine_shrink: 0.5,
            multistart_count: 8,
            rng_seed: 0,
            margin_floor: None,
            record_trace: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InvalidConfig(m));
        if self.grid_resolution < 2 {
            return bad(format!(
                "grid_resolution must be >= 2, got {}",
                self.grid_resolution
            ));
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink < 1.0) {
            return bad(format!(
                "refine_shrink must be in (0, 1), got {}",
                self.refine_shrink
            ));
        }
        if self.multistart_count < 1 {
            return bad("multistart_count must be >= 1".into());
        }
        if self.domain.kind() != self.target.kind() {
            return bad(format!(
                "target {} is a {} inequality but the domain is {:?}",
                self.target,
                self.target.kind(),
                self.domain
            ));
        }
        if let Some(m) = self.margin_floor {
            if !(m.is_finite() && m >= 0.0) {
                return bad(format!("margin_floor must be finite and >= 0, got {m}"));
            }
        }
        Ok(())
    }

    fn shape_at(&self, p: &[f64]) -> Option<Shape> {
        match self.domain {
            Domain::Triangle => {
                parameterize_triangle(p[0], p[1], self.normalization).map(Shape::from)
            }
            Domain::Tetrahedron => parameterize_tetrahedron(p, self.normalization).map(Shape::from),
        }
    }

    /// Oriented gap at parameters `p`, `+inf` for parameters that do not
    /// describe a valid shape.
    fn objective(&self, p: &[f64]) -> f64 {
        self.shape_at(p)
            .and_then(|s| inequalities::oriented_gap(&self.target, &s).ok())
            .unwrap_or(f64::INFINITY)
    }

    fn grid_points(&self) -> Vec<Vec<f64>> {
        let r = self.grid_resolution;
        let center = |i: usize, (lo, hi): (f64, f64)| lo + (hi - lo) * (i as f64 + 0.5) / r as f64;
        match self.domain {
            Domain::Triangle => (0..r)
                .flat_map(|i| (0..r).map(move |j| (i, j)))
                .map(|(i, j)| vec![center(i, (0.0, 1.0)), center(j, (0.0, 1.0))])
                .filter(|p| p[0] + p[1] < 1.0)
                .collect(),
            Domain::Tetrahedron => {
                let total = r.pow(5);
                (0..total)
                    .map(|mut idx| {
                        let mut p = vec![0.0; 5];
                        for d in (0..5).rev() {
                            p[d] = center(idx % r, TET_BOX[d]);
                            idx /= r;
                        }
                        p
                    })
                    .collect()
            }
        }
    }

    fn cell_widths(&self) -> Vec<f64> {
        let r = self.grid_resolution as f64;
        match self.domain {
            Domain::Triangle => vec![1.0 / r; 2],
            Domain::Tetrahedron => TET_BOX.iter().map(|(lo, hi)| (hi - lo) / r).collect(),
        }
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Orders candidates by gap, then by parameter vector.
fn by_gap(a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| lexicographic(&a.1, &b.1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_shape: Shape,
    /// Search parameters of `best_shape`.
    pub best_parameters: Vec<f64>,
    pub best_gap: f64,
    /// The best shape re-evaluated through [`inequalities::evaluate`].
    pub best_report: EvalReport,
    pub evaluations: u64,
    pub found_violation: bool,
    /// `(iteration, best gap so far)`; iteration 0 is the grid stage.
    pub trace: Option<Vec<(u64, f64)>>,
}

impl SearchResult {
    /// Trace as `iteration,gap` CSV lines with a header.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,gap\n");
        for (i, g) in self.trace.iter().flatten() {
            out.push_str(&format!("{i},{g:e}\n"));
        }
        out
    }
}

struct StartOutcome {
    gap: f64,
    params: Vec<f64>,
    evaluations: u64,
    history: Vec<f64>,
}

/// Grid sweep followed by multistart simplex refinement of `cfg.target`'s
/// oriented gap. The result is the minimum over every valid shape evaluated.
pub fn grid_then_refine(cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    cfg.validate()?;

    let points = cfg.grid_points();
    let grid_evals = points.len() as u64;
    let mut scored: Vec<(f64, Vec<f64>)> = points
        .into_par_iter()
        .map(|p| (cfg.objective(&p), p))
        .filter(|(g, _)| g.is_finite())
        .collect();
    if scored.is_empty() {
        return Err(SearchError::EmptyGrid);
    }
    scored.sort_by(by_gap);
    scored.truncate(cfg.multistart_count);

    let (mut best_gap, mut best_params) = scored[0].clone();
    let mut evaluations = grid_evals;
    let mut trace = vec![(0u64, best_gap)];
    let floor_hit = |g: f64| cfg.margin_floor.is_some_and(|m| g <= -m);

    if !floor_hit(best_gap) {
        let widths = cfg.cell_widths();
        let opts = SimplexOptions {
            max_iters: cfg.refine_iters,
            shrink: cfg.refine_shrink,
            ..SimplexOptions::default()
        };
        let outcomes: Vec<StartOutcome> = scored
            .par_iter()
            .enumerate()
            .map(|(i, (_, x0))| {
                let mut rng = substream(cfg.rng_seed, i as u64);
                let steps: Vec<f64> = widths
                    .iter()
                    .map(|w| {
                        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        sign * w * rng.random_range(0.5..1.0)
                    })
                    .collect();
                let out = simplex::minimize(|p| cfg.objective(p), x0, &steps, &opts);
                StartOutcome {
                    gap: out.f,
                    params: out.x,
                    evaluations: out.evaluations,
                    history: out.history,
                }
            })
            .collect();

        let mut iteration = 0u64;
        for out in outcomes {
            evaluations += out.evaluations;
            for g in &out.history {
                iteration += 1;
                trace.push((iteration, best_gap.min(*g)));
            }
            if by_gap(
                &(out.gap, out.params.clone()),
                &(best_gap, best_params.clone()),
            ) == Ordering::Less
            {
                best_gap = out.gap;
                best_params = out.params;
            }
            if floor_hit(best_gap) {
                break;
            }
        }
    }

    let best_shape = cfg
        .shape_at(&best_params)
        .expect("best parameters always come from a finite, hence valid, evaluation");
    let best_report = inequalities::evaluate(&cfg.target, &best_shape)
        .expect("domain and target kinds were validated");
    let found_violation = best_report.gap < -best_report.tolerance();
    Ok(SearchResult {
        best_shape,
        best_parameters: best_params,
        best_gap,
        best_report,
        evaluations,
        found_violation,
        trace: cfg.record_trace.then_some(trace),
    })
}

// ---------------------------------------------------------------------------
// best constant

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    /// Largest `tet_pair_sum / sum a_i` seen; a lower bound for the supremum.
    pub ratio_sup: f64,
    /// Valid tetrahedron attaining `ratio_sup`, at unit total edge length.
    pub witness: Tetrahedron,
    pub family_note: String,
    pub budget: u64,
    pub evaluations: u64,
    pub starts: u64,
}

/// Describes how `t` degenerates: relative edge spread, normalized volume
/// and which edges are short.
pub fn describe_degeneration(t: &Tetrahedron) -> String {
    let edges = t.edges();
    let longest = t.longest_edge();
    let shortest = edges.iter().copied().fold(f64::MAX, f64::min);
    let mean = t.total_edge_length() / 6.0;
    // the regular tetrahedron has V / mean^3 = sqrt(2)/12
    let shape_volume = t.volume() / mean.powi(3) / (2f64.sqrt() / 12.0);
    let short: Vec<usize> = (0..6).filter(|&i| edges[i] < 0.1 * longest).collect();
    let names: Vec<String> = short.iter().map(|i| format!("a{}", i + 1)).collect();
    let opposite = [(0, 4), (1, 3), (2, 5)];
    let pattern = match short.as_slice() {
        [] => "no short edges".to_string(),
        [i, j] if opposite.contains(&(*i, *j)) => {
            format!(
                "opposite edges {} collapse (two needle pairs)",
                names.join(", ")
            )
        }
        [i, j, k] if FACE_EDGES.contains(&[*i, *j, *k]) => {
            format!("face ({}) collapses to a point (needle)", names.join(", "))
        }
        _ => format!("short edges {}", names.join(", ")),
    };
    format!(
        "shortest/longest edge = {:.3e}; volume relative to regular = {:.3e}; {}",
        shortest / longest,
        shape_volume,
        pattern
    )
}

fn random_tet_start(rng: &mut ChaCha8Rng) -> Vec<f64> {
    TET_BOX
        .iter()
        .map(|&(lo, hi)| rng.random_range(lo..hi))
        .collect()
}

fn ratio_objective(p: &[f64]) -> f64 {
    parameterize_tetrahedron(p, ShapeScale::UnitPerimeter)
        .map(|t| -inequalities::pair_ratio(&t))
        .unwrap_or(f64::INFINITY)
}

/// One multistart of the constant estimator: repeated simplex runs from a
/// random start, each restart centered on the incumbent with a smaller
/// simplex, until `cap` evaluations are used.
fn constant_start(seed: u64, index: u64, cap: u64) -> (f64, Vec<f64>, u64) {
    let mut rng = substream(seed, index);
    let mut x = random_tet_start(&mut rng);
    let mut best = (f64::INFINITY, x.clone());
    let mut used = 0u64;
    let mut step = 0.25;
    while used < cap {
        let steps: Vec<f64> = (0..5)
            .map(|_| {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * step * rng.random_range(0.5..1.0)
            })
            .collect();
        let opts = SimplexOptions {
            max_iters: usize::MAX,
            max_evals: cap - used,
            ..SimplexOptions::default()
        };
        let out = simplex::minimize(ratio_objective, &x, &steps, &opts);
        used += out.evaluations;
        if by_gap(&(out.f, out.x.clone()), &best) == Ordering::Less {
            best = (out.f, out.x.clone());
        }
        x = best.1.clone();
        step = (step * 0.5).max(1e-6);
    }
    (-best.0, best.1, used)
}

/// Lower bound on `sup tet_pair_sum / sum a_i` over valid tetrahedra.
///
/// The budget is split into consecutive multistarts of [`EVALS_PER_START`]
/// evaluations each, derived from `rng_seed`; a larger budget only appends
/// starts (or extends the last one), so the estimate is non-decreasing in the
/// budget for a fixed seed.
pub fn estimate_best_constant(budget: u64, rng_seed: u64) -> Result<ConstantEstimate, SearchError> {
    if budget < MIN_CONSTANT_BUDGET {
        return Err(SearchError::InvalidConfig(format!(
            "budget must be >= {MIN_CONSTANT_BUDGET}, got {budget}"
        )));
    }
    let starts = budget.div_ceil(EVALS_PER_START);
    let runs: Vec<(f64, Vec<f64>, u64)> = (0..starts)
        .into_par_iter()
        .map(|i| {
            let cap = EVALS_PER_START.min(budget - i * EVALS_PER_START);
            constant_start(rng_seed, i, cap)
        })
        .collect();

    let mut evaluations = 0;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (ratio, params, used) in runs {
        evaluations += used;
        // strictly greater keeps the earliest start on ties
        if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
            best = Some((ratio, params));
        }
    }
    let (_, params) = best.expect("at least one start");
    let witness = parameterize_tetrahedron(&params, ShapeScale::UnitPerimeter)
        .expect("incumbent parameters come from a valid evaluation");
    // report the ratio of the stored witness itself
    let ratio_sup = inequalities::pair_ratio(&witness);
    Ok(ConstantEstimate {
        ratio_sup,
        family_note: describe_degeneration(&witness),
        witness,
        budget,
        evaluations,
        starts,
    })
}

/// Upper bound the estimator can approach but not exceed.
pub const CONSTANT_CEILING: f64 = K0;

// ---------------------------------------------------------------------------
// violation regions

/// Where the conjectured triangle bound fails for one exponent, over the
/// normalized simplex. Cell `(i, j)` is centered at
/// `u = (i + 0.5) / resolution`, `v = (j + 0.5) / resolution`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationMap {
    pub n: u32,
    pub resolution: usize,
    /// Row-major `violated[i * resolution + j]`; false outside the valid region.
    pub violated: Vec<bool>,
    pub valid_cells: usize,
    pub violated_cells: usize,
}

impl ViolationMap {
    pub fn cell_of(&self, u: f64, v: f64) -> Option<(usize, usize)> {
        if !(0.0..1.0).contains(&u) || !(0.0..1.0).contains(&v) {
            return None;
        }
        let r = self.resolution as f64;
        Some(((u * r) as usize, (v * r) as usize))
    }

    pub fn is_violated(&self, i: usize, j: usize) -> bool {
        self.violated[i * self.resolution + j]
    }

    /// Whether the cell containing simplex point `(u, v)` is marked.
    pub fn is_violated_near(&self, u: f64, v: f64) -> bool {
        self.cell_of(u, v)
            .is_some_and(|(i, j)| self.is_violated(i, j))
    }
}

/// Marks the grid cells where `conj1_gap < -tol_eval` for each exponent.
pub fn violation_region_scan(
    n_list: &[u32],
    resolution: usize,
) -> Result<Vec<ViolationMap>, SearchError> {
    if resolution < 2 {
        return Err(SearchError::InvalidConfig(format!(
            "resolution must be >= 2, got {resolution}"
        )));
    }
    let mut maps = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let id = InequalityId::conj1(n).map_err(|e| SearchError::InvalidConfig(e.to_string()))?;
        let r = resolution as f64;
        let cells: Vec<Option<bool>> = (0..resolution * resolution)
            .into_par_iter()
            .map(|idx| {
                let u = ((idx / resolution) as f64 + 0.5) / r;
                let v = ((idx % resolution) as f64 + 0.5) / r;
                let t = parameterize_triangle(u, v, ShapeScale::UnitPerimeter)?;
                let report = inequalities::evaluate(&id, &t.into()).ok()?;
                Some(report.gap < -report.tolerance())
            })
            .collect();
        let valid_cells = cells.iter().filter(|c| c.is_some()).count();
        let violated: Vec<bool> = cells.iter().map(|c| c.unwrap_or(false)).collect();
        let violated_cells = violated.iter().filter(|v| **v).count();
        maps.push(ViolationMap {
            n,
            resolution,
            violated,
            valid_cells,
            violated_cells,
        });
    }
    Ok(maps)
}
