mod output;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geoineq::inequalities::GapScan;
use geoineq::search::{self, with_workers};
use geoineq::{
    evaluate, reproduction, GeometryError, InequalityId, SearchConfig, SearchError, Shape,
    ShapeScale, Tetrahedron, Triangle,
};
use thiserror::Error;

use output::{Format, Rendered};

const AFTER_HELP: &str = "\
Lengths are decimal literals. Enter irrational values with 17 significant
digits so they round to the intended binary64 number, for example the right
triangle with legs 3 and 1:

    geoineq eval --inequality conj1 --n 3 --triangle 3,1,3.1622776601683795

Tetrahedron edges are a1=AB, a2=BC, a3=CA, a4=AD, a5=CD, a6=BD.

Exit codes: 0 success, 1 invalid input, 2 numeric failure,
3 verify-paper --strict with a failing check.";

#[derive(Debug, Parser)]
#[command(name = "geoineq", version, about = "Evaluate and search edge-length inequalities of triangles and tetrahedra", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one inequality on one shape
    Eval(EvalArgs),
    /// Grid sweep plus simplex refinement for the most violating shape
    Search(SearchArgs),
    /// Lower-bound the best constant of the tetrahedron pair-sum bound
    EstimateConstant(EstimateArgs),
    /// Run the fixed verification suite
    VerifyPaper(VerifyArgs),
    /// Map where the cyclic power-sum bound fails on the triangle simplex
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InequalityArg {
    Powermean,
    Zhouhu,
    Ye,
    Conj1,
    Conj2,
    Conj3,
    Refined3,
}

impl InequalityArg {
    fn name(self) -> &'static str {
        match self {
            Self::Powermean => "powermean",
            Self::Zhouhu => "zhouhu",
            Self::Ye => "ye",
            Self::Conj1 => "conj1",
            Self::Conj2 => "conj2",
            Self::Conj3 => "conj3",
            Self::Refined3 => "refined3",
        }
    }
}

#[derive(Debug, Args)]
struct InequalitySel {
    #[arg(long, value_enum)]
    inequality: InequalityArg,
    /// Exponent for ye and conj1
    #[arg(long)]
    n: Option<u32>,
    /// Constant for conj2 (default 2 + sqrt 2)
    #[arg(long)]
    k: Option<f64>,
}

impl InequalitySel {
    fn id(&self) -> Result<InequalityId, CliError> {
        InequalityId::from_parts(self.inequality.name(), self.n, self.k).map_err(CliError::Input)
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ShapeSel {
    /// Triangle sides a,b,c
    #[arg(long, value_name = "A,B,C", allow_hyphen_values = true)]
    triangle: Option<String>,
    /// Tetrahedron edges a1,...,a6
    #[arg(long, value_name = "A1,...,A6", allow_hyphen_values = true)]
    tet: Option<String>,
    /// JSON file with {"a","b","c"} or {"a1",...,"a6"}
    #[arg(long, value_name = "PATH")]
    shape_file: Option<PathBuf>,
}

impl ShapeSel {
    fn shape(&self) -> Result<Shape, CliError> {
        if let Some(s) = &self.triangle {
            let [a, b, c] = parse_lengths::<3>(s, "--triangle")?;
            return Ok(Triangle::new(a, b, c)?.into());
        }
        if let Some(s) = &self.tet {
            return Ok(Tetrahedron::new(parse_lengths::<6>(s, "--tet")?)?.into());
        }
        let path = self
            .shape_file
            .as_ref()
            .expect("clap enforces one shape source");
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Shape::from_json_str(&text)
            .map_err(|e| CliError::Input(format!("invalid shape in {}: {e}", path.display())))
    }
}

#[derive(Debug, Args)]
struct OutputSel {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Parallel {
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    inequality: InequalitySel,
    #[command(flatten)]
    shape: ShapeSel,
    /// Also scan g(n) for n = 2..=N_MAX (conj1 on a triangle only)
    #[arg(long, value_name = "N_MAX")]
    n_max: Option<u32>,
    #[command(flatten)]
    output: OutputSel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleArg {
    None,
    UnitPerimeter,
    UnitLongestEdge,
}

impl From<ScaleArg> for ShapeScale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::None => ShapeScale::None,
            ScaleArg::UnitPerimeter => ShapeScale::UnitPerimeter,
            ScaleArg::UnitLongestEdge => ShapeScale::UnitLongestEdge,
        }
    }
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[command(flatten)]
    inequality: InequalitySel,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid points per parameter (default 100 for triangles, 8 for tetrahedra)
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, default_value_t = 8)]
    multistart: usize,
    #[arg(long, default_value_t = 200)]
    refine_iters: usize,
    #[arg(long, default_value_t = 0.5)]
    refine_shrink: f64,
    #[arg(long, value_enum, default_value_t = ScaleArg::UnitPerimeter)]
    normalization: ScaleArg,
    /// Stop once a gap <= -MARGIN is found
    #[arg(long, value_name = "MARGIN")]
    margin_floor: Option<f64>,
    /// Record the best-gap trace (always on for csv output)
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    parallel: Parallel,
    #[command(flatten)]
    output: OutputSel,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Objective evaluations
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    parallel: Parallel,
    #[command(flatten)]
    output: OutputSel,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Exit with status 3 when any check fails
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    parallel: Parallel,
    #[command(flatten)]
    output: OutputSel,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Exponents, comma separated
    #[arg(long, value_delimiter = ',', default_value = "3")]
    n: Vec<u32>,
    /// Cells per simplex axis
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    #[command(flatten)]
    parallel: Parallel,
    #[command(flatten)]
    output: OutputSel,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::InvalidConfig(_) | SearchError::WorkerPool(_) => {
                CliError::Input(e.to_string())
            }
            SearchError::SamplerStarved { .. } | SearchError::EmptyGrid => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numeric(_) | CliError::Io(_) => 2,
        }
    }
}

fn parse_lengths<const N: usize>(text: &str, flag: &str) -> Result<[f64; N], CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(CliError::Input(format!(
            "{flag} expects {N} comma-separated lengths, got {}",
            parts.len()
        )));
    }
    let mut out = [0.0; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p
            .parse()
            .map_err(|_| CliError::Input(format!("{flag}: '{p}' is not a number")))?;
    }
    Ok(out)
}

fn workers(p: &Parallel) -> Result<Option<usize>, CliError> {
    match p.workers {
        Some(0) => Err(CliError::Input("--workers must be at least 1".into())),
        w => Ok(w),
    }
}

fn run_eval(args: &EvalArgs) -> Result<Rendered, CliError> {
    let id = args.inequality.id()?;
    let shape = args.shape.shape()?;
    let report = evaluate(&id, &shape).map_err(|e| CliError::Input(e.to_string()))?;
    let scan: Option<GapScan> = match (args.n_max, &shape) {
        (None, _) => None,
        (Some(n_max), Shape::Triangle(t)) if matches!(id, InequalityId::Conj1 { .. }) => Some(
            geoineq::inequalities::scan_gap_monotonicity(t, n_max)
                .map_err(|e| CliError::Input(e.to_string()))?,
        ),
        (Some(_), _) => {
            return Err(CliError::Input(
                "--n-max applies to conj1 on a triangle".into(),
            ))
        }
    };
    Ok(output::eval(
        &shape,
        &report,
        scan.as_ref(),
        args.output.format,
    ))
}

fn run_search(args: &SearchArgs) -> Result<Rendered, CliError> {
    let mut cfg = SearchConfig::new(args.inequality.id()?).with_seed(args.seed);
    if let Some(r) = args.resolution {
        cfg.grid_resolution = r;
    }
    cfg.multistart_count = args.multistart;
    cfg.refine_iters = args.refine_iters;
    cfg.refine_shrink = args.refine_shrink;
    cfg.normalization = args.normalization.into();
    if let Some(m) = args.margin_floor {
        if !(m.is_finite() && m > 0.0) {
            return Err(CliError::Input(format!(
                "--margin-floor must be positive, got {m}"
            )));
        }
        cfg.margin_floor = Some(m);
    }
    cfg.record_trace = args.trace || matches!(args.output.format, Format::Csv);
    let result = with_workers(workers(&args.parallel)?, || search::grid_then_refine(&cfg))??;
    Ok(output::search(&cfg, &result, args.output.format))
}

fn run_estimate(args: &EstimateArgs) -> Result<Rendered, CliError> {
    let est = with_workers(workers(&args.parallel)?, || {
        search::estimate_best_constant(args.budget, args.seed)
    })??;
    Ok(output::estimate(&est, args.output.format))
}

fn run_verify(args: &VerifyArgs) -> Result<(Rendered, bool), CliError> {
    let checks = with_workers(workers(&args.parallel)?, reproduction::run_paper_suite)?;
    let all_passed = checks.iter().all(|c| c.passed);
    Ok((output::verify(&checks, args.output.format), all_passed))
}

fn run_scan(args: &ScanArgs) -> Result<Rendered, CliError> {
    let maps = with_workers(workers(&args.parallel)?, || {
        search::violation_region_scan(&args.n, args.resolution)
    })??;
    Ok(output::scan(&maps, args.output.format))
}

fn emit(rendered: &Rendered, out: &Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, rendered.as_bytes())?,
        None => io::stdout().lock().write_all(rendered.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (rendered, out, code) = match &cli.command {
        Command::Eval(a) => (run_eval(a)?, &a.output.out, 0),
        Command::Search(a) => (run_search(a)?, &a.output.out, 0),
        Command::EstimateConstant(a) => (run_estimate(a)?, &a.output.out, 0),
        Command::VerifyPaper(a) => {
            let (r, ok) = run_verify(a)?;
            (r, &a.output.out, if a.strict && !ok { 3 } else { 0 })
        }
        Command::Scan(a) => (run_scan(a)?, &a.output.out, 0),
    };
    emit(&rendered, out)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
