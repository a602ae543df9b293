use std::fmt::Write;

use clap::ValueEnum;
use geoineq::inequalities::GapScan;
use geoineq::reproduction::{render_table, CheckValue, PaperCheck};
use geoineq::search::{parameterize_triangle, ViolationMap};
use geoineq::{ConstantEstimate, EvalReport, SearchConfig, SearchResult, Shape, ShapeScale};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

pub type Rendered = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn json<T: Serialize>(command: &str, body: T) -> Rendered {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        body,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("report types serialize");
    s.push('\n');
    s
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct EvalBody<'a> {
    shape: &'a Shape,
    #[serde(flatten)]
    report: &'a EvalReport,
    verdict: geoineq::Verdict,
    tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_scan: Option<&'a GapScan>,
}

/// With a gap scan, csv output is the `n,gap` table of the scan.
pub fn eval(
    shape: &Shape,
    report: &EvalReport,
    scan: Option<&GapScan>,
    format: Format,
) -> Rendered {
    match format {
        Format::Json => json(
            "eval",
            EvalBody {
                shape,
                report,
                verdict: report.verdict(),
                tolerance: report.tolerance(),
                gap_scan: scan,
            },
        ),
        Format::Csv => match scan {
            Some(scan) => {
                let mut s = String::from("n,gap\n");
                for (n, g) in &scan.values {
                    writeln!(s, "{n},{g}").unwrap();
                }
                s
            }
            None => format!(
                "inequality,n,k,lhs,rhs,gap,satisfied,strict\n{},{},{},{},{},{},{},{}\n",
                report.inequality,
                opt(report.n),
                opt(report.k),
                report.lhs,
                report.rhs,
                report.gap,
                report.satisfied,
                report.strict
            ),
        },
        Format::Table => {
            let mut s = String::new();
            writeln!(s, "shape       {:?}", shape.lengths()).unwrap();
            writeln!(s, "inequality  {}", report.inequality).unwrap();
            if let Some(n) = report.n {
                writeln!(s, "n           {n}").unwrap();
            }
            if let Some(k) = report.k {
                writeln!(s, "k           {k}").unwrap();
            }
            writeln!(s, "lhs         {:.17}", report.lhs).unwrap();
            writeln!(s, "rhs         {:.17}", report.rhs).unwrap();
            writeln!(s, "gap         {:.6e}", report.gap).unwrap();
            writeln!(s, "verdict     {:?}", report.verdict()).unwrap();
            writeln!(s, "satisfied   {}", report.satisfied).unwrap();
            if let Some(scan) = scan {
                writeln!(s, "strictly decreasing in n: {}", scan.strictly_decreasing).unwrap();
                for (n, g) in &scan.values {
                    writeln!(s, "  g({n:>4}) = {g:+.6e}").unwrap();
                }
            }
            s
        }
    }
}

#[derive(Serialize)]
struct SearchBody<'a> {
    config: &'a SearchConfig,
    #[serde(flatten)]
    result: &'a SearchResult,
}

/// Csv output is the best-gap trace.
pub fn search(cfg: &SearchConfig, result: &SearchResult, format: Format) -> Rendered {
    match format {
        Format::Json => json(
            "search",
            SearchBody {
                config: cfg,
                result,
            },
        ),
        Format::Csv => result.trace_csv(),
        Format::Table => {
            let mut s = String::new();
            writeln!(s, "target           {}", cfg.target).unwrap();
            writeln!(s, "seed             {}", cfg.rng_seed).unwrap();
            writeln!(s, "best shape       {:?}", result.best_shape.lengths()).unwrap();
            writeln!(s, "best gap         {:.6e}", result.best_gap).unwrap();
            writeln!(s, "violation found  {}", result.found_violation).unwrap();
            writeln!(s, "evaluations      {}", result.evaluations).unwrap();
            s
        }
    }
}

pub fn estimate(est: &ConstantEstimate, format: Format) -> Rendered {
    match format {
        Format::Json => json("estimate-constant", est),
        Format::Csv => {
            let e = est.witness.edges();
            format!(
                "ratio_sup,budget,evaluations,starts,a1,a2,a3,a4,a5,a6\n{},{},{},{},{},{},{},{},{},{}\n",
                est.ratio_sup, est.budget, est.evaluations, est.starts, e[0], e[1], e[2], e[3], e[4], e[5]
            )
        }
        Format::Table => format!(
            "ratio_sup    {:.12}\nceiling      {:.12}\nwitness      {:?}\ndegeneration {}\nevaluations  {} of {} over {} starts\n",
            est.ratio_sup,
            geoineq::search::CONSTANT_CEILING,
            est.witness.edges(),
            est.family_note,
            est.evaluations,
            est.budget,
            est.starts
        ),
    }
}

#[derive(Serialize)]
struct VerifyBody<'a> {
    passed: usize,
    total: usize,
    checks: &'a [PaperCheck],
}

pub fn verify(checks: &[PaperCheck], format: Format) -> Rendered {
    match format {
        Format::Json => json(
            "verify-paper",
            VerifyBody {
                passed: checks.iter().filter(|c| c.passed).count(),
                total: checks.len(),
                checks,
            },
        ),
        Format::Csv => {
            let mut s = String::from("name,passed,computed,expected,tolerance\n");
            for c in checks {
                let v = |x: &CheckValue| match x {
                    CheckValue::Bool(b) => b.to_string(),
                    CheckValue::Number(n) => n.to_string(),
                };
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    c.name,
                    c.passed,
                    v(&c.computed),
                    v(&c.expected),
                    c.tolerance
                )
                .unwrap();
            }
            s
        }
        Format::Table => render_table(checks),
    }
}

#[derive(Serialize)]
struct ScanBody<'a> {
    maps: &'a [ViolationMap],
}

/// Csv rows cover every cell; `valid` is false where the cell center is not a triangle.
pub fn scan(maps: &[ViolationMap], format: Format) -> Rendered {
    match format {
        Format::Json => json("scan", ScanBody { maps }),
        Format::Csv => {
            let mut s = String::from("n,i,j,u,v,valid,violated\n");
            for m in maps {
                let r = m.resolution as f64;
                for i in 0..m.resolution {
                    for j in 0..m.resolution {
                        let (u, v) = ((i as f64 + 0.5) / r, (j as f64 + 0.5) / r);
                        let valid =
                            parameterize_triangle(u, v, ShapeScale::UnitPerimeter).is_some();
                        writeln!(
                            s,
                            "{},{i},{j},{u},{v},{},{}",
                            m.n,
                            u8::from(valid),
                            u8::from(m.is_violated(i, j))
                        )
                        .unwrap();
                    }
                }
            }
            s
        }
        Format::Table => {
            let mut s = format!(
                "{:>5} {:>11} {:>14} {:>9}\n",
                "n", "valid cells", "violated cells", "fraction"
            );
            for m in maps {
                writeln!(
                    s,
                    "{:>5} {:>11} {:>14} {:>9.4}",
                    m.n,
                    m.valid_cells,
                    m.violated_cells,
                    m.violated_cells as f64 / m.valid_cells.max(1) as f64
                )
                .unwrap();
            }
            s
        }
    }
}
