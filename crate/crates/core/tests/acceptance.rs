//! End-to-end acceptance criteria, run without the test harness so every
//! line is printed:
//! `criterion NN <name>: PASS|FAIL computed=<value> elapsed=<seconds>`.
//! Exits non-zero when any criterion fails or overruns its time limit.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use geoineq::reproduction::*;

struct Outcome {
    check: PaperCheck,
    passed: bool,
}

fn run(id: u32, limit: Duration, check: impl FnOnce() -> PaperCheck) -> Outcome {
    let start = Instant::now();
    let c = check();
    let elapsed = start.elapsed();
    let passed = c.passed && elapsed <= limit;
    println!(
        "criterion {id:02} {}: {} computed={} elapsed={:.3}s (limit {:.0}s){}",
        c.name,
        if passed { "PASS" } else { "FAIL" },
        c.computed,
        elapsed.as_secs_f64(),
        limit.as_secs_f64(),
        if c.detail.is_empty() {
            String::new()
        } else {
            format!(" | {}", c.detail)
        }
    );
    Outcome { check: c, passed }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() -> ExitCode {
    let instant = secs(1);
    let mut outcomes = vec![
        run(1, instant, check_counterexample_lhs),
        run(2, instant, check_counterexample_rhs),
        run(3, instant, check_semiperimeter_inradius),
        run(4, secs(1), check_sign_pattern),
        run(5, secs(1), check_monotonicity),
        run(6, secs(1), check_equilateral_equality),
        run(7, secs(5), check_sandwich),
        run(8, secs(10), check_ye),
        run(9, secs(30), check_refinement_chain),
        run(10, secs(30), check_face_inradius_step),
        run(11, instant, check_regular_values),
        run(12, secs(1), check_volume_oracle),
        run(13, secs(60), check_search_rediscovery),
        run(14, secs(120), check_constant_estimate),
    ];
    let stochastic: Vec<PaperCheck> = outcomes[6..14].iter().map(|o| o.check.clone()).collect();
    outcomes.push(run(15, secs(300), || check_determinism(&stochastic)));

    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria passed", outcomes.len());
    if passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
