use geoineq::inequalities::{conj1_gap, evaluate, Exponent, InequalityId};
use geoineq::search::{
    estimate_best_constant, grid_then_refine, triangle_parameters, violation_region_scan,
    with_workers, Domain, SearchConfig, CONSTANT_CEILING,
};
use geoineq::{Shape, ShapeScale, Triangle};

fn counterexample_point() -> (f64, f64) {
    triangle_parameters(&Triangle::new(3.0, 1.0, 10f64.sqrt()).unwrap())
}

#[test]
fn search_is_identical_across_worker_counts() {
    for target in [InequalityId::conj1(3).unwrap(), InequalityId::Conj3] {
        let mut cfg = SearchConfig::new(target).with_seed(17);
        cfg.record_trace = true;
        let one = with_workers(Some(1), || grid_then_refine(&cfg))
            .unwrap()
            .unwrap();
        let four = with_workers(Some(4), || grid_then_refine(&cfg))
            .unwrap()
            .unwrap();
        assert_eq!(
            serde_json::to_string(&one).unwrap(),
            serde_json::to_string(&four).unwrap()
        );
    }
}

#[test]
fn reported_violation_is_reproducible() {
    let cfg = SearchConfig::new(InequalityId::conj1(3).unwrap());
    let res = grid_then_refine(&cfg).unwrap();
    assert!(res.found_violation);
    let again = evaluate(&cfg.target, &res.best_shape).unwrap();
    assert_eq!(again, res.best_report);
    assert!(!again.satisfied);
    assert_eq!(res.best_gap, again.gap);
}

#[test]
fn quadratic_case_has_no_violation() {
    let res = grid_then_refine(&SearchConfig::new(InequalityId::conj1(2).unwrap())).unwrap();
    assert!(!res.found_violation);
    assert!(res.best_gap >= -res.best_report.tolerance());
}

#[test]
fn upper_sandwich_bound_is_approached_but_not_crossed() {
    let res = grid_then_refine(&SearchConfig::new(InequalityId::ZhouHu)).unwrap();
    assert!(!res.found_violation);
    // infimum 0 is approached along the degenerate edge of the simplex
    assert!(
        res.best_gap >= 0.0 && res.best_gap < 1e-2,
        "{}",
        res.best_gap
    );
}

#[test]
fn search_result_stays_in_requested_normalization() {
    let mut cfg = SearchConfig::new(InequalityId::conj1(5).unwrap());
    cfg.normalization = ShapeScale::UnitLongestEdge;
    let res = grid_then_refine(&cfg).unwrap();
    let Shape::Triangle(t) = res.best_shape else {
        panic!("wrong kind")
    };
    assert_eq!(t.longest_side(), 1.0);
}

#[test]
fn margin_floor_stops_early() {
    let mut cfg = SearchConfig::new(InequalityId::conj1(3).unwrap());
    let full = grid_then_refine(&cfg).unwrap();
    cfg.margin_floor = Some(1e-4);
    let early = grid_then_refine(&cfg).unwrap();
    assert!(early.best_gap <= -1e-4);
    assert!(early.evaluations < full.evaluations);
}

#[test]
fn tetrahedron_search_finds_no_violation_of_proved_bounds() {
    for target in [
        InequalityId::Refined3,
        InequalityId::conj2(CONSTANT_CEILING).unwrap(),
    ] {
        let mut cfg = SearchConfig::new(target);
        cfg.domain = Domain::Tetrahedron;
        cfg.grid_resolution = 5;
        let res = grid_then_refine(&cfg).unwrap();
        assert!(!res.found_violation, "{}: {}", cfg.target, res.best_gap);
    }
}

#[test]
fn trace_csv_is_monotone() {
    let mut cfg = SearchConfig::new(InequalityId::conj1(4).unwrap());
    cfg.record_trace = true;
    let res = grid_then_refine(&cfg).unwrap();
    let csv = res.trace_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iteration,gap"));
    let gaps: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(gaps.len() > 1);
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*gaps.last().unwrap(), res.best_gap);
}

#[test]
fn constant_estimate_is_monotone_in_budget() {
    let small = estimate_best_constant(10_000, 7).unwrap();
    let large = estimate_best_constant(40_000, 7).unwrap();
    assert!(large.ratio_sup >= small.ratio_sup);
    assert!(large.ratio_sup <= CONSTANT_CEILING);
    assert!(large.evaluations <= 40_000);
    assert!((large.witness.total_edge_length() - 1.0).abs() < 1e-12);
}

#[test]
fn violation_region_contains_counterexample() {
    let (u, v) = counterexample_point();
    let maps = violation_region_scan(&[2, 3, 5, 10, 50], 200).unwrap();
    assert_eq!(maps[0].violated_cells, 0);
    for m in &maps[1..] {
        assert!(m.is_violated_near(u, v), "n={}", m.n);
        assert!(m.violated_cells > 0 && m.violated_cells < m.valid_cells);
    }
    assert!(!maps[1].is_violated_near(1.0 / 3.0, 1.0 / 3.0));
    // every marked cell center really violates
    let m = &maps[1];
    let r = m.resolution as f64;
    for i in 0..m.resolution {
        for j in 0..m.resolution {
            if m.is_violated(i, j) {
                let t = geoineq::search::parameterize_triangle(
                    (i as f64 + 0.5) / r,
                    (j as f64 + 0.5) / r,
                    ShapeScale::UnitPerimeter,
                )
                .unwrap();
                assert!(conj1_gap(&t, Exponent::new(3).unwrap()) < 0.0);
            }
        }
    }
}

#[test]
fn gap_dips_below_zero_next_to_equilateral_from_exponent_four() {
    let near = |d: f64| Triangle::new(1.0 + d, 1.0 + d, 1.0 - 2.0 * d).unwrap();
    let n = |k| Exponent::new(k).unwrap();
    for d in [1e-3, -1e-3] {
        assert!(conj1_gap(&near(d), n(3)) > 0.0);
        for k in [4, 5, 10, 50] {
            assert!(conj1_gap(&near(d), n(k)) < 0.0, "n={k} d={d}");
        }
    }
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(violation_region_scan(&[3], 1).is_err());
    assert!(violation_region_scan(&[1], 10).is_err());
    let mut cfg = SearchConfig::new(InequalityId::Conj3);
    cfg.domain = Domain::Triangle;
    assert!(grid_then_refine(&cfg).is_err());
}
