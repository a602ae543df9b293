use std::process::{Command, Output};

use serde_json::Value;

fn geoineq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoineq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn eval_reports_cubic_counterexample() {
    let out = geoineq(&[
        "eval",
        "--inequality",
        "conj1",
        "--n",
        "3",
        "--triangle",
        "3,1,3.16227766016838",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["satisfied"], false);
    assert_eq!(v["verdict"], "violated");
    assert!((v["lhs"].as_f64().unwrap() - 10.116536541585731).abs() < 1e-12);
    assert!((v["rhs"].as_f64().unwrap() - 10.063472825231253).abs() < 1e-12);
}

#[test]
fn invalid_triangle_exits_one_and_names_invariant() {
    let out = geoineq(&[
        "eval",
        "--inequality",
        "conj1",
        "--n",
        "3",
        "--triangle",
        "1,1,3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("triangle inequality violated"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn other_input_errors_exit_one() {
    let cases: [&[&str]; 7] = [
        &["eval", "--inequality", "conj1", "--triangle", "3,4,5"],
        &[
            "eval",
            "--inequality",
            "conj1",
            "--n",
            "1",
            "--triangle",
            "3,4,5",
        ],
        &["eval", "--inequality", "conj3", "--triangle", "3,4,5"],
        &[
            "eval",
            "--inequality",
            "conj3",
            "--tet",
            "1,1,1.7320508075688772,1,1,1",
        ],
        &["eval", "--inequality", "zhouhu", "--triangle", "3,4"],
        &[
            "eval",
            "--inequality",
            "zhouhu",
            "--triangle",
            "3,4,5",
            "--tet",
            "1,1,1,1,1,1",
        ],
        &["eval", "--inequality", "nonsense", "--triangle", "3,4,5"],
    ];
    for args in cases {
        let out = geoineq(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty());
    }
}

#[test]
fn non_realizable_tetrahedron_is_named() {
    let out = geoineq(&[
        "eval",
        "--inequality",
        "conj3",
        "--tet",
        "1,1,1.7320508075688772,1,1,1",
    ]);
    assert!(stderr(&out).contains("Cayley-Menger"), "{}", stderr(&out));
    let out = geoineq(&["eval", "--inequality", "conj3", "--tet", "1,1,3,1,1,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("face"), "{}", stderr(&out));
}

#[test]
fn shape_file_round_trips_inline_shape() {
    let inline = geoineq(&[
        "eval",
        "--inequality",
        "refined3",
        "--tet",
        "1,1.1,0.9,1.2,1,0.95",
    ]);
    let v = stdout_json(&inline);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shape.json");
    std::fs::write(&path, serde_json::to_string(&v["shape"]).unwrap()).unwrap();
    let from_file = geoineq(&[
        "eval",
        "--inequality",
        "refined3",
        "--shape-file",
        path.to_str().unwrap(),
    ]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, inline.stdout);
}

#[test]
fn bad_shape_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shape.json");
    std::fs::write(&path, r#"{"a": 1, "b": 1, "c": 5}"#).unwrap();
    let out = geoineq(&[
        "eval",
        "--inequality",
        "zhouhu",
        "--shape-file",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("triangle inequality violated"),
        "{}",
        stderr(&out)
    );
    let missing = dir.path().join("missing.json");
    let out = geoineq(&[
        "eval",
        "--inequality",
        "zhouhu",
        "--shape-file",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_and_table_formats() {
    let out = geoineq(&[
        "eval",
        "--inequality",
        "conj3",
        "--tet",
        "1,1,1,1,1,1",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("inequality,n,k,lhs,rhs,gap,satisfied,strict")
    );
    assert!(lines.next().unwrap().starts_with("conj3,,,"));

    let out = geoineq(&[
        "eval",
        "--inequality",
        "conj1",
        "--n",
        "3",
        "--triangle",
        "3,1,3.1622776601683795",
        "--n-max",
        "10",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 9);

    let out = geoineq(&[
        "scan",
        "--n",
        "3",
        "--resolution",
        "20",
        "--format",
        "table",
    ]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("violated cells"));
}

#[test]
fn search_is_reproducible_and_worker_independent() {
    let args = [
        "search",
        "--inequality",
        "conj1",
        "--n",
        "3",
        "--seed",
        "5",
        "--trace",
    ];
    let a = geoineq(&[&args[..], &["--workers", "1"]].concat());
    let b = geoineq(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["found_violation"], true);
    assert_eq!(v["config"]["rng_seed"], 5);
}

#[test]
fn search_without_violation_exits_zero() {
    let out = geoineq(&["search", "--inequality", "conj1", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["found_violation"], false);
}

#[test]
fn estimate_and_scan_are_reproducible() {
    for args in [
        &["estimate-constant", "--budget", "20000", "--seed", "3"][..],
        &[
            "scan",
            "--n",
            "2,3",
            "--resolution",
            "40",
            "--format",
            "csv",
        ][..],
    ] {
        let a = geoineq(args);
        let b = geoineq(args);
        assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
        assert_eq!(a.stdout, b.stdout);
    }
    let out = geoineq(&["estimate-constant", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = geoineq(&[
        "eval",
        "--inequality",
        "zhouhu",
        "--triangle",
        "3,4,5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["inequality"], "zhouhu");
}

#[test]
fn help_documents_seventeen_digit_input() {
    let out = geoineq(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("3,1,3.1622776601683795"));
}

#[test]
fn verify_paper_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("suite.json");
    let relaxed = geoineq(&["verify-paper", "--out", path.to_str().unwrap()]);
    assert_eq!(relaxed.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["total"], 15);
    let all_passed = v["passed"] == v["total"];
    let strict = geoineq(&["verify-paper", "--strict", "--format", "table"]);
    assert_eq!(strict.status.code(), Some(if all_passed { 0 } else { 3 }));
    assert!(String::from_utf8(strict.stdout)
        .unwrap()
        .contains("checks passed"));
}
