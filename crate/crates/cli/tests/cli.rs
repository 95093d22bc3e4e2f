use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use projbound::experiments::{gen_pair, EnsembleSpec};
use projbound::matrix_file::format_matrix;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn projbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projbound"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

// Parses CSV text into rows of fields keyed by the header.
fn csv_rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| {
            header
                .iter()
                .map(|h| h.to_string())
                .zip(l.split(',').map(String::from))
                .collect()
        })
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn verify_diagonal_pair_passes() {
    let (a, b) = (data("diag_a.txt"), data("diag_b_half.txt"));
    let o = projbound(&["verify", "--a", path(&a), "--b", path(&b)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 12);
    assert_eq!(rows.iter().filter(|r| r["applicable"] == "true").count(), 6);
    assert!(rows.iter().all(|r| r["status"] == "ok" || r["status"] == "n/a"));
}

#[test]
fn malformed_file_is_an_input_error() {
    let o = projbound(&[
        "verify",
        "--a",
        path(&data("diag_a.txt")),
        "--b",
        path(&data("malformed.txt")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn missing_file_is_an_input_error() {
    let o = projbound(&["bounds", "--a", "/nonexistent/a.txt", "--b", path(&data("diag_a.txt"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shape_mismatch_is_reported() {
    let o = projbound(&[
        "verify",
        "--a",
        path(&data("diag_a.txt")),
        "--b",
        path(&data("complex_a.txt")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("shape mismatch"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    let a = path(&data("diag_a.txt")).to_string();
    for args in [
        vec!["frobnicate"],
        vec!["verify", "--a", &a],
        vec!["verify", "--a", &a, "--b", &a, "--format", "xml"],
        vec!["verify", "--a", &a, "--b", &a, "--format", "svg"],
        vec!["verify", "--a", &a, "--b", &a, "--tol", "-1"],
        vec!["bounds", "--a", &a, "--b", &a, "--param-grid", "0:2:3"],
        vec!["sweep", "--grid", "0:1:5"],
        vec!["sweep", "--scenario", "intro", "--format", "svg"],
        vec!["bench", "--rank-a", "9"],
        vec!["bench", "--profile", "lognormal"],
    ] {
        let o = projbound(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(projbound(&["--help"]).status.code(), Some(0));
}

#[test]
fn zero_tolerance_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let pair = gen_pair(&EnsembleSpec::independent(4, 3, 2, 2, 3)).unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    std::fs::write(&a, format_matrix(pair.a())).unwrap();
    std::fs::write(&b, format_matrix(pair.b())).unwrap();
    let o = projbound(&["verify", "--a", path(&a), "--b", path(&b), "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn bounds_on_intro_pair() {
    let o = projbound(&[
        "bounds",
        "--a",
        path(&data("diag_a.txt")),
        "--b",
        path(&data("intro_b.txt")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    let chen = rows.iter().find(|r| r["bound_id"] == "CHEN_UP").unwrap();
    assert!((num(&chen["value"]) - 6.25).abs() < 1e-12);
    let li = rows.iter().find(|r| r["bound_id"] == "LI_UP").unwrap();
    assert!((num(&li["value"]) - (18.0 + 3.0 * 65f64.sqrt()) / 4.0).abs() < 1e-12);
}

#[test]
fn bounds_on_identical_matrices_have_zero_gaps() {
    let a = data("complex_a.txt");
    let o = projbound(&["bounds", "--a", path(&a), "--b", path(&a)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for r in csv_rows(&stdout(&o)) {
        if r["applicable"] == "true" && r["bound_id"] != "RANK_UP" {
            assert!(num(&r["gap"]) < 1e-12, "{r:?}");
        }
    }
}

#[test]
fn bounds_on_random_pair_all_hold() {
    let dir = tempfile::tempdir().unwrap();
    let pair = gen_pair(&EnsembleSpec::independent(6, 4, 3, 2, 21)).unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    std::fs::write(&a, format_matrix(pair.a())).unwrap();
    std::fs::write(&b, format_matrix(pair.b())).unwrap();
    let out = dir.path().join("out");
    let o = projbound(&[
        "bounds",
        "--a",
        path(&a),
        "--b",
        path(&b),
        "--out",
        path(&out),
        "--format",
        "csv,json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&std::fs::read_to_string(out.join("bounds.csv")).unwrap());
    assert!(rows.iter().all(|r| r["sandwich"] == "ok" || r["sandwich"] == "n/a"));
    assert!(rows.iter().any(|r| r["sandwich"] == "n/a"));
    let doc: Value = serde_json::from_slice(&std::fs::read(out.join("bounds.json")).unwrap()).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["rows"].as_array().unwrap().len(), rows.len());
    assert_eq!(doc["aggregates"]["violations"], 0);
}

#[test]
fn force_general_rank_marks_equal_rank_records() {
    let a = data("complex_a.txt");
    let o = projbound(&["bounds", "--a", path(&a), "--b", path(&a), "--force-general-rank"]);
    let rows = csv_rows(&stdout(&o));
    let r = rows.iter().find(|r| r["bound_id"] == "NEW_UP1_EQRANK").unwrap();
    assert_eq!(r["reason"], "general-rank formulas forced");
}

#[test]
fn reproduce_writes_tables_and_figures() {
    let dir = tempfile::tempdir().unwrap();
    let o = projbound(&["reproduce", "--out", path(dir.path()), "--grid", "0.2:0.8:7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "figure1-left.svg",
            "figure1-right.svg",
            "figure2-left.svg",
            "figure2-right.svg",
            "tables1-2.csv",
            "tables3-4.csv"
        ]
    );

    let primal = std::fs::read_to_string(dir.path().join("tables1-2.csv")).unwrap();
    assert!(!primal.contains('\r'));
    let rows = csv_rows(&primal);
    let half = rows.iter().find(|r| (num(&r["epsilon"]) - 0.5).abs() < 1e-12).unwrap();
    let eps = num(&half["epsilon"]);
    let q = 1.0 / ((1.0 + eps) * (1.0 + eps));
    assert!((num(&half["CHEN_UP"]) - (1.0 + 1.0 / (eps * eps) + q)).abs() < 1e-10);
    assert!((num(&half["LI_UP"]) - (0.99 + q)).abs() < 1e-10);
    for r in &rows {
        assert!(num(&r["CHEN_UP"]) > num(&r["NEW_UP1"]));
    }

    let svg = std::fs::read_to_string(dir.path().join("figure1-left.svg")).unwrap();
    assert!(svg.contains(r#"width="800" height="600""#));
    assert!(svg.contains(">CHEN_UP</text>") && svg.contains(">NEW_UP1</text>"));
    let svg = std::fs::read_to_string(dir.path().join("figure2-right.svg")).unwrap();
    assert!(svg.contains(r#"data-bound-id="LI_COMB1""#) && svg.contains(r#"data-bound-id="CORUP_1_2""#));
}

#[test]
fn sweep_second_example_json() {
    let o = projbound(&[
        "sweep",
        "--scenario",
        "example-4.2",
        "--grid",
        "0.3:0.9:4",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let eps = r["epsilon"].as_f64().unwrap();
        assert!((r["CORUP_1_1"].as_f64().unwrap() - (1.0 + eps * eps)).abs() < 1e-10);
        assert!((r["CORUP_1_2"].as_f64().unwrap() - 2.0).abs() < 1e-10);
    }
    assert!(doc["aggregates"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn numbers_carry_17_significant_digits() {
    let o = projbound(&["sweep", "--grid", "0.3:0.3:1"]);
    let rows = csv_rows(&stdout(&o));
    let mantissa = rows[0]["CHEN_UP"].split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
}

#[test]
fn bench_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = projbound(&[
            "bench",
            "--samples",
            "30",
            "--seed",
            "1",
            "--m",
            "5",
            "--n",
            "4",
            "--rank-a",
            "2",
            "--rank-b",
            "3",
            "--out",
            path(&out),
            "--format",
            "csv,json",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        out
    };
    let (x, y) = (run("x"), run("y"));
    for f in ["bench.csv", "bench-win-rates.csv"] {
        assert_eq!(
            std::fs::read(x.join(f)).unwrap(),
            std::fs::read(y.join(f)).unwrap(),
            "{f}"
        );
    }
    let strip = |p: PathBuf| {
        let mut v: Value = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("generated_at");
        v
    };
    let jx = strip(x.join("bench.json"));
    assert_eq!(jx, strip(y.join("bench.json")));
    assert_eq!(jx["aggregates"]["violation_count"], 0);
}
