use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples/problems")
        .join(name)
}

fn polydist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polydist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn curve_rows(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma,s_2n_minus_1,s_2n_minus_2"));
    lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn analyze_auto_takes_corrected_path() {
    let out = polydist(&["analyze", path_str(&problem("normal_quadratic.json"))]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = json(&out);
    assert_eq!(r["status"], "multiple");
    assert_eq!(r["path"], "corrected");
    assert_eq!(r["exit_code"], 0);
    assert!((r["gamma_search"]["gamma_star"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((r["gamma_search"]["s_star"].as_f64().unwrap() - 4.0).abs() < 1e-6);
    assert_eq!(r["gamma_search"]["coalesced"], true);
    assert_eq!(r["verification"]["verdict"], "multiple_defective");
    assert_eq!(
        r["perturbation"]["q_coefficients"]
            .as_array()
            .unwrap()
            .len(),
        3
    );
    assert!(r["correction"]["lambda1"].is_f64());
    assert!(r["hypotheses"].is_object());
}

#[test]
fn analyze_single_pair_fails_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = polydist(&[
        "analyze",
        path_str(&problem("normal_quadratic.json")),
        "--mode",
        "single",
        "--report",
        path_str(&report),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["status"], "verification_failed");
    assert_eq!(r["path"], "single_pair");
    assert!(r["verification"]["eigen_residual"].as_f64().unwrap() > 1e-2);
    // whichever branch the SVD picks, the single pair breaks both conditions
    assert!(r["pre_diagnostics"]["uv_gram_gap"].as_f64().unwrap() > 0.1);
}

#[test]
fn malformed_file_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value =
        serde_json::from_str(&std::fs::read_to_string(problem("normal_quadratic.json")).unwrap())
            .unwrap();
    v["coefficients"].as_array_mut().unwrap().pop();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let out = polydist(&["analyze", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("coefficients"), "{err}");

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(
        polydist(&["analyze", path_str(&garbage)]).status.code(),
        Some(1)
    );
    assert_eq!(
        polydist(&["analyze", path_str(&dir.path().join("missing.json"))])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn bad_flags_are_input_errors() {
    let file = problem("normal_quadratic.json");
    let out = polydist(&["analyze", path_str(&file), "--gamma-tol", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma-tol"));
    let out = polydist(&["analyze", path_str(&file), "--mu", "abc"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_is_byte_identical_across_runs() {
    let file = problem("normal_quadratic.json");
    let a = polydist(&["analyze", path_str(&file)]);
    let b = polydist(&["analyze", path_str(&file)]);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn curve_with_two_samples_has_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("c.csv");
    let out = polydist(&[
        "curve",
        path_str(&problem("normal_quadratic.json")),
        "--gamma-lo",
        "0",
        "--gamma-hi",
        "10",
        "--samples",
        "2",
        "--out",
        path_str(&out_path),
    ]);
    assert!(out.status.success());
    let rows = curve_rows(&out_path);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[1][0], 10.0);
}

#[test]
fn curve_rises_on_initial_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("c.csv");
    let out = polydist(&[
        "curve",
        path_str(&problem("normal_quadratic.json")),
        "--gamma-lo",
        "0",
        "--gamma-hi",
        "0.5",
        "--samples",
        "51",
        "--out",
        path_str(&out_path),
    ]);
    assert!(out.status.success());
    let rows = curve_rows(&out_path);
    assert_eq!(rows.len(), 51);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    // block 1 increasing branch: (√(9γ² + 16) + 3γ) / 2
    for r in &rows {
        let g = r[0];
        let oracle = ((9.0 * g * g + 16.0_f64).sqrt() + 3.0 * g) / 2.0;
        assert!(
            (r[1] - oracle).abs() < 1e-12,
            "gamma {g}: {} vs {oracle}",
            r[1]
        );
    }
}

#[test]
fn curve_to_unwritable_path_fails() {
    let out = polydist(&[
        "curve",
        path_str(&problem("normal_quadratic.json")),
        "--out",
        "/nonexistent-dir/sub/c.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn verify_round_trips_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = polydist(&[
        "analyze",
        path_str(&problem("normal_quadratic.json")),
        "--report",
        path_str(&report),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let analysis: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();

    let out = polydist(&["verify", path_str(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let verified = json(&out);
    let (a, b) = (&analysis["verification"], &verified["verification"]);
    assert_eq!(a["verdict"], b["verdict"]);
    for key in ["eigen_residual", "slope_residual", "slope_scale"] {
        let (x, y) = (a[key].as_f64().unwrap(), b[key].as_f64().unwrap());
        assert!((x - y).abs() <= 1e-10, "{key}: {x} vs {y}");
    }
}

#[test]
fn verify_examples_from_files() {
    let out = polydist(&["verify", path_str(&problem("double_root.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verification"]["verdict"], "multiple_defective");
    assert_eq!(r["verification"]["geometric_multiplicity"], 1);

    let out = polydist(&["verify", path_str(&problem("single_pair_q.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["verification"]["verdict"], "not_an_eigenvalue");
    assert!(r["verification"]["eigen_residual"].as_f64().unwrap() > 1e-2);

    // P itself: 3 is not an eigenvalue of the unperturbed polynomial
    let out = polydist(&["verify", path_str(&problem("normal_quadratic.json"))]);
    assert_eq!(out.status.code(), Some(2));

    // --mu overrides the file; 1 is a (semisimple) eigenvalue of P
    let out = polydist(&[
        "verify",
        path_str(&problem("normal_quadratic.json")),
        "--mu",
        "1,0",
    ]);
    assert_eq!(json(&out)["verification"]["geometric_multiplicity"], 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(polydist(&["analyze"]).status.code(), Some(1));
    assert_eq!(polydist(&["frobnicate"]).status.code(), Some(1));
    let out = polydist(&[
        "analyze",
        path_str(&problem("normal_quadratic.json")),
        "--mode",
        "sideways",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(polydist(&["--help"]).status.code(), Some(0));
}

#[test]
fn curve_rejects_bad_range() {
    let dir = tempfile::tempdir().unwrap();
    let out = polydist(&[
        "curve",
        path_str(&problem("normal_quadratic.json")),
        "--gamma-lo",
        "-1",
        "--out",
        path_str(&dir.path().join("c.csv")),
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
