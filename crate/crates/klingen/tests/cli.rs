//! End-to-end checks of the command-line surface: subcommand output
//! formats, exit codes, JSON reports and coefficient-file ingestion.

use std::process::Command;

fn klingen(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_klingen")).args(args).output().unwrap();
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn cosets_prints_integer_quadruples() {
    let (stdout, _, code) = klingen(&["cosets", "--level", "1", "--coset-height", "1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines, vec!["1 0 0 1", "0 -1 1 -1", "0 -1 1 0", "0 -1 1 1"]);
    // every line is a matrix with bottom row (c, d) and determinant one
    for line in lines {
        let v: Vec<i64> = line.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(v[0] * v[3] - v[1] * v[2], 1);
    }
}

#[test]
fn failed_check_exits_one() {
    // unreachable tolerance: the check runs, reports FAIL, and exits 1
    let (stdout, _, code) = klingen(&[
        "verify", "pointwise", "--weight", "12", "--tau1", "0.0,1.3", "--tau2", "0.0,1.4",
        "--tolerance", "1e-18",
    ]);
    assert_eq!(code, 1);
    assert!(stdout.contains("[FAIL]"), "stdout: {stdout}");
}

#[test]
fn verify_precondition_failures_exit_nonzero() {
    let (_, stderr, code) = klingen(&["verify", "cor14", "--weight", "12", "--n1", "2", "--n2", "2"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("coprime"), "stderr: {stderr}");

    let (_, stderr, code) = klingen(&["verify", "pointwise", "--weight", "14"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("weight"), "stderr: {stderr}");
}

#[test]
fn json_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (stdout, _, code) = klingen(&[
        "verify",
        "pointwise",
        "--weight",
        "12",
        "--tau1",
        "0.0,1.3",
        "--tau2",
        "-0.25,1.4",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("[PASS]"));
    let parsed: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let report = &parsed.as_array().unwrap()[0];
    assert_eq!(report["schema"], 1);
    assert_eq!(report["pass"], true);
    assert_eq!(report["truncation"]["coset_height"], 40);
    assert_eq!(report["truncation"]["qexp_order"], 512);
    let conventions = report["conventions"].as_array().unwrap();
    assert!(conventions.iter().any(|c| c.as_str().unwrap().contains("sym2 normalization")));
    assert!(conventions.iter().any(|c| c.as_str().unwrap().contains("singular T")));
    assert!(conventions.iter().any(|c| c.as_str().unwrap().contains("prefactor 2")));
}

#[test]
fn klingen_coefficients_of_lambda_1_1() {
    let (stdout, _, code) = klingen(&[
        "coeff", "klingen", "--weight", "12", "--n1", "1", "--n2", "1", "--cutoff", "2000",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 5, "one line per element of Lambda(1,1): {stdout}");
    // the singular pair contributes 1 each; diag(1,1) is 1242/7
    assert!(lines[0].contains("+1.000000000000e0"));
    assert!(lines[4].contains("+1.000000000000e0"));
    assert!(lines[2].contains("+1.774285714286e2"));
}

#[test]
fn bad_order_is_an_argument_error_not_a_crash() {
    let (_, stderr, code) = klingen(&["coeff", "eigenform", "--weight", "12", "--order", "1"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("order"), "stderr: {stderr}");
}

#[test]
fn theta_csv_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theta.csv");
    let (_, _, code) = klingen(&[
        "coeff", "theta", "--n1", "1", "--b", "0", "--n2", "1", "--order", "6",
        "--csv", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv, "n,b(n)\n0,1\n1,4\n2,4\n3,0\n4,4\n5,8\n");
}

#[test]
fn para_verify_with_ingested_coefficient_file() {
    // write the level-2 newform in the documented format and feed it back
    let f = klingen::qseries::newform_level2_weight8(320);
    let mut text = String::from("weight 8 level 2 order 319 character trivial\n");
    for n in 1..320 {
        text.push_str(&format!("{n} {}\n", f.coeff(n)));
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("newform.txt");
    std::fs::write(&path, text).unwrap();
    let (stdout, _, code) = klingen(&[
        "verify",
        "para",
        "--weight",
        "8",
        "--level",
        "2",
        "--qexp-order",
        "320",
        "--coeff-file",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("[PASS]"));

    // malformed file: a(1) != 1
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "weight 8 level 2 order 2 character trivial\n1 2\n2 5\n").unwrap();
    let (_, stderr, code) = klingen(&[
        "verify", "para", "--weight", "8", "--level", "2", "--coeff-file",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("normalized"), "stderr: {stderr}");
}
