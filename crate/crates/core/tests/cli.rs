mod common;

use std::path::Path;
use std::process::Command;

use common::{data, ANALYZE_CASES};

fn run(args: &[&str]) -> (u8, String, String) {
    let mut argv = vec!["nusample"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = nusample::cli::run_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Compares with tests/golden/<name>.txt; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = format!("{}/tests/golden/{name}.txt", env!("CARGO_MANIFEST_DIR"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {path}"));
    assert_eq!(actual, expected, "output differs from {path}");
}

#[test]
fn analyze_goldens() {
    for (system, seq) in ANALYZE_CASES {
        let (code, out, _) = run(&["analyze", "--system", &data(system), "--instants", &data(seq)]);
        golden(&format!("analyze_{system}_{seq}"), &format!("exit {code}\n{out}"));
    }
}

#[test]
fn analyze_examples() {
    let (code, out, _) = run(&["analyze", "--system", &data("sine"), "--instants", &data("quarter_turn")]);
    assert_eq!(code, 0);
    assert!(out.contains("normalized_gram_det      1\n"), "{out}");
    let (code, out, _) = run(&["analyze", "--system", &data("sine"), "--instants", &data("half_turn")]);
    assert_eq!(code, 2);
    assert!(out.contains("determinant              0\n"), "{out}");
    let (code, _, err) = run(&["analyze", "--system", &data("missing_field"), "--instants", &data("quarter_turn")]);
    assert_eq!(code, 1);
    assert!(err.contains("mode_coefficients") && err.contains("markov"), "{err}");
    let (code, _, err) = run(&["analyze", "--system", &data("third_order"), "--instants", &data("quarter_turn")]);
    assert_eq!(code, 1, "{err}");
    let (code, _, _) = run(&["analyze", "--system", &data("sine"), "--instants", &data("quarter_turn"), "--tol", "-1"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["analyze", "--system", "/nonexistent.toml", "--instants", &data("quarter_turn")]);
    assert_eq!(code, 1);
}

#[test]
fn tolerance_from_environment() {
    let bin = env!("CARGO_BIN_EXE_nusample");
    let out = Command::new(bin)
        .args(["analyze", "--system", &data("third_order"), "--instants", &data("three_instants")])
        .env("NUSAMPLE_TOL", "0.5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("inadmissible"));
}

#[test]
fn analyze_formats() {
    let args = |f: &'static str| ["--format", f, "analyze", "--system", &data("sine"), "--instants", &data("quarter_turn")].map(String::from);
    let (_, json, _) = run(&args("json").iter().map(|s| s.as_str()).collect::<Vec<_>>());
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["determinant"], 1.0);
    assert_eq!(v["verdict"], "admissible");
    let (_, csv, _) = run(&args("csv").iter().map(|s| s.as_str()).collect::<Vec<_>>());
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("order,alphas,determinant,"));
    assert!(lines.next().unwrap().starts_with("2,0;1.57079632679,1,"));
}

#[test]
fn design_goldens() {
    let cases: &[(&str, &[&str])] = &[
        ("design_sine_auto", &["design", "--system", "sine"]),
        ("design_sine_branch2", &["design", "--system", "sine", "--branch", "2", "--t0", "1.5"]),
        ("design_sine_generic", &["design", "--system", "sine", "--method", "generic"]),
        ("design_geometric_third", &["design", "--system", "geometric_third"]),
        ("design_fifth_order", &["design", "--system", "fifth_order", "--steps", "120"]),
    ];
    for (name, args) in cases {
        let args: Vec<String> =
            args.iter().enumerate().map(|(i, a)| if i > 0 && args[i - 1] == "--system" { data(a) } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let (code, out, err) = run(&args);
        assert_eq!(code, 0, "{name}: {err}");
        golden(name, &out);
    }
}

#[test]
fn design_rejections_and_trace() {
    let (code, _, err) = run(&["design", "--system", &data("undamped_third"), "--method", "geometric"]);
    assert_eq!(code, 1);
    assert!(err.contains("a = 0"), "{err}");
    let (code, out, _) = run(&["design", "--system", &data("undamped_third")]);
    assert_eq!(code, 0);
    assert!(out.contains("generic-search"));
    let (code, _, _) = run(&["design", "--system", &data("sine"), "--method", "simplex"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["design", "--system", &data("non_minimal")]);
    assert_eq!(code, 2);

    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let trace_s = trace.to_str().unwrap();
    let (code, _, err) = run(&["design", "--system", &data("geometric_third"), "--trace", trace_s]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("alpha,x,y,z,kind\n"));
    for kind in ["spiral", "Y0", "Y1", "Y2", "P0", "P1", "P2", "Q2"] {
        assert!(text.lines().any(|l| l.ends_with(&format!(",{kind}"))), "{kind}");
    }
    let (code, _, _) = run(&["design", "--system", &data("sine"), "--trace", trace_s]);
    assert_eq!(code, 1);
}

#[test]
fn verify_round_trips() {
    let (code, out, err) = run(&["verify", "--system", &data("third_order"), "--instants", &data("three_instants"), "--seed", "7"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("status                pass"), "{out}");
    let again = run(&["verify", "--system", &data("third_order"), "--instants", &data("three_instants"), "--seed", "7"]);
    assert_eq!(again.1, out);
    golden("verify_third_order", &out);

    let (code, _, err) = run(&["verify", "--system", &data("sine"), "--instants", &data("half_turn")]);
    assert_eq!(code, 2);
    assert!(err.contains("condition number"), "{err}");
    let (code, _, err) = run(&["verify", "--system", &data("sine"), "--instants", &data("no_final")]);
    assert_eq!(code, 1);
    assert!(err.contains("final instant"), "{err}");
}

#[test]
fn sweep_scan_of_the_pure_pair() {
    let (code, out, err) = run(&[
        "sweep", "--system", &data("sine"), "--from", "0.0314159265358979", "--to", "6.25", "--points", "200", "--trials", "20",
    ]);
    assert_eq!(code, 0, "{err}");
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "scale,determinant,gram_det,condition_number,noise_amplification");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 200);
    let mut peaks = Vec::new();
    for i in 1..rows.len() - 1 {
        if rows[i][2] >= rows[i - 1][2] && rows[i][2] >= rows[i + 1][2] && rows[i][2] > 0.5 {
            peaks.push(rows[i][0]);
        }
    }
    let step = rows[1][0] - rows[0][0];
    assert_eq!(peaks.len(), 2, "{peaks:?}");
    assert!((peaks[0] - std::f64::consts::FRAC_PI_2).abs() <= step);
    assert!((peaks[1] - 3.0 * std::f64::consts::FRAC_PI_2).abs() <= step);
    let near_pi = rows.iter().min_by(|a, b| (a[0] - std::f64::consts::PI).abs().total_cmp(&(b[0] - std::f64::consts::PI).abs())).unwrap();
    assert!(near_pi[2] < 1e-3);
}

#[test]
fn sweep_single_point_matches_analyze() {
    let (_, sweep, _) = run(&[
        "sweep", "--system", &data("third_order"), "--instants", &data("three_instants"), "--from", "1", "--to", "1", "--points", "1",
    ]);
    let row: Vec<&str> = sweep.lines().nth(1).unwrap().split(',').collect();
    let (_, analyze, _) = run(&["analyze", "--system", &data("third_order"), "--instants", &data("three_instants")]);
    assert!(analyze.contains(&format!("determinant              {}\n", row[1])), "{analyze}\n{sweep}");
    assert!(analyze.contains(&format!("normalized_gram_det      {}\n", row[2])));
    assert!(analyze.contains(&format!("condition_number         {}\n", row[3])));

    let (code, _, _) = run(&["sweep", "--system", &data("sine"), "--from", "0", "--to", "1"]);
    assert_eq!(code, 1);
    let a = run(&["sweep", "--system", &data("sine"), "--from", "0.5", "--to", "2", "--points", "4", "--seed", "3"]);
    let b = run(&["sweep", "--system", &data("sine"), "--from", "0.5", "--to", "2", "--points", "4", "--seed", "3"]);
    assert_eq!(a, b);
    golden("sweep_sine", &a.1);
}

#[test]
fn geometry_exports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let out_s = out.to_str().unwrap();
    let (code, report, err) =
        run(&["geometry", "--system", &data("geometric_third"), "--instants", &data("two_instants"), "--out", out_s]);
    assert_eq!(code, 0, "{err}");
    assert!(report.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["angle_error", "0"]), "{report}");
    assert!(Path::new(out_s).exists());

    let (code, report, _) =
        run(&["geometry", "--system", &data("damped_pair"), "--instants", &data("quarter_turn"), "--out", out_s]);
    assert_eq!(code, 0);
    assert!(report.contains("planar"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().filter(|l| l.ends_with(",Y0") || l.ends_with(",Y1")).count() == 2);

    let (code, _, _) =
        run(&["geometry", "--system", &data("fifth_order"), "--instants", &data("five_instants"), "--out", out_s]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["analyze"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}
