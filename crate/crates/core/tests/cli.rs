use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn qgls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgls"))
        .args(args)
        .env_remove("QGLS_TOL")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn reference() -> String {
    data("loss_then_gain.json").to_str().unwrap().to_owned()
}

/// `(x, p, w)` rows of a grid CSV.
fn parse_csv(text: &str) -> Vec<[f64; 3]> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,p,w"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

#[test]
fn validate_reference_file() {
    let out = qgls(&["validate", &reference()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let residuals: Vec<f64> = text
        .lines()
        .map(|l| {
            l.split("residual=")
                .nth(1)
                .unwrap()
                .split(' ')
                .next()
                .unwrap()
                .parse()
                .unwrap()
        })
        .collect();
    assert_eq!(residuals.len(), 2);
    assert!(residuals.iter().all(|r| *r < 1e-12), "{text}");
}

#[test]
fn validate_rejects_corrupted_matrix_row() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"modes": 2, "input": {"kind": "coherent", "alpha": [[1, 0], [0, 0]]},
  "elements": [{"kind": "unitary", "matrix": [[[1, 0], [0, 0]], [[0, 0] [1, 0]]]}]}"#,
    );
    let out = qgls(&["validate", &bad]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("SyntaxError at 2:"), "{}", stderr(&out));
}

#[test]
fn validate_rejects_amplifying_loss() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"modes": 1, "input": {"kind": "coherent", "alpha": [[1, 0]]}, "elements": [{"kind": "loss", "t": 1.2}]}"#,
    );
    let out = qgls(&["validate", &bad]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("element 0 (loss): GainNotLoss"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn validate_pt_profiles() {
    let out = qgls(&[
        "validate",
        &reference(),
        "--pt-profile",
        data("pt_linear.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains(" PT-symmetric"));
    let out = qgls(&[
        "validate",
        &reference(),
        "--pt-profile",
        data("pt_symmetric_loss.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("not PT-symmetric"));
}

#[test]
fn tolerance_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let grazing = write(
        dir.path(),
        "grazing.json",
        r#"{"modes": 1, "input": {"kind": "coherent", "alpha": [[1, 0]]}, "elements": [{"kind": "loss", "t": 1.00000001}]}"#,
    );
    assert_eq!(code(&qgls(&["validate", &grazing])), 2);
    let loose = Command::new(env!("CARGO_BIN_EXE_qgls"))
        .args(["validate", &grazing])
        .env("QGLS_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(code(&loose), 0, "{}", stderr(&loose));
    let junk = Command::new(env!("CARGO_BIN_EXE_qgls"))
        .args(["validate", &grazing])
        .env("QGLS_TOL", "tight")
        .output()
        .unwrap();
    assert_eq!(code(&junk), 2);
}

#[test]
fn simulate_reference_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qgls(&["simulate", &reference(), "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((r["mean"][0][0].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!((r["mean"][0][1].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!((r["purity"].as_f64().unwrap() - 0.285714).abs() < 1e-6);
    assert!((r["mean_photon"][0].as_f64().unwrap() - 19.25).abs() < 1e-12);
    assert!((r["inferred_nbar"][0].as_f64().unwrap() - 1.25).abs() < 1e-12);
    assert!((r["gain"][0]["n_th"][0].as_f64().unwrap() - 1.25).abs() < 1e-12);
    assert!(r["gain"][0].get("t_eff_literal").is_none());
}

#[test]
fn simulate_units_and_literal_formula() {
    let out = qgls(&[
        "simulate",
        &reference(),
        "--si",
        "--omega-hz",
        "5e9",
        "--literal-paper-formula",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let kelvin = r["gain"][0]["t_eff"][0].as_f64().unwrap();
    let omega = 2.0 * std::f64::consts::PI * 5e9;
    let expected = 1.054_571_817e-34 * omega / 1.380_649e-23 / (9.0f64 / 5.0).ln();
    assert!((kelvin / expected - 1.0).abs() < 1e-12);
    assert!(r["gain"][0]["t_eff_literal"][0].as_f64().is_some());
    // --si alone is a usage error.
    assert_eq!(code(&qgls(&["simulate", &reference(), "--si"])), 2);
}

#[test]
fn simulate_missing_file_is_io_error() {
    let out = qgls(&["simulate", "/nonexistent/pipeline.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn wigner_all_stages_reproduces_reference_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("w.csv");
    let out = qgls(&[
        "wigner",
        &reference(),
        "--stage",
        "all",
        "--xrange",
        "-6:6:121",
        "--prange",
        "-6:6:121",
        "-o",
        base.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let two_over_pi = 2.0 / std::f64::consts::PI;
    let expected = [
        (3.0, 3.0, two_over_pi),
        (2.0, 2.0, two_over_pi),
        (3.0, 3.0, two_over_pi / 3.5),
    ];
    for (k, (x0, p0, w0)) in expected.iter().enumerate() {
        let rows = parse_csv(&std::fs::read_to_string(dir.path().join(format!("w_stage{k}.csv"))).unwrap());
        assert_eq!(rows.len(), 121 * 121);
        let best = rows
            .iter()
            .fold([0.0, 0.0, f64::NEG_INFINITY], |a, r| if r[2] > a[2] { *r } else { a });
        assert!(
            (best[0] - x0).abs() < 1e-9 && (best[1] - p0).abs() < 1e-9,
            "stage {k}: {best:?}"
        );
        assert!((best[2] - w0).abs() < 1e-9, "stage {k}: {best:?}");
    }
}

#[test]
fn wigner_output_is_deterministic() {
    let a = qgls(&[
        "wigner",
        &reference(),
        "--stage",
        "2",
        "--xrange",
        "0:6:31",
        "--prange",
        "0:6:31",
    ]);
    let b = qgls(&[
        "wigner",
        &reference(),
        "--stage",
        "2",
        "--xrange",
        "0:6:31",
        "--prange",
        "0:6:31",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let a = qgls(&["simulate", &reference()]);
    let b = qgls(&["simulate", &reference()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn wigner_vacuum_and_degenerate_grids() {
    let vac = data("vacuum.json");
    let out = qgls(&["wigner", vac.to_str().unwrap(), "--stage", "0"]);
    assert_eq!(code(&out), 0);
    let rows = parse_csv(&stdout(&out));
    let step = 12.0 / 120.0;
    let sum: f64 = rows.iter().map(|r| r[2]).sum::<f64>() * step * step;
    assert!((sum - 1.0).abs() < 1e-6, "{sum}");
    // Symmetric under x -> -x.
    let n = 121;
    for i in 0..n {
        for j in 0..n {
            assert!((rows[i * n + j][2] - rows[(n - 1 - i) * n + j][2]).abs() < 1e-15);
        }
    }
    let out = qgls(&[
        "wigner",
        vac.to_str().unwrap(),
        "--stage",
        "0",
        "--xrange",
        "0:0:1",
        "--prange",
        "0:0:1",
    ]);
    assert_eq!(stdout(&out).lines().count(), 2);
    assert!((parse_csv(&stdout(&out))[0][2] - 2.0 / std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn wigner_json_and_errors() {
    let out = qgls(&[
        "wigner",
        &reference(),
        "--format",
        "json",
        "--xrange",
        "-1:1:3",
        "--prange",
        "-1:1:3",
    ]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(code(&qgls(&["wigner", &reference(), "--xrange", "1:0:5"])), 2);
    assert_eq!(code(&qgls(&["wigner", &reference(), "--prange", "0:1"])), 2);
    assert_eq!(code(&qgls(&["wigner", &reference(), "--stage", "3"])), 2);
}

#[test]
fn oracle_reference_file() {
    let out = qgls(&["oracle", &reference(), "--dim", "80"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["passed"], Value::Bool(true));
    assert!(r["purity_diff"].as_f64().unwrap() < 1e-5);

    let out = qgls(&["oracle", data("vacuum.json").to_str().unwrap(), "--dim", "20"]);
    assert_eq!(code(&out), 0);

    let out = qgls(&["oracle", &reference(), "--dim", "10"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("TruncationOverflow"));
}

#[test]
fn oracle_mismatch_exit_code() {
    // The leak bound is the comparison tolerance, so a loose tolerance lets a
    // small truncation through.
    let out = qgls(&["oracle", &reference(), "--dim", "60", "--tol", "0.5"]);
    assert_eq!(code(&out), 0);
    // Here the leak stays under 1e-4 but the moments differ by more.
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "two.json",
        r#"{"modes": 1, "input": {"kind": "coherent", "alpha": [[1.5, 0]]}, "elements": [{"kind": "gain", "g": 1.5}]}"#,
    );
    let out = qgls(&["oracle", &f, "--dim", "40", "--tol", "1e-4"]);
    assert_eq!(code(&out), 5, "{}", stdout(&out));
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["passed"], Value::Bool(false));
}
