use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../problems")
        .join(name)
}

fn golden(name: &str) -> PathBuf {
    problem("golden").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn frac_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_frac"));
    cmd.args(args).env_remove("FRAC_NUM_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn frac(args: &[&str]) -> Run {
    frac_env(args, &[])
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn assert_json_close(got: &Value, want: &Value, at: &str) {
    match (got, want) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!(
                (a - b).abs() <= 1e-12 * b.abs().max(1e-300),
                "{at}: {a} vs {b}"
            );
        }
        (Value::Object(a), Value::Object(b)) => {
            assert_eq!(
                a.keys().collect::<Vec<_>>(),
                b.keys().collect::<Vec<_>>(),
                "{at}"
            );
            for (k, v) in b {
                assert_json_close(&a[k], v, &format!("{at}.{k}"));
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            assert_eq!(a.len(), b.len(), "{at}");
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                assert_json_close(x, y, &format!("{at}[{i}]"));
            }
        }
        _ => assert_eq!(got, want, "{at}"),
    }
}

#[test]
fn solve_zero_problem_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero.csv");
    let r = frac(&[
        "solve",
        "--config",
        s(&problem("zero.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("iterations: 1"));
    assert_eq!(
        std::fs::read(&out).unwrap(),
        std::fs::read(golden("zero.csv")).unwrap()
    );
}

#[test]
fn n_override_changes_grid_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero.csv");
    let r = frac(&[
        "solve",
        "--config",
        s(&problem("zero.json")),
        "--out",
        s(&out),
        "--n",
        "9",
    ]);
    assert_eq!(r.code, 0);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[8][0].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn singular_start_is_flagged_in_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hv.csv");
    let r = frac(&[
        "solve",
        "--config",
        s(&problem("hilfer_volterra.json")),
        "--out",
        s(&out),
        "--n",
        "65",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,psi_t,u0");
    assert!(lines[1].starts_with("# node 0"));
    assert!(lines[2].starts_with("0.0000000000000000e0,"));
}

#[test]
fn unknown_key_is_an_input_error_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(problem("hu_linear.json"))
        .unwrap()
        .replace("\"alpha\"", "\"alpha_\"");
    let config = dir.path().join("typo.json");
    std::fs::write(&config, text).unwrap();
    let r = frac(&[
        "solve",
        "--config",
        s(&config),
        "--out",
        s(&dir.path().join("x.csv")),
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("alpha_"), "{}", r.stderr);
}

#[test]
fn missing_config_and_bad_usage_exit_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    assert_eq!(
        frac(&["solve", "--config", "/nonexistent/p.json", "--out", s(&out)]).code,
        1
    );
    assert_eq!(frac(&["solve", "--out", s(&out)]).code, 1);
    assert_eq!(frac(&["frobnicate"]).code, 1);
    assert_eq!(frac(&["--help"]).code, 0);
    let r = frac_env(
        &[
            "solve",
            "--config",
            s(&problem("zero.json")),
            "--out",
            s(&out),
        ],
        &[("FRAC_NUM_THREADS", "zero")],
    );
    assert_eq!(r.code, 1);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.json");
    let many = dir.path().join("many.json");
    let config = problem("hur_exp.json");
    let args = |out: &Path| {
        vec![
            "verify".to_owned(),
            "--config".into(),
            s(&config).into(),
            "--out".into(),
            s(out).into(),
            "--n".into(),
            "129".into(),
        ]
    };
    let a: Vec<String> = args(&one);
    let b: Vec<String> = args(&many);
    let ra = frac_env(
        &a.iter().map(String::as_str).collect::<Vec<_>>(),
        &[("FRAC_NUM_THREADS", "1")],
    );
    let rb = frac_env(
        &b.iter().map(String::as_str).collect::<Vec<_>>(),
        &[("FRAC_NUM_THREADS", "4")],
    );
    assert_eq!((ra.code, rb.code), (0, 0));
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&many).unwrap());
    assert_eq!(
        std::fs::read(one.with_extension("csv")).unwrap(),
        std::fs::read(many.with_extension("csv")).unwrap()
    );
}

#[test]
fn divergent_iteration_exits_with_hypothesis_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let r = frac(&[
        "solve",
        "--config",
        s(&problem("divergent.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(r.stderr.contains("not contractive"));
    assert!(!out.exists());
}

#[test]
fn iteration_budget_exhaustion_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(problem("mittag_leffler.json"))
        .unwrap()
        .replace("\"max_iter\": 200", "\"max_iter\": 3");
    let config = dir.path().join("short.json");
    std::fs::write(&config, text).unwrap();
    let out = dir.path().join("short.csv");
    let r = frac(&[
        "solve",
        "--config",
        s(&config),
        "--out",
        s(&out),
        "--n",
        "33",
    ]);
    assert_eq!(r.code, 4, "{}", r.stderr);
    assert!(out.exists());
}

#[test]
fn verify_hu_example_matches_golden_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let r = frac(&[
        "verify",
        "--config",
        s(&problem("hu_linear.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("certified: true"));
    let got: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let want: Value = serde_json::from_str(
        &std::fs::read_to_string(golden("hu_linear_certificate.json")).unwrap(),
    )
    .unwrap();
    assert_json_close(&got, &want, "certificate");
    let rows = data_rows(&out.with_extension("csv"));
    let golden_rows = data_rows(&golden("hu_linear_certificate.csv"));
    assert_eq!(rows.len(), golden_rows.len());
    for (a, b) in rows.iter().zip(&golden_rows) {
        for (x, y) in a.iter().zip(b) {
            let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1e-300));
        }
    }
}

#[test]
fn seed_override_moves_margins_but_not_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let config = problem("hur_exp.json");
    for (out, seed) in [(&a, "1"), (&b, "2")] {
        let r = frac(&[
            "verify",
            "--config",
            s(&config),
            "--out",
            s(out),
            "--seed",
            seed,
            "--n",
            "129",
        ]);
        assert_eq!(r.code, 0, "{}", r.stderr);
    }
    let ja: Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let jb: Value = serde_json::from_str(&std::fs::read_to_string(&b).unwrap()).unwrap();
    assert_eq!(ja["seed"], 1);
    assert_eq!(ja["bound_summary"], jb["bound_summary"]);
    assert_ne!(
        ja["perturbations"][5]["margin"],
        jb["perturbations"][5]["margin"]
    );
    let bounds = |p: &Path| {
        data_rows(&p.with_extension("csv"))
            .into_iter()
            .map(|r| r[2].clone())
            .collect::<Vec<_>>()
    };
    assert_eq!(bounds(&a), bounds(&b));
}

#[test]
fn inflated_lipschitz_constant_refuses_to_certify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let r = frac(&[
        "verify",
        "--config",
        s(&problem("hu_inflated_lipschitz.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, 2);
    assert!(!out.exists());
}

#[test]
fn verify_without_envelope_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = frac(&[
        "verify",
        "--config",
        s(&problem("zero.json")),
        "--out",
        s(&dir.path().join("c.json")),
    ]);
    assert_eq!(r.code, 1, "{}", r.stderr);
}

#[test]
fn understated_lipschitz_constant_is_not_certified() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(problem("hu_linear.json"))
        .unwrap()
        .replace("\"-u/2\"", "\"-0.9*u\"");
    let config = dir.path().join("liar.json");
    std::fs::write(&config, text).unwrap();
    let out = dir.path().join("cert.json");
    let r = frac(&[
        "verify",
        "--config",
        s(&config),
        "--out",
        s(&out),
        "--n",
        "65",
    ]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stderr.contains("Lipschitz"));
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(cert["certified"], false);
}

#[test]
fn sweep_alpha_matches_golden_and_q_tracks_m() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let r = frac(&[
        "sweep",
        "--config",
        s(&problem("hu_linear.json")),
        "--param",
        "alpha",
        "--values",
        "0.3,0.5,0.7",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("param_value,M,q,bound_max,empirical_max,certified,status\n"));
    let rows = data_rows(&out);
    let want = data_rows(&golden("hu_linear_sweep_alpha.csv"));
    assert_eq!(rows.len(), 3);
    for (a, b) in rows.iter().zip(&want) {
        assert_eq!(a[0], b[0]);
        assert_eq!(&a[5..], &b[5..]);
        for c in 1..5 {
            let (x, y): (f64, f64) = (a[c].parse().unwrap(), b[c].parse().unwrap());
            assert!((x - y).abs() <= 1e-12 * y.abs());
        }
    }
    // ψ(T) − ψ(0) = 1, so M = 1/Γ(α+1) and q = M · L_f
    for w in rows.windows(2) {
        let m: Vec<f64> = w.iter().map(|r| r[1].parse().unwrap()).collect();
        let q: Vec<f64> = w.iter().map(|r| r[2].parse().unwrap()).collect();
        assert_eq!(q[1] < q[0], m[1] < m[0]);
    }
}

#[test]
fn sweep_epsilon_doubles_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let r = frac(&[
        "sweep",
        "--config",
        s(&problem("hu_linear.json")),
        "--param",
        "epsilon",
        "--values",
        "0.01,0.02",
        "--out",
        s(&out),
        "--n",
        "129",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = data_rows(&out);
    let b: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(b[1], 2.0 * b[0]);
}

#[test]
fn sweep_records_illegal_values_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let r = frac(&[
        "sweep",
        "--config",
        s(&problem("hu_linear.json")),
        "--param",
        "beta",
        "--values",
        "1.5, 0.5,-1",
        "--out",
        s(&out),
        "--n",
        "65",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = data_rows(&out);
    let status: Vec<&str> = rows.iter().map(|r| r[6].as_str()).collect();
    assert_eq!(status, ["invalid_value", "ok", "invalid_value"]);
    assert_eq!(rows[0][1], "");

    let r = frac(&[
        "sweep",
        "--config",
        s(&problem("hu_linear.json")),
        "--param",
        "T",
        "--values",
        "1,40",
        "--out",
        s(&out),
        "--n",
        "65",
    ]);
    assert_eq!(r.code, 0);
    let status: Vec<String> = data_rows(&out).into_iter().map(|r| r[6].clone()).collect();
    assert_eq!(status, ["ok", "hypothesis_failure"]);
}

#[test]
fn sweep_with_empty_values_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let r = frac(&[
        "sweep",
        "--config",
        s(&problem("hu_linear.json")),
        "--param",
        "alpha",
        "--values",
        "",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, 1);
    assert!(!out.exists());
}
