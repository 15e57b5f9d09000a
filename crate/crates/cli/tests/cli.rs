use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cocycle_lab_cli::output::csv_body;
use cocycle_lab_cli::schema::{report_schema, validate};
use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"))
}

fn run(args: &[&str], out: &Path, envs: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cocycle-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove(cocycle_lab_cli::JOBS_ENV)
        .envs(envs.iter().copied())
        .output()
        .expect("binary runs")
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn diag_spectrum_row_is_log_two() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("diag");
    let o = run(&["spectrum", "--scenario", s.to_str().unwrap(), "--set", "spectrum.iterations=5000"], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(text.starts_with("# cocycle-lab "));
    let body = csv_body(&text);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("parameter,lambda_1,lambda_2,stderr,n"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let l1: f64 = row[1].parse().unwrap();
    let l2: f64 = row[2].parse().unwrap();
    assert!((l1 - 2f64.ln()).abs() < 1e-6 && (l2 + 2f64.ln()).abs() < 1e-6);
    assert_eq!(row[4], "5000");
    assert!(!body.contains('\r'));
}

#[test]
fn report_validates_and_echoes_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("bunched");
    let o = run(
        &["bunching", "--scenario", s.to_str().unwrap(), "--seed", "42", "--set", "bunching.grid=2"],
        dir.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path());
    assert!(validate(&r, &report_schema()).is_empty());
    assert_eq!(r["seed"], 42);
    assert_eq!(r["overrides"][0], "bunching.grid=2");
    assert_eq!(r["scenario"]["echo"]["bunching"]["grid"], 2);
    assert_eq!(r["certificates"][0]["grid"], 2);
    assert_eq!(r["scenario"]["hash"].as_str().unwrap().len(), 64);
    for f in ["report.json", "run.log"] {
        assert!(r["outputs"].as_array().unwrap().iter().any(|x| x == f));
    }
}

#[test]
fn schema_violations_list_every_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        r#"
name = "bad"
[base]
matrix = [[1, 1], [0, 1]]
[cocycle]
half_dim = 1
alpha = 2.0
colour = "red"
[[cocycle.factors]]
kind = "fixed"
matrix = [[3.0, 0.0], [0.0, 3.0]]
[twisting]
floor = 0.0
"#,
    )
    .unwrap();
    let o = run(&["spectrum", "--scenario", bad.to_str().unwrap()], &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    for field in ["seed", "base.matrix", "cocycle.alpha", "cocycle.colour", "cocycle.factors[0].matrix", "twisting.floor"] {
        assert!(err.contains(field), "{field} missing from:\n{err}");
    }
}

#[test]
fn unknown_override_target_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("diag");
    let o = run(&["spectrum", "--scenario", s.to_str().unwrap(), "--set", "spectrum.iteratons=10"], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("spectrum.iteratons"));
}

#[test]
fn usage_errors_and_missing_files_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum"], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["nonsense", "--scenario", "x.toml"], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["spectrum", "--scenario", "/nonexistent/x.toml"], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn twisting_on_constant_hyperbolic_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("hyperbolic_twist");
    let o = run(&["twisting", "--scenario", s.to_str().unwrap()], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let r = report(dir.path());
    assert_eq!(r["outcome"], "negative");
    assert_eq!(r["verdicts"][0]["verdict"], "negative");
}

#[test]
fn jobs_environment_variable_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("generic_d2");
    let args = ["spectrum", "--scenario", s.to_str().unwrap(), "--set", "spectrum.iterations=2000"];
    let a = run(&args, &dir.path().join("a"), &[("COCYCLE_LAB_JOBS", "2")]);
    assert_eq!(a.status.code(), Some(0));
    run(&args, &dir.path().join("b"), &[]);
    let body = |p: &Path| std::fs::read_to_string(p.join("spectrum.csv")).unwrap();
    assert_eq!(csv_body(&body(&dir.path().join("a"))), csv_body(&body(&dir.path().join("b"))));
    let bad = run(&args, &dir.path().join("c"), &[("COCYCLE_LAB_JOBS", "many")]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn coefficient_sweep_writes_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("diag");
    let o = run(
        &[
            "sweep",
            "--scenario",
            s.to_str().unwrap(),
            "--set",
            "sweep.parameter=\"cocycle.factors.0.matrix.0.0\"",
            "--set",
            "sweep.values=[2.0, 4.0]",
            "--set",
            "cocycle.factors.0.matrix=[[2.0, 0.0], [0.0, 0.5]]",
            "--set",
            "spectrum.iterations=1000",
            "--set",
            "pinching.iterations=1000",
        ],
        dir.path(),
        &[],
    );
    // (4, 0; 0, 0.5) is not symplectic, so the second grid point is rejected.
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("= 4"));
    let o = run(
        &[
            "sweep",
            "--scenario",
            scenario("rotation").to_str().unwrap(),
            "--set",
            "sweep.parameter=\"cocycle.factors.0.field.constant\"",
            "--set",
            "sweep.values=[0.1, 0.2, 0.3]",
            "--set",
            "spectrum.iterations=1000",
            "--set",
            "pinching.iterations=1000",
        ],
        dir.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv_body(&text).lines().count(), 4);
}
