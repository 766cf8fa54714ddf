use std::path::Path;
use std::process::{Command, Output};

use fracmom::distributions::{stable_symmetric_moment, StableParams};
use fracmom_cli::table::num;

fn fracmom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracmom"))
        .args(args)
        .env_remove("FRACMOM_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Column `name` of the first data row.
fn field(csv: &str, name: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    row[header.iter().position(|h| *h == name).unwrap()].to_string()
}

#[test]
fn symmetric_stable_moment_matches_library() {
    let o = fracmom(&["moment", "--family", "stable", "--alpha", "1.8", "--beta", "0", "--sigma", "1", "--lambda", "0.5", "--mu", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let want = stable_symmetric_moment(&StableParams::symmetric(1.8, 1.0).unwrap(), 0.5).unwrap();
    assert_eq!(field(&stdout(&o), "value"), num(want));
}

#[test]
fn missing_moment_exits_2() {
    let o = fracmom(&["moment", "--family", "stable", "--alpha", "1.5", "--lambda", "0.9"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("1.9") && err.contains("1.5"), "{err}");
}

#[test]
fn pareto_moment() {
    let o = fracmom(&["moment", "--family", "pareto", "--alpha", "3", "--lambda", "0.5", "--mu", "0"]);
    let v: f64 = field(&stdout(&o), "value").parse().unwrap();
    assert!((v - 0.5890486225480862).abs() < 1e-13);
}

#[test]
fn usage_and_nonconvergence_codes() {
    assert_eq!(fracmom(&["moment", "--bogus"]).status.code(), Some(64));
    assert_eq!(fracmom(&["moment", "--lambda", "0.5"]).status.code(), Some(64));
    assert_eq!(fracmom(&["validate", "--only", "nothing"]).status.code(), Some(64));
    let o = fracmom(&[
        "moment", "--family", "linnik", "--alpha", "1.8", "--mu", "3", "--lambda", "0.5",
        "--max-segments", "8", "--rel-tol", "1e-15", "--abs-tol", "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn figure1_preset_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracmom(&["sweep", "--preset", "figure1", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap().lines().count() - 1;
    assert_eq!(rows("figure1_mu.csv"), 303);
    assert_eq!(rows("figure1_beta.csv"), 123);
}

#[test]
fn subgaussian_sweep_minimum_at_gamma() {
    let o = fracmom(&["sweep", "--model", "subgaussian", "--alpha", "1.8", "--gamma", "0.5", "--lambda", "0.3", "--grid", "c=0:1:0.01"]);
    let out = stdout(&o);
    let best = out
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').take(2).map(|s| s.parse().unwrap()).collect();
            (f[0], f[1])
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((best.0 - 0.5).abs() < 1e-12, "{best:?}");
}

#[test]
fn single_point_sweep_equals_moment() {
    let common = ["--family", "linnik", "--alpha", "1.7", "--beta", "1.5", "--lambda", "0.4"];
    let m = fracmom(&[&["moment"][..], &common, &["--mu", "0.75"]].concat());
    let s = fracmom(&[&["sweep"][..], &common, &["--grid", "mu=0.75"]].concat());
    assert_eq!(field(&stdout(&m), "value"), field(&stdout(&s), "value"));
    assert_eq!(field(&stdout(&m), "abs_err_est"), field(&stdout(&s), "abs_err_est"));
}

fn write_x(dir: &Path, name: &str, xs: &[f64]) -> String {
    let p = dir.join(name);
    let body: String = xs.iter().map(|x| format!("{x}\n")).collect();
    std::fs::write(&p, format!("x\n{body}")).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn regression_commands() {
    let dir = tempfile::tempdir().unwrap();
    let run = |p: &str| fracmom(&["regress", "--input", p, "--alpha", "1.8", "--lambda", "0.5"]);
    let o = run(&write_x(dir.path(), "two.csv", &[0.0, 1.0]));
    let slope: f64 = field(&stdout(&o), "slope_error").parse().unwrap();
    let k = stable_symmetric_moment(&StableParams::symmetric(1.8, 1.0).unwrap(), 0.5).unwrap();
    assert!((slope / (k * 2f64.powf(1.5 / 1.8)) - 1.0).abs() < 1e-12);

    assert_eq!(run(&write_x(dir.path(), "flat.csv", &[2.0, 2.0, 2.0])).status.code(), Some(2));

    let xs = [0.3, 1.1, 2.0, 4.5];
    let shifted: Vec<f64> = xs.iter().map(|x| x + 10.0).collect();
    let a = run(&write_x(dir.path(), "a.csv", &xs));
    let b = run(&write_x(dir.path(), "b.csv", &shifted));
    let (sa, sb): (f64, f64) =
        (field(&stdout(&a), "slope_error").parse().unwrap(), field(&stdout(&b), "slope_error").parse().unwrap());
    assert!((sa / sb - 1.0).abs() < 1e-12);
}

#[test]
fn validate_subset_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = fracmom(&["validate", "--only", "cp", "--seed", "42", "--mc-samples", "100000", "-o", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read_to_string(p).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    assert!(a.starts_with("target,analytic,oracle,abs_diff,tolerance,passed,oracle_kind,seed\n"));
    assert!(a.lines().skip(1).all(|l| l.starts_with("cp:") && l.contains(",true,")));
    assert!(!a.contains('\r'));
}

#[test]
fn config_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# test\nformat = json\nrel_tol = 1e-11\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fracmom"))
        .args(["moment", "--family", "pareto", "--alpha", "3", "--lambda", "0.5"])
        .env("FRACMOM_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(stdout(&o).trim_start().starts_with('['));
    let o = Command::new(env!("CARGO_BIN_EXE_fracmom"))
        .args(["moment", "--family", "pareto", "--alpha", "3", "--lambda", "0.5", "--format", "csv"])
        .env("FRACMOM_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("value,"));
    std::fs::write(&cfg, "speed = fast\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fracmom"))
        .args(["moment", "--family", "pareto", "--alpha", "3", "--lambda", "0.5"])
        .env("FRACMOM_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
}
