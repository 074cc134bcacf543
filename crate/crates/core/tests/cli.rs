use std::fs;
use std::process::{Command, Output};

fn d2dsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d2dsim"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn solve_edgeless_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    fs::write(&path, "p 3 0\n").unwrap();
    let out = d2dsim(&["solve", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "method=exact\nsize=3\nvertices=0 1 2\n");
}

#[test]
fn solve_triangle_with_greedy() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    fs::write(&path, "c triangle\np 3 3\n0 1\n1 2\n0 2\n").unwrap();
    let out = d2dsim(&["solve", path.to_str().unwrap(), "--scheduler", "greedy"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("size=1\n"));
}

#[test]
fn theory_reports_closed_forms() {
    let out = d2dsim(&["theory", "--gamma-r", "0.5", "--epsilon", "0.05"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("eta=0.333333\n"));
    assert!(text.contains("gamma_c=1.642857\n"));
}

#[test]
fn sweep_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = d2dsim(&[
        "sweep",
        "--n",
        "200,400,800",
        "--m",
        "10",
        "--radius",
        "0.08",
        "--trials",
        "10",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 4);

    let fit = d2dsim(&[
        "fit",
        csv.to_str().unwrap(),
        "--x",
        "n",
        "--y",
        "L_mean",
        "--axis",
        "n",
    ]);
    assert!(fit.status.success());
    let text = stdout(&fit);
    assert!(text.contains("points=3\n"));
    let slope: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("slope="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(slope > 0.0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# small run\nn = 300\nm = 10\nradius = 0.1\ntrials = 7\nseed = 4\n",
    )
    .unwrap();
    let out = d2dsim(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("n=300\n"));
    assert!(text.contains("trials=3\n"));
    assert!(text.contains("seed=4\n"));
}

#[test]
fn failing_run_writes_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = d2dsim(&["sweep", "--n", "0", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert!(!csv.exists());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(d2dsim(&["simulate", "--bogus"]).status.code(), Some(2));
    assert_eq!(d2dsim(&["--m", "3"]).status.code(), Some(2));
}

#[test]
fn single_user_serves_nothing() {
    let out = d2dsim(&[
        "simulate", "--n", "1", "--m", "5", "--radius", "0.5", "--trials", "5",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("L_mean=0\n"));
}
