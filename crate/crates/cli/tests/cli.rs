use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hardsparse::io::{write_fd_csv, write_mv_csv};
use hardsparse::{gen_fd, gen_mv, FdScenario, MvScenario};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardsparse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn mv_input(dir: &Path, p: usize) -> String {
    let path = dir.join("x.csv");
    let (d, truth) = gen_mv(&MvScenario::new(p, 5)).unwrap();
    write_mv_csv(&path, &d, Some(&truth)).unwrap();
    path.to_str().unwrap().to_owned()
}

fn fd_input(dir: &Path) -> String {
    let path = dir.join("f.csv");
    let (d, _) = gen_fd(&FdScenario {
        grid_size: 50,
        per_class: 20,
        seed: 3,
    })
    .unwrap();
    write_fd_csv(&path, &d).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn cluster_hard_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = mv_input(dir.path(), 50);
    let out = dir.path().join("out");
    let o = run(&[
        "cluster",
        "--input",
        &input,
        "--k",
        "3",
        "--m",
        "25",
        "--seed",
        "1",
        "--truth-col",
        "truth",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let labels = fs::read_to_string(out.join("labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 60);
    assert!(labels.lines().all(|l| ["1", "2", "3"].contains(&l)));

    let weights = fs::read_to_string(out.join("weights.csv")).unwrap();
    let w: Vec<f64> = weights
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(w.len(), 50);
    assert_eq!(w.iter().filter(|&&x| x == 0.0).count(), 25);

    let s = summary(&out);
    assert_eq!(s["schema"], 1);
    assert_eq!(s["zeros"], 25);
    assert!(s["cer"].as_f64().unwrap() <= 0.2);
    assert!(!s["objective_trace"].as_array().unwrap().is_empty());
    assert!(s["converged"].is_boolean());
}

#[test]
fn cluster_soft_reports_budget() {
    let dir = tempfile::tempdir().unwrap();
    let input = mv_input(dir.path(), 30);
    let out = dir.path().join("soft");
    let o = run(&[
        "cluster",
        "--input",
        &input,
        "--k",
        "3",
        "--method",
        "soft",
        "--s",
        "4",
        "--truth-col",
        "31",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["method"], "soft");
    assert!(s["l1"].as_f64().unwrap() <= 4.0 + 1e-8);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = mv_input(dir.path(), 20);
    let read = |name: &str| {
        let out = dir.path().join(name);
        let o = run(&[
            "cluster",
            "--input",
            &input,
            "--k",
            "3",
            "--m",
            "10",
            "--seed",
            "9",
            "--truth-col",
            "truth",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        ["labels.csv", "weights.csv", "summary.json"].map(|f| fs::read(out.join(f)).unwrap())
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn missing_input_exits_2_naming_path() {
    let o = run(&[
        "cluster",
        "--input",
        "/nonexistent/data.csv",
        "--k",
        "3",
        "--m",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/data.csv"));
}

#[test]
fn inconsistent_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = mv_input(dir.path(), 20);
    let o = run(&[
        "cluster",
        "--input",
        &input,
        "--k",
        "3",
        "--truth-col",
        "truth",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "cluster",
        "--input",
        &input,
        "--k",
        "3",
        "--m",
        "20",
        "--truth-col",
        "truth",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sparsity parameter 20"));
}

#[test]
fn fcluster_reports_support() {
    let dir = tempfile::tempdir().unwrap();
    let input = fd_input(dir.path());
    let out = dir.path().join("fd");
    let o = run(&[
        "fcluster",
        "--input",
        &input,
        "--k",
        "2",
        "--m",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let wf = fs::read_to_string(out.join("weight_function.csv")).unwrap();
    assert_eq!(wf.lines().next(), Some("x,w"));
    assert_eq!(wf.lines().count(), 51);
    let s = summary(&out);
    let iv = s["support_intervals"].as_array().unwrap();
    assert!(!iv.is_empty());
    assert!(s["zero_measure"].as_f64().unwrap() >= 0.5 - 1e-12);
    assert_eq!(
        fs::read_to_string(out.join("labels.csv"))
            .unwrap()
            .lines()
            .count(),
        40
    );
}

#[test]
fn identical_curves_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.csv");
    fs::write(&path, "0,0.5,1\n1,1,1\n1,1,1\n1,1,1\n").unwrap();
    let o = run(&[
        "fcluster",
        "--input",
        path.to_str().unwrap(),
        "--k",
        "2",
        "--m",
        "0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tune_writes_gap_curve() {
    let dir = tempfile::tempdir().unwrap();
    let input = mv_input(dir.path(), 20);
    let out = dir.path().join("tune");
    let o = run(&[
        "tune",
        "--input",
        &input,
        "--k",
        "3",
        "--truth-col",
        "truth",
        "--m-grid",
        "0,10,15",
        "--b-perms",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let curve = fs::read_to_string(out.join("gap_curve.csv")).unwrap();
    assert_eq!(curve.lines().next(), Some("m,gap,obs,perm_mean,perm_sd"));
    assert_eq!(curve.lines().count(), 4);
    let m = summary(&out)["m"].as_u64().unwrap();
    assert!([0, 10, 15].contains(&m));
}

#[test]
fn tune_functional() {
    let dir = tempfile::tempdir().unwrap();
    let input = fd_input(dir.path());
    let o = run(&[
        "tune",
        "--input",
        &input,
        "--k",
        "2",
        "--functional",
        "--m-grid",
        "0.3,0.6",
        "--b-perms",
        "2",
        "--n-subdomains",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = summary(dir.path())["m"].as_f64().unwrap();
    assert!(m == 0.3 || m == 0.6);
}

#[test]
fn simulate_tab2_single_run_na() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "simulate",
        "tab2",
        "--runs",
        "1",
        "--seed",
        "7",
        "--grid-size",
        "60",
        "--na-sd",
        "--dump-data",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(dir.path().join("tab2.csv")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "method,mean_cer,sd_cer");
    assert!(rows[1].starts_with("std,") && rows[1].ends_with(",NA"));
    assert!(rows[2].starts_with("sparse,"));
    assert!(dir.path().join("tab2_data_1.csv").exists());
    assert_eq!(
        fs::read_to_string(dir.path().join("tab2_runs.csv"))
            .unwrap()
            .lines()
            .count(),
        2
    );
}

#[test]
fn simulate_tab1_fixed_levels() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "simulate",
        "tab1",
        "--p",
        "20",
        "--runs",
        "2",
        "--m",
        "10",
        "--s",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(dir.path().join("tab1.csv")).unwrap();
    let methods: Vec<&str> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(methods, ["std", "soft", "hard"]);
}
