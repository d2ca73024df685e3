use std::process::{Command, Output};

use cographon::bijection::is_cograph;
use cographon::LabeledGraph;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cographon")).env_remove("COGRAPHON_SEED").args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_lines(o: &Output) -> Vec<String> {
    stdout(o).lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
}

fn column(o: &Output, idx: usize) -> Vec<String> {
    data_lines(o).iter().skip(1).map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn count_tables() {
    let o = run(&["count", "unlabelled", "--max", "10"]);
    assert!(o.status.success());
    assert_eq!(column(&o, 2), ["1", "1", "2", "5", "12", "33", "90", "261", "766", "2312"]);
    let o = run(&["count", "labelled", "--max", "5"]);
    assert_eq!(column(&o, 2), ["1", "1", "4", "26", "236"]);
    assert_eq!(column(&o, 3), ["1", "2", "8", "52", "472"]);
    assert!(stdout(&o).starts_with("# {"), "metadata header first");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["count", "labelled", "--max", "0"][..],
        &["sample", "unlabelled", "-n", "2"],
        &["sample", "limit", "-k", "3", "-p", "1.0"],
        &["experiment", "bogus"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = run(&["experiment", "bogus"]);
    let err = String::from_utf8(o.stderr).unwrap();
    for name in ["shape", "parity", "distance", "density", "llt"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn constants_are_valid_and_deterministic() {
    let a = run(&["constants", "--tol", "1e-12"]);
    assert!(a.status.success());
    let doc: Value = serde_json::from_str(&stdout(&a)).unwrap();
    let rho = doc["constants"]["rho"]["value"].as_f64().unwrap();
    assert!(rho > 0.0 && rho < 1.0);
    assert!(doc["constants"]["residual_ey"].as_f64().unwrap() < 1e-12);
    assert_eq!(stdout(&a), stdout(&run(&["constants", "--tol", "1e-12"])));
}

#[test]
fn samples_are_reproducible_and_seeded() {
    let a = run(&["sample", "labelled", "-n", "100", "--count", "10", "--seed", "7"]);
    assert!(a.status.success());
    let lines = data_lines(&a);
    assert_eq!(lines.len(), 11);
    let meta: Value = serde_json::from_str(&lines[0]).unwrap();
    assert_eq!(meta["meta"]["seed"], 7);
    for l in &lines[1..] {
        let v: Value = serde_json::from_str(l).unwrap();
        let g = LabeledGraph::from_json(&v["graph"].to_string()).unwrap();
        assert_eq!(g.n(), 100);
        assert!(is_cograph(&g));
    }
    assert_eq!(stdout(&a), stdout(&run(&["sample", "labelled", "-n", "100", "--count", "10", "--seed", "7"])));

    // the environment supplies the default, the flag wins
    let env = |seed: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_cographon")).env("COGRAPHON_SEED", seed).args(args).output().unwrap()
    };
    let base = ["sample", "unlabelled", "-n", "20", "--count", "3"];
    let from_env = env("7", &base);
    let flagged = env("8", &[&base[..], &["--seed", "7"]].concat());
    assert_eq!(stdout(&from_env), stdout(&flagged));
    assert_ne!(stdout(&from_env), stdout(&env("8", &base)));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["sample", "unlabelled", "-n", "30", "--count", "12", "--seed", "3"];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let three = run(&[&args[..], &["--threads", "3"]].concat());
    assert_eq!(stdout(&one), stdout(&three));
}

#[test]
fn limit_samples_avoid_p4() {
    let o = run(&["sample", "limit", "-k", "4", "-p", "0.5", "--count", "1000", "--format", "edges"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let blocks: Vec<&str> = text.split("# sample").skip(1).collect();
    assert_eq!(blocks.len(), 1000);
    for b in blocks {
        let g = LabeledGraph::from_edge_list(b.split_once('\n').unwrap().1).unwrap();
        assert_eq!(g.n(), 4);
        assert!(is_cograph(&g));
    }
}

#[test]
fn density_of_files_and_limit_law() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let h = dir.path().join("h.txt");
    std::fs::write(&g, LabeledGraph::complete(5).to_json().to_string()).unwrap();
    std::fs::write(&h, "n=2\n1 2\n").unwrap();
    let o = run(&["density", "--graph", g.to_str().unwrap(), "--pattern", h.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["value"], 1.0);
    assert_eq!(v["method"], "exact");

    let o = run(&["density", "--limit", "-k", "3", "-p", "1/2"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["law"]["table"]["{1-2,1-3,2-3}"], "1/4");
}

#[test]
fn density_experiment_reports_edge_density() {
    let o = run(&["experiment", "density", "--model", "labelled", "-n", "1000", "--reps", "300", "-k", "2", "--seed", "5"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let e = &v["report"]["details"]["edge_density"];
    let (mean, se) = (e["mean"].as_f64().unwrap(), e["stderr"].as_f64().unwrap());
    assert!(se > 0.0 && se < 0.03);
    assert!((mean - 0.5).abs() < 4.0 * se, "{mean} ± {se}");
    assert_eq!(v["meta"]["seed"], 5);
}

#[test]
fn parity_experiment_as_csv() {
    let o = run(&[
        "experiment", "parity", "--model", "unlabelled", "-n", "5000", "-k", "2", "--reps", "2000", "--window", "0.1",
        "--format", "csv",
    ]);
    let lines = data_lines(&o);
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("test,model,n,k"));
    assert!(lines[1].starts_with("parity,unlabelled,5000,2,2000,"));
    assert_eq!(o.status.code(), Some(if lines[1].contains(",true,") { 0 } else { 1 }));
}

#[test]
fn oracle_passes() {
    let o = run(&["oracle"]);
    assert!(o.status.success());
    assert!(data_lines(&o).iter().skip(1).all(|l| l.contains("\"pass\":true")));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.csv");
    let o = run(&["count", "labelled", "--max", "3", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("3,2/3,4,8"));
}
