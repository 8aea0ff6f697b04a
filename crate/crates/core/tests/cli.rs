use std::path::Path;
use std::process::{Command, Output};

fn linchpin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linchpin")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.conf", "model = rosenbrock\nn = 500\nseed = 3\n");
    let out_dir = dir.path().join("out");
    let out = linchpin(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("rosenbrock_linchpin.csv")).unwrap();
    assert!(csv.starts_with("iter,x,y,accepted\n"));
    assert_eq!(csv.lines().count(), 501);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("rosenbrock_linchpin.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 3);
    assert_eq!(summary["rows"], 500);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.conf", "model = gaussian\nn = 300\nseed = 3\n");
    let read = |seed: &str, sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = linchpin(&["run", "--config", &cfg, "--seed", seed, "--out", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(out_dir.join("gaussian_linchpin.csv")).unwrap()
    };
    assert_eq!(read("9", "a"), read("9", "b"));
    assert_ne!(read("9", "a"), read("10", "c"));
}

#[test]
fn compare_validate_enumerate_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = out_dir.to_str().unwrap();
    let g = write_config(dir.path(), "g.conf", "model = gaussian\ncompare = gibbs\nn = 400\n");
    assert_eq!(linchpin(&["compare", "--config", &g, "--out", out]).status.code(), Some(0));
    assert!(out_dir.join("gaussian_compare.json").exists());

    let r = write_config(dir.path(), "r.conf", "model = rosenbrock\nvalidate.nonreversible = true\n");
    assert_eq!(linchpin(&["validate", "--config", &r, "--out", out]).status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("rosenbrock_validation.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["reversibility_agrees"], true);

    let s = write_config(dir.path(), "s.conf", "model = spike-slab\n");
    assert_eq!(linchpin(&["enumerate", "--config", &s, "--out", out]).status.code(), Some(0));
    assert!(out_dir.join("spike-slab_enumeration.csv").exists());
}

#[test]
fn usage_and_config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(linchpin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(linchpin(&["run"]).status.code(), Some(1));
    let missing = dir.path().join("nope.conf");
    assert_eq!(linchpin(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(1));

    for text in [
        "model = rosenbrock\nthin = 0\n",
        "model = rosenbrock\nbogus = 1\n",
        "n = 10\n",
        "model = spike-slab\nsampler = gibbs\n",
        "model = rosenbrock\nn = 10\nn = 20\n",
    ] {
        let cfg = write_config(dir.path(), "bad.conf", text);
        let out = linchpin(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "config {text:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
    // Validation is only defined on finite instances.
    let cfg = write_config(dir.path(), "g.conf", "model = gaussian\n");
    assert_eq!(linchpin(&["validate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn runtime_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // A data file that does not exist is discovered while building the model.
    let cfg = write_config(dir.path(), "l.conf", "model = linear\nmodel.data = /nonexistent/data.csv\n");
    assert_eq!(linchpin(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]).status.code(), Some(2));
}
