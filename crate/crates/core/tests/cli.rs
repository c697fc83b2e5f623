use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semigroup-lab")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const TINY_MODEL: &str = r#"
model = "control"
span = 3.0
dx = 0.1
discretization = "lattice"

[controls]
a = [1.0]
b = [-1.0, 0.0, 1.0]

[L]
kind = "quadratic"
"#;

fn tiny_config(dir: &Path, model: &str) -> String {
    fs::write(dir.join("model.toml"), model).unwrap();
    let cfg = dir.join("run.toml");
    fs::write(
        &cfg,
        "experiment = \"chernoff-run\"\nmodel = \"model.toml\"\n\n[run]\nt = 0.25\nfirst = 1\nlast = 3\n",
    )
    .unwrap();
    cfg.to_str().unwrap().to_string()
}

#[test]
fn passing_runs_exit_zero() {
    let o = lab(&["talagrand"]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(String::from_utf8_lossy(&o.stdout).contains("talagrand: PASS"));
    let q = lab(&["gamma-demo", "--quiet"]);
    assert_eq!(code(&q), 0);
    assert!(q.stdout.is_empty());
}

#[test]
fn failed_checks_exit_one() {
    let o = lab(&["gamma-demo", "--tolerance", "1e-300", "--quiet"]);
    assert_eq!(code(&o), 1, "{o:?}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&lab(&[])), 2);
    assert_eq!(code(&lab(&["talagrand", "--bogus"])), 2);
    assert_eq!(code(&lab(&["talagrand", "--tolerance", "-1"])), 2);
    // needs a model and none is given
    assert_eq!(code(&lab(&["chernoff-run"])), 2);
    assert_eq!(code(&lab(&["talagrand", "--config", "/nonexistent.toml"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path(), TINY_MODEL);
    // the config describes a different experiment
    assert_eq!(code(&lab(&["gen-check", "--config", &cfg])), 2);
}

#[test]
fn writes_artifacts_and_refuses_a_foreign_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path(), TINY_MODEL);
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    let o = lab(&["chernoff-run", "--config", &cfg, "--out", out_s, "--quiet"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["report.json", "MANIFEST.json", "tables/convergence.csv", "tables/profile.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let first = fs::read(out.join("MANIFEST.json")).unwrap();
    // same model: resuming into the directory is fine and reproduces the files
    assert_eq!(code(&lab(&["chernoff-run", "--config", &cfg, "--out", out_s, "--quiet"])), 0);
    assert_eq!(fs::read(out.join("MANIFEST.json")).unwrap(), first);

    let cfg = tiny_config(dir.path(), &TINY_MODEL.replace("dx = 0.1", "dx = 0.05"));
    let o = lab(&["chernoff-run", "--config", &cfg, "--out", out_s]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("holds results for model"));
}
