//! Runs an experiment config and writes its report, tables and manifest.
//!
//! `cargo run --release --example run_experiment -- configs/talagrand.toml /tmp/talagrand`

use std::path::PathBuf;

use semigroup_lab::experiments::{run_to_dir, ExperimentConfig};

fn main() -> semigroup_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = PathBuf::from(args.next().unwrap_or_else(|| "configs/gamma-demo.toml".into()));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("semigroup-lab-run"));
    let cfg = ExperimentConfig::load(&config)?;
    let (outcome, manifest) = run_to_dir(&cfg, &out)?;
    for c in &outcome.report.checks {
        println!("{:<28} {:>11.3e}  {}", c.name, c.value, if c.pass { "ok" } else { "FAIL" });
    }
    for f in &manifest.files {
        println!("{}  {}", &f.sha256[..16], f.path);
    }
    Ok(())
}
