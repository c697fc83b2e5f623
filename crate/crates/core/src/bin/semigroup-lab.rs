use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use semigroup_lab::experiments::{self, ExperimentConfig, ExperimentKind, Outcome};
use semigroup_lab::LabError;

#[derive(Parser)]
#[command(name = "semigroup-lab", version, about = "Chernoff, generator and comparison experiments for convex monotone semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chernoff iteration of a model's one-step family, optionally against an oracle.
    ChernoffRun(Common),
    /// Γ-generator difference quotients and Lipschitz-set classification.
    GenCheck(Common),
    /// Chernoff limit of a control model against a finite-difference HJB solution.
    HjbCompare(Common),
    /// Drift and Wasserstein perturbations of a reference semigroup.
    WassersteinCompare(Common),
    /// Transport inequality for Gaussian families.
    Talagrand(Common),
    /// Γ-limit calculus on a seeded random corpus.
    GammaDemo(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for report.json, tables/ and MANIFEST.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the main check tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Print nothing; the exit code carries the result.
    #[arg(long)]
    quiet: bool,
}

impl Command {
    fn split(self) -> (ExperimentKind, Common) {
        match self {
            Command::ChernoffRun(c) => (ExperimentKind::ChernoffRun, c),
            Command::GenCheck(c) => (ExperimentKind::GenCheck, c),
            Command::HjbCompare(c) => (ExperimentKind::HjbCompare, c),
            Command::WassersteinCompare(c) => (ExperimentKind::WassersteinCompare, c),
            Command::Talagrand(c) => (ExperimentKind::Talagrand, c),
            Command::GammaDemo(c) => (ExperimentKind::GammaDemo, c),
        }
    }
}

const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;

fn config(kind: ExperimentKind, args: &Common) -> Result<ExperimentConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => ExperimentConfig::new(kind),
    };
    if cfg.experiment != kind {
        return Err(format!(
            "config describes {}, not {}",
            cfg.experiment.name(),
            kind.name()
        ));
    }
    if args.tolerance.is_some() {
        cfg.tolerance = args.tolerance;
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn summary(o: &Outcome) {
    let r = &o.report;
    println!("{}: {}", r.experiment, if r.passed { "PASS" } else { "FAIL" });
    if let Some(h) = &r.model_hash {
        println!("  model {}", &h[..12]);
    }
    for c in &r.checks {
        println!(
            "  [{}] {} = {:.3e} (tolerance {:.3e})",
            if c.pass { "ok" } else { "!!" },
            c.name,
            c.value,
            c.tolerance
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    let cfg = match config(kind, &args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("semigroup-lab: {e}");
            return ExitCode::from(USAGE);
        }
    };
    let result = match &cfg.out {
        Some(dir) => experiments::run_to_dir(&cfg, dir).map(|(o, _)| o),
        None => experiments::run(&cfg),
    };
    match result {
        Ok(o) => {
            if !args.quiet {
                summary(&o);
                if let Some(dir) = &cfg.out {
                    println!("  wrote {}", dir.display());
                }
            }
            ExitCode::from(if o.report.passed { PASS } else { FAIL })
        }
        Err(e) => {
            eprintln!("semigroup-lab: {e}");
            let code = match e {
                LabError::Config(_) | LabError::Io(_) => USAGE,
                _ => FAIL,
            };
            ExitCode::from(code)
        }
    }
}
