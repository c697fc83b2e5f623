//! Named experiments behind the `semigroup-lab` binary.
//!
//! Each experiment reads an [`ExperimentConfig`], runs to an [`Outcome`]
//! and can be written to a directory as `report.json`, `tables/*.csv` and
//! a `MANIFEST.json` of SHA-256 digests.

mod config;
mod gamma_suite;
mod output;
mod probes;
mod runs;
mod talagrand;

use std::path::Path;

pub use config::{
    ChainSection, ExperimentConfig, ExperimentKind, GammaSection, GeneratorSection, GridSection, HjbSection,
    OracleKind, RunSection, TalagrandSection,
};
pub use gamma_suite::{gamma_suite, GammaCaseRow, GammaProperty};
pub use output::{write_atomic, write_outcome, Check, Manifest, ManifestEntry, Outcome, Report, Table, MANIFEST};
pub use probes::Probe;
pub use runs::loglog_slope;
pub use talagrand::{talagrand_table, TalagrandRow};

use crate::error::Result;

/// Runs the experiment named in `cfg`.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::ChernoffRun => runs::chernoff_run_exp(cfg),
        ExperimentKind::GenCheck => runs::gen_check(cfg),
        ExperimentKind::HjbCompare => runs::hjb_compare(cfg),
        ExperimentKind::WassersteinCompare => runs::wasserstein_compare(cfg),
        ExperimentKind::Talagrand => talagrand::talagrand(cfg),
        ExperimentKind::GammaDemo => gamma_suite::gamma_demo(cfg),
    }
}

/// Runs `cfg` and writes its artifacts into `dir`. The recorded config hash
/// ignores `out`.
pub fn run_to_dir(cfg: &ExperimentConfig, dir: &Path) -> Result<(Outcome, Manifest)> {
    let outcome = run(cfg)?;
    let mut hashed = cfg.clone();
    hashed.out = None;
    let manifest = write_outcome(dir, &outcome, &serde_json::to_vec(&hashed)?)?;
    Ok((outcome, manifest))
}
