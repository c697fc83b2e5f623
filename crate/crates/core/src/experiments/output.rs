use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    /// Passes when `value >= tolerance`.
    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            pass: value >= tolerance,
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            tolerance: 1.0,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub model_hash: Option<String>,
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Experiment-specific results.
    pub details: serde_json::Value,
}

impl Report {
    pub fn new(experiment: &str, model_hash: Option<String>, tolerance: f64, checks: Vec<Check>, details: serde_json::Value) -> Self {
        Report {
            experiment: experiment.to_string(),
            model_hash,
            tolerance,
            passed: checks.iter().all(|c| c.pass),
            checks,
            details,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// A CSV table held in memory until the run is written out.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Table {
    pub fn from_rows<T: Serialize>(name: &str, rows: &[T]) -> Result<Self> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
        Ok(Table {
            name: name.to_string(),
            bytes,
        })
    }

    /// A numeric table with the given header.
    pub fn from_columns(name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<Self> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r.iter().map(|v| v.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
        Ok(Table {
            name: name.to_string(),
            bytes,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub tables: Vec<Table>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub model_hash: Option<String>,
    pub config_hash: String,
    pub passed: bool,
    pub files: Vec<ManifestEntry>,
}

pub const MANIFEST: &str = "MANIFEST.json";

fn sha(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to a temporary sibling, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes `report.json`, `tables/*.csv` and `MANIFEST.json` into `dir`.
///
/// An existing manifest for a different model hash in `dir` is an error,
/// so a rerun cannot silently mix artifacts of two models.
pub fn write_outcome(dir: &Path, outcome: &Outcome, config_json: &[u8]) -> Result<Manifest> {
    let manifest_path = dir.join(MANIFEST);
    if manifest_path.exists() {
        let old: Manifest = serde_json::from_slice(&fs::read(&manifest_path)?)?;
        if old.model_hash != outcome.report.model_hash {
            return Err(LabError::Config(format!(
                "{} holds results for model {:?}, not {:?}",
                dir.display(),
                old.model_hash,
                outcome.report.model_hash
            )));
        }
    }
    let mut files = Vec::new();
    let mut report = serde_json::to_vec_pretty(&outcome.report)?;
    report.push(b'\n');
    write_atomic(&dir.join("report.json"), &report)?;
    files.push(ManifestEntry {
        path: "report.json".into(),
        sha256: sha(&report),
    });
    for t in &outcome.tables {
        let rel = format!("tables/{}.csv", t.name);
        write_atomic(&dir.join(&rel), &t.bytes)?;
        files.push(ManifestEntry {
            path: rel,
            sha256: sha(&t.bytes),
        });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: outcome.report.experiment.clone(),
        model_hash: outcome.report.model_hash.clone(),
        config_hash: sha(config_json),
        passed: outcome.report.passed,
        files,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    write_atomic(&manifest_path, &bytes)?;
    Ok(manifest)
}
