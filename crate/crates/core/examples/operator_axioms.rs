//! Structural checks of a model's one-step family, loaded from a model file.

use std::sync::Arc;

use semigroup_lab::experiments::Probe;
use semigroup_lab::operators::model_file::ModelFile;
use semigroup_lab::operators::{check_axioms, AxiomSettings};

fn main() -> semigroup_lab::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/models/control.toml".into());
    let mut model = ModelFile::load(path.as_ref())?;
    model.dx = 0.05;
    let grid = Arc::new(model.grid()?);
    let step = model.step_operator()?;
    let probes = Probe::CORPUS.iter().map(|p| p.on(&grid)).collect::<Result<Vec<_>, _>>()?;
    let s = AxiomSettings {
        t: 0.25,
        l: 0.0,
        window: 2.0,
        tolerance: 1e-9,
        grid_allowance: 0.0,
    };
    for row in check_axioms(step.as_ref(), &probes, &s)? {
        println!("{:<12} {:<22} worst {:>10.3e} {}", row.operator, format!("{:?}", row.axiom), row.worst, if row.pass { "ok" } else { "FAIL" });
    }
    Ok(())
}
