//! TOML model descriptions.
//!
//! ```toml
//! model = "wasserstein"      # control | wasserstein | drift | reference | entropic
//! kappa = "unit"             # or "decaying"
//! span = 8.0
//! dx = 0.02
//! discretization = "lattice" # or "quadrature"
//! quadrature_nodes = 33
//!
//! [reference]
//! rho = 0.0
//! measure = { kind = "gaussian", var_rate = 1.0, mean_rate = 0.0 }
//!
//! [phi]
//! p = 2.0
//! shape = { kind = "power", coef = 0.5, q = 2.0 }
//!
//! [wasserstein]
//! z_max = 1.5
//! rate_max = 2.0             # per-atom moves t·b, b in [-rate_max, rate_max]
//! rate_step = 0.02
//! ```
//!
//! Control models take `[controls]` with `a` and `b` lists and the running
//! cost `L`, one of
//! `{ kind = "quadratic", alpha, beta, a0 }` for `α (a - a0)² + β b²/2` or
//! `{ kind = "table", values }` with one row per `a` (entries `inf` drop the
//! control).

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::cost::{symmetric_grid, Control, ControlCost, PhiCost, PhiShape};
use super::quadrature::QuadratureRule;
use super::reference::{MeasureFamily, ReferenceModel, ReferenceStep};
use super::transition::Discretization;
use super::{ControlStep, DriftStep, Entropic, StepOperator, WassersteinStep, DEFAULT_MULTIPLIERS};
use crate::error::{domain, LabError, Result};
use crate::funcspace::{Weight, WeightedGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Control,
    Wasserstein,
    Drift,
    Reference,
    Entropic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscKind {
    #[default]
    Quadrature,
    Lattice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSection {
    #[serde(default)]
    pub rho: f64,
    pub measure: MeasureFamily,
    /// Drift-map Lipschitz constant; the smallest admissible one by default.
    #[serde(default)]
    pub lipschitz: Option<f64>,
}

impl Default for ReferenceSection {
    fn default() -> Self {
        ReferenceSection {
            rho: 0.0,
            measure: MeasureFamily::Gaussian {
                var_rate: 1.0,
                mean_rate: 0.0,
            },
            lipschitz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RunningCost {
    Quadratic {
        #[serde(default)]
        alpha: f64,
        #[serde(default = "one")]
        beta: f64,
        #[serde(default = "one")]
        a0: f64,
    },
    Table { values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlsSection {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSection {
    #[serde(default = "two")]
    pub p: f64,
    pub shape: PhiShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSection {
    pub b_max: f64,
    pub db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WassersteinSection {
    #[serde(default = "z_max")]
    pub z_max: f64,
    /// Largest budget on the budget grid; `z_max` by default.
    #[serde(default)]
    pub budget_max: Option<f64>,
    /// Budget grid step; `dx` by default.
    #[serde(default)]
    pub budget_step: Option<f64>,
    #[serde(default = "multipliers")]
    pub multipliers: usize,
    /// Per-atom moves `t b` for `b` on `symmetric_grid(rate_max, rate_step)`;
    /// `rate_max = 0` turns them off.
    #[serde(default = "rate_max")]
    pub rate_max: f64,
    #[serde(default = "rate_step")]
    pub rate_step: f64,
}

impl Default for WassersteinSection {
    fn default() -> Self {
        WassersteinSection {
            z_max: z_max(),
            budget_max: None,
            budget_step: None,
            multipliers: DEFAULT_MULTIPLIERS,
            rate_max: rate_max(),
            rate_step: rate_step(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropicSection {
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub var_rate: f64,
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn z_max() -> f64 {
    1.5
}

fn rate_max() -> f64 {
    2.0
}

fn rate_step() -> f64 {
    0.02
}

fn multipliers() -> usize {
    DEFAULT_MULTIPLIERS
}

fn nodes() -> usize {
    super::DEFAULT_NODES
}

fn unit() -> Weight {
    Weight::Unit
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub model: ModelKind,
    #[serde(default = "unit")]
    pub kappa: Weight,
    pub span: f64,
    pub dx: f64,
    #[serde(default)]
    pub discretization: DiscKind,
    #[serde(default = "nodes")]
    pub quadrature_nodes: usize,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub running_cost: Option<RunningCost>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controls: Option<ControlsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wasserstein: Option<WassersteinSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropic: Option<EntropicSection>,
}

impl ModelFile {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let m: ModelFile = toml::from_str(s).map_err(|e| LabError::Config(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Config(e.to_string()))
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> Result<String> {
        let json = serde_json::to_vec(self)?;
        Ok(hex::encode(Sha256::digest(&json)))
    }

    fn validate(&self) -> Result<()> {
        self.grid()?;
        self.discretization()?;
        let need = |present: bool, what: &str| {
            if present {
                Ok(())
            } else {
                Err(LabError::Config(format!("{:?} model needs {what}", self.model)))
            }
        };
        match self.model {
            ModelKind::Control => {
                need(self.controls.is_some(), "[controls]")?;
                need(self.running_cost.is_some(), "a running cost L")?;
                self.control_cost()?;
            }
            ModelKind::Wasserstein | ModelKind::Drift => {
                need(self.phi.is_some(), "[phi]")?;
                if self.model == ModelKind::Drift {
                    need(self.drift.is_some(), "[drift]")?;
                }
                self.phi_cost()?;
                self.reference_model()?;
            }
            ModelKind::Reference => {
                self.reference_model()?;
            }
            ModelKind::Entropic => {
                self.entropic_step()?;
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<WeightedGrid> {
        Ok(WeightedGrid::symmetric(self.span, self.dx)?.with_weight(self.kappa))
    }

    pub fn discretization(&self) -> Result<Discretization> {
        Ok(match self.discretization {
            DiscKind::Quadrature => {
                Discretization::Quadrature(Arc::new(QuadratureRule::gauss_hermite(self.quadrature_nodes)?))
            }
            DiscKind::Lattice => Discretization::Lattice,
        })
    }

    pub fn reference_model(&self) -> Result<ReferenceModel> {
        let r = self.reference.clone().unwrap_or_default();
        let l = r.lipschitz.unwrap_or_else(|| super::drift_map_constant(r.rho));
        ReferenceModel::new(r.rho, r.measure, l, self.discretization()?)
    }

    pub fn control_cost(&self) -> Result<ControlCost> {
        let (Some(c), Some(l)) = (&self.controls, &self.running_cost) else {
            return Err(LabError::Config("control model needs [controls] and L".into()));
        };
        match l {
            RunningCost::Quadratic { alpha, beta, a0 } => {
                ControlCost::from_grid(&c.a, &c.b, |a, b| alpha * (a - a0).powi(2) + 0.5 * beta * b * b)
            }
            RunningCost::Table { values } => {
                if values.len() != c.a.len() || values.iter().any(|row| row.len() != c.b.len()) {
                    return domain("L table must have one row per a and one column per b");
                }
                let mut controls = Vec::new();
                for (row, &a) in values.iter().zip(&c.a) {
                    for (&cost, &b) in row.iter().zip(&c.b) {
                        if cost.is_finite() {
                            controls.push(Control { a, b, cost });
                        }
                    }
                }
                ControlCost::new(controls)
            }
        }
    }

    pub fn phi_cost(&self) -> Result<PhiCost> {
        let Some(p) = &self.phi else {
            return Err(LabError::Config("missing [phi]".into()));
        };
        PhiCost::new(p.shape.clone(), p.p)
    }

    pub fn drift_grid(&self) -> Result<Vec<f64>> {
        let Some(d) = &self.drift else {
            return Err(LabError::Config("missing [drift]".into()));
        };
        symmetric_grid(d.b_max, d.db)
    }

    pub fn entropic_step(&self) -> Result<Entropic> {
        let e = self.entropic.clone().unwrap_or(EntropicSection {
            gamma: 1.0,
            var_rate: 1.0,
        });
        Entropic::new(e.gamma, e.var_rate, self.discretization()?)
    }

    pub fn wasserstein_step(&self) -> Result<WassersteinStep> {
        let w = self.wasserstein.clone().unwrap_or_default();
        let displacements = symmetric_grid(w.z_max, self.dx)?;
        let top = w.budget_max.unwrap_or(w.z_max);
        let step = w.budget_step.unwrap_or(self.dx);
        if !(step > 0.0) || !(top >= 0.0) {
            return domain("budget grid needs a positive step and a nonnegative maximum");
        }
        let budgets = (0..=(top / step).round() as usize).map(|k| k as f64 * step).collect();
        let rates = if w.rate_max > 0.0 { symmetric_grid(w.rate_max, w.rate_step)? } else { Vec::new() };
        WassersteinStep::new(self.reference_model()?, self.phi_cost()?, displacements, budgets)?
            .with_multipliers(w.multipliers)
            .with_rates(rates)
    }

    /// The one-step operator family described by the file.
    pub fn step_operator(&self) -> Result<Arc<dyn StepOperator>> {
        Ok(match self.model {
            ModelKind::Control => Arc::new(ControlStep::new(self.control_cost()?, self.discretization()?)),
            ModelKind::Wasserstein => Arc::new(self.wasserstein_step()?),
            ModelKind::Drift => Arc::new(DriftStep::new(
                self.reference_model()?,
                self.phi_cost()?,
                self.drift_grid()?,
            )?),
            ModelKind::Reference => Arc::new(ReferenceStep {
                model: Arc::new(self.reference_model()?),
            }),
            ModelKind::Entropic => Arc::new(self.entropic_step()?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WASSERSTEIN: &str = r#"
model = "wasserstein"
span = 4.0
dx = 0.05
discretization = "lattice"

[phi]
shape = { kind = "power", coef = 0.5, q = 2.0 }
"#;

    #[test]
    fn parses_and_hashes() {
        let m = ModelFile::from_toml_str(WASSERSTEIN).unwrap();
        assert_eq!(m.model, ModelKind::Wasserstein);
        assert_eq!(m.step_operator().unwrap().name(), "wasserstein");
        let h = m.hash().unwrap();
        assert_eq!(h.len(), 64);
        let again = ModelFile::from_toml_str(&m.to_toml_string().unwrap()).unwrap();
        assert_eq!(again.hash().unwrap(), h);
    }

    #[test]
    fn control_table_drops_infinite_entries() {
        let s = r#"
model = "control"
span = 2.0
dx = 0.1
L = { kind = "table", values = [[0.0, inf], [1.0, 2.0]] }

[controls]
a = [1.0, 2.0]
b = [0.0, 1.0]
"#;
        let m = ModelFile::from_toml_str(s).unwrap();
        assert_eq!(m.control_cost().unwrap().len(), 3);
    }

    #[test]
    fn rejects_unknown_keys_and_missing_sections() {
        assert!(ModelFile::from_toml_str(&format!("{WASSERSTEIN}\nextra = 1\n")).is_err());
        assert!(ModelFile::from_toml_str("model = \"drift\"\nspan = 2.0\ndx = 0.1\n").is_err());
        assert!(ModelFile::from_toml_str("model = \"entropic\"\nspan = 2.0\ndx = 0.3\n").is_err());
    }
}
