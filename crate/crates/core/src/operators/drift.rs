use std::sync::Arc;

use super::cost::PhiCost;
use super::reference::ReferenceModel;
use super::{check_time, StepOperator};
use crate::error::{domain, Result};
use crate::funcspace::GridFunction;

/// Drift perturbation
/// `(J(t) f)(x) = max_b ( ∫ f(ψ_t(x) + y + b t) μ_t(dy) - φ_t(|b| t) )`
/// over a finite drift grid, with `φ_t(|b| t) = t φ(|b|)`.
#[derive(Debug, Clone)]
pub struct DriftStep {
    pub model: Arc<ReferenceModel>,
    pub phi: Arc<PhiCost>,
    b_grid: Vec<f64>,
}

impl DriftStep {
    pub fn new(model: ReferenceModel, phi: PhiCost, b_grid: Vec<f64>) -> Result<Self> {
        if b_grid.is_empty() {
            return domain("empty drift grid");
        }
        if !b_grid.contains(&0.0) {
            return domain("drift grid must contain 0");
        }
        if b_grid.iter().any(|b| !b.is_finite()) {
            return domain("drift grid must be finite");
        }
        Ok(DriftStep {
            model: Arc::new(model),
            phi: Arc::new(phi),
            b_grid,
        })
    }

    pub fn b_grid(&self) -> &[f64] {
        &self.b_grid
    }

    /// `W_p(μ_t, ν_b)` of the shifted measure used for drift `b`.
    pub fn realized_distance(b: f64, t: f64) -> f64 {
        b.abs() * t
    }
}

impl StepOperator for DriftStep {
    fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        check_time(t)?;
        let v = f.require_continuous("drift step")?;
        let law = self.model.law(t)?;
        let mut best = vec![f64::NEG_INFINITY; v.len()];
        for &b in &self.b_grid {
            let penalty = self.phi.phi_t(t, b.abs() * t);
            if !penalty.is_finite() {
                continue;
            }
            let k = super::Transition::new(f.grid(), &law.shifted(b * t), self.model.discretization())?;
            for (o, e) in best.iter_mut().zip(k.apply(v)) {
                *o = o.max(e - penalty);
            }
        }
        f.with_values(best)
    }

    fn name(&self) -> &str {
        "drift"
    }
}

pub fn drift_step(
    model: &ReferenceModel,
    phi: &PhiCost,
    t: f64,
    f: &GridFunction,
    b_grid: &[f64],
) -> Result<GridFunction> {
    DriftStep::new(model.clone(), phi.clone(), b_grid.to_vec())?.apply(t, f)
}
