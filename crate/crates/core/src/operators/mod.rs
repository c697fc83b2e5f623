//! One-step operator families `I(t)` and their closed-form companions.
//!
//! Every step acts on continuous grid functions extended by their boundary
//! values. Expectations go through a lattice [`Transition`]; see
//! [`Discretization`] for the two available kernels.

mod axioms;
mod control;
mod cost;
mod drift;
mod entropic;
mod hjb;
pub mod model_file;
mod quadrature;
mod reference;
mod transition;
mod transport;
mod wasserstein;

pub use axioms::{check_axioms, Axiom, AxiomRow, AxiomSettings};
pub use control::{control_step, ControlStep};
pub use cost::{
    legendre_conjugate, symmetric_grid, ConjugateSource, Control, ControlCost, PhiCost, PhiShape,
    DEFAULT_V_MAX, DEFAULT_V_STEP,
};
pub use drift::{drift_step, DriftStep};
pub use entropic::{entropic_exact, Entropic};
pub use hjb::{hjb_fd_oracle, hjb_max_dt, HjbScheme};
pub use quadrature::{QuadratureRule, DEFAULT_NODES};
pub use reference::{
    drift_map_constant, reference_step, MeasureFamily, RPrimeForm, ReferenceModel, ReferenceStep,
};
pub use transition::{Discretization, Law, Noise, Transition};
pub use transport::{relative_entropy, w2_1d, Measure1d};
pub use wasserstein::{wasserstein_step, WassersteinStep, DEFAULT_MULTIPLIERS};

use crate::error::{domain, Result};
use crate::funcspace::GridFunction;

/// A family `t ↦ I(t)` of operators on grid functions.
pub trait StepOperator: Send + Sync {
    fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction>;

    fn name(&self) -> &str;
}

impl<T: StepOperator + ?Sized> StepOperator for std::sync::Arc<T> {
    fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        (**self).apply(t, f)
    }

    fn name(&self) -> &str {
        (**self).name()
    }
}

impl<T: StepOperator + ?Sized> StepOperator for &T {
    fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        (**self).apply(t, f)
    }

    fn name(&self) -> &str {
        (**self).name()
    }
}

/// `I(t) f = f`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityStep;

impl StepOperator for IdentityStep {
    fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        check_time(t)?;
        Ok(f.clone())
    }

    fn name(&self) -> &str {
        "identity"
    }
}

/// Pure translation `(I(t) f)(x) = f(x + c t)` with linear interpolation.
#[derive(Debug, Clone, Copy)]
pub struct ShiftStep {
    pub speed: f64,
}

impl StepOperator for ShiftStep {
    fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        check_time(t)?;
        let v = f.require_continuous("shift step")?;
        let g = f.grid();
        let out = g.points().map(|x| g.interpolate(v, x + self.speed * t)).collect();
        f.with_values(out)
    }

    fn name(&self) -> &str {
        "shift"
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("time must be finite and nonnegative, got {t}"));
    }
    Ok(())
}
