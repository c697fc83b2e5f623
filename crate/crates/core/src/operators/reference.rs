use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::quadrature::QuadratureRule;
use super::transition::{Discretization, Law, Noise, Transition};
use super::StepOperator;
use crate::error::{domain, Result};
use crate::funcspace::GridFunction;

/// Transition measures `μ_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureFamily {
    /// Law of `σ B_t + m t` (Ornstein–Uhlenbeck analogue when the drift map contracts).
    Gaussian { var_rate: f64, mean_rate: f64 },
    /// `δ_{m t}`.
    Dirac { mean_rate: f64 },
    /// Law of `√t Y + m t` for an atomic `Y`.
    ScaledAtoms {
        points: Vec<f64>,
        weights: Vec<f64>,
        mean_rate: f64,
    },
}

/// Infinitesimal form `R'(0) f = ½ σ² f'' + (ρ x + m) f'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RPrimeForm {
    pub diffusion: f64,
    pub drift_const: f64,
    pub drift_linear: f64,
}

impl RPrimeForm {
    pub fn eval(&self, x: f64, d1: f64, d2: f64) -> f64 {
        0.5 * self.diffusion * d2 + (self.drift_linear * x + self.drift_const) * d1
    }
}

/// Reference semigroup `(R(t) f)(x) = ∫ f(ψ_t(x) + y) μ_t(dy)` with
/// `ψ_t(x) = e^{ρ t} x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceModel {
    rho: f64,
    measure: MeasureFamily,
    lipschitz: f64,
    disc: Discretization,
}

/// Smallest `L` with `|e^{ρt} - 1| <= L t` on `t ∈ [0, 1]`.
pub fn drift_map_constant(rho: f64) -> f64 {
    if rho >= 0.0 {
        rho.exp_m1()
    } else {
        -rho
    }
}

impl ReferenceModel {
    pub fn new(rho: f64, measure: MeasureFamily, lipschitz: f64, disc: Discretization) -> Result<Self> {
        let m = ReferenceModel {
            rho,
            measure,
            lipschitz,
            disc,
        };
        m.check_invariants()?;
        Ok(m)
    }

    /// Brownian motion with variance rate `var_rate` and identity drift map.
    pub fn brownian(var_rate: f64, disc: Discretization) -> Result<Self> {
        Self::new(0.0, MeasureFamily::Gaussian { var_rate, mean_rate: 0.0 }, 0.0, disc)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn measure(&self) -> &MeasureFamily {
        &self.measure
    }

    /// Constant `L` of the drift-map Lipschitz defect.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn with_discretization(&self, disc: Discretization) -> Self {
        ReferenceModel { disc, ..self.clone() }
    }

    pub fn psi(&self, t: f64, x: f64) -> f64 {
        (self.rho * t).exp() * x
    }

    /// `∫_0^t e^{ρ s} ds`, which is `t` when `ρ = 0`.
    fn growth(&self, t: f64) -> f64 {
        if self.rho == 0.0 {
            t
        } else {
            (self.rho * t).exp_m1() / self.rho
        }
    }

    fn check_invariants(&self) -> Result<()> {
        if !self.rho.is_finite() || !(self.lipschitz >= 0.0) {
            return domain("drift rate must be finite and L nonnegative");
        }
        let need = drift_map_constant(self.rho);
        if self.lipschitz < need * (1.0 - 1e-12) {
            return domain(format!(
                "configured L = {} is below the drift-map defect constant {need}",
                self.lipschitz
            ));
        }
        match &self.measure {
            MeasureFamily::Gaussian { var_rate, mean_rate } => {
                if !(*var_rate >= 0.0) || !mean_rate.is_finite() {
                    return domain("Gaussian family needs var_rate >= 0 and a finite mean rate");
                }
            }
            MeasureFamily::Dirac { mean_rate } => {
                if !mean_rate.is_finite() {
                    return domain("Dirac family needs a finite mean rate");
                }
            }
            MeasureFamily::ScaledAtoms { points, weights, mean_rate } => {
                if points.is_empty() || points.len() != weights.len() {
                    return domain("atomic family needs matching nonempty points and weights");
                }
                if weights.iter().any(|&w| !(w > 0.0)) || points.iter().any(|p| !p.is_finite()) {
                    return domain("atomic family needs positive weights and finite points");
                }
                if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    return domain("atomic weights must sum to 1");
                }
                if !mean_rate.is_finite() {
                    return domain("atomic family needs a finite mean rate");
                }
                if self.rho != 0.0 {
                    return domain("atomic families are only supported with identity drift maps");
                }
            }
        }
        if self.moment(1e-8, 2.0) > 1e-6 {
            return domain("p-th moment of μ_t does not vanish as t → 0");
        }
        Ok(())
    }

    /// Transition law of `R(t)`.
    pub fn law(&self, t: f64) -> Result<Law> {
        if !(t >= 0.0) {
            return domain(format!("time must be nonnegative, got {t}"));
        }
        let scale = (self.rho * t).exp();
        let g = self.growth(t);
        Ok(match &self.measure {
            MeasureFamily::Gaussian { var_rate, mean_rate } => {
                // variance of ∫ e^{ρ(t-s)} σ dB_s
                let var = if self.rho == 0.0 {
                    var_rate * t
                } else {
                    var_rate * (2.0 * self.rho * t).exp_m1() / (2.0 * self.rho)
                };
                Law {
                    scale,
                    mean: mean_rate * g,
                    noise: Noise::Gaussian { var },
                }
            }
            MeasureFamily::Dirac { mean_rate } => Law {
                scale,
                mean: mean_rate * g,
                noise: Noise::Gaussian { var: 0.0 },
            },
            MeasureFamily::ScaledAtoms { points, weights, mean_rate } => {
                let s = t.sqrt();
                Law {
                    scale,
                    mean: mean_rate * t,
                    noise: Noise::Atoms(points.iter().zip(weights).map(|(&y, &w)| (s * y, w)).collect()),
                }
            }
        })
    }

    /// `∫ |y|^p μ_t(dy)`.
    pub fn moment(&self, t: f64, p: f64) -> f64 {
        let Ok(law) = self.law(t) else {
            return f64::INFINITY;
        };
        match &law.noise {
            Noise::Gaussian { var } => {
                let q = QuadratureRule::default();
                let s = var.sqrt();
                q.expect(|z| (law.mean + s * z).abs().powf(p))
            }
            Noise::Atoms(a) => a.iter().map(|&(y, w)| w * (law.mean + y).abs().powf(p)).sum(),
        }
    }

    /// `R'(0)` on smooth functions, from the model coefficients.
    pub fn generator_form(&self) -> Result<RPrimeForm> {
        Ok(match &self.measure {
            MeasureFamily::Gaussian { var_rate, mean_rate } => RPrimeForm {
                diffusion: *var_rate,
                drift_const: *mean_rate,
                drift_linear: self.rho,
            },
            MeasureFamily::Dirac { mean_rate } => RPrimeForm {
                diffusion: 0.0,
                drift_const: *mean_rate,
                drift_linear: self.rho,
            },
            MeasureFamily::ScaledAtoms { points, weights, mean_rate } => {
                let m1: f64 = points.iter().zip(weights).map(|(y, w)| y * w).sum();
                if m1.abs() > 1e-12 {
                    return domain("atomic family with nonzero mean has no R'(0) on smooth functions");
                }
                RPrimeForm {
                    diffusion: points.iter().zip(weights).map(|(y, w)| y * y * w).sum(),
                    drift_const: *mean_rate,
                    drift_linear: self.rho,
                }
            }
        })
    }

    pub fn transition(&self, t: f64, grid: &crate::funcspace::WeightedGrid) -> Result<Transition> {
        Transition::new(grid, &self.law(t)?, &self.disc)
    }

    /// Largest observed Lipschitz defect `|ψ_t(x) - ψ_t(y) - (x - y)| / (t |x - y|)`
    /// over the given points and times in `(0, 1]`.
    pub fn observed_defect(&self, xs: &[f64], ts: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for &t in ts.iter().filter(|&&t| t > 0.0 && t <= 1.0) {
            for (i, &x) in xs.iter().enumerate() {
                for &y in &xs[i + 1..] {
                    let d = (self.psi(t, x) - self.psi(t, y) - (x - y)).abs();
                    worst = worst.max(d / (t * (x - y).abs()));
                }
            }
        }
        worst
    }
}

/// The reference step `R(t)` as a one-step operator.
#[derive(Debug, Clone)]
pub struct ReferenceStep {
    pub model: Arc<ReferenceModel>,
}

impl StepOperator for ReferenceStep {
    fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        let v = f.require_continuous("reference step")?;
        let k = self.model.transition(t, f.grid())?;
        f.with_values(k.apply(v))
    }

    fn name(&self) -> &str {
        "reference"
    }
}

/// `R(t) f` for a continuous `f`.
pub fn reference_step(model: &ReferenceModel, t: f64, f: &GridFunction) -> Result<GridFunction> {
    ReferenceStep {
        model: Arc::new(model.clone()),
    }
    .apply(t, f)
}
