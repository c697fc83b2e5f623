//! Generators of a semigroup: difference quotients, Γ-generators, Lipschitz
//! sets, smooth-function oracles and comparison checks.

mod comparison;
mod lipschitz;
mod oracle;

pub use comparison::{comparison_harness, supersolution_check, ComparisonReport, ComparisonRow, SupersolutionReport};
pub use lipschitz::{lipschitz_membership, LipschitzVerdict, Membership, Side};
pub use oracle::{
    mollified_generator_pipeline, smooth_generator_oracle, truncated_generator_sequence, CommutatorCheck, Hamiltonian,
    MollifiedPipeline,
};

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::funcspace::GridFunction;
use crate::gamma::{gamma_limsup, WindowSchedule};
use crate::operators::{hjb_fd_oracle, ControlCost, HjbScheme, StepOperator};

/// How `S(t) f` is produced.
#[derive(Clone)]
pub enum EvalSource {
    /// The family is already a semigroup: `S(t) = step(t)`.
    Exact(Arc<dyn StepOperator>),
    /// `S(t) ≈ I(t/k)^k` with `k = ceil(t / width)`.
    Chernoff { step: Arc<dyn StepOperator>, width: f64 },
    /// Finite-difference value function of a control model.
    Hjb { cost: Arc<ControlCost>, dt: f64, scheme: HjbScheme },
}

/// Time-indexed evaluator `t ↦ S(t) f` with a cache of computed values.
pub struct SemigroupEval {
    source: EvalSource,
    cache: Mutex<HashMap<u64, GridFunction>>,
}

impl std::fmt::Debug for SemigroupEval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.source {
            EvalSource::Exact(s) => format!("exact({})", s.name()),
            EvalSource::Chernoff { step, width } => format!("chernoff({}, {width})", step.name()),
            EvalSource::Hjb { dt, .. } => format!("hjb({dt})"),
        };
        f.debug_struct("SemigroupEval").field("source", &kind).finish()
    }
}

impl SemigroupEval {
    pub fn new(source: EvalSource) -> Result<Self> {
        match &source {
            EvalSource::Chernoff { width, .. } if !(*width > 0.0) => {
                return domain(format!("Chernoff width must be positive, got {width}"));
            }
            EvalSource::Hjb { dt, .. } if !(*dt > 0.0) => {
                return domain(format!("time step must be positive, got {dt}"));
            }
            _ => {}
        }
        Ok(SemigroupEval {
            source,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn exact(step: impl StepOperator + 'static) -> Self {
        Self::new(EvalSource::Exact(Arc::new(step))).unwrap()
    }

    pub fn chernoff(step: impl StepOperator + 'static, width: f64) -> Result<Self> {
        Self::new(EvalSource::Chernoff {
            step: Arc::new(step),
            width,
        })
    }

    pub fn hjb(cost: ControlCost, dt: f64) -> Result<Self> {
        Self::new(EvalSource::Hjb {
            cost: Arc::new(cost),
            dt,
            scheme: HjbScheme::ExplicitUpwind,
        })
    }

    pub fn source(&self) -> &EvalSource {
        &self.source
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    fn key(t: f64, f: &GridFunction) -> u64 {
        let mut h = DefaultHasher::new();
        t.to_bits().hash(&mut h);
        f.grid().dx().to_bits().hash(&mut h);
        f.grid().x_min().to_bits().hash(&mut h);
        for v in f.finite() {
            v.to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// `S(t) f`; `S(0) f = f`.
    pub fn eval(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        if !(t >= 0.0) || !t.is_finite() {
            return domain(format!("time must be finite and nonnegative, got {t}"));
        }
        if t == 0.0 {
            return Ok(f.clone());
        }
        let key = Self::key(t, f);
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let out = match &self.source {
            EvalSource::Exact(step) => step.apply(t, f)?,
            EvalSource::Chernoff { step, width } => {
                let k = ((t / width) * (1.0 - 1e-9)).ceil().max(1.0) as usize;
                let h = t / k as f64;
                let mut u = f.clone();
                for _ in 0..k {
                    u = step.apply(h, &u)?;
                }
                u
            }
            EvalSource::Hjb { cost, dt, scheme } => hjb_fd_oracle(cost, f, t, dt.min(t), *scheme)?,
        };
        self.cache.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }
}

/// Decreasing step sizes for `h ↓ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HSchedule {
    hs: Vec<f64>,
}

impl HSchedule {
    pub fn new(hs: Vec<f64>) -> Result<Self> {
        if hs.is_empty() {
            return domain("empty h schedule");
        }
        if hs.iter().any(|h| !(*h > 0.0) || !h.is_finite()) || hs.windows(2).any(|w| w[1] >= w[0]) {
            return domain("h schedule must be positive and strictly decreasing");
        }
        Ok(HSchedule { hs })
    }

    /// `t0 2^{-n}` for `n` in `first..=last`.
    pub fn dyadic(t0: f64, first: i32, last: i32) -> Result<Self> {
        Self::new((first..=last).map(|n| t0 * 2f64.powi(-n)).collect())
    }

    /// `{2^{-3}, …, 2^{-10}} t0`.
    pub fn standard(t0: f64) -> Result<Self> {
        Self::dyadic(t0, 3, 10)
    }

    pub fn values(&self) -> &[f64] {
        &self.hs
    }

    pub fn last(&self) -> f64 {
        *self.hs.last().unwrap()
    }

    /// Windows `δ(h) = max(Δx, √h)` coupled to the schedule.
    pub fn windows(&self, grid: &crate::funcspace::WeightedGrid) -> Result<WindowSchedule> {
        let cap = grid.x_max() - grid.x_min();
        WindowSchedule::new(
            self.hs.iter().map(|h| h.sqrt().max(grid.dx()).min(cap)).collect(),
            grid,
        )
    }
}

/// `(S(h) f - f) / h`.
pub fn difference_quotient(s: &SemigroupEval, f: &GridFunction, h: f64) -> Result<GridFunction> {
    if !(h > 0.0) {
        return domain(format!("h must be positive, got {h}"));
    }
    let sf = s.eval(h, f)?;
    sf.zip_with(f, |a, b| (a - b) / h)
}

/// Upper Γ-generator: the Γ-limsup of the difference quotients along `hs`
/// with windows `w` (default `δ(h) = max(Δx, √h)`).
pub fn gamma_generator(
    s: &SemigroupEval,
    f: &GridFunction,
    hs: &HSchedule,
    w: Option<&WindowSchedule>,
) -> Result<GridFunction> {
    let qs = hs
        .values()
        .iter()
        .map(|&h| difference_quotient(s, f, h))
        .collect::<Result<Vec<_>>>()?;
    let default;
    let w = match w {
        Some(w) => w,
        None => {
            default = hs.windows(f.grid())?;
            &default
        }
    };
    gamma_limsup(&qs, w)
}

/// [`gamma_generator`] after checking that `f` lies in the upper Lipschitz set.
pub fn gamma_generator_checked(
    s: &SemigroupEval,
    f: &GridFunction,
    hs: &HSchedule,
    w: Option<&WindowSchedule>,
) -> Result<GridFunction> {
    let v = lipschitz_membership(s, f, Side::Upper, hs.values())?;
    if v.member == Membership::No {
        return domain(format!(
            "f is not in the upper Lipschitz set (ratio grows to {})",
            v.c_estimate
        ));
    }
    gamma_generator(s, f, hs, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::WeightedGrid;
    use crate::operators::{Discretization, Entropic, IdentityStep, ReferenceModel, ReferenceStep, ShiftStep};

    fn grid() -> Arc<WeightedGrid> {
        Arc::new(WeightedGrid::symmetric(6.0, 0.02).unwrap())
    }

    #[test]
    fn quotients_of_closed_forms() {
        let g = grid();
        let heat = SemigroupEval::exact(ReferenceStep {
            model: Arc::new(ReferenceModel::brownian(1.0, Discretization::Lattice).unwrap()),
        });
        let sq = GridFunction::from_fn(g.clone(), |x| x * x).unwrap();
        let ent = SemigroupEval::exact(Entropic::new(2.0, 1.0, Discretization::quadrature()).unwrap());
        let lin = GridFunction::from_fn(g.clone(), |x| 0.7 * x).unwrap();
        for h in [0.125, 0.03125] {
            let q = difference_quotient(&heat, &sq, h).unwrap();
            assert!(g.window(2.0).all(|i| (q.finite()[i] - 1.0).abs() < 1e-9));
            let q = difference_quotient(&ent, &lin, h).unwrap();
            assert!(g.window(2.0).all(|i| (q.finite()[i] - 0.49).abs() < 1e-7));
        }
        let id = SemigroupEval::exact(IdentityStep);
        assert!(difference_quotient(&id, &sq, 0.1).unwrap().finite().iter().all(|&v| v == 0.0));
        assert!(heat.cached() >= 2);
    }

    #[test]
    fn shift_kink_has_gamma_generator_one() {
        let g = grid();
        let f = GridFunction::from_fn(g.clone(), |x| x.abs().min(3.0)).unwrap();
        let s = SemigroupEval::exact(ShiftStep { speed: 1.0 });
        let hs = HSchedule::dyadic(1.0, 3, 10).unwrap();
        let a = gamma_generator(&s, &f, &hs, None).unwrap();
        let zero = g.nearest(0.0);
        assert!((a.finite()[zero] - 1.0).abs() < 1e-9);
        let left = g.nearest(-1.0);
        assert!((a.finite()[left] + 1.0).abs() < 1e-9);
        let id = SemigroupEval::exact(IdentityStep);
        assert!(gamma_generator(&id, &f, &hs, None).unwrap().finite().iter().all(|&v| v == 0.0));
    }
}
