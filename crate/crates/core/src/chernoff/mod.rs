//! Chernoff iteration `S(t) f ≈ I(h_n)^{k_n} f`.

mod diagnostics;
mod run;

pub use diagnostics::{equicontinuity_modulus, lipschitz_bound_track, LipschitzTrack, LipschitzTrackRow, ModulusRow};
pub use run::{chernoff_run, ChernoffConfig, ConvergenceReport, ConvergenceRow, Direction, DEFAULT_CEILING, DEFAULT_TOLERANCE};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::funcspace::GridFunction;
use crate::operators::StepOperator;

/// Relative slack when counting steps, so `t = k h` up to rounding gives `k`.
const COUNT_SLACK: f64 = 1e-9;

/// Step width `h`, horizon `t` and iteration count `k = max{j : j h <= t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub h: f64,
    pub t: f64,
    pub k: usize,
}

impl Partition {
    pub fn new(h: f64, t: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return domain(format!("step width must be positive, got {h}"));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return domain(format!("horizon must be nonnegative, got {t}"));
        }
        let k = (t / h * (1.0 + COUNT_SLACK)).floor() as usize;
        Ok(Partition { h, t, k })
    }

    /// `k h`, the time actually reached.
    pub fn reached(&self) -> f64 {
        self.k as f64 * self.h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    Generic,
    /// `h_n = t₀ 2^{-n}`: the time lattices are nested.
    Dyadic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// Level labels `n` for every width.
    pub levels: Vec<u32>,
    pub widths: Vec<f64>,
    pub mode: ScheduleMode,
}

impl Schedule {
    /// Strictly decreasing positive widths, labelled `1, 2, …`.
    pub fn generic(widths: Vec<f64>) -> Result<Self> {
        if widths.is_empty() {
            return domain("empty schedule");
        }
        if widths.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return domain("step widths must be positive and finite");
        }
        if widths.windows(2).any(|w| w[1] >= w[0]) {
            return domain("step widths must strictly decrease");
        }
        Ok(Schedule {
            levels: (1..=widths.len() as u32).collect(),
            widths,
            mode: ScheduleMode::Generic,
        })
    }

    /// `h_n = t0 2^{-n}` for `n` in `first..=last`.
    pub fn dyadic(t0: f64, first: u32, last: u32) -> Result<Self> {
        if !(t0 > 0.0) || !t0.is_finite() {
            return domain(format!("dyadic base must be positive, got {t0}"));
        }
        if first > last || last > 40 {
            return domain(format!("invalid dyadic levels {first}..={last}"));
        }
        Ok(Schedule {
            levels: (first..=last).collect(),
            widths: (first..=last).map(|n| t0 * 0.5f64.powi(n as i32)).collect(),
            mode: ScheduleMode::Dyadic,
        })
    }

    /// Dyadic levels `1..=8` based at `t`.
    pub fn default_for(t: f64) -> Result<Self> {
        Self::dyadic(t, 1, 8)
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }
}

/// `I(h)^k f`.
pub fn iterate<S: StepOperator + ?Sized>(step: &S, p: &Partition, f: &GridFunction) -> Result<GridFunction> {
    let mut u = f.clone();
    for _ in 0..p.k {
        u = step.apply(p.h, &u)?;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::funcspace::WeightedGrid;
    use crate::operators::{control_step, entropic_exact, ControlCost, Discretization, Entropic, QuadratureRule};

    #[test]
    fn partition_counts() {
        assert_eq!(Partition::new(0.1, 0.3).unwrap().k, 3);
        assert_eq!(Partition::new(0.25, 0.6).unwrap().k, 2);
        assert_eq!(Partition::new(1.0, 0.0).unwrap().k, 0);
        assert!(Partition::new(0.0, 1.0).is_err());
        let s = Schedule::dyadic(0.5, 1, 3).unwrap();
        assert_eq!(s.widths, vec![0.25, 0.125, 0.0625]);
        assert!(Schedule::generic(vec![0.1, 0.2]).is_err());
    }

    #[test]
    fn zero_steps_and_gaussian_composition() {
        let g = Arc::new(WeightedGrid::symmetric(6.0, 0.05).unwrap());
        let f = GridFunction::from_fn(g.clone(), |x| (-x * x).exp()).unwrap();
        let cost = ControlCost::single(1.0, 0.0).unwrap();
        let step = crate::operators::ControlStep::new(cost.clone(), Discretization::Lattice);
        assert_eq!(iterate(&step, &Partition::new(1.0, 0.5).unwrap(), &f).unwrap(), f);
        let many = iterate(&step, &Partition::new(0.05, 0.4).unwrap(), &f).unwrap();
        let one = control_step(&cost, &Discretization::Lattice, 0.4, &f).unwrap();
        assert!(many.sup_distance(&one) < 1e-12);
    }

    #[test]
    fn entropic_iterates_to_itself() {
        let g = Arc::new(WeightedGrid::symmetric(6.0, 0.05).unwrap());
        let f = GridFunction::from_fn(g.clone(), |x| (-x * x).exp()).unwrap();
        let q = QuadratureRule::default();
        let step = Entropic::new(2.0, 1.0, Discretization::Quadrature(Arc::new(q.clone()))).unwrap();
        let many = iterate(&step, &Partition::new(0.1, 0.4).unwrap(), &f).unwrap();
        let one = entropic_exact(0.4, &f, &q).unwrap();
        assert!(many.sup_distance_on(&one, 3.0) < 2e-3);
    }
}
