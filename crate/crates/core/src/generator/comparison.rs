use serde::{Deserialize, Serialize};

use super::{HSchedule, SemigroupEval};
use crate::error::{domain, Result};
use crate::funcspace::GridFunction;
use crate::gamma::{gamma_limsup, WindowSchedule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub probe: usize,
    pub t: f64,
    /// `max (S_small(t) f - S_big(t) f)⁺`.
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub max_violation: f64,
    pub tolerance: f64,
    pub ordered: bool,
}

/// Checks `S_small(t) f <= S_big(t) f` for every probe and time, on the
/// window `[-R, R]` when given and on the whole grid otherwise.
pub fn comparison_harness(
    small: &SemigroupEval,
    big: &SemigroupEval,
    probes: &[GridFunction],
    times: &[f64],
    window: Option<f64>,
    tolerance: f64,
) -> Result<ComparisonReport> {
    let mut rows = Vec::new();
    for (p, f) in probes.iter().enumerate() {
        for &t in times {
            let a = small.eval(t, f)?;
            let b = big.eval(t, f)?;
            if !a.same_grid(&b) {
                return domain("evaluators returned different grids");
            }
            let range = match window {
                Some(r) => f.grid().window(r),
                None => 0..f.len(),
            };
            let violation = range
                .map(|i| (a.finite()[i] - b.finite()[i]).max(0.0))
                .fold(0.0, f64::max);
            rows.push(ComparisonRow { probe: p, t, violation });
        }
    }
    let max_violation = rows.iter().map(|r| r.violation).fold(0.0, f64::max);
    Ok(ComparisonReport {
        rows,
        max_violation,
        tolerance,
        ordered: max_violation <= tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionReport {
    pub times: Vec<f64>,
    /// `u(0) >= f` up to tolerance.
    pub initial_ok: bool,
    /// Most negative forward quotient `(u(t+h) - u(t))/h` seen.
    pub min_forward_quotient: f64,
    /// Bounded negative part of the forward quotients.
    pub comp_holds: bool,
    /// Largest Γ-limsup over `h` of `(S(h)u(t) - u(t))/h - (u(t+h) - u(t))/h`.
    pub comp2_worst: f64,
    pub comp2_holds: bool,
    /// Largest `S(t) f - u(t)` over the lattice.
    pub conclusion_gap: f64,
    pub conclusion_holds: bool,
    /// Hypotheses that fail, in the order checked; empty when all hold.
    pub failing: Vec<String>,
    pub tolerance: f64,
}

/// Negative part beyond which forward quotients are treated as unbounded.
const QUOTIENT_FLOOR: f64 = -1e8;

/// Supersolution test for a family `u`, given as a function of time so that
/// forward quotients can be formed at every `h` of the schedule. The
/// hypotheses are sampled on `times`, which must start at 0 and increase.
#[allow(clippy::too_many_arguments)]
pub fn supersolution_check(
    s: &SemigroupEval,
    u: &dyn Fn(f64) -> Result<GridFunction>,
    f: &GridFunction,
    times: &[f64],
    hs: &HSchedule,
    w: Option<&WindowSchedule>,
    window: f64,
    tolerance: f64,
) -> Result<SupersolutionReport> {
    if times.first() != Some(&0.0) {
        return domain("time lattice must start at 0");
    }
    if times.windows(2).any(|p| p[1] <= p[0]) {
        return domain("time lattice must be strictly increasing");
    }
    let grid = f.grid();
    let range = grid.window(window);
    let default;
    let w = match w {
        Some(w) => w,
        None => {
            default = hs.windows(grid)?;
            &default
        }
    };

    let u0 = u(0.0)?;
    let initial_ok = range.clone().all(|i| u0.finite()[i] >= f.finite()[i] - tolerance);

    let mut min_forward_quotient = f64::INFINITY;
    let mut comp2_worst = f64::NEG_INFINITY;
    let mut conclusion_gap = f64::NEG_INFINITY;
    for &t in times {
        let ut = u(t)?;
        let mut defects = Vec::with_capacity(hs.values().len());
        for &h in hs.values() {
            let forward = u(t + h)?.zip_with(&ut, |a, b| (a - b) / h)?;
            let quotient = s.eval(h, &ut)?.zip_with(&ut, |a, b| (a - b) / h)?;
            min_forward_quotient = range.clone().map(|i| forward.finite()[i]).fold(min_forward_quotient, f64::min);
            defects.push(quotient.zip_with(&forward, |a, b| a - b)?);
        }
        let limsup = gamma_limsup(&defects, w)?;
        comp2_worst = range.clone().map(|i| limsup.finite()[i]).fold(comp2_worst, f64::max);
        let st = s.eval(t, f)?;
        conclusion_gap = range
            .clone()
            .map(|i| st.finite()[i] - ut.finite()[i])
            .fold(conclusion_gap, f64::max);
    }
    let comp_holds = min_forward_quotient > QUOTIENT_FLOOR;
    let comp2_holds = comp2_worst <= tolerance;
    let conclusion_holds = conclusion_gap <= tolerance;
    let mut failing = Vec::new();
    if !initial_ok {
        failing.push("initial".to_string());
    }
    if !comp_holds {
        failing.push("comp".to_string());
    }
    if !comp2_holds {
        failing.push("comp2".to_string());
    }
    Ok(SupersolutionReport {
        times: times.to_vec(),
        initial_ok,
        min_forward_quotient,
        comp_holds,
        comp2_worst,
        comp2_holds,
        conclusion_gap,
        conclusion_holds,
        failing,
        tolerance,
    })
}
