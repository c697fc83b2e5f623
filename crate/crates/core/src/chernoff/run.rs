use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{iterate, Partition, Schedule, ScheduleMode};
use crate::error::Result;
use crate::funcspace::{discrete_lipschitz, weighted_sup_norm, GridFunction, NormPart};
use crate::operators::StepOperator;

pub const DEFAULT_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_CEILING: f64 = 1e6;

/// Windows `[-R, R]` on which successive differences are reported.
const WINDOWS: [f64; 3] = [1.0, 2.0, 4.0];

/// Violations at or below this size count as rounding.
const NOISE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Nondecreasing,
    Nonincreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffConfig {
    pub tolerance: f64,
    /// κ-norm level above which a run is flagged as divergent.
    pub ceiling: f64,
    /// Expected order of the iterates across dyadic levels; inferred when absent.
    pub expect: Option<Direction>,
}

impl Default for ChernoffConfig {
    fn default() -> Self {
        ChernoffConfig {
            tolerance: DEFAULT_TOLERANCE,
            ceiling: DEFAULT_CEILING,
            expect: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: u32,
    pub h: f64,
    pub k: usize,
    pub sup_norm: f64,
    #[serde(rename = "diff_K1")]
    pub diff_k1: Option<f64>,
    #[serde(rename = "diff_K2")]
    pub diff_k2: Option<f64>,
    #[serde(rename = "diff_K4")]
    pub diff_k4: Option<f64>,
    pub lip_const: f64,
    pub monotone_violation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub t: f64,
    pub mode: ScheduleMode,
    pub tolerance: f64,
    pub ceiling: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Last successive difference on the largest window.
    pub final_difference: Option<f64>,
    pub converged: bool,
    pub diverged: bool,
    pub direction: Option<Direction>,
    pub violation_count: usize,
    pub max_violation: f64,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Iterates `I(h_n)^{k_n} f` for every level of the schedule and tabulates
/// norms, successive differences, Lipschitz constants and, for dyadic
/// schedules, the order of consecutive iterates.
pub fn chernoff_run<S: StepOperator + ?Sized>(
    step: &S,
    f: &GridFunction,
    t: f64,
    schedule: &Schedule,
    config: &ChernoffConfig,
) -> Result<(Vec<GridFunction>, ConvergenceReport)> {
    if schedule.is_empty() {
        return crate::error::domain("empty schedule");
    }
    let grid = f.grid();
    let reach = grid.x_min().abs().min(grid.x_max().abs());
    let lip_window = grid.window(WINDOWS[2].min(reach));

    let mut iterates: Vec<GridFunction> = Vec::with_capacity(schedule.len());
    let mut rows = Vec::with_capacity(schedule.len());
    let mut diverged = false;
    // (violation if nondecreasing, violation if nonincreasing) per level
    let mut order: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();

    for (&n, &h) in schedule.levels.iter().zip(&schedule.widths) {
        let p = Partition::new(h, t)?;
        let u = iterate(step, &p, f)?;
        let sup_norm = weighted_sup_norm(&u, NormPart::Full)?;
        let prev = iterates.last();
        let diff = |r: f64| prev.map(|q: &GridFunction| u.sup_distance_on(q, r.min(reach)));
        if let Some(q) = prev {
            let (a, b) = (u.finite(), q.finite());
            order.push((
                b.iter().zip(a).map(|(b, a)| (b - a).max(0.0)).collect(),
                a.iter().zip(b).map(|(a, b)| (a - b).max(0.0)).collect(),
            ));
        }
        rows.push(ConvergenceRow {
            n,
            h,
            k: p.k,
            sup_norm,
            diff_k1: diff(WINDOWS[0]),
            diff_k2: diff(WINDOWS[1]),
            diff_k4: diff(WINDOWS[2]),
            lip_const: discrete_lipschitz(&u.finite()[lip_window.clone()], grid.dx()),
            monotone_violation: None,
        });
        iterates.push(u);
        if !(sup_norm <= config.ceiling) {
            diverged = true;
            break;
        }
    }

    let mut direction = None;
    let mut violation_count = 0;
    let mut max_violation = 0.0f64;
    if schedule.mode == ScheduleMode::Dyadic && !order.is_empty() {
        let worst = |side: usize| {
            order
                .iter()
                .map(|o| if side == 0 { &o.0 } else { &o.1 })
                .map(|v| v.iter().fold(0.0f64, |m, &x| m.max(x)))
                .fold(0.0f64, f64::max)
        };
        let dir = config.expect.unwrap_or_else(|| {
            if worst(0) <= worst(1) {
                Direction::Nondecreasing
            } else {
                Direction::Nonincreasing
            }
        });
        for (row, o) in rows.iter_mut().skip(1).zip(&order) {
            let v = match dir {
                Direction::Nondecreasing => &o.0,
                Direction::Nonincreasing => &o.1,
            };
            let m = v.iter().fold(0.0f64, |m, &x| m.max(x));
            violation_count += v.iter().filter(|&&x| x > NOISE).count();
            max_violation = max_violation.max(m);
            row.monotone_violation = Some(m);
        }
        direction = Some(dir);
    }

    let final_difference = rows.last().and_then(|r| r.diff_k4);
    let converged = !diverged && final_difference.is_some_and(|d| d < config.tolerance);
    let report = ConvergenceReport {
        t,
        mode: schedule.mode,
        tolerance: config.tolerance,
        ceiling: config.ceiling,
        rows,
        final_difference,
        converged,
        diverged,
        direction,
        violation_count,
        max_violation,
    };
    Ok((iterates, report))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::funcspace::WeightedGrid;
    use crate::operators::{ControlCost, ControlStep, Discretization, ReferenceModel, ReferenceStep, ShiftStep};

    fn bump(g: &Arc<WeightedGrid>) -> GridFunction {
        GridFunction::from_fn(g.clone(), |x| (-x * x).exp()).unwrap()
    }

    #[test]
    fn exact_semigroups_have_zero_differences() {
        let g = Arc::new(WeightedGrid::symmetric(6.0, 0.05).unwrap());
        let model = ReferenceModel::brownian(1.0, Discretization::Lattice).unwrap();
        let step = ReferenceStep { model: Arc::new(model) };
        let s = Schedule::dyadic(0.5, 1, 4).unwrap();
        let (fs, rep) = chernoff_run(&step, &bump(&g), 0.5, &s, &ChernoffConfig::default()).unwrap();
        assert_eq!(fs.len(), 4);
        assert!(rep.rows[1..].iter().all(|r| r.diff_k4.unwrap() < 1e-12));
        assert!(rep.converged && !rep.diverged);
        assert!(rep.max_violation < 1e-12);
        let json = rep.to_json().unwrap();
        assert!(json.contains("\"diff_K1\""));
        let mut csv = Vec::new();
        rep.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 5);
    }

    #[test]
    fn control_iterates_increase_along_dyadic_levels() {
        let g = Arc::new(WeightedGrid::symmetric(4.0, 0.05).unwrap());
        let cost = ControlCost::entropic(2.0, 0.1).unwrap();
        let step = ControlStep::new(cost, Discretization::Lattice);
        let s = Schedule::dyadic(0.5, 1, 5).unwrap();
        let (_, rep) = chernoff_run(&step, &bump(&g), 0.5, &s, &ChernoffConfig::default()).unwrap();
        assert_eq!(rep.direction, Some(Direction::Nondecreasing));
        assert!(rep.max_violation <= 1e-12, "{}", rep.max_violation);
    }

    #[test]
    fn divergence_is_flagged() {
        let g = Arc::new(WeightedGrid::symmetric(2.0, 0.1).unwrap());
        let f = GridFunction::from_fn(g.clone(), |x| x).unwrap();
        let config = ChernoffConfig {
            ceiling: 0.5,
            ..Default::default()
        };
        let s = Schedule::generic(vec![0.5, 0.25]).unwrap();
        let (fs, rep) = chernoff_run(&ShiftStep { speed: 1.0 }, &f, 1.0, &s, &config).unwrap();
        assert!(rep.diverged && !rep.converged);
        assert_eq!(fs.len(), 1);
        assert_eq!(rep.direction, None);
    }
}
