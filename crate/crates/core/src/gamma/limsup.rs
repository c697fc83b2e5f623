use serde::Serialize;

use crate::error::{domain, Result};
use crate::funcspace::{weighted_sup_norm, ExtReal, GridFunction, NormPart, WeightedGrid};

/// Positive-part κ-norm above which a sequence is treated as unbounded.
pub const UNBOUNDED_CEILING: f64 = 1e12;

/// Shrinking spatial windows `B(x, δ_n)` standing in for the sequences
/// `x_n → x` of the Γ-limsup.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSchedule {
    radii: Vec<f64>,
}

impl WindowSchedule {
    pub fn new(radii: Vec<f64>, grid: &WeightedGrid) -> Result<Self> {
        if radii.is_empty() {
            return domain("window schedule is empty");
        }
        let dx = grid.dx();
        if radii.windows(2).any(|w| w[1] > w[0]) {
            return domain("window radii must be nonincreasing");
        }
        if radii.iter().any(|&r| r < dx * (1.0 - 1e-9)) {
            return domain("window radii must be at least the grid spacing");
        }
        if radii[0] > grid.x_max() - grid.x_min() {
            return domain("first window radius exceeds the grid span");
        }
        Ok(WindowSchedule { radii })
    }

    /// `δ_n = max(Δx, 1/n)` for `n = 1..=len`.
    pub fn standard(grid: &WeightedGrid, len: usize) -> Result<Self> {
        let dx = grid.dx();
        let cap = grid.x_max() - grid.x_min();
        Self::new(
            (1..=len).map(|n| (1.0 / n as f64).max(dx).min(cap)).collect(),
            grid,
        )
    }

    /// Constant windows of one spacing.
    pub fn finest(grid: &WeightedGrid, len: usize) -> Result<Self> {
        Self::new(vec![grid.dx(); len], grid)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn last(&self) -> f64 {
        *self.radii.last().unwrap()
    }
}

/// Both finite-sequence estimates of the Γ-limsup.
#[derive(Debug, Clone)]
pub struct GammaLimsup {
    /// `sup` over the last third of the windowed maxima; the estimate used downstream.
    pub tail: GridFunction,
    /// `inf_m sup_{n>=m}` over the finite sequence, i.e. the windowed maximum
    /// of the last element.
    pub exact_finite: GridFunction,
    /// Windowed maxima `sup_{|y-x|<=δ_n} f_n(y)` for every `n`.
    pub windowed: Vec<Vec<ExtReal>>,
    /// Index of the first element of the tail.
    pub tail_start: usize,
}

fn check_sequence(fs: &[GridFunction], w: &WindowSchedule) -> Result<()> {
    if fs.is_empty() {
        return domain("Γ-limsup of an empty sequence");
    }
    if w.radii.len() < fs.len() {
        return domain("window schedule shorter than the sequence");
    }
    if fs.iter().any(|f| !f.same_grid(&fs[0])) {
        return domain("all functions must share one grid");
    }
    for f in fs {
        if weighted_sup_norm(f, NormPart::Positive)? > UNBOUNDED_CEILING {
            return domain("sequence is not bounded above");
        }
    }
    Ok(())
}

/// Largest value of `f` on the lattice ball of radius `r` around point `i`.
pub fn window_max(f: &GridFunction, i: usize, r: f64) -> ExtReal {
    f.grid()
        .neighborhood(i, r)
        .map(|j| f.get(j))
        .fold(ExtReal::NegInf, ExtReal::max)
}

pub(crate) fn tail_start(len: usize) -> usize {
    len - len.div_ceil(3)
}

/// Full Γ-limsup computation with the finite and tail estimates.
pub fn gamma_limsup_report(fs: &[GridFunction], w: &WindowSchedule) -> Result<GammaLimsup> {
    check_sequence(fs, w)?;
    let n_points = fs[0].len();
    let windowed: Vec<Vec<ExtReal>> = fs
        .iter()
        .zip(&w.radii)
        .map(|(f, &r)| (0..n_points).map(|i| window_max(f, i, r)).collect())
        .collect();
    let start = tail_start(fs.len());
    let tail: Vec<ExtReal> = (0..n_points)
        .map(|i| {
            windowed[start..]
                .iter()
                .map(|row| row[i])
                .fold(ExtReal::NegInf, ExtReal::max)
        })
        .collect();
    let grid = fs[0].grid_arc().clone();
    Ok(GammaLimsup {
        tail: GridFunction::from_extended(grid.clone(), &tail)?,
        exact_finite: GridFunction::from_extended(grid, windowed.last().unwrap())?,
        windowed,
        tail_start: start,
    })
}

/// Discrete Γ-limsup: at each point the limsup over the sequence of the
/// windowed maxima `sup_{|y-x| <= δ_n} f_n(y)`, estimated over the last
/// third of the sequence. The result is tagged upper semicontinuous.
pub fn gamma_limsup(fs: &[GridFunction], w: &WindowSchedule) -> Result<GridFunction> {
    Ok(gamma_limsup_report(fs, w)?.tail)
}

#[derive(Debug, Clone)]
pub struct GammaLimOutcome {
    /// The Γ-limit when every point admits a recovery sequence.
    pub limit: Option<GridFunction>,
    /// Largest gap between the Γ-limsup and the worst tail windowed maximum.
    pub worst_gap: f64,
    pub worst_index: usize,
    pub tolerance: f64,
}

/// Lipschitz constant of the finite part of `f` over adjacent finite pairs.
fn finite_lipschitz(f: &GridFunction) -> f64 {
    let dx = f.grid().dx();
    (1..f.len())
        .filter_map(|i| match (f.get(i - 1), f.get(i)) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => Some((b - a).abs() / dx),
            _ => None,
        })
        .fold(0.0, f64::max)
}

/// Γ-limit test: the candidate is the Γ-limsup; it is accepted when along
/// the tail every windowed maximum comes within `1e-8 + 2 Lip δ_last` of it,
/// i.e. a recovery sequence exists at every grid point.
pub fn gamma_lim(fs: &[GridFunction], w: &WindowSchedule) -> Result<GammaLimOutcome> {
    let rep = gamma_limsup_report(fs, w)?;
    let lip = finite_lipschitz(&rep.tail);
    let tolerance = 1e-8 + 2.0 * lip * w.radii[fs.len() - 1];
    let mut worst_gap = 0.0f64;
    let mut worst_index = 0;
    for i in 0..rep.tail.len() {
        let target = rep.tail.get(i);
        let floor = rep.windowed[rep.tail_start..]
            .iter()
            .map(|row| row[i])
            .fold(ExtReal::Finite(f64::INFINITY), ExtReal::min);
        let gap = match (target, floor) {
            (ExtReal::NegInf, _) => 0.0,
            (ExtReal::Finite(_), ExtReal::NegInf) => f64::INFINITY,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a - b,
        };
        if gap > worst_gap {
            worst_gap = gap;
            worst_index = i;
        }
    }
    let limit = (worst_gap <= tolerance).then_some(rep.tail);
    Ok(GammaLimOutcome {
        limit,
        worst_gap,
        worst_index,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn grid() -> Arc<WeightedGrid> {
        Arc::new(WeightedGrid::symmetric(2.0, 0.05).unwrap())
    }

    #[test]
    fn constant_sequence_recovers_the_function() {
        let g = grid();
        let f = GridFunction::from_fn(g.clone(), |x| x.sin()).unwrap();
        let fs = vec![f.clone(); 12];
        let w = WindowSchedule::standard(&g, 12).unwrap();
        let out = gamma_lim(&fs, &w).unwrap();
        let lim = out.limit.expect("constant sequence has a Γ-limit");
        // window smear over the tail: at most Lip · δ_n at the start of the tail
        let smear = w.radii()[tail_start(12)];
        for i in 0..g.len() {
            let d = lim.get(i).finite().unwrap() - f.finite()[i];
            assert!((0.0..=smear + 1e-12).contains(&d), "{d}");
        }
    }

    #[test]
    fn decreasing_sequence_converges_to_its_limit() {
        let g = grid();
        let f = GridFunction::from_fn(g.clone(), |x| x.cos()).unwrap();
        let fs: Vec<_> = (1..=30)
            .map(|n| f.add_scalar(0.5f64.powi(n)).unwrap())
            .collect();
        let w = WindowSchedule::standard(&g, 30).unwrap();
        let out = gamma_lim(&fs, &w).unwrap();
        let lim = out.limit.expect("f_n ↓ f has a Γ-limit");
        for i in 0..g.len() {
            let d = lim.get(i).finite().unwrap() - f.finite()[i];
            assert!((0.0..=0.05 + 1e-6).contains(&d), "{d}");
        }
    }

    #[test]
    fn moving_spike_concentrates_at_origin() {
        let g = grid();
        let fs: Vec<_> = (1..=40)
            .map(|n| {
                let k = g.nearest(1.0 / n as f64);
                let mut v = vec![0.0; g.len()];
                v[k] = 1.0;
                GridFunction::from_values(g.clone(), v).unwrap()
            })
            .collect();
        let w = WindowSchedule::standard(&g, 40).unwrap();
        let lim = gamma_limsup(&fs, &w).unwrap();
        assert_eq!(lim.get(g.nearest(0.0)), ExtReal::Finite(1.0));
        for (i, x) in g.points().enumerate() {
            if x.abs() >= 2.0 * g.dx() + 1e-9 && x.abs() > 1.0 / 27.0 + g.dx() {
                assert_eq!(lim.get(i), ExtReal::Finite(0.0), "x = {x}");
            }
        }
    }

    #[test]
    fn alternating_sequence_has_no_limit() {
        let g = grid();
        let a = GridFunction::from_fn(g.clone(), |x| 0.1 * x).unwrap();
        let b = a.add_scalar(1.0).unwrap();
        let fs: Vec<_> = (0..20).map(|n| if n % 2 == 0 { a.clone() } else { b.clone() }).collect();
        let w = WindowSchedule::standard(&g, 20).unwrap();
        let out = gamma_lim(&fs, &w).unwrap();
        assert!(out.limit.is_none());
        assert!(out.worst_gap > 0.9);
    }

    #[test]
    fn schedule_validation() {
        let g = grid();
        assert!(WindowSchedule::new(vec![0.1, 0.2], &g).is_err());
        assert!(WindowSchedule::new(vec![0.01], &g).is_err());
        assert!(WindowSchedule::new(vec![10.0], &g).is_err());
        let f = GridFunction::constant(g.clone(), 0.0).unwrap();
        let w = WindowSchedule::standard(&g, 2).unwrap();
        assert!(gamma_limsup(&vec![f; 3], &w).is_err());
    }
}
