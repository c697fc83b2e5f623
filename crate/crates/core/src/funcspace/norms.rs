use serde::Serialize;

use super::function::GridFunction;
use crate::error::{domain, Result};

/// Which part of `f` enters the weighted norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormPart {
    /// `‖f‖_κ = max |f| κ`.
    Full,
    /// `‖f⁺‖_κ = max f⁺ κ`; `-∞` points contribute 0.
    Positive,
}

/// κ-weighted sup norm over the lattice.
pub fn weighted_sup_norm(f: &GridFunction, part: NormPart) -> Result<f64> {
    let grid = f.grid();
    let mut best = 0.0f64;
    for i in 0..f.len() {
        match (f.get(i).finite(), part) {
            (None, NormPart::Full) => {
                return domain("full weighted norm of a function with -inf sentinels");
            }
            (None, NormPart::Positive) => {}
            (Some(v), NormPart::Full) => best = best.max(v.abs() * grid.kappa(i)),
            (Some(v), NormPart::Positive) => best = best.max(v.max(0.0) * grid.kappa(i)),
        }
    }
    Ok(best)
}

/// Compact-window errors of one approximating sequence.
#[derive(Debug, Clone, Serialize)]
pub struct WindowErrors {
    pub radius: f64,
    /// `‖f - f_n‖_{∞,K}` for every `n`.
    pub errors: Vec<f64>,
    /// Error of the last sequence element.
    pub tail: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixedConvergenceReport {
    /// `sup_n ‖f_n‖_κ`.
    pub kappa_bound: f64,
    pub windows: Vec<WindowErrors>,
    /// Plain sup-norm error of the last element over the whole grid.
    pub plain_sup_tail: f64,
    pub tolerance: f64,
    pub converged: bool,
}

/// Sequential test of mixed-topology convergence `f_n → f`: bounded κ-norms
/// plus uniform convergence on every compact window of the grid.
pub fn mixed_convergence_report(
    fs: &[GridFunction],
    f: &GridFunction,
    tolerance: f64,
) -> Result<MixedConvergenceReport> {
    if fs.is_empty() {
        return domain("mixed convergence needs a nonempty sequence");
    }
    if fs.iter().any(|g| !g.same_grid(f)) {
        return domain("all functions must share one grid");
    }
    let mut kappa_bound = 0.0f64;
    for g in fs {
        kappa_bound = kappa_bound.max(weighted_sup_norm(g, NormPart::Full)?);
    }
    f.values()?;
    let windows: Vec<WindowErrors> = f
        .grid()
        .compact_radii()
        .iter()
        .map(|&radius| {
            let errors: Vec<f64> = fs.iter().map(|g| g.sup_distance_on(f, radius)).collect();
            let tail = *errors.last().unwrap();
            WindowErrors {
                radius,
                errors,
                tail,
            }
        })
        .collect();
    let plain_sup_tail = fs.last().unwrap().sup_distance(f);
    let converged = kappa_bound.is_finite() && windows.iter().all(|w| w.tail <= tolerance);
    Ok(MixedConvergenceReport {
        kappa_bound,
        windows,
        plain_sup_tail,
        tolerance,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::funcspace::{ExtReal, Weight, WeightedGrid};

    #[test]
    fn constant_norm() {
        let g = Arc::new(WeightedGrid::symmetric(2.0, 0.1).unwrap());
        let f = GridFunction::constant(g, 3.0).unwrap();
        assert_eq!(weighted_sup_norm(&f, NormPart::Full).unwrap(), 3.0);
    }

    #[test]
    fn decaying_weight_norm_of_identity() {
        // Dense scan oracle of |x| / (1 + x²) on [-2, 2]: maximum 1/2 at |x| = 1.
        let oracle = (0..=400_000)
            .map(|k| -2.0 + 4.0 * k as f64 / 400_000.0)
            .map(|x: f64| x.abs() / (1.0 + x * x))
            .fold(0.0, f64::max);
        assert!((oracle - 0.5).abs() < 1e-12);
        let g = Arc::new(
            WeightedGrid::symmetric(2.0, 0.01)
                .unwrap()
                .with_weight(Weight::Decaying),
        );
        let f = GridFunction::from_fn(g, |x| x).unwrap();
        let n = weighted_sup_norm(&f, NormPart::Full).unwrap();
        assert!((n - oracle).abs() < 1e-12);
    }

    #[test]
    fn positive_part_of_negative_constant() {
        let g = Arc::new(WeightedGrid::symmetric(1.0, 0.1).unwrap());
        let f = GridFunction::constant(g, -1.0).unwrap();
        assert_eq!(weighted_sup_norm(&f, NormPart::Positive).unwrap(), 0.0);
    }

    #[test]
    fn sentinel_rejected_by_full_norm() {
        let g = Arc::new(WeightedGrid::symmetric(1.0, 1.0).unwrap());
        let f = GridFunction::from_extended(
            g,
            &[ExtReal::NegInf, ExtReal::Finite(2.0), ExtReal::Finite(-5.0)],
        )
        .unwrap();
        assert!(weighted_sup_norm(&f, NormPart::Full).is_err());
        assert_eq!(weighted_sup_norm(&f, NormPart::Positive).unwrap(), 2.0);
    }

    #[test]
    fn empty_sequence_is_an_error() {
        let g = Arc::new(WeightedGrid::symmetric(1.0, 0.1).unwrap());
        let f = GridFunction::constant(g, 0.0).unwrap();
        assert!(mixed_convergence_report(&[], &f, 1e-6).is_err());
    }

    #[test]
    fn constant_and_uniform_sequences_converge() {
        let g = Arc::new(WeightedGrid::symmetric(4.0, 0.05).unwrap());
        let f = GridFunction::from_fn(g.clone(), |x| x.sin()).unwrap();
        let r = mixed_convergence_report(&vec![f.clone(); 5], &f, 1e-12).unwrap();
        assert!(r.converged);
        assert!(r.windows.iter().all(|w| w.errors.iter().all(|&e| e == 0.0)));

        let zero = GridFunction::constant(g.clone(), 0.0).unwrap();
        let fs: Vec<_> = (1..=1000)
            .map(|n| GridFunction::from_fn(g.clone(), |x| x / n as f64).unwrap())
            .collect();
        let r = mixed_convergence_report(&fs, &zero, 1e-2).unwrap();
        assert!(r.converged);
    }

    #[test]
    fn travelling_bump_converges_only_in_mixed_sense() {
        let g = Arc::new(
            WeightedGrid::symmetric(8.0, 0.05)
                .unwrap()
                .with_weight(Weight::Decaying),
        );
        let bump = |c: f64| move |x: f64| (1.0 - (x - c).abs()).max(0.0);
        let fs: Vec<_> = (1..=7)
            .map(|n| GridFunction::from_fn(g.clone(), bump(n as f64)).unwrap())
            .collect();
        let zero = GridFunction::constant(g, 0.0).unwrap();
        let r = mixed_convergence_report(&fs, &zero, 1e-12).unwrap();
        assert!(r.converged);
        assert!((r.plain_sup_tail - 1.0).abs() < 1e-12);
        // κ(1) = 1/2 bounds the weighted norm of the first bump.
        assert!(r.kappa_bound <= 0.5 + 1e-12);
    }
}
