use std::sync::Arc;

use super::quadrature::QuadratureRule;
use super::transition::{Discretization, Law, Transition};
use super::{check_time, StepOperator};
use crate::error::{domain, Result};
use crate::funcspace::GridFunction;

/// Entropic semigroup `(1/γ) log E[exp(γ f(x + √v W_t))]`.
///
/// Its generator on smooth functions is `v/2 f'' + γ v/2 (f')²`. With `γ = 1`
/// and `v = 1` this is the value function of the quadratic drift penalty
/// `φ(v) = v²/2`; `γ = 2` gives `½ log E[exp(2 f)]`.
#[derive(Debug, Clone)]
pub struct Entropic {
    pub gamma: f64,
    pub var_rate: f64,
    pub disc: Discretization,
}

impl Entropic {
    pub fn new(gamma: f64, var_rate: f64, disc: Discretization) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return domain(format!("risk aversion must be positive, got {gamma}"));
        }
        if !(var_rate >= 0.0) || !var_rate.is_finite() {
            return domain(format!("variance rate must be nonnegative, got {var_rate}"));
        }
        Ok(Entropic { gamma, var_rate, disc })
    }

    /// The evaluator matching the quadratic drift penalty.
    pub fn matching_quadratic(disc: Discretization) -> Self {
        Entropic {
            gamma: 1.0,
            var_rate: 1.0,
            disc,
        }
    }
}

impl StepOperator for Entropic {
    fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        check_time(t)?;
        let v = f.require_continuous("entropic step")?;
        if t == 0.0 || self.var_rate == 0.0 {
            return Ok(f.clone());
        }
        let m = v.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let g = self.gamma;
        let sums = match &self.disc {
            // interpolate f, then exponentiate: exact on linear f
            Discretization::Quadrature(q) => {
                let grid = f.grid();
                let s = (self.var_rate * t).sqrt();
                grid.points()
                    .map(|x| {
                        q.nodes()
                            .iter()
                            .zip(q.weights())
                            .map(|(&z, &w)| w * (g * (grid.interpolate(v, x + s * z) - m)).exp())
                            .sum()
                    })
                    .collect()
            }
            Discretization::Lattice => {
                let e: Vec<f64> = v.iter().map(|&x| (g * (x - m)).exp()).collect();
                Transition::new(f.grid(), &Law::gaussian(0.0, self.var_rate * t), &self.disc)?.apply(&e)
            }
        };
        let out = sums
            .into_iter()
            .map(|s: f64| {
                if s > 0.0 {
                    Ok(m + s.ln() / g)
                } else {
                    domain("entropic step underflowed; oscillation too large for the risk aversion")
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        f.with_values(out)
    }

    fn name(&self) -> &str {
        "entropic"
    }
}

/// `½ log E[exp(2 f(x + W_t))]` by Gauss–Hermite quadrature.
pub fn entropic_exact(t: f64, f: &GridFunction, quad: &QuadratureRule) -> Result<GridFunction> {
    Entropic::new(2.0, 1.0, Discretization::Quadrature(Arc::new(quad.clone())))?.apply(t, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::WeightedGrid;

    fn grid() -> Arc<WeightedGrid> {
        Arc::new(WeightedGrid::symmetric(8.0, 0.02).unwrap())
    }

    #[test]
    fn constants_are_fixed() {
        let f = GridFunction::constant(grid(), 1.7).unwrap();
        let out = entropic_exact(0.4, &f, &QuadratureRule::default()).unwrap();
        assert!(out.finite().iter().all(|v| (v - 1.7).abs() < 1e-13));
        assert!(entropic_exact(-0.1, &f, &QuadratureRule::default()).is_err());
    }

    #[test]
    fn linear_functions_follow_the_mgf() {
        let g = grid();
        let theta = 0.6;
        let t = 0.5;
        let f = GridFunction::from_fn(g.clone(), |x| theta * x).unwrap();
        let out = entropic_exact(t, &f, &QuadratureRule::default()).unwrap();
        for i in g.window(2.0) {
            let want = theta * g.x(i) + theta * theta * t;
            assert!((out.finite()[i] - want).abs() < 1e-8, "{}", out.finite()[i] - want);
        }
    }

    #[test]
    fn semigroup_law() {
        let g = grid();
        let q = QuadratureRule::default();
        let f = GridFunction::from_fn(g.clone(), |x| (-x * x).exp()).unwrap();
        let two = entropic_exact(0.2, &entropic_exact(0.3, &f, &q).unwrap(), &q).unwrap();
        let one = entropic_exact(0.5, &f, &q).unwrap();
        assert!(two.sup_distance_on(&one, 3.0) < 1e-3);

        let lat = Entropic::matching_quadratic(Discretization::Lattice);
        let two = lat.apply(0.2, &lat.apply(0.3, &f).unwrap()).unwrap();
        let one = lat.apply(0.5, &f).unwrap();
        // exp∘log cancels, so the lattice version inherits the exact kernel law
        assert!(two.sup_distance(&one) < 1e-10);
    }
}
