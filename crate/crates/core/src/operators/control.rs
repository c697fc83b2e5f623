use std::sync::Arc;

use super::cost::ControlCost;
use super::transition::{Discretization, Law, Transition};
use super::{check_time, StepOperator};
use crate::error::Result;
use crate::funcspace::GridFunction;

/// Static control step
/// `(I(t) f)(x) = max_{(a,b)} ( E[f(x + √a W_t + b t)] - L(a, b) t )`.
#[derive(Debug, Clone)]
pub struct ControlStep {
    pub cost: Arc<ControlCost>,
    pub disc: Discretization,
}

impl ControlStep {
    pub fn new(cost: ControlCost, disc: Discretization) -> Self {
        ControlStep {
            cost: Arc::new(cost),
            disc,
        }
    }
}

impl StepOperator for ControlStep {
    fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        check_time(t)?;
        let v = f.require_continuous("control step")?;
        let mut best = vec![f64::NEG_INFINITY; v.len()];
        for c in self.cost.controls() {
            let k = Transition::new(f.grid(), &Law::gaussian(c.b * t, c.a * t), &self.disc)?;
            let penalty = c.cost * t;
            for (b, e) in best.iter_mut().zip(k.apply(v)) {
                *b = b.max(e - penalty);
            }
        }
        f.with_values(best)
    }

    fn name(&self) -> &str {
        "control"
    }
}

pub fn control_step(cost: &ControlCost, disc: &Discretization, t: f64, f: &GridFunction) -> Result<GridFunction> {
    ControlStep::new(cost.clone(), disc.clone()).apply(t, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::WeightedGrid;

    #[test]
    fn constants_and_linear_functions() {
        let g = Arc::new(WeightedGrid::symmetric(8.0, 0.02).unwrap());
        let cost = ControlCost::entropic(3.0, 0.05).unwrap();
        for disc in [Discretization::quadrature(), Discretization::Lattice] {
            let step = ControlStep::new(cost.clone(), disc);
            let c = GridFunction::constant(g.clone(), -0.4).unwrap();
            let out = step.apply(0.3, &c).unwrap();
            assert!(out.finite().iter().all(|v| (v + 0.4).abs() < 1e-13));

            // sup_b θ b t - b² t / 2 = θ² t / 2 at b = θ, which lies on the b-grid
            let theta = 0.7;
            let f = GridFunction::from_fn(g.clone(), |x| theta * x).unwrap();
            let out = step.apply(0.3, &f).unwrap();
            for i in g.window(2.0) {
                let want = theta * g.x(i) + 0.3 * theta * theta / 2.0;
                assert!((out.finite()[i] - want).abs() < 1e-10, "{}", out.finite()[i] - want);
            }
        }
    }

    #[test]
    fn dominates_the_zero_cost_control() {
        let g = Arc::new(WeightedGrid::symmetric(4.0, 0.05).unwrap());
        let cost = ControlCost::from_grid(&[0.5, 1.0, 2.0], &[-1.0, 0.0, 1.0], |a, b| (a - 1.0).powi(2) + b * b).unwrap();
        let zc = cost.zero_cost_control();
        let f = GridFunction::from_fn(g.clone(), |x| (-x * x).exp()).unwrap();
        let disc = Discretization::quadrature();
        let out = control_step(&cost, &disc, 0.2, &f).unwrap();
        let base = Transition::new(&g, &Law::gaussian(zc.b * 0.2, zc.a * 0.2), &disc)
            .unwrap()
            .apply(f.finite());
        assert!(out.finite().iter().zip(&base).all(|(a, b)| a >= b));
    }
}
