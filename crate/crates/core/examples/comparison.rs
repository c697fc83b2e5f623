//! Ordering of semigroups built from nested control sets, and the
//! supersolution check on perturbations of the entropic semigroup.

use std::sync::Arc;

use semigroup_lab::funcspace::{GridFunction, WeightedGrid};
use semigroup_lab::generator::{comparison_harness, supersolution_check, HSchedule, SemigroupEval};
use semigroup_lab::operators::{ControlCost, ControlStep, Discretization, Entropic};

fn main() -> semigroup_lab::Result<()> {
    let grid = Arc::new(WeightedGrid::symmetric(4.0, 0.05)?);
    let probes: Vec<GridFunction> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&a| GridFunction::from_fn(grid.clone(), move |x| (-a * x * x).exp()))
        .collect::<Result<_, _>>()?;

    let big = ControlCost::entropic(2.0, 0.1)?;
    let small = big.restrict(|c| c.b.abs() <= 0.5)?;
    let s_big = SemigroupEval::chernoff(ControlStep::new(big, Discretization::Lattice), 0.05)?;
    let s_small = SemigroupEval::chernoff(ControlStep::new(small, Discretization::Lattice), 0.05)?;
    let rep = comparison_harness(&s_small, &s_big, &probes, &[0.25, 0.5], None, 1e-12)?;
    println!("small control set below large one: {} (max violation {:.2e})", rep.ordered, rep.max_violation);

    let s = Arc::new(SemigroupEval::exact(Entropic::matching_quadratic(Discretization::Lattice)));
    let f = probes[1].clone();
    let times: Vec<f64> = (0..4).map(|k| k as f64 * 0.125).collect();
    let hs = HSchedule::dyadic(0.125, 1, 4)?;
    for eps in [0.1, 0.0, -0.1] {
        let (s2, f2) = (s.clone(), f.clone());
        let u = move |t: f64| s2.eval(t, &f2)?.add_scalar(eps * t);
        let r = supersolution_check(&s, &u, &f, &times, &hs, None, 2.0, 1e-6)?;
        println!("u = S(t)f + {eps:+} t: comp2 {} conclusion {} failing {:?}", r.comp2_holds, r.conclusion_holds, r.failing);
    }
    Ok(())
}
