//! Chernoff iteration of the Wasserstein-perturbed heat step against the
//! entropic semigroup it converges to.

use std::sync::Arc;

use semigroup_lab::chernoff::{chernoff_run, ChernoffConfig, Schedule};
use semigroup_lab::funcspace::{GridFunction, WeightedGrid};
use semigroup_lab::operators::{
    symmetric_grid, Discretization, Entropic, PhiCost, ReferenceModel, StepOperator, WassersteinStep,
};

fn main() -> semigroup_lab::Result<()> {
    let grid = Arc::new(WeightedGrid::symmetric(8.0, 0.04)?);
    let f = GridFunction::from_fn(grid.clone(), |x| (-x * x).exp())?;
    let t = 0.5;
    let heat = ReferenceModel::brownian(1.0, Discretization::Lattice)?;
    let budgets = (0..=38).map(|k| k as f64 * 0.04).collect();
    let step = WassersteinStep::new(heat, PhiCost::quadratic(), symmetric_grid(1.5, 0.04)?, budgets)?
        .with_rates(symmetric_grid(2.0, 0.04)?)?;
    let oracle = Entropic::matching_quadratic(Discretization::Lattice).apply(t, &f)?;
    let (iterates, report) = chernoff_run(&step, &f, t, &Schedule::dyadic(t, 1, 4)?, &ChernoffConfig::default())?;
    for (u, row) in iterates.iter().zip(&report.rows) {
        println!("n = {}  k = {:>2}  error on |x|<=2: {:.3e}", row.n, row.k, u.sup_distance_on(&oracle, 2.0));
    }
    println!("direction {:?}, max violation {:.1e}", report.direction, report.max_violation);
    Ok(())
}
