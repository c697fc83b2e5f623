//! Monotone finite-difference HJB solution against the Chernoff limit of
//! the matching control step.

use std::sync::Arc;

use semigroup_lab::chernoff::{chernoff_run, ChernoffConfig, Schedule};
use semigroup_lab::funcspace::{GridFunction, WeightedGrid};
use semigroup_lab::operators::{hjb_fd_oracle, hjb_max_dt, ControlCost, ControlStep, Discretization, HjbScheme};

fn main() -> semigroup_lab::Result<()> {
    let grid = Arc::new(WeightedGrid::symmetric(8.0, 0.02)?);
    let f = GridFunction::from_fn(grid.clone(), |x| (-x * x).exp())?;
    let cost = ControlCost::entropic(2.0, 0.02)?;
    let t = 0.5;
    let dt = 0.9 * hjb_max_dt(&cost, grid.dx());
    let hjb = hjb_fd_oracle(&cost, &f, t, dt, HjbScheme::ExplicitUpwind)?;
    let step = ControlStep::new(cost, Discretization::Lattice);
    let (iterates, _) = chernoff_run(&step, &f, t, &Schedule::dyadic(t, 1, 6)?, &ChernoffConfig::default())?;
    println!("dt = {dt:.2e}");
    println!("sup |chernoff - hjb| on |x|<=2: {:.3e}", iterates.last().unwrap().sup_distance_on(&hjb, 2.0));
    Ok(())
}
