//! Difference quotients of a control semigroup against the smooth
//! Hamiltonian oracle, and Lipschitz-set classification.

use std::sync::Arc;

use semigroup_lab::experiments::loglog_slope;
use semigroup_lab::funcspace::{GridFunction, WeightedGrid};
use semigroup_lab::generator::{
    difference_quotient, lipschitz_membership, smooth_generator_oracle, Hamiltonian, SemigroupEval, Side,
};
use semigroup_lab::operators::{ControlCost, ControlStep, Discretization};

fn main() -> semigroup_lab::Result<()> {
    let grid = Arc::new(WeightedGrid::symmetric(4.0, 0.01)?);
    let cost = ControlCost::entropic(2.0, 0.02)?;
    let hs: Vec<f64> = (3..=8).map(|n| 2f64.powi(-n)).collect();
    let s = SemigroupEval::chernoff(ControlStep::new(cost.clone(), Discretization::Lattice), hs[0])?;

    let f = GridFunction::from_fn(grid.clone(), |x| x.tanh())?;
    let oracle = smooth_generator_oracle(&f, &Hamiltonian::Control(cost))?;
    let errs = hs
        .iter()
        .map(|&h| Ok(difference_quotient(&s, &f, h)?.sup_distance_on(&oracle, 2.0)))
        .collect::<semigroup_lab::Result<Vec<f64>>>()?;
    for (h, e) in hs.iter().zip(&errs) {
        println!("h = {h:.5}  error {e:.3e}");
    }
    println!("log-log slope {:.3}", loglog_slope(&hs, &errs));

    let root = GridFunction::from_fn(grid.clone(), |x| x.abs().min(4.0).sqrt())?;
    for (name, g) in [("tanh", &f), ("sqrt|x|", &root)] {
        let v = lipschitz_membership(&s, g, Side::Upper, &hs)?;
        println!("{name}: {:?} (C ≈ {:.3})", v.member, v.c_estimate);
    }
    Ok(())
}
