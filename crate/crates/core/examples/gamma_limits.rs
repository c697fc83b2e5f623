//! Discrete Γ-limsup of an oscillating sequence and upper ε-parallel functions.

use std::sync::Arc;

use semigroup_lab::funcspace::{GridFunction, WeightedGrid};
use semigroup_lab::gamma::{epsilon_parallel, gamma_lim, gamma_limsup, WindowSchedule};

fn main() -> semigroup_lab::Result<()> {
    let grid = Arc::new(WeightedGrid::symmetric(2.0, 0.01)?);
    let w = WindowSchedule::standard(&grid, 24)?;

    // f_n(x) = sin(n x) has Γ-limsup 1 but no pointwise limit
    let fs: Vec<GridFunction> = (1..=24)
        .map(|n| GridFunction::from_fn(grid.clone(), move |x| (n as f64 * 4.0 * x).sin()))
        .collect::<Result<_, _>>()?;
    let up = gamma_limsup(&fs, &w)?;
    let lo = up.finite().iter().cloned().fold(f64::INFINITY, f64::min);
    println!("Γ-limsup sin(nx): min over grid {lo:.4}");

    // decreasing f + 1/n has Γ-limit f
    let f = GridFunction::from_fn(grid.clone(), |x| (3.0 * x).cos())?;
    let dec: Vec<GridFunction> = (1..=24).map(|n| f.add_scalar(1.0 / n as f64)).collect::<Result<_, _>>()?;
    let lim = gamma_lim(&dec, &w)?;
    println!("Γ-lim exists: {}, worst gap {:.3e}", lim.limit.is_some(), lim.worst_gap);

    for eps in [0.5, 0.1, 0.02] {
        let fe = epsilon_parallel(&f, eps)?;
        println!("ε = {eps}: sup (f^ε - f) = {:.4}", fe.max_excess_over(&f));
    }
    Ok(())
}
