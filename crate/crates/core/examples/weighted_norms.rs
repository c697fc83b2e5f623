//! κ-weighted norms and the mixed topology on a decaying-weight grid.

use std::sync::Arc;

use semigroup_lab::funcspace::{
    mixed_convergence_report, mollify, weighted_sup_norm, GridFunction, Mollifier, NormPart, Weight, WeightedGrid,
};

fn main() -> semigroup_lab::Result<()> {
    let grid = Arc::new(WeightedGrid::symmetric(8.0, 0.01)?.with_weight(Weight::Decaying));
    // |x| is unbounded but has a finite κ-norm for κ = 1/(1+x²)
    let f = GridFunction::from_fn(grid.clone(), f64::abs)?;
    println!("‖|x|‖_κ = {:.4}", weighted_sup_norm(&f, NormPart::Full)?);

    let smoothed: Vec<GridFunction> = (2..=6).map(|n| mollify(&f, &Mollifier::standard(1 << n)?)).collect::<Result<_, _>>()?;
    for (n, g) in (2..=6).zip(&smoothed) {
        println!("n = {:>2}: sup |f_n - f| on |x|<=2: {:.3e}", 1 << n, g.sup_distance_on(&f, 2.0));
    }
    let report = mixed_convergence_report(&smoothed, &f, 1e-2)?;
    println!("sup_n ‖f_n‖_κ = {:.4}", report.kappa_bound);
    Ok(())
}
