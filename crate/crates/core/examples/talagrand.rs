//! Transport inequality W₂(ν, N(0,t)) ≤ √(2t H(ν | N(0,t))) on Gaussian families.

use semigroup_lab::experiments::talagrand_table;

fn main() -> semigroup_lab::Result<()> {
    println!("{:>6} {:>8} {:>10} {:>10} {:>10}", "mean", "var", "W2", "bound", "slack");
    for r in talagrand_table(0.5, &[0.0, 1.0], &[0.25, 1.0, 4.0])? {
        println!("{:>6.2} {:>8.3} {:>10.5} {:>10.5} {:>10.2e}", r.mean, r.variance, r.w2, r.bound, r.slack);
    }
    Ok(())
}
