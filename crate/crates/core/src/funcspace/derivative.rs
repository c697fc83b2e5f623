use super::function::GridFunction;
use crate::error::{domain, LabError, Result};

/// Second-order finite-difference derivative of order 1 or 2: central
/// stencils in the interior, one-sided second-order stencils at the ends.
pub fn fd_derivative(f: &GridFunction, order: u8) -> Result<GridFunction> {
    let v = f.require_continuous("fd_derivative")?;
    let n = v.len();
    if n < 5 {
        return domain("finite differences need at least five grid points");
    }
    let h = f.grid().dx();
    let out: Vec<f64> = match order {
        1 => (0..n)
            .map(|i| {
                if i == 0 {
                    (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
                } else if i == n - 1 {
                    (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
                } else {
                    (v[i + 1] - v[i - 1]) / (2.0 * h)
                }
            })
            .collect(),
        2 => (0..n)
            .map(|i| {
                if i == 0 {
                    (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h)
                } else if i == n - 1 {
                    (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / (h * h)
                } else {
                    (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h)
                }
            })
            .collect(),
        other => {
            return Err(LabError::Unsupported(format!(
                "derivative order {other}; only 1 and 2 are available"
            )))
        }
    };
    f.with_values(out)
}

/// Largest absolute slope between neighbouring lattice points.
pub fn discrete_lipschitz(values: &[f64], dx: f64) -> f64 {
    values
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / dx)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::funcspace::WeightedGrid;

    #[test]
    fn quadratic_and_linear_are_exact() {
        let g = Arc::new(WeightedGrid::symmetric(2.0, 0.1).unwrap());
        let sq = GridFunction::from_fn(g.clone(), |x| x * x).unwrap();
        let d2 = fd_derivative(&sq, 2).unwrap();
        assert!(d2.finite().iter().all(|v| (v - 2.0).abs() < 1e-9));
        let lin = GridFunction::from_fn(g, |x| x).unwrap();
        let d1 = fd_derivative(&lin, 1).unwrap();
        assert!(d1.finite().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn order_three_is_unsupported() {
        let g = Arc::new(WeightedGrid::symmetric(2.0, 0.1).unwrap());
        let f = GridFunction::constant(g, 0.0).unwrap();
        assert!(matches!(fd_derivative(&f, 3), Err(LabError::Unsupported(_))));
    }

    #[test]
    fn sine_slope_error_decays_quadratically() {
        let errs: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&dx| {
                let g = Arc::new(WeightedGrid::symmetric(1.0, dx).unwrap());
                let f = GridFunction::from_fn(g.clone(), f64::sin).unwrap();
                let d = fd_derivative(&f, 1).unwrap();
                (d.finite()[g.nearest(0.0)] - 1.0).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let rate = (w[0] / w[1]).log2();
            assert!(rate > 1.9, "rate {rate}");
        }
    }
}
