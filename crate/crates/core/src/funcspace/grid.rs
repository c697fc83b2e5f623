use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Default nested compact windows `[-R, R]`.
pub const DEFAULT_COMPACT_RADII: [f64; 3] = [1.0, 2.0, 4.0];

/// Slack used when deciding whether a grid point lies inside a window.
const WINDOW_SLACK: f64 = 1e-9;

/// Shape of the weight function κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// κ ≡ 1, the bounded-continuous setting.
    Unit,
    /// κ(x) = 1 / (1 + x²).
    Decaying,
}

impl Weight {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Weight::Unit => 1.0,
            Weight::Decaying => 1.0 / (1.0 + x * x),
        }
    }
}

/// A uniform 1-D lattice `x_i = x_0 + i Δx` carrying a strictly positive
/// bounded weight and a list of nested compact windows.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGrid {
    x0: f64,
    dx: f64,
    n: usize,
    weight: Weight,
    kappa: Vec<f64>,
    compact_radii: Vec<f64>,
}

impl WeightedGrid {
    /// Lattice on `[x0, x0 + (n-1) dx]` with κ ≡ 1.
    pub fn uniform(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() || !x0.is_finite() {
            return domain(format!("grid spacing must be positive and finite, got {dx}"));
        }
        if n < 2 {
            return domain("a grid needs at least two points");
        }
        let mut grid = WeightedGrid {
            x0,
            dx,
            n,
            weight: Weight::Unit,
            kappa: Vec::new(),
            compact_radii: Vec::new(),
        };
        grid.kappa = (0..n).map(|i| grid.weight.eval(grid.x(i))).collect();
        let reach = grid.x_min().abs().min(grid.x_max().abs());
        grid.compact_radii = DEFAULT_COMPACT_RADII
            .iter()
            .copied()
            .filter(|&r| r <= reach + WINDOW_SLACK)
            .collect();
        Ok(grid)
    }

    /// Symmetric lattice on `[-span, span]`; `2 span / dx` must be an integer.
    pub fn symmetric(span: f64, dx: f64) -> Result<Self> {
        if !(span > 0.0) {
            return domain(format!("span must be positive, got {span}"));
        }
        let cells = 2.0 * span / dx;
        let rounded = cells.round();
        if (cells - rounded).abs() > 1e-6 || rounded < 1.0 {
            return domain(format!("span {span} is not a multiple of dx {dx}"));
        }
        Self::uniform(-span, dx, rounded as usize + 1)
    }

    pub fn with_weight(mut self, weight: Weight) -> Self {
        self.weight = weight;
        self.kappa = (0..self.n).map(|i| weight.eval(self.x(i))).collect();
        self
    }

    pub fn with_compact_radii(mut self, radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return domain("at least one compact window is required");
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
            return domain("compact radii must be positive and strictly increasing");
        }
        let reach = self.x_min().abs().min(self.x_max().abs());
        if radii.iter().any(|&r| r > reach + WINDOW_SLACK) {
            return domain(format!("compact radii must lie inside the span (reach {reach})"));
        }
        self.compact_radii = radii;
        Ok(self)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    #[inline]
    pub fn kappa(&self, i: usize) -> f64 {
        self.kappa[i]
    }

    pub fn kappa_values(&self) -> &[f64] {
        &self.kappa
    }

    pub fn compact_radii(&self) -> &[f64] {
        &self.compact_radii
    }

    /// Indices of the points with `|x| <= radius`.
    pub fn window(&self, radius: f64) -> Range<usize> {
        let lo = ((-radius - WINDOW_SLACK - self.x0) / self.dx).ceil().max(0.0) as usize;
        let hi = ((radius + WINDOW_SLACK - self.x0) / self.dx).floor();
        if hi < 0.0 {
            return 0..0;
        }
        let hi = (hi as usize).min(self.n - 1);
        if lo > hi {
            0..0
        } else {
            lo..hi + 1
        }
    }

    /// Indices of the points with `|x_j - x_i| <= radius`.
    pub fn neighborhood(&self, i: usize, radius: f64) -> Range<usize> {
        let m = ((radius + WINDOW_SLACK * self.dx) / self.dx).floor() as usize;
        i.saturating_sub(m)..(i + m + 1).min(self.n)
    }

    /// Index of the lattice point closest to `x` (clamped to the grid).
    pub fn nearest(&self, x: f64) -> usize {
        let s = ((x - self.x0) / self.dx).round();
        s.clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// Left neighbour and fractional offset for linear interpolation with
    /// clamped extension: `f(x) ≈ (1-θ) f_j + θ f_{j+1}`.
    #[inline]
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let s = (x - self.x0) / self.dx;
        if !(s > 0.0) {
            return (0, 0.0);
        }
        let last = (self.n - 1) as f64;
        if s >= last {
            return (self.n - 2, 1.0);
        }
        // snap points within rounding of a node onto it
        let r = s.round();
        if (s - r).abs() < 1e-9 {
            return if r >= last { (self.n - 2, 1.0) } else { (r as usize, 0.0) };
        }
        let j = s.floor();
        (j as usize, s - j)
    }

    /// Piecewise-linear interpolation of lattice values, constant beyond the span.
    #[inline]
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let (j, theta) = self.locate(x);
        if theta == 0.0 {
            values[j]
        } else if theta == 1.0 {
            values[j + 1]
        } else {
            (1.0 - theta) * values[j] + theta * values[j + 1]
        }
    }

    /// True when `z` is an integer multiple of the spacing.
    pub fn is_lattice_multiple(&self, z: f64) -> bool {
        let s = z / self.dx;
        (s - s.round()).abs() < 1e-9
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_grid_has_expected_points() {
        let g = WeightedGrid::symmetric(8.0, 0.02).unwrap();
        assert_eq!(g.len(), 801);
        assert!((g.x(400)).abs() < 1e-12);
        assert!((g.x_max() - 8.0).abs() < 1e-12);
        assert_eq!(g.compact_radii(), &[1.0, 2.0, 4.0]);
    }

    #[test]
    fn rejects_bad_spacing() {
        assert!(WeightedGrid::uniform(0.0, 0.0, 10).is_err());
        assert!(WeightedGrid::uniform(0.0, -1.0, 10).is_err());
        assert!(WeightedGrid::symmetric(1.0, 0.3).is_err());
    }

    #[test]
    fn window_indices() {
        let g = WeightedGrid::symmetric(2.0, 0.5).unwrap();
        let w = g.window(1.0);
        let xs: Vec<f64> = w.map(|i| g.x(i)).collect();
        assert_eq!(xs, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn radii_must_fit() {
        let g = WeightedGrid::symmetric(2.0, 0.5).unwrap();
        assert_eq!(g.compact_radii(), &[1.0, 2.0]);
        assert!(g.clone().with_compact_radii(vec![1.0, 3.0]).is_err());
        assert!(g.with_compact_radii(vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn interpolation_clamps() {
        let g = WeightedGrid::symmetric(1.0, 0.5).unwrap();
        let v: Vec<f64> = g.points().collect();
        assert_eq!(g.interpolate(&v, 5.0), 1.0);
        assert_eq!(g.interpolate(&v, -5.0), -1.0);
        assert!((g.interpolate(&v, 0.3) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn decaying_weight() {
        let g = WeightedGrid::symmetric(2.0, 1.0).unwrap().with_weight(Weight::Decaying);
        assert_eq!(g.kappa_values(), &[0.2, 0.5, 1.0, 0.5, 0.2]);
    }
}
