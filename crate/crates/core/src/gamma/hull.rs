use crate::error::{domain, Result};
use crate::funcspace::GridFunction;

fn lattice_half_width(r: f64, dx: f64) -> usize {
    (r / dx + 1e-9).floor() as usize
}

/// Which lattice neighbours enter an average around a point.
#[derive(Clone, Copy)]
enum Side {
    /// Both sides, centre excluded.
    Punctured,
    Left,
    Right,
}

/// Mean of `v` over offsets `1..=m` on the chosen side(s) of `i`, with
/// clamped boundary values, and the range of the values used.
fn side_average(v: &[f64], i: usize, m: usize, side: Side) -> (f64, f64, f64) {
    let last = v.len() as isize - 1;
    let at = |k: isize| v[(i as isize + k).clamp(0, last) as usize];
    let offsets: Vec<isize> = match side {
        Side::Punctured => (1..=m as isize).flat_map(|k| [-k, k]).collect(),
        Side::Left => (1..=m as isize).map(|k| -k).collect(),
        Side::Right => (1..=m as isize).collect(),
    };
    let (mut s, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
    for &k in &offsets {
        let y = at(k);
        s += y;
        lo = lo.min(y);
        hi = hi.max(y);
    }
    (s / offsets.len() as f64, lo, hi)
}

/// Averages at half-widths `m1 > m2`, extrapolated linearly to zero radius
/// and clamped to the range of the values in the smaller ball (the limit of
/// averages cannot leave it). One-sided means use the effective radius
/// `(m + 1) Δx`, which makes the extrapolation exact for affine `g`.
fn extrapolated(v: &[f64], i: usize, m1: usize, m2: usize, side: Side) -> f64 {
    let (a1, _, _) = side_average(v, i, m1, side);
    let (a2, lo, hi) = side_average(v, i, m2, side);
    if m1 == m2 {
        return a2;
    }
    let (r1, r2) = match side {
        Side::Punctured => (m1 as f64, m2 as f64),
        Side::Left | Side::Right => ((m1 + 1) as f64, (m2 + 1) as f64),
    };
    // line through (r1, a1), (r2, a2) evaluated at r = 0
    (a2 - r2 * (a1 - a2) / (r1 - r2)).clamp(lo, hi)
}

fn half_widths(g: &GridFunction, radii: &[f64]) -> Result<(usize, usize)> {
    let dx = g.grid().dx();
    if radii.len() < 2 {
        return domain("need at least two radii");
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) {
        return domain("radii must be strictly decreasing");
    }
    if radii.iter().any(|&r| r < dx * (1.0 - 1e-9)) {
        return domain("radii must be at least the grid spacing");
    }
    Ok((
        lattice_half_width(radii[radii.len() - 2], dx),
        lattice_half_width(radii[radii.len() - 1], dx),
    ))
}

/// Small-radius limit of the ball averages, `g̃(x) = lim_{r↓0} ⨍_{B(x,r)} g`,
/// from linear extrapolation in `r` through the last two radii. The centre
/// point is left out so that a single lattice point behaves as a null set.
pub fn ball_average_limit(g: &GridFunction, radii: &[f64]) -> Result<GridFunction> {
    let v = g.values()?;
    let (m1, m2) = half_widths(g, radii)?;
    let out = (0..v.len())
        .map(|i| extrapolated(v, i, m1, m2, Side::Punctured))
        .collect();
    g.with_values(out)
}

/// Upper semicontinuous hull of the averaged function `g̃`.
///
/// On the lattice `limsup_{y→x} g̃(y)` is read off from the left and right
/// one-sided average limits next to `x`, together with `g̃(x)` itself. The
/// result is tagged usc.
pub fn usc_hull_via_averages(g: &GridFunction, radii: &[f64]) -> Result<GridFunction> {
    let v = g.values()?;
    let (m1, m2) = half_widths(g, radii)?;
    let hull = (0..v.len())
        .map(|i| {
            [Side::Punctured, Side::Left, Side::Right]
                .into_iter()
                .map(|s| extrapolated(v, i, m1, m2, s))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(g.with_values(hull)?.into_usc())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::funcspace::{discrete_lipschitz, WeightedGrid};

    fn grid() -> Arc<WeightedGrid> {
        Arc::new(WeightedGrid::symmetric(2.0, 0.01).unwrap())
    }

    const RADII: [f64; 3] = [0.1, 0.05, 0.02];

    #[test]
    fn continuous_function_is_reproduced() {
        let g = grid();
        let f = GridFunction::from_fn(g.clone(), |x| (3.0 * x).sin() + x * x).unwrap();
        let h = usc_hull_via_averages(&f, &RADII).unwrap();
        let lip = discrete_lipschitz(f.finite(), g.dx());
        assert!(h.sup_distance(&f) <= 2.0 * lip * g.dx());
    }

    #[test]
    fn null_set_is_repaired() {
        let g = grid();
        let k = g.nearest(0.0);
        let mut v = vec![1.0; g.len()];
        v[k] = 0.0;
        let f = GridFunction::from_values(g.clone(), v).unwrap();
        let h = usc_hull_via_averages(&f, &RADII).unwrap();
        assert!(h.finite().iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn step_function_average_and_hull() {
        let g = grid();
        let f = GridFunction::from_fn(g.clone(), |x| if x > 1e-12 { 1.0 } else { 0.0 }).unwrap();
        let k = g.nearest(0.0);
        let avg = ball_average_limit(&f, &RADII).unwrap();
        assert!((avg.finite()[k] - 0.5).abs() < 1e-12);
        let h = usc_hull_via_averages(&f, &RADII).unwrap();
        assert_eq!(h.finite()[k], 1.0);
        assert_eq!(h.finite()[g.nearest(-0.5)], 0.0);
    }

    #[test]
    fn radii_validation() {
        let f = GridFunction::constant(grid(), 1.0).unwrap();
        assert!(usc_hull_via_averages(&f, &[0.02, 0.05]).is_err());
        assert!(usc_hull_via_averages(&f, &[0.1]).is_err());
        assert!(usc_hull_via_averages(&f, &[0.1, 0.001]).is_err());
    }
}
