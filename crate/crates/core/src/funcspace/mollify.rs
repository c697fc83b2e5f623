use super::function::{ExtReal, FunctionClass, GridFunction};
use super::grid::WeightedGrid;
use crate::error::{domain, Result};

/// Number of samples of the reference profile on `[-1, 1]`.
const PROFILE_SAMPLES: usize = 4001;

fn standard_bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

/// Smooth nonnegative kernel `η` supported in `[-1, 1]` with unit mass, and
/// its rescaling `η_n(x) = n η(n x)`.
#[derive(Debug, Clone)]
pub struct Mollifier {
    /// Samples of `η` on a uniform grid of `[-1, 1]`, normalized so that the
    /// trapezoidal integral equals 1.
    profile: Vec<f64>,
    n: usize,
}

impl Mollifier {
    /// The standard bump `exp(-1/(1-x²))`, normalized.
    pub fn standard(n: usize) -> Result<Self> {
        Self::from_profile(standard_bump, n)
    }

    /// Kernel from an arbitrary nonnegative profile on `[-1, 1]`.
    pub fn from_profile(eta: impl Fn(f64) -> f64, n: usize) -> Result<Self> {
        if n == 0 {
            return domain("mollifier index must be positive");
        }
        let h = 2.0 / (PROFILE_SAMPLES - 1) as f64;
        let mut profile: Vec<f64> = (0..PROFILE_SAMPLES)
            .map(|k| eta(-1.0 + k as f64 * h))
            .collect();
        if profile.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return domain("kernel profile must be nonnegative and finite");
        }
        let mass = trapezoid(&profile, h);
        if !(mass > 0.0) {
            return domain("kernel profile has zero mass");
        }
        profile.iter_mut().for_each(|v| *v /= mass);
        Ok(Mollifier { profile, n })
    }

    pub fn index(&self) -> usize {
        self.n
    }

    /// Support radius `1/n` of `η_n`.
    pub fn radius(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Trapezoidal integral of the normalized profile.
    pub fn profile_mass(&self) -> f64 {
        trapezoid(&self.profile, 2.0 / (PROFILE_SAMPLES - 1) as f64)
    }

    fn eta(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            return 0.0;
        }
        let s = (x + 1.0) / 2.0 * (PROFILE_SAMPLES - 1) as f64;
        let j = (s.floor() as usize).min(PROFILE_SAMPLES - 2);
        let th = s - j as f64;
        (1.0 - th) * self.profile[j] + th * self.profile[j + 1]
    }

    /// Discrete kernel weights at offsets `k Δx`, `|k| <= m`, by the
    /// trapezoidal rule on the lattice; renormalized to unit sum.
    pub fn lattice_weights(&self, dx: f64) -> Vec<f64> {
        let n = self.n as f64;
        let m = (self.radius() / dx + 1e-9).floor() as usize;
        let mut w: Vec<f64> = (0..=2 * m)
            .map(|k| {
                let y = (k as f64 - m as f64) * dx;
                n * self.eta(n * y) * dx
            })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter_mut().for_each(|v| *v /= total);
        } else {
            w = vec![0.0; 2 * m + 1];
            w[m] = 1.0;
        }
        w
    }
}

fn trapezoid(v: &[f64], h: f64) -> f64 {
    let inner: f64 = v[1..v.len() - 1].iter().sum();
    h * (inner + 0.5 * (v[0] + v[v.len() - 1]))
}

/// Discrete convolution `f * η_n` with clamped extension at the boundary.
pub fn mollify(f: &GridFunction, m: &Mollifier) -> Result<GridFunction> {
    let values = f.require_continuous("mollify")?;
    let grid = f.grid();
    let width = grid.x_max() - grid.x_min();
    if 2.0 * m.radius() > width {
        return domain(format!(
            "kernel support {} exceeds the grid span {}",
            2.0 * m.radius(),
            width
        ));
    }
    let w = m.lattice_weights(grid.dx());
    let half = (w.len() / 2) as isize;
    let last = grid.len() as isize - 1;
    let out = (0..grid.len() as isize)
        .map(|i| {
            w.iter()
                .enumerate()
                .map(|(k, &wk)| {
                    // (f * η)(x_i) = Σ_k f(x_i - y_k) η(y_k)
                    let j = (i - (k as isize - half)).clamp(0, last) as usize;
                    wk * values[j]
                })
                .sum()
        })
        .collect();
    f.with_values(out)
}

/// Smooth cutoff `φ_n`: equal to 1 on `[-n, n]`, vanishing for `|x| >= n + 1`.
#[derive(Debug, Clone)]
pub struct Cutoff {
    n: usize,
    values: Vec<f64>,
}

fn smooth_step_core(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

impl Cutoff {
    pub fn profile(n: usize, x: f64) -> f64 {
        let r = x.abs() - n as f64;
        let a = smooth_step_core(1.0 - r);
        let b = smooth_step_core(r);
        a / (a + b)
    }

    pub fn on_grid(grid: &WeightedGrid, n: usize) -> Self {
        Cutoff {
            n,
            values: grid.points().map(|x| Self::profile(n, x)).collect(),
        }
    }

    pub fn index(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Pointwise product `f φ_n`; a `-∞` point stays `-∞` where `φ_n > 0` and
/// becomes 0 where the cutoff vanishes.
pub fn truncate(f: &GridFunction, c: &Cutoff) -> Result<GridFunction> {
    if c.values.len() != f.len() {
        return domain("cutoff and function live on different grids");
    }
    match f.class() {
        FunctionClass::Continuous => {
            let v = f
                .finite()
                .iter()
                .zip(&c.values)
                .map(|(a, b)| a * b)
                .collect();
            f.with_values(v)
        }
        FunctionClass::Usc => {
            let ext: Vec<ExtReal> = (0..f.len())
                .map(|i| match f.get(i) {
                    ExtReal::NegInf if c.values[i] > 0.0 => ExtReal::NegInf,
                    ExtReal::NegInf => ExtReal::Finite(0.0),
                    ExtReal::Finite(v) => ExtReal::Finite(v * c.values[i]),
                })
                .collect();
            GridFunction::from_extended(f.grid_arc().clone(), &ext)
        }
    }
}
