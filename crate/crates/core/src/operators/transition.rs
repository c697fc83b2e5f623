//! Linear Markov kernels on the lattice.
//!
//! A [`Law`] describes one transition `x ↦ scale·x + mean + Y`. It is turned
//! into a lattice kernel either by quadrature with linear interpolation
//! (clamped outside the grid) or by the exact lattice semigroup `exp(G)` of
//! a reflected birth–death generator with the same mean and variance.

use std::sync::Arc;

use super::quadrature::QuadratureRule;
use crate::error::{domain, Result};
use crate::funcspace::WeightedGrid;

/// Random part of a transition.
#[derive(Debug, Clone, PartialEq)]
pub enum Noise {
    /// Centred normal law with the given variance.
    Gaussian { var: f64 },
    /// Atoms `(y_i, w_i)` with weights summing to 1.
    Atoms(Arc<[(f64, f64)]>),
}

/// Law of `scale·x + mean + Y` started at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Law {
    pub scale: f64,
    pub mean: f64,
    pub noise: Noise,
}

impl Law {
    pub fn gaussian(mean: f64, var: f64) -> Self {
        Law {
            scale: 1.0,
            mean,
            noise: Noise::Gaussian { var },
        }
    }

    pub fn dirac(mean: f64) -> Self {
        Law::gaussian(mean, 0.0)
    }

    pub fn shifted(&self, by: f64) -> Self {
        Law {
            mean: self.mean + by,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Discretization {
    Quadrature(Arc<QuadratureRule>),
    /// Exact lattice semigroup; requires `scale = 1` and Gaussian noise.
    Lattice,
}

impl Discretization {
    pub fn quadrature() -> Self {
        Discretization::Quadrature(Arc::new(QuadratureRule::default()))
    }
}

/// `ln(1e-18)`: Poisson terms below this weight are dropped.
const LOG_TAIL: f64 = -41.45;

#[derive(Debug, Clone)]
enum Repr {
    /// Row-compressed sparse matrix.
    Sparse {
        row_ptr: Vec<usize>,
        idx: Vec<u32>,
        wt: Vec<f64>,
    },
    /// `Σ_k π_k P^k` with `P v_i = p_left v_{i-1} + p_right v_{i+1}` (reflected).
    Lattice {
        p_left: f64,
        p_right: f64,
        poisson: Vec<f64>,
    },
    Identity,
}

/// A lattice kernel ready to be applied to value vectors.
#[derive(Debug, Clone)]
pub struct Transition {
    n: usize,
    repr: Repr,
}

impl Transition {
    pub fn new(grid: &WeightedGrid, law: &Law, disc: &Discretization) -> Result<Self> {
        if !law.scale.is_finite() || !law.mean.is_finite() {
            return domain("transition law has non-finite coefficients");
        }
        match disc {
            Discretization::Quadrature(q) => Self::quadrature(grid, law, q),
            Discretization::Lattice => Self::lattice(grid, law),
        }
    }

    fn quadrature(grid: &WeightedGrid, law: &Law, q: &QuadratureRule) -> Result<Self> {
        let atoms: Vec<(f64, f64)> = match &law.noise {
            Noise::Gaussian { var } if *var < 0.0 => return domain("negative variance"),
            Noise::Gaussian { var } if *var == 0.0 => vec![(0.0, 1.0)],
            Noise::Gaussian { var } => {
                let s = var.sqrt();
                q.nodes()
                    .iter()
                    .zip(q.weights())
                    .map(|(&x, &w)| (s * x, w))
                    .collect()
            }
            Noise::Atoms(a) => a.to_vec(),
        };
        let n = grid.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut idx = Vec::with_capacity(2 * n * atoms.len());
        let mut wt = Vec::with_capacity(2 * n * atoms.len());
        row_ptr.push(0);
        for i in 0..n {
            let x = law.scale * grid.x(i) + law.mean;
            for &(y, w) in &atoms {
                let (j, th) = grid.locate(x + y);
                if th == 0.0 {
                    idx.push(j as u32);
                    wt.push(w);
                } else if th == 1.0 {
                    idx.push(j as u32 + 1);
                    wt.push(w);
                } else {
                    idx.push(j as u32);
                    wt.push(w * (1.0 - th));
                    idx.push(j as u32 + 1);
                    wt.push(w * th);
                }
            }
            row_ptr.push(idx.len());
        }
        Ok(Transition {
            n,
            repr: Repr::Sparse { row_ptr, idx, wt },
        })
    }

    fn lattice(grid: &WeightedGrid, law: &Law) -> Result<Self> {
        if law.scale != 1.0 {
            return domain("lattice kernels need an identity drift map");
        }
        let var = match law.noise {
            Noise::Gaussian { var } if var >= 0.0 => var,
            Noise::Gaussian { .. } => return domain("negative variance"),
            Noise::Atoms(_) => return domain("lattice kernels need Gaussian noise"),
        };
        let dx = grid.dx();
        let m = law.mean;
        let diff = var / (2.0 * dx * dx);
        // central drift while the rates stay nonnegative, upwind otherwise
        let (r_left, r_right) = if m.abs() * dx <= var {
            (diff - m / (2.0 * dx), diff + m / (2.0 * dx))
        } else {
            (diff + (-m).max(0.0) / dx, diff + m.max(0.0) / dx)
        };
        let lambda = r_left + r_right;
        if lambda == 0.0 {
            return Ok(Transition {
                n: grid.len(),
                repr: Repr::Identity,
            });
        }
        let log_lambda = lambda.ln();
        let mut poisson = Vec::new();
        let mut log_p = -lambda;
        let mut k = 0usize;
        loop {
            poisson.push(if log_p > LOG_TAIL { log_p.exp() } else { 0.0 });
            if k as f64 > lambda && log_p < LOG_TAIL {
                break;
            }
            k += 1;
            log_p += log_lambda - (k as f64).ln();
        }
        let total: f64 = poisson.iter().sum();
        poisson.iter_mut().for_each(|p| *p /= total);
        Ok(Transition {
            n: grid.len(),
            repr: Repr::Lattice {
                p_left: r_left / lambda,
                p_right: r_right / lambda,
                poisson,
            },
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.apply_many(&[v]).pop().unwrap()
    }

    /// Applies the kernel to several vectors in one pass.
    pub fn apply_many(&self, vs: &[&[f64]]) -> Vec<Vec<f64>> {
        debug_assert!(vs.iter().all(|v| v.len() == self.n));
        match &self.repr {
            Repr::Identity => vs.iter().map(|v| v.to_vec()).collect(),
            Repr::Sparse { row_ptr, idx, wt } => vs
                .iter()
                .map(|v| {
                    (0..self.n)
                        .map(|i| {
                            let (a, b) = (row_ptr[i], row_ptr[i + 1]);
                            idx[a..b]
                                .iter()
                                .zip(&wt[a..b])
                                .map(|(&j, &w)| w * v[j as usize])
                                .sum()
                        })
                        .collect()
                })
                .collect(),
            Repr::Lattice {
                p_left,
                p_right,
                poisson,
            } => {
                let n = self.n;
                let mut cur: Vec<Vec<f64>> = vs.iter().map(|v| v.to_vec()).collect();
                let mut next = vec![vec![0.0; n]; vs.len()];
                let mut acc: Vec<Vec<f64>> = cur
                    .iter()
                    .map(|v| v.iter().map(|&x| poisson[0] * x).collect())
                    .collect();
                for &pk in &poisson[1..] {
                    for (c, nx) in cur.iter().zip(next.iter_mut()) {
                        lattice_step(c, nx, *p_left, *p_right);
                    }
                    std::mem::swap(&mut cur, &mut next);
                    if pk > 0.0 {
                        for (a, c) in acc.iter_mut().zip(&cur) {
                            a.iter_mut().zip(c).for_each(|(a, &c)| *a += pk * c);
                        }
                    }
                }
                acc
            }
        }
    }
}

#[inline]
fn lattice_step(v: &[f64], out: &mut [f64], pl: f64, pr: f64) {
    let n = v.len();
    if n == 1 {
        out[0] = v[0];
        return;
    }
    out[0] = pl * v[0] + pr * v[1];
    for i in 1..n - 1 {
        out[i] = pl * v[i - 1] + pr * v[i + 1];
    }
    out[n - 1] = pl * v[n - 2] + pr * v[n - 1];
}
