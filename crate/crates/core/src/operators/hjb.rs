use serde::{Deserialize, Serialize};

use super::check_time;
use super::cost::ControlCost;
use crate::error::{domain, Result};
use crate::funcspace::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HjbScheme {
    /// Forward Euler in time, central second differences and upwind first
    /// differences; reflecting (zero-flux) ghost cells at both ends.
    #[default]
    ExplicitUpwind,
}

/// Largest time step for which the explicit scheme is monotone on spacing `dx`.
pub fn hjb_max_dt(cost: &ControlCost, dx: f64) -> f64 {
    let worst = cost
        .controls()
        .iter()
        .map(|c| c.a / (dx * dx) + c.b.abs() / dx)
        .fold(0.0f64, f64::max);
    1.0 / worst
}

/// Finite-difference solution of `u_t = max_{(a,b)} (a/2 u'' + b u' - L(a, b))`,
/// `u(0) = f`, up to time `t`.
///
/// The step is shrunk to `t / ceil(t / dt)`. The scheme is monotone when
/// `dt (a/Δx² + |b|/Δx) ≤ 1` for every control; violations are rejected
/// before stepping.
pub fn hjb_fd_oracle(cost: &ControlCost, f: &GridFunction, t: f64, dt: f64, scheme: HjbScheme) -> Result<GridFunction> {
    check_time(t)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return domain(format!("time step must be positive, got {dt}"));
    }
    let HjbScheme::ExplicitUpwind = scheme;
    let mut u = f.require_continuous("finite-difference oracle")?.to_vec();
    let dx = f.grid().dx();
    let bound = hjb_max_dt(cost, dx);
    if dt > bound {
        return domain(format!("CFL violated: dt = {dt} but the monotone bound is {bound}"));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let steps = (t / dt).ceil() as usize;
    let dt = t / steps as f64;
    let n = u.len();
    let mut next = vec![0.0; n];
    for _ in 0..steps {
        for i in 0..n {
            let c = u[i];
            let l = if i == 0 { c } else { u[i - 1] };
            let r = if i + 1 == n { c } else { u[i + 1] };
            let d2 = (r - 2.0 * c + l) / (dx * dx);
            let fwd = (r - c) / dx;
            let bwd = (c - l) / dx;
            let h = cost
                .controls()
                .iter()
                .map(|k| {
                    let d1 = if k.b >= 0.0 { fwd } else { bwd };
                    0.5 * k.a * d2 + k.b * d1 - k.cost
                })
                .fold(f64::NEG_INFINITY, f64::max);
            next[i] = c + dt * h;
        }
        std::mem::swap(&mut u, &mut next);
    }
    f.with_values(u)
}
