use serde::{Serialize, Serializer};

use crate::error::{domain, Result};
use crate::funcspace::{ExtReal, GridFunction};

/// Upper ε-parallel function
/// `f^ε(x) = (sup_{|y-x|<=ε} max{f(y)κ(y), -1/ε} + ε) / κ(x)`.
///
/// On the lattice the usc envelope is the function itself, so the result
/// stands for `\bar f^ε`. `-∞` points enter through the `-1/ε` floor.
pub fn epsilon_parallel(f: &GridFunction, eps: f64) -> Result<GridFunction> {
    let grid = f.grid();
    if !(eps >= grid.dx() * (1.0 - 1e-9)) {
        return domain(format!("ε = {eps} is below the grid spacing {}", grid.dx()));
    }
    let floor = -1.0 / eps;
    let lifted: Vec<f64> = (0..f.len())
        .map(|j| match f.get(j) {
            ExtReal::NegInf => floor,
            ExtReal::Finite(v) => (v * grid.kappa(j)).max(floor),
        })
        .collect();
    let ext: Vec<ExtReal> = (0..f.len())
        .map(|i| {
            let m = grid
                .neighborhood(i, eps)
                .map(|j| lifted[j])
                .fold(f64::NEG_INFINITY, f64::max);
            ExtReal::Finite((m + eps) / grid.kappa(i))
        })
        .collect();
    GridFunction::from_extended(f.grid_arc().clone(), &ext)
}

/// Tail index from which a sequence stays below `\bar f^ε`, or failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailIndex {
    From(usize),
    Fail,
}

impl Serialize for TailIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TailIndex::From(n) => s.serialize_u64(*n as u64),
            TailIndex::Fail => s.serialize_str("fail"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DominationRow {
    pub epsilon: f64,
    /// Radius of the compact window `K = [-R, R]`.
    pub window: f64,
    /// Smallest one-based `n₀` with `f_n <= \bar f^ε` on `K` for every `n >= n₀`.
    pub n0: TailIndex,
    /// Largest excess `f_n - \bar f^ε` on `K` over the whole sequence.
    pub worst_gap: f64,
}

/// Tests `f_n <= \bar f^ε` eventually on each compact window of the grid,
/// for every `ε` in `eps_list`. Success for all pairs is the discrete
/// counterpart of `Γ-limsup f_n <= f`.
pub fn gamma_domination_check(
    fs: &[GridFunction],
    f: &GridFunction,
    eps_list: &[f64],
) -> Result<Vec<DominationRow>> {
    if fs.iter().any(|g| !g.same_grid(f)) {
        return domain("all functions must share one grid");
    }
    let mut rows = Vec::new();
    for &eps in eps_list {
        let fe = epsilon_parallel(f, eps)?;
        for &radius in f.grid().compact_radii() {
            let window = f.grid().window(radius);
            let excess: Vec<f64> = fs
                .iter()
                .map(|g| {
                    window
                        .clone()
                        .filter_map(|i| g.get(i).finite().map(|v| v - fe.get(i).finite().unwrap()))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            let n0 = match excess.iter().rposition(|&e| e > 0.0) {
                None => TailIndex::From(1),
                Some(k) if k + 1 < fs.len() => TailIndex::From(k + 2),
                Some(_) => TailIndex::Fail,
            };
            rows.push(DominationRow {
                epsilon: eps,
                window: radius,
                n0,
                worst_gap: excess.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            });
        }
    }
    Ok(rows)
}
