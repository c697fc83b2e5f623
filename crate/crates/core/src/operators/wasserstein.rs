use std::sync::Arc;

use super::cost::PhiCost;
use super::reference::ReferenceModel;
use super::{check_time, StepOperator};
use crate::error::{domain, Result};
use crate::funcspace::GridFunction;

pub const DEFAULT_MULTIPLIERS: usize = 64;

/// Wasserstein perturbation
/// `(I(t) f)(x) = sup_ν ( ∫ f(ψ_t(x) + z) ν(dz) - φ_t(W_p(μ_t, ν)) )`.
///
/// The reference measure is the lattice kernel of the model, so every atom
/// sits on a lattice node. Candidates `ν` move each atom by a displacement
/// from `displacements` or from `t · rates`, with `f` read off by linear
/// interpolation between nodes: for a multiplier `λ` the atom at node `j`
/// moves to the maximizer of `f(x_j + z) - λ|z|^p`. The rate displacements
/// keep the moves resolved when `t |f'|` falls below the grid spacing. A candidate
/// is scored either with its own transport cost or through the budget grid.
/// Common shifts `z` of all atoms are candidates as well, except when `φ_t`
/// is linear in the transport cost: then the critical multiplier already
/// dominates every other candidate.
#[derive(Debug, Clone)]
pub struct WassersteinStep {
    pub model: Arc<ReferenceModel>,
    pub phi: Arc<PhiCost>,
    displacements: Vec<f64>,
    rates: Vec<f64>,
    budgets: Vec<f64>,
    multipliers: usize,
}

/// Displacement `z` as node offset `k` plus fraction `w` of the next cell.
#[derive(Debug, Clone, Copy)]
struct Move {
    k: isize,
    w: f64,
    cost: f64,
}

impl Move {
    fn at(&self, v: &[f64], j: usize) -> f64 {
        let last = v.len() as isize - 1;
        let a = v[(j as isize + self.k).clamp(0, last) as usize];
        if self.w == 0.0 {
            return a;
        }
        let b = v[(j as isize + self.k + 1).clamp(0, last) as usize];
        (1.0 - self.w) * a + self.w * b
    }
}

impl WassersteinStep {
    pub fn new(model: ReferenceModel, phi: PhiCost, displacements: Vec<f64>, budgets: Vec<f64>) -> Result<Self> {
        if displacements.is_empty() {
            return domain("empty displacement grid");
        }
        if budgets.is_empty() {
            return domain("empty budget grid");
        }
        if !displacements.contains(&0.0) {
            return domain("displacement grid must contain 0");
        }
        if budgets.iter().any(|w| !(*w >= 0.0)) || displacements.iter().any(|z| !z.is_finite()) {
            return domain("budgets must be nonnegative and displacements finite");
        }
        let mut displacements = displacements;
        displacements.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
        displacements.dedup();
        Ok(WassersteinStep {
            model: Arc::new(model),
            phi: Arc::new(phi),
            displacements,
            rates: Vec::new(),
            budgets,
            multipliers: DEFAULT_MULTIPLIERS,
        })
    }

    pub fn with_multipliers(mut self, n: usize) -> Self {
        self.multipliers = n.max(2);
        self
    }

    /// Adds displacements `t b` for every rate `b`, capped at the largest
    /// fixed displacement.
    pub fn with_rates(mut self, rates: Vec<f64>) -> Result<Self> {
        if rates.iter().any(|b| !b.is_finite()) {
            return domain("rates must be finite");
        }
        self.rates = rates;
        Ok(self)
    }

    pub fn displacements(&self) -> &[f64] {
        &self.displacements
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    fn z_max(&self) -> f64 {
        self.displacements.iter().fold(0.0f64, |m, z| m.max(z.abs()))
    }

    fn moves(&self, t: f64, dx: f64) -> Vec<Move> {
        let p = self.phi.p();
        let cap = self.z_max();
        let mut zs: Vec<f64> = self.displacements.clone();
        zs.extend(self.rates.iter().map(|b| b * t).filter(|z| z.abs() <= cap));
        zs.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
        zs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * dx);
        zs.into_iter()
            .map(|z| {
                let s = z / dx;
                let r = s.round();
                let (k, w) = if (s - r).abs() < 1e-9 { (r, 0.0) } else { (s.floor(), s - s.floor()) };
                Move {
                    k: k as isize,
                    w,
                    cost: z.abs().powf(p),
                }
            })
            .collect()
    }

    fn multiplier_set(&self, t: f64, osc: f64, moves: &[Move], dx: f64) -> Vec<f64> {
        let z_max = moves.iter().fold(0.0f64, |m, mv| m.max(mv.cost)).max(dx.powf(self.phi.p()));
        let z_min = moves
            .iter()
            .map(|mv| mv.cost)
            .filter(|&c| c > 0.0)
            .fold(f64::INFINITY, f64::min)
            .min(dx.powf(self.phi.p()));
        // below lo the displacement cap binds; above hi nothing moves
        let lo = osc / z_max / 4.0;
        let hi = 4.0 * osc / z_min;
        let n = self.multipliers;
        let mut out: Vec<f64> = (0..n)
            .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
            .collect();
        if let Some(l) = self.phi.critical_multiplier(t) {
            out.push(l);
        }
        out.push(f64::INFINITY);
        out
    }
}

impl StepOperator for WassersteinStep {
    fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        check_time(t)?;
        let v = f.require_continuous("Wasserstein step")?;
        let grid = f.grid();
        let dx = grid.dx();
        let steps = self.moves(t, dx);
        let kernel = self.model.transition(t, grid)?;
        let osc = v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x)) - v.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        if osc == 0.0 {
            return f.with_values(kernel.apply(v));
        }
        let n = v.len();
        let lambdas = self.multiplier_set(t, osc, &steps, dx);

        // best responses: moved value f(x_j + z*) and cost |z*|^p per λ
        let mut moved: Vec<Vec<f64>> = Vec::with_capacity(lambdas.len());
        let mut costs: Vec<Vec<f64>> = Vec::with_capacity(lambdas.len());
        for &lam in &lambdas {
            let mut mv = v.to_vec();
            let mut cs = vec![0.0; n];
            if lam.is_finite() {
                for j in 0..n {
                    let mut best = v[j];
                    for m in &steps {
                        let pen = lam * m.cost;
                        if pen > osc {
                            break;
                        }
                        let y = m.at(v, j);
                        if y - pen > best {
                            best = y - pen;
                            mv[j] = y;
                            cs[j] = m.cost;
                        }
                    }
                }
            }
            moved.push(mv);
            costs.push(cs);
        }

        let shifts: Vec<(Vec<f64>, f64)> = if self.phi.critical_multiplier(t).is_some() {
            Vec::new()
        } else {
            steps
                .iter()
                .filter(|m| m.cost > 0.0)
                .map(|m| ((0..n).map(|j| m.at(v, j)).collect(), m.cost))
                .collect()
        };

        let mut inputs: Vec<&[f64]> = Vec::with_capacity(2 * lambdas.len() + shifts.len());
        inputs.extend(moved.iter().map(|m| m.as_slice()));
        inputs.extend(shifts.iter().map(|(s, _)| s.as_slice()));
        inputs.extend(costs.iter().map(|c| c.as_slice()));
        let mut out = kernel.apply_many(&inputs);
        let mut transport = out.split_off(lambdas.len() + shifts.len());
        transport.extend(shifts.iter().map(|&(_, c)| vec![c; n]));
        let values = out;

        let p = self.phi.p();
        let budget_pen: Vec<f64> = self.budgets.iter().map(|&w| self.phi.phi_t(t, w)).collect();
        let budget_cap: Vec<f64> = self.budgets.iter().map(|&w| w.powf(p)).collect();
        let result = (0..n)
            .map(|i| {
                let mut best = f64::NEG_INFINITY;
                for (val, tr) in values.iter().zip(&transport) {
                    let c = tr[i].max(0.0);
                    let pen = self.phi.phi_t(t, c.powf(1.0 / p));
                    best = best.max(val[i] - pen);
                }
                for (&pen, &cap) in budget_pen.iter().zip(&budget_cap) {
                    if !pen.is_finite() {
                        continue;
                    }
                    let g = values
                        .iter()
                        .zip(&transport)
                        .filter(|(_, tr)| tr[i] <= cap)
                        .map(|(val, _)| val[i])
                        .fold(f64::NEG_INFINITY, f64::max);
                    best = best.max(g - pen);
                }
                best
            })
            .collect();
        f.with_values(result)
    }

    fn name(&self) -> &str {
        "wasserstein"
    }
}

pub fn wasserstein_step(
    model: &ReferenceModel,
    phi: &PhiCost,
    t: f64,
    f: &GridFunction,
    budgets: &[f64],
    displacements: &[f64],
) -> Result<GridFunction> {
    WassersteinStep::new(model.clone(), phi.clone(), displacements.to_vec(), budgets.to_vec())?.apply(t, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::WeightedGrid;
    use crate::operators::{drift_step, reference_step, symmetric_grid, Discretization};

    fn setup() -> (Arc<WeightedGrid>, ReferenceModel, Vec<f64>, Vec<f64>) {
        let g = Arc::new(WeightedGrid::symmetric(6.0, 0.05).unwrap());
        let m = ReferenceModel::brownian(1.0, Discretization::quadrature()).unwrap();
        let z = symmetric_grid(1.5, 0.05).unwrap();
        let w: Vec<f64> = (0..=30).map(|k| k as f64 * 0.05).collect();
        (g, m, z, w)
    }

    #[test]
    fn zero_budget_is_the_reference_step() {
        let (g, m, z, w) = setup();
        let f = GridFunction::from_fn(g, |x| (-x * x).exp()).unwrap();
        let i = wasserstein_step(&m, &PhiCost::zero_budget(2.0).unwrap(), 0.2, &f, &w, &z).unwrap();
        let r = reference_step(&m, 0.2, &f).unwrap();
        assert!(i.sup_distance(&r) < 1e-15);
    }

    #[test]
    fn lipschitz_gain_is_bounded_by_the_conjugate() {
        let (g, m, z, w) = setup();
        let phi = PhiCost::quadratic();
        let f = GridFunction::from_fn(g.clone(), |x| x.clamp(-1.0, 1.0)).unwrap();
        for t in [0.1, 0.25, 0.5] {
            let i = wasserstein_step(&m, &phi, t, &f, &w, &z).unwrap();
            let r = reference_step(&m, t, &f).unwrap();
            let b: Vec<f64> = (-30..=30).map(|k| k as f64 * 0.05 / t).collect();
            let j = drift_step(&m, &phi, t, &f, &b).unwrap();
            for k in 0..g.len() {
                let (iv, rv, jv) = (i.finite()[k], r.finite()[k], j.finite()[k]);
                assert!(iv - rv >= -1e-12);
                assert!(iv - rv <= phi.conjugate(1.0) * t + 1e-12);
                if g.x(k).abs() <= 3.0 {
                    // common displacement b t is one of the candidates
                    assert!(iv >= jv - 1e-12, "t = {t}, x = {}: {}", g.x(k), jv - iv);
                }
            }
        }
    }

    #[test]
    fn rejects_degenerate_grids() {
        let (g, m, _, w) = setup();
        let f = GridFunction::from_fn(g, |x| x.sin()).unwrap();
        assert!(wasserstein_step(&m, &PhiCost::quadratic(), 0.1, &f, &w, &[0.07]).is_err());
        assert!(wasserstein_step(&m, &PhiCost::quadratic(), 0.1, &f, &[], &[0.0]).is_err());
    }

    #[test]
    fn rate_moves_resolve_short_steps() {
        // with t |f'| well below the spacing only the rate moves can gain
        let (g, m, z, w) = setup();
        let phi = PhiCost::quadratic();
        let f = GridFunction::from_fn(g.clone(), |x| 0.5 * x.clamp(-2.0, 2.0)).unwrap();
        let t = 0.01;
        let coarse = WassersteinStep::new(m.clone(), phi.clone(), z.clone(), w.clone()).unwrap();
        let fine = coarse.clone().with_rates(symmetric_grid(1.0, 0.05).unwrap()).unwrap();
        let r = reference_step(&m, t, &f).unwrap();
        let i0 = g.nearest(0.0);
        let gain_coarse = coarse.apply(t, &f).unwrap().finite()[i0] - r.finite()[i0];
        let gain_fine = fine.apply(t, &f).unwrap().finite()[i0] - r.finite()[i0];
        assert!(gain_coarse.abs() < 1e-12);
        // φ*(|f'|) t = t/8 for φ(v) = v²/2
        assert!((gain_fine - t / 8.0).abs() < 1e-9, "{gain_fine}");
    }
}
