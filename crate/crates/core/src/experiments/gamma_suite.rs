use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::config::{ExperimentConfig, GammaSection};
use super::output::{Check, Outcome, Report, Table};
use crate::error::Result;
use crate::funcspace::{discrete_lipschitz, weighted_sup_norm, GridFunction, NormPart, Weight, WeightedGrid};
use crate::gamma::{epsilon_parallel, gamma_lim, gamma_limsup, gamma_limsup_report, WindowSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaProperty {
    /// `f_n ↓ f` has Γ-limit `f`.
    DecreasingLimit,
    /// `Γ-limsup (f_n + g_n) <= Γ-limsup f_n + Γ-limsup g_n`.
    Subadditive,
    /// `f_n <= g_n` passes to the Γ-limsup.
    Monotone,
    /// `Γ-limsup (f_n ∨ g) = (Γ-limsup f_n) ∨ g` for continuous `g`.
    MaxRule,
    /// `-1/ε <= \bar f^ε κ <= ‖f⁺‖_κ + ε`.
    ParallelBounds,
    /// `\bar f^ε` decreases to `f` as `ε ↓ Δx`.
    ParallelDecrease,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaCaseRow {
    pub case: usize,
    pub weight: Weight,
    pub property: GammaProperty,
    /// Largest excess over the property's window bound.
    pub excess: f64,
    /// The window bound itself.
    pub bound: f64,
}

/// Random trigonometric sum `Σ a_k sin(ω_k x + φ_k)` and its Lipschitz bound.
fn random_smooth(rng: &mut ChaCha8Rng) -> (impl Fn(f64) -> f64, f64) {
    let terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.5..3.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let lip = terms.iter().map(|(a, w, _)| a.abs() * w).sum();
    (move |x: f64| terms.iter().map(|(a, w, p)| a * (w * x + p).sin()).sum(), lip)
}

fn noisy(rng: &mut ChaCha8Rng, base: &GridFunction, amp: f64) -> Result<GridFunction> {
    let v = base.finite().iter().map(|b| b + amp * rng.gen_range(-1.0..1.0)).collect();
    base.with_values(v)
}

fn max_excess(a: &GridFunction, b: &GridFunction) -> f64 {
    a.finite()
        .iter()
        .zip(b.finite())
        .map(|(x, y)| x - y)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Runs every [`GammaProperty`] on `c.cases` random cases drawn from `seed`,
/// alternating unit and decaying weights.
pub fn gamma_suite(seed: u64, c: &GammaSection) -> Result<Vec<GammaCaseRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for case in 0..c.cases {
        let weight = if case % 2 == 0 { Weight::Unit } else { Weight::Decaying };
        let grid = Arc::new(WeightedGrid::symmetric(c.span, c.dx)?.with_weight(weight));
        let w = WindowSchedule::standard(&grid, c.length)?;
        let (fx, _) = random_smooth(&mut rng);
        let f = GridFunction::from_fn(grid.clone(), fx)?;
        let lip = discrete_lipschitz(f.finite(), c.dx);
        let mut push = |property, excess, bound| {
            rows.push(GammaCaseRow {
                case,
                weight,
                property,
                excess,
                bound,
            })
        };

        // decreasing sequence f + c u / n² with 1/2 <= u <= 3/2
        let (amp, om, ph) = (rng.gen_range(0.2..1.0), rng.gen_range(0.5..3.0), rng.gen_range(0.0..6.0));
        let dec: Vec<GridFunction> = (1..=c.length)
            .map(|n| {
                let k = amp / (n * n) as f64;
                GridFunction::from_fn(grid.clone(), |x| fx_eval(&f, x) + k * (1.0 + 0.5 * (om * x + ph).sin()))
            })
            .collect::<Result<_>>()?;
        let rep = gamma_limsup_report(&dec, &w)?;
        let m = rep.tail_start;
        let bound = lip * w.radii()[m] + 1.5 * amp / ((m + 1) * (m + 1)) as f64;
        let above = max_excess(&rep.tail, &f) - bound;
        let below = max_excess(&f, &rep.tail);
        let exists = gamma_lim(&dec, &w)?.limit.is_some();
        push(
            GammaProperty::DecreasingLimit,
            if exists { above.max(below) } else { f64::INFINITY },
            bound,
        );

        // random bounded sequences around two smooth functions
        let (gx, lip_g) = random_smooth(&mut rng);
        let g = GridFunction::from_fn(grid.clone(), gx)?;
        let fs: Vec<GridFunction> = (0..c.length).map(|_| noisy(&mut rng, &f, 0.3)).collect::<Result<_>>()?;
        let gs: Vec<GridFunction> = (0..c.length).map(|_| noisy(&mut rng, &g, 0.3)).collect::<Result<_>>()?;
        let sums: Vec<GridFunction> = fs
            .iter()
            .zip(&gs)
            .map(|(a, b)| a.zip_with(b, |x, y| x + y))
            .collect::<Result<_>>()?;
        let (lf, lg) = (gamma_limsup(&fs, &w)?, gamma_limsup(&gs, &w)?);
        let split = lf.zip_with(&lg, |x, y| x + y)?;
        push(GammaProperty::Subadditive, max_excess(&gamma_limsup(&sums, &w)?, &split), 0.0);

        let above_f: Vec<GridFunction> = fs
            .iter()
            .map(|a| {
                let v = a.finite().iter().map(|x| x + rng.gen_range(0.0..0.5)).collect();
                a.with_values(v)
            })
            .collect::<Result<_>>()?;
        push(GammaProperty::Monotone, max_excess(&lf, &gamma_limsup(&above_f, &w)?), 0.0);

        let capped: Vec<GridFunction> = fs.iter().map(|a| a.zip_with(&g, f64::max)).collect::<Result<_>>()?;
        let lhs = gamma_limsup(&capped, &w)?;
        let rhs = lf.zip_with(&g, f64::max)?;
        let bound = lip_g * w.radii()[m];
        push(
            GammaProperty::MaxRule,
            (max_excess(&lhs, &rhs) - bound).max(max_excess(&rhs, &lhs)),
            bound,
        );

        // upper ε-parallel functions
        let kappa = grid.kappa_values();
        let fk: Vec<f64> = f.finite().iter().zip(kappa).map(|(v, k)| v * k).collect();
        let top = weighted_sup_norm(&f, NormPart::Positive)?;
        let mut bounds_excess = f64::NEG_INFINITY;
        let mut decrease_excess = f64::NEG_INFINITY;
        let mut prev: Option<GridFunction> = None;
        let epsilons = [0.5, 0.25, 0.125, c.dx];
        for &eps in &epsilons {
            let fe = epsilon_parallel(&f, eps)?;
            for (v, k) in fe.finite().iter().zip(kappa) {
                bounds_excess = bounds_excess.max(-1.0 / eps - v * k).max(v * k - top - eps);
            }
            if let Some(p) = &prev {
                decrease_excess = decrease_excess.max(max_excess(&fe, p));
            }
            prev = Some(fe);
        }
        push(GammaProperty::ParallelBounds, bounds_excess, 0.0);
        let last = prev.expect("nonempty ε list");
        let lip_fk = discrete_lipschitz(&fk, c.dx);
        let bound = c.dx * (1.0 + lip_fk);
        let gap = last
            .finite()
            .iter()
            .zip(&fk)
            .zip(kappa)
            .map(|((v, fkv), k)| v * k - fkv)
            .fold(f64::NEG_INFINITY, f64::max);
        let below = fk
            .iter()
            .zip(last.finite())
            .zip(kappa)
            .map(|((fkv, v), k)| fkv - v * k)
            .fold(f64::NEG_INFINITY, f64::max);
        push(
            GammaProperty::ParallelDecrease,
            decrease_excess.max(gap - bound).max(below),
            bound,
        );
    }
    Ok(rows)
}

fn fx_eval(f: &GridFunction, x: f64) -> f64 {
    f.interpolate(x)
}

pub(super) fn gamma_demo(cfg: &ExperimentConfig) -> Result<Outcome> {
    let tol = cfg.tolerance();
    let rows = gamma_suite(cfg.seed, &cfg.gamma)?;
    let worst = rows.iter().map(|r| r.excess).fold(f64::NEG_INFINITY, f64::max);
    let failing: Vec<&GammaCaseRow> = rows.iter().filter(|r| r.excess > tol).collect();
    let checks = vec![Check::at_most("worst_excess", worst, tol)];
    let details = json!({
        "seed": cfg.seed,
        "cases": cfg.gamma.cases,
        "length": cfg.gamma.length,
        "failing": failing,
    });
    Ok(Outcome {
        report: Report::new(cfg.experiment.name(), None, tol, checks, details),
        tables: vec![Table::from_rows("gamma_cases", &rows)?],
    })
}
