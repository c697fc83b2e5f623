//! Structural properties every one-step family must have, checked
//! numerically on a corpus of probes.

use serde::{Deserialize, Serialize};

use super::StepOperator;
use crate::error::{domain, Result};
use crate::funcspace::{discrete_lipschitz, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// `I(t) 0 = 0`.
    ZeroToZero,
    /// `f <= g ⇒ I(t) f <= I(t) g`.
    Monotone,
    /// `I(λf + (1-λ)g) <= λ I f + (1-λ) I g`.
    Convex,
    /// `‖I f - I g‖_∞ <= ‖f - g‖_∞`.
    Contraction,
    /// `I f - I g <= λ (I((f - g)/λ + g) - I g)` for `λ ∈ {1/2, 1}`.
    ConvexFunctional,
    /// `‖I(τ_z f) - τ_z I f‖_∞ <= L r t |z|` on the interior window.
    ShiftCommutator,
    /// `Lip(I f) <= e^{L t} Lip(f)`.
    LipschitzPropagation,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [
        Axiom::ZeroToZero,
        Axiom::Monotone,
        Axiom::Convex,
        Axiom::Contraction,
        Axiom::ConvexFunctional,
        Axiom::ShiftCommutator,
        Axiom::LipschitzPropagation,
    ];
}

/// Settings of an axiom run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomSettings {
    pub t: f64,
    /// Model constant `L` of the commutator and Lipschitz bounds.
    pub l: f64,
    /// Radius of the interior window for the commutator check.
    pub window: f64,
    /// Tolerance of the exact-arithmetic properties.
    pub tolerance: f64,
    /// Extra slack per unit Lipschitz constant for the two Lipschitz
    /// properties of steps that interpolate off the lattice.
    pub grid_allowance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomRow {
    pub operator: String,
    pub axiom: Axiom,
    /// Largest violation over the corpus; `<= 0` means satisfied with room.
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn excess(a: &GridFunction, b: &GridFunction) -> f64 {
    a.finite()
        .iter()
        .zip(b.finite())
        .map(|(x, y)| x - y)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn shift_values(v: &[f64], k: isize) -> Vec<f64> {
    let last = v.len() as isize - 1;
    (0..v.len() as isize).map(|i| v[(i + k).clamp(0, last) as usize]).collect()
}

/// Checks every [`Axiom`] for `step` on all probes and consecutive pairs of
/// probes. Shifts are the lattice translations by 1 and 5 nodes both ways.
pub fn check_axioms(step: &dyn StepOperator, probes: &[GridFunction], s: &AxiomSettings) -> Result<Vec<AxiomRow>> {
    if probes.len() < 2 {
        return domain("axiom checks need at least two probes");
    }
    if probes.iter().any(|p| !p.same_grid(&probes[0])) {
        return domain("probes must share one grid");
    }
    let t = s.t;
    let grid = probes[0].grid_arc().clone();
    let dx = grid.dx();
    let images = probes.iter().map(|f| step.apply(t, f)).collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..probes.len()).map(|i| (i, (i + 1) % probes.len())).collect();
    let mut worst = [f64::NEG_INFINITY; 7];

    let zero = GridFunction::constant(grid.clone(), 0.0)?;
    worst[0] = step.apply(t, &zero)?.finite().iter().fold(0.0, |m: f64, v| m.max(v.abs()));

    for &(i, j) in &pairs {
        let (f, g) = (&probes[i], &probes[j]);
        let (fi, gi) = (&images[i], &images[j]);

        let upper = f.zip_with(g, f64::max)?;
        worst[1] = worst[1].max(excess(fi, &step.apply(t, &upper)?));

        for lam in [0.25, 0.5, 0.75] {
            let mix = f.zip_with(g, |a, b| lam * a + (1.0 - lam) * b)?;
            let chord = fi.zip_with(gi, |a, b| lam * a + (1.0 - lam) * b)?;
            worst[2] = worst[2].max(excess(&step.apply(t, &mix)?, &chord));
        }

        let gap = fi.sup_distance(gi) - f.sup_distance(g);
        worst[3] = worst[3].max(gap);

        for lam in [0.5, 1.0] {
            let lifted = f.zip_with(g, |a, b| (a - b) / lam + b)?;
            let il = step.apply(t, &lifted)?;
            let bound = il.zip_with(gi, |a, b| lam * (a - b))?;
            let lhs = fi.zip_with(gi, |a, b| a - b)?;
            worst[4] = worst[4].max(excess(&lhs, &bound));
        }
    }

    let window = grid.window(s.window);
    let growth = (s.l * t).exp();
    for (f, fi) in probes.iter().zip(&images) {
        let r = discrete_lipschitz(f.finite(), dx);
        for k in [-5isize, -1, 1, 5] {
            let shifted = f.with_values(shift_values(f.finite(), k))?;
            let a = step.apply(t, &shifted)?;
            let b = shift_values(fi.finite(), k);
            let gap = window.clone().map(|i| (a.finite()[i] - b[i]).abs()).fold(0.0, f64::max);
            let bound = s.l * r * t * (k as f64 * dx).abs() + s.grid_allowance * r;
            worst[5] = worst[5].max(gap - bound);
        }
        let lip = discrete_lipschitz(fi.finite(), dx);
        worst[6] = worst[6].max(lip - growth * r - s.grid_allowance * r);
    }

    Ok(Axiom::ALL
        .iter()
        .zip(worst)
        .map(|(&axiom, w)| AxiomRow {
            operator: step.name().to_string(),
            axiom,
            worst: w,
            tolerance: s.tolerance,
            pass: w <= s.tolerance,
        })
        .collect())
}
