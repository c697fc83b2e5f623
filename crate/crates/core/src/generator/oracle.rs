use crate::error::{domain, Result};
use crate::funcspace::{discrete_lipschitz, fd_derivative, mollify, truncate, Cutoff, GridFunction, Mollifier};
use crate::gamma::{gamma_limsup, WindowSchedule};
use crate::operators::{ControlCost, PhiCost, ReferenceModel, StepOperator};

/// Hamiltonian of a model, evaluated on derivatives of smooth functions.
#[derive(Debug, Clone)]
pub enum Hamiltonian {
    /// `max_{(a,b)} (a/2 f'' + b f' - L(a, b))`.
    Control(ControlCost),
    /// `R'(0) f + φ*(|f'|)`.
    Perturbed { reference: ReferenceModel, phi: PhiCost },
    /// `v/2 f'' + γ v/2 (f')²`.
    Entropic { gamma: f64, var_rate: f64 },
    /// `R'(0) f`.
    Reference(ReferenceModel),
}

/// The model's generator on a smooth `f`, from finite-difference derivatives.
pub fn smooth_generator_oracle(f: &GridFunction, model: &Hamiltonian) -> Result<GridFunction> {
    let d1 = fd_derivative(f, 1)?;
    let d2 = fd_derivative(f, 2)?;
    let (d1, d2) = (d1.finite(), d2.finite());
    let grid = f.grid();
    let out: Vec<f64> = match model {
        Hamiltonian::Control(cost) => (0..f.len())
            .map(|i| {
                cost.controls()
                    .iter()
                    .map(|c| 0.5 * c.a * d2[i] + c.b * d1[i] - c.cost)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect(),
        Hamiltonian::Perturbed { reference, phi } => {
            let form = reference.generator_form()?;
            (0..f.len())
                .map(|i| form.eval(grid.x(i), d1[i], d2[i]) + phi.conjugate(d1[i].abs()))
                .collect()
        }
        Hamiltonian::Entropic { gamma, var_rate } => (0..f.len())
            .map(|i| 0.5 * var_rate * (d2[i] + gamma * d1[i] * d1[i]))
            .collect(),
        Hamiltonian::Reference(reference) => {
            let form = reference.generator_form()?;
            (0..f.len()).map(|i| form.eval(grid.x(i), d1[i], d2[i])).collect()
        }
    };
    f.with_values(out)
}

/// Translation commutator test `‖S(t)(τ_z f) - τ_z S(t) f‖ <= L r t |z|` on a window.
#[derive(Clone, Copy)]
pub struct CommutatorCheck<'a> {
    pub step: &'a dyn StepOperator,
    pub t: f64,
    /// Model constant `L` of the commutator bound.
    pub l: f64,
    /// Shifts are the lattice multiples up to this size.
    pub max_shift: f64,
    pub window: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct MollifiedPipeline {
    pub indices: Vec<usize>,
    /// `A(f * η_n)` for every `n`.
    pub sequence: Vec<GridFunction>,
    /// Γ-limsup of the sequence with windows `max(Δx, 1/n)`.
    pub limit: GridFunction,
    /// Largest excess of the commutator over its bound, when checked.
    pub commutator_excess: Option<f64>,
    pub flagged: bool,
}

fn shift_values(v: &[f64], k: isize) -> Vec<f64> {
    let last = v.len() as isize - 1;
    (0..v.len() as isize).map(|i| v[(i + k).clamp(0, last) as usize]).collect()
}

fn commutator_excess(f: &GridFunction, c: &CommutatorCheck<'_>) -> Result<f64> {
    let grid = f.grid();
    let dx = grid.dx();
    let r = discrete_lipschitz(f.finite(), dx);
    let sf = c.step.apply(c.t, f)?;
    let window = grid.window(c.window);
    let mut worst = f64::NEG_INFINITY;
    let kmax = (c.max_shift / dx).round().max(1.0) as isize;
    for k in [-kmax, -1, 1, kmax] {
        let shifted = f.with_values(shift_values(f.finite(), k))?;
        let a = c.step.apply(c.t, &shifted)?;
        let b = shift_values(sf.finite(), k);
        let gap = window.clone().map(|i| (a.finite()[i] - b[i]).abs()).fold(0.0, f64::max);
        worst = worst.max(gap - c.l * r * c.t * (k as f64 * dx).abs());
    }
    Ok(worst)
}

/// `A(f * η_n)` through the smooth oracle for each mollifier index, and the
/// Γ-limsup of that sequence.
pub fn mollified_generator_pipeline(
    f: &GridFunction,
    model: &Hamiltonian,
    indices: &[usize],
    commutator: Option<CommutatorCheck<'_>>,
) -> Result<MollifiedPipeline> {
    if indices.is_empty() {
        return domain("no mollifier indices");
    }
    if indices.windows(2).any(|w| w[1] <= w[0]) {
        return domain("mollifier indices must increase");
    }
    let sequence = indices
        .iter()
        .map(|&n| smooth_generator_oracle(&mollify(f, &Mollifier::standard(n)?)?, model))
        .collect::<Result<Vec<_>>>()?;
    let grid = f.grid();
    let w = WindowSchedule::new(
        indices.iter().map(|&n| (1.0 / n as f64).max(grid.dx())).collect(),
        grid,
    )?;
    let limit = gamma_limsup(&sequence, &w)?;
    let commutator_excess = commutator.map(|c| commutator_excess(f, &c)).transpose()?;
    let flagged = commutator
        .zip(commutator_excess)
        .is_some_and(|(c, e)| e > c.tolerance);
    Ok(MollifiedPipeline {
        indices: indices.to_vec(),
        sequence,
        limit,
        commutator_excess,
        flagged,
    })
}

/// `A(f φ_n)` for smooth cutoffs `φ_n` equal to 1 on `[-n, n]`.
pub fn truncated_generator_sequence(f: &GridFunction, model: &Hamiltonian, indices: &[usize]) -> Result<Vec<GridFunction>> {
    indices
        .iter()
        .map(|&n| smooth_generator_oracle(&truncate(f, &Cutoff::on_grid(f.grid(), n))?, model))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::funcspace::WeightedGrid;
    use crate::operators::{Discretization, Entropic};

    fn grid() -> Arc<WeightedGrid> {
        Arc::new(WeightedGrid::symmetric(6.0, 0.01).unwrap())
    }

    #[test]
    fn closed_form_hamiltonians() {
        let g = grid();
        let bump = GridFunction::from_fn(g.clone(), |x| (-x * x).exp()).unwrap();
        let ent = smooth_generator_oracle(&bump, &Hamiltonian::Entropic { gamma: 1.0, var_rate: 1.0 }).unwrap();
        for i in g.window(2.0) {
            let x = g.x(i);
            let (d1, d2) = (-2.0 * x * (-x * x).exp(), (4.0 * x * x - 2.0) * (-x * x).exp());
            assert!((ent.finite()[i] - 0.5 * (d2 + d1 * d1)).abs() < 1e-3);
        }

        let reference = ReferenceModel::brownian(1.0, Discretization::Lattice).unwrap();
        let lin = GridFunction::from_fn(g.clone(), |x| -0.8 * x).unwrap();
        let ball = Hamiltonian::Perturbed {
            reference: reference.clone(),
            phi: PhiCost::ball(0.3, 2.0).unwrap(),
        };
        let a = smooth_generator_oracle(&lin, &ball).unwrap();
        assert!(g.window(2.0).all(|i| (a.finite()[i] - 0.3 * 0.8).abs() < 1e-9));

        let c = GridFunction::constant(g.clone(), 2.0).unwrap();
        let control = Hamiltonian::Control(ControlCost::entropic(2.0, 0.1).unwrap());
        assert!(smooth_generator_oracle(&c, &control).unwrap().finite().iter().all(|&v| v == 0.0));
        let quad = Hamiltonian::Perturbed {
            reference,
            phi: PhiCost::quadratic(),
        };
        assert!(smooth_generator_oracle(&c, &quad).unwrap().finite().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mollified_kink() {
        let g = grid();
        let f = GridFunction::from_fn(g.clone(), |x| x.abs().min(3.0)).unwrap();
        let model = Hamiltonian::Entropic { gamma: 1.0, var_rate: 1.0 };
        let step = Entropic::matching_quadratic(Discretization::Lattice);
        let check = CommutatorCheck {
            step: &step,
            t: 0.1,
            l: 0.0,
            max_shift: 0.2,
            window: 2.0,
            tolerance: 1e-9,
        };
        let p = mollified_generator_pipeline(&f, &model, &[2, 4, 8, 16, 32], Some(check)).unwrap();
        assert!(!p.flagged, "{:?}", p.commutator_excess);
        // away from the kink the a.e. Hamiltonian is ½ (f')² = ½
        let off = g.nearest(1.0);
        assert!((p.limit.finite()[off] - 0.5).abs() < 1e-6);
        // at the kink the mollified curvature blows up
        assert!(p.limit.finite()[g.nearest(0.0)] > 10.0);
    }
}
