use serde::{Deserialize, Serialize};

use super::{iterate, Partition, Schedule};
use crate::error::{domain, Result};
use crate::funcspace::{discrete_lipschitz, weighted_sup_norm, GridFunction, NormPart};
use crate::operators::StepOperator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusRow {
    pub delta: f64,
    /// `max_{|x-y| <= δ} |f_n(x) - f_n(y)|` for every `n`.
    pub per_n: Vec<f64>,
    pub max: f64,
}

/// Moduli of continuity of a sequence on a common grid.
pub fn equicontinuity_modulus(fs: &[GridFunction], radii: &[f64]) -> Result<Vec<ModulusRow>> {
    let Some(first) = fs.first() else {
        return Ok(radii.iter().map(|&delta| ModulusRow { delta, per_n: vec![], max: 0.0 }).collect());
    };
    if fs.iter().any(|f| !f.same_grid(first)) {
        return domain("equicontinuity moduli need a common grid");
    }
    let dx = first.grid().dx();
    let mut out = Vec::with_capacity(radii.len());
    for &delta in radii {
        let reach = (delta / dx * (1.0 + 1e-9)).floor() as usize;
        let per_n: Vec<f64> = fs
            .iter()
            .map(|f| {
                let v = f.finite();
                let mut m = 0.0f64;
                for s in 1..=reach.min(v.len().saturating_sub(1)) {
                    for i in 0..v.len() - s {
                        m = m.max((v[i + s] - v[i]).abs());
                    }
                }
                m
            })
            .collect();
        let max = per_n.iter().fold(0.0f64, |m, &v| m.max(v));
        out.push(ModulusRow { delta, per_n, max });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzTrackRow {
    pub n: u32,
    pub h: f64,
    pub k: usize,
    pub sup_norm: f64,
    pub lip_const: f64,
}

/// Per-level Lipschitz constants of the iterates of an `r`-Lipschitz probe,
/// and the composition check `β(β(r, s), t - s)` vs `β(r, t)` at `s ≈ t/2` on
/// the finest level, with `β` read off the probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzTrack {
    pub r: f64,
    pub t: f64,
    pub rows: Vec<LipschitzTrackRow>,
    pub s: f64,
    pub beta_s: f64,
    pub beta_t: f64,
    pub beta_composed: f64,
    /// `β(β(r, s), t - s) - β(r, t)`; nonpositive when the composition law holds.
    pub composition_gap: f64,
}

/// Canonical `r`-Lipschitz probe `r · clamp(x, -1, 1)`.
fn probe(like: &GridFunction, r: f64) -> Result<GridFunction> {
    GridFunction::from_fn(like.grid_arc().clone(), |x| r * x.clamp(-1.0, 1.0))
}

fn lip(f: &GridFunction) -> f64 {
    discrete_lipschitz(f.finite(), f.grid().dx())
}

pub fn lipschitz_bound_track<S: StepOperator + ?Sized>(
    step: &S,
    like: &GridFunction,
    r: f64,
    t: f64,
    schedule: &Schedule,
) -> Result<LipschitzTrack> {
    if !(r > 0.0) {
        return domain(format!("probe Lipschitz constant must be positive, got {r}"));
    }
    if schedule.is_empty() {
        return domain("empty schedule");
    }
    let f = probe(like, r)?;
    let mut rows = Vec::with_capacity(schedule.len());
    for (&n, &h) in schedule.levels.iter().zip(&schedule.widths) {
        let p = Partition::new(h, t)?;
        let u = iterate(step, &p, &f)?;
        rows.push(LipschitzTrackRow {
            n,
            h,
            k: p.k,
            sup_norm: weighted_sup_norm(&u, NormPart::Full)?,
            lip_const: lip(&u),
        });
    }

    let h = *schedule.widths.last().unwrap();
    let full = Partition::new(h, t)?;
    let first = Partition { h, t: 0.0, k: full.k / 2 };
    let rest = Partition { h, t: 0.0, k: full.k - first.k };
    let beta_s = lip(&iterate(step, &first, &f)?);
    let beta_t = rows.last().unwrap().lip_const;
    let beta_composed = lip(&iterate(step, &rest, &probe(like, beta_s.max(f64::MIN_POSITIVE))?)?);
    Ok(LipschitzTrack {
        r,
        t,
        rows,
        s: first.reached(),
        beta_s,
        beta_t,
        beta_composed,
        composition_gap: beta_composed - beta_t,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::funcspace::WeightedGrid;
    use crate::operators::{Discretization, ReferenceModel, ReferenceStep};

    fn grid() -> Arc<WeightedGrid> {
        Arc::new(WeightedGrid::symmetric(4.0, 0.05).unwrap())
    }

    #[test]
    fn moduli_of_simple_families() {
        let g = grid();
        let consts: Vec<_> = (0..3).map(|k| GridFunction::constant(g.clone(), k as f64).unwrap()).collect();
        let m = equicontinuity_modulus(&consts, &[0.1, 0.5]).unwrap();
        assert!(m.iter().all(|r| r.max == 0.0));

        let lip: Vec<_> = (1..=3)
            .map(|k| GridFunction::from_fn(g.clone(), move |x| (k as f64 * 0.5) * x.sin()).unwrap())
            .collect();
        for row in equicontinuity_modulus(&lip, &[0.1, 0.2, 0.4]).unwrap() {
            assert!(row.max <= 1.5 * row.delta + 1e-12);
        }

        let osc: Vec<_> = [1.0, 4.0, 16.0, 64.0]
            .iter()
            .map(|&n| GridFunction::from_fn(g.clone(), move |x| (n * x).sin()).unwrap())
            .collect();
        let row = &equicontinuity_modulus(&osc, &[0.1]).unwrap()[0];
        assert!(row.per_n[3] > 1.0 && row.per_n[0] < 0.11);
    }

    #[test]
    fn convolution_keeps_the_probe_constant() {
        let g = grid();
        let model = ReferenceModel::brownian(1.0, Discretization::Lattice).unwrap();
        let step = ReferenceStep { model: Arc::new(model) };
        let like = GridFunction::constant(g, 0.0).unwrap();
        let s = Schedule::dyadic(0.25, 1, 3).unwrap();
        let track = lipschitz_bound_track(&step, &like, 2.0, 0.25, &s).unwrap();
        assert!(track.rows.iter().all(|r| r.lip_const <= 2.0 + 1e-12));
        assert!(track.rows.iter().all(|r| r.sup_norm <= 2.0 + 1e-12));
    }
}
