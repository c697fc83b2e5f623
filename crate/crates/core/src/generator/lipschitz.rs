use serde::{Deserialize, Serialize};

use super::SemigroupEval;
use crate::error::{domain, Result};
use crate::funcspace::{weighted_sup_norm, GridFunction, NormPart};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `‖(S(h) f - f)⁺‖_κ <= c h`.
    Upper,
    /// `‖S(h) f - f‖_κ <= c h`.
    Full,
    /// Both `f` and `-f` in the full set.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Yes,
    No,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzVerdict {
    pub member: Membership,
    /// Largest observed ratio `‖·‖_κ / h`.
    pub c_estimate: f64,
    /// Largest tested `h`.
    pub h0: f64,
    pub side: Side,
    /// `(h, ratio)` in the order tested.
    pub ratios: Vec<(f64, f64)>,
}

/// Ratios below this count as zero.
const ZERO: f64 = 1e-14;

fn ratio(s: &SemigroupEval, f: &GridFunction, h: f64, side: Side) -> Result<f64> {
    let d = s.eval(h, f)?.zip_with(f, |a, b| a - b)?;
    let part = if side == Side::Upper { NormPart::Positive } else { NormPart::Full };
    Ok(weighted_sup_norm(&d, part)? / h)
}

/// Classifies `f` by the ratios `‖S(h) f - f‖_κ / h` over `h_list`:
/// `yes` when they vary by at most 2×, `no` when the ratio at the smallest
/// `h` exceeds the one at the largest by 4× or more, `inconclusive` otherwise.
pub fn lipschitz_membership(s: &SemigroupEval, f: &GridFunction, side: Side, h_list: &[f64]) -> Result<LipschitzVerdict> {
    if h_list.is_empty() || h_list.iter().any(|h| !(*h > 0.0)) {
        return domain("h list must be nonempty and positive");
    }
    let mut hs = h_list.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    let neg = if side == Side::Symmetric { Some(f.neg()?) } else { None };
    let ratios = hs
        .iter()
        .map(|&h| {
            let mut r = ratio(s, f, h, side)?;
            if let Some(g) = &neg {
                r = r.max(ratio(s, g, h, side)?);
            }
            Ok((h, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let max = ratios.iter().map(|r| r.1).fold(0.0f64, f64::max);
    let min = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let (first, last) = (ratios[0].1, ratios[ratios.len() - 1].1);
    let member = if max <= ZERO {
        Membership::Yes
    } else if !max.is_finite() || last >= 4.0 * first.max(ZERO) {
        Membership::No
    } else if max <= 2.0 * min {
        Membership::Yes
    } else {
        Membership::Inconclusive
    };
    Ok(LipschitzVerdict {
        member,
        c_estimate: max,
        h0: hs[0],
        side,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::funcspace::WeightedGrid;
    use crate::operators::{Discretization, ReferenceModel, ReferenceStep};

    #[test]
    fn heat_classification() {
        let g = Arc::new(WeightedGrid::symmetric(6.0, 0.02).unwrap());
        let heat = SemigroupEval::exact(ReferenceStep {
            model: Arc::new(ReferenceModel::brownian(1.0, Discretization::Lattice).unwrap()),
        });
        let hs: Vec<f64> = (3..=8).map(|n| 2f64.powi(-n)).collect();
        let bump = GridFunction::from_fn(g.clone(), |x| (-x * x).exp()).unwrap();
        for side in [Side::Upper, Side::Full, Side::Symmetric] {
            let v = lipschitz_membership(&heat, &bump, side, &hs).unwrap();
            assert_eq!(v.member, Membership::Yes, "{v:?}");
            assert!(v.c_estimate < 1.1);
        }
        let root = GridFunction::from_fn(g.clone(), |x| x.abs().min(4.0).sqrt()).unwrap();
        let v = lipschitz_membership(&heat, &root, Side::Upper, &hs).unwrap();
        assert_eq!(v.member, Membership::No, "{v:?}");
        let zero = GridFunction::constant(g, 0.0).unwrap();
        let v = lipschitz_membership(&heat, &zero, Side::Symmetric, &hs).unwrap();
        assert_eq!((v.member, v.c_estimate), (Membership::Yes, 0.0));
    }
}
