//! One-dimensional transport and entropy between simple laws.

use serde::{Deserialize, Serialize};

use crate::error::{domain, LabError, Result};

const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measure1d {
    Gaussian { mean: f64, var: f64 },
    /// `(point, weight)` pairs.
    Atoms { atoms: Vec<(f64, f64)> },
}

impl Measure1d {
    pub fn gaussian(mean: f64, var: f64) -> Result<Self> {
        if !mean.is_finite() || !(var >= 0.0) || !var.is_finite() {
            return domain(format!("invalid Gaussian N({mean}, {var})"));
        }
        Ok(Measure1d::Gaussian { mean, var })
    }

    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return domain("atomic measure needs at least one atom");
        }
        if atoms.iter().any(|&(x, w)| !x.is_finite() || !(w >= 0.0) || !w.is_finite()) {
            return domain("atoms need finite points and nonnegative weights");
        }
        Ok(Measure1d::Atoms { atoms })
    }

    /// Equal weights summing to 1.
    pub fn uniform(points: &[f64]) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        Self::atoms(points.iter().map(|&x| (x, w)).collect())
    }

    pub fn mass(&self) -> f64 {
        match self {
            Measure1d::Gaussian { .. } => 1.0,
            Measure1d::Atoms { atoms } => atoms.iter().map(|a| a.1).sum(),
        }
    }
}

/// `W₂(ν, μ)` for two Gaussians or two atomic laws of equal mass.
pub fn w2_1d(nu: &Measure1d, mu: &Measure1d) -> Result<f64> {
    match (nu, mu) {
        (Measure1d::Gaussian { mean: m1, var: v1 }, Measure1d::Gaussian { mean: m2, var: v2 }) => {
            Ok(((m1 - m2).powi(2) + (v1.sqrt() - v2.sqrt()).powi(2)).sqrt())
        }
        (Measure1d::Atoms { atoms: a }, Measure1d::Atoms { atoms: b }) => {
            let (ma, mb) = (nu.mass(), mu.mass());
            if (ma - mb).abs() > MASS_TOL * ma.max(mb).max(1.0) {
                return domain(format!("total masses differ: {ma} vs {mb}"));
            }
            Ok(quantile_cost(a, b).sqrt())
        }
        _ => Err(LabError::Unsupported("W₂ between a Gaussian and an atomic law".into())),
    }
}

/// `∫ |F⁻¹ - G⁻¹|²` along the monotone coupling.
fn quantile_cost(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let sorted = |v: &[(f64, f64)]| {
        let mut v: Vec<(f64, f64)> = v.iter().copied().filter(|p| p.1 > 0.0).collect();
        v.sort_by(|x, y| x.0.total_cmp(&y.0));
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a.first().map_or(0.0, |p| p.1), b.first().map_or(0.0, |p| p.1));
    let mut cost = 0.0;
    while i < a.len() && j < b.len() {
        let m = ra.min(rb);
        cost += m * (a[i].0 - b[j].0).powi(2);
        ra -= m;
        rb -= m;
        if ra <= MASS_TOL {
            i += 1;
            ra = a.get(i).map_or(0.0, |p| p.1);
        }
        if rb <= MASS_TOL {
            j += 1;
            rb = b.get(j).map_or(0.0, |p| p.1);
        }
    }
    cost
}

/// `H(ν | μ)`; `+∞` when `ν` is not absolutely continuous with respect to `μ`.
pub fn relative_entropy(nu: &Measure1d, mu: &Measure1d) -> f64 {
    match (nu, mu) {
        (Measure1d::Gaussian { mean: m, var: s2 }, Measure1d::Gaussian { mean: m0, var: tau }) => {
            if *tau == 0.0 {
                return if *s2 == 0.0 && m == m0 { 0.0 } else { f64::INFINITY };
            }
            if *s2 == 0.0 {
                return f64::INFINITY;
            }
            let r = s2 / tau;
            0.5 * (r + (m - m0).powi(2) / tau - 1.0 - r.ln())
        }
        (Measure1d::Atoms { atoms: a }, Measure1d::Atoms { atoms: b }) => {
            let mut h = 0.0;
            for &(x, w) in a.iter().filter(|p| p.1 > 0.0) {
                let base: f64 = b.iter().filter(|p| p.0 == x).map(|p| p.1).sum();
                let mine: f64 = a.iter().filter(|p| p.0 == x).map(|p| p.1).sum();
                if base <= 0.0 {
                    return f64::INFINITY;
                }
                h += w * (mine / base).ln();
            }
            h.max(0.0)
        }
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_closed_forms() {
        let mu = Measure1d::gaussian(0.0, 0.5).unwrap();
        assert_eq!(w2_1d(&mu, &mu).unwrap(), 0.0);
        assert_eq!(relative_entropy(&mu, &mu), 0.0);
        let nu = Measure1d::gaussian(0.3, 0.5).unwrap();
        assert!((w2_1d(&nu, &mu).unwrap() - 0.3).abs() < 1e-15);
        assert!((relative_entropy(&nu, &mu) - 0.09 / 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_atom_coupling() {
        let a = Measure1d::uniform(&[0.0, 1.0]).unwrap();
        let b = Measure1d::uniform(&[2.0, 0.0]).unwrap();
        let w = w2_1d(&a, &b).unwrap();
        assert!((w - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(w2_1d(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn unequal_weights_split_atoms() {
        let a = Measure1d::atoms(vec![(0.0, 1.0)]).unwrap();
        let b = Measure1d::atoms(vec![(-1.0, 0.25), (1.0, 0.75)]).unwrap();
        assert!((w2_1d(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mismatched_mass_and_mixed_types() {
        let a = Measure1d::atoms(vec![(0.0, 1.0)]).unwrap();
        let b = Measure1d::atoms(vec![(0.0, 0.5)]).unwrap();
        assert!(matches!(w2_1d(&a, &b), Err(LabError::Domain(_))));
        let g = Measure1d::gaussian(0.0, 1.0).unwrap();
        assert!(matches!(w2_1d(&a, &g), Err(LabError::Unsupported(_))));
        assert_eq!(relative_entropy(&a, &g), f64::INFINITY);
    }

    #[test]
    fn support_escape_is_infinite() {
        let mu = Measure1d::uniform(&[0.0, 1.0]).unwrap();
        let nu = Measure1d::uniform(&[0.0, 2.0]).unwrap();
        assert_eq!(relative_entropy(&nu, &mu), f64::INFINITY);
        let nu = Measure1d::atoms(vec![(0.0, 0.75), (1.0, 0.25)]).unwrap();
        let want = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert!((relative_entropy(&nu, &mu) - want).abs() < 1e-15);
    }
}
