use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// One admissible static control: diffusion `a >= 0`, drift `b`, running cost `L(a, b) >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Control {
    pub a: f64,
    pub b: f64,
    pub cost: f64,
}

/// Finite control set with its running cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlCost {
    controls: Vec<Control>,
}

impl ControlCost {
    pub fn new(controls: Vec<Control>) -> Result<Self> {
        if controls.is_empty() {
            return domain("empty control list");
        }
        for c in &controls {
            if !(c.a >= 0.0) || !c.b.is_finite() || !c.a.is_finite() {
                return domain(format!("invalid control ({}, {})", c.a, c.b));
            }
            if !(c.cost >= 0.0) || !c.cost.is_finite() {
                return domain(format!("control cost must be finite and nonnegative, got {}", c.cost));
            }
        }
        if !controls.iter().any(|c| c.cost == 0.0) {
            return domain("no zero-cost control");
        }
        Ok(ControlCost { controls })
    }

    /// Product grid `a_list × b_list` with cost `L(a, b)`.
    pub fn from_grid(a_list: &[f64], b_list: &[f64], cost: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let controls = a_list
            .iter()
            .flat_map(|&a| b_list.iter().map(move |&b| (a, b)))
            .map(|(a, b)| Control { a, b, cost: cost(a, b) })
            .collect();
        Self::new(controls)
    }

    /// Fixed unit diffusion and `L(b) = b²/2` on `b ∈ [-b_max, b_max]` with step `db`.
    pub fn entropic(b_max: f64, db: f64) -> Result<Self> {
        Self::from_grid(&[1.0], &symmetric_grid(b_max, db)?, |_, b| 0.5 * b * b)
    }

    /// Single zero-cost control.
    pub fn single(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![Control { a, b, cost: 0.0 }])
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    pub fn len(&self) -> usize {
        self.controls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.controls.is_empty()
    }

    /// The first zero-cost control `(a*, b*)`.
    pub fn zero_cost_control(&self) -> Control {
        *self.controls.iter().find(|c| c.cost == 0.0).unwrap()
    }

    pub fn max_diffusion(&self) -> f64 {
        self.controls.iter().map(|c| c.a).fold(0.0, f64::max)
    }

    pub fn max_drift(&self) -> f64 {
        self.controls.iter().map(|c| c.b.abs()).fold(0.0, f64::max)
    }

    /// `c_L = sup (|a| + |b|) / (1 + L(a, b))`.
    pub fn c_l(&self) -> f64 {
        self.controls
            .iter()
            .map(|c| (c.a + c.b.abs()) / (1.0 + c.cost))
            .fold(0.0, f64::max)
    }

    /// `L*(c) = sup (c (|a| + |b|) - L(a, b))`.
    pub fn conjugate(&self, c: f64) -> f64 {
        self.controls
            .iter()
            .map(|k| c * (k.a + k.b.abs()) - k.cost)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Controls whose mirrored drift `(a, -b)` is also in the set.
    pub fn symmetric_part(&self) -> Vec<Control> {
        self.controls
            .iter()
            .filter(|c| self.controls.iter().any(|d| d.a == c.a && d.b == -c.b))
            .copied()
            .collect()
    }

    /// Sub-model restricted to the controls accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(&Control) -> bool) -> Result<Self> {
        Self::new(self.controls.iter().filter(|c| keep(c)).copied().collect())
    }
}

/// `{-k·d, …, 0, …, k·d}` with `k = round(max/d)`; entries are exact multiples of `d`.
pub fn symmetric_grid(max: f64, d: f64) -> Result<Vec<f64>> {
    if !(d > 0.0) || !(max >= 0.0) {
        return domain("grid step must be positive and the range nonnegative");
    }
    let k = (max / d).round() as i64;
    Ok((-k..=k).map(|j| j as f64 * d).collect())
}

/// Shape of the transport penalty `φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiShape {
    /// `coef · v^q`.
    Power { coef: f64, q: f64 },
    /// `0` at `v = 0`, `+∞` elsewhere.
    ZeroBudget,
    /// `0` on `[0, radius]`, `+∞` beyond.
    Ball { radius: f64 },
    /// Through `(v_i, φ_i)`, linear in `v^p` between abscissae, `+∞` beyond the last one.
    Table { v: Vec<f64>, phi: Vec<f64> },
}

/// Convex nondecreasing penalty `φ` on transport distances, with the
/// Wasserstein order `p` and the grid used for conjugates.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiCost {
    shape: PhiShape,
    p: f64,
    v_grid: Vec<f64>,
}

pub const DEFAULT_V_MAX: f64 = 20.0;
pub const DEFAULT_V_STEP: f64 = 1e-3;

impl PhiCost {
    pub fn new(shape: PhiShape, p: f64) -> Result<Self> {
        let v_grid = (0..=(DEFAULT_V_MAX / DEFAULT_V_STEP).round() as usize)
            .map(|k| k as f64 * DEFAULT_V_STEP)
            .collect();
        Self::with_v_grid(shape, p, v_grid)
    }

    pub fn with_v_grid(shape: PhiShape, p: f64, mut v_grid: Vec<f64>) -> Result<Self> {
        if !(p > 1.0) {
            return domain(format!("Wasserstein order must exceed 1, got {p}"));
        }
        match &shape {
            PhiShape::Power { coef, q } => {
                if !(*coef > 0.0) || !(*q >= 1.0) {
                    return domain("power penalty needs coef > 0 and q >= 1");
                }
            }
            PhiShape::ZeroBudget => {}
            PhiShape::Ball { radius } => {
                if !(*radius > 0.0) {
                    return domain("ball radius must be positive");
                }
            }
            PhiShape::Table { v, phi } => {
                if v.len() != phi.len() || v.len() < 2 {
                    return domain("penalty table needs matching columns of length >= 2");
                }
                if v[0] != 0.0 || phi[0] != 0.0 {
                    return domain("penalty table must start at (0, 0)");
                }
                if v.windows(2).any(|w| !(w[1] > w[0])) {
                    return domain("penalty table abscissae must increase");
                }
                let slopes: Vec<f64> = (1..v.len()).map(|i| (phi[i] - phi[i - 1]) / (v[i] - v[i - 1])).collect();
                if slopes.iter().any(|&s| s < 0.0) || slopes.windows(2).any(|w| w[1] < w[0] - 1e-12) {
                    return domain("penalty table must be convex and nondecreasing");
                }
                if phi.iter().all(|&y| y == 0.0) {
                    return domain("penalty table must be positive somewhere");
                }
            }
        }
        if let PhiShape::Ball { radius } = shape {
            v_grid.push(radius);
        }
        if let PhiShape::Table { v, .. } = &shape {
            v_grid.extend_from_slice(v);
        }
        v_grid.retain(|v| *v >= 0.0);
        v_grid.sort_by(f64::total_cmp);
        v_grid.dedup();
        let cost = PhiCost { shape, p, v_grid };
        cost.check_convex_in_pth_root()?;
        Ok(cost)
    }

    /// `φ(v) = v²/2`, `p = 2`.
    pub fn quadratic() -> Self {
        Self::new(PhiShape::Power { coef: 0.5, q: 2.0 }, 2.0).expect("valid")
    }

    pub fn zero_budget(p: f64) -> Result<Self> {
        Self::new(PhiShape::ZeroBudget, p)
    }

    pub fn ball(radius: f64, p: f64) -> Result<Self> {
        Self::new(PhiShape::Ball { radius }, p)
    }

    pub fn shape(&self) -> &PhiShape {
        &self.shape
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn v_grid(&self) -> &[f64] {
        &self.v_grid
    }

    pub fn phi(&self, v: f64) -> f64 {
        debug_assert!(v >= 0.0);
        match &self.shape {
            PhiShape::Power { coef, q } => coef * v.powf(*q),
            PhiShape::ZeroBudget => {
                if v == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            PhiShape::Ball { radius } => {
                if v <= *radius {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            PhiShape::Table { v: xs, phi } => {
                if v > *xs.last().unwrap() {
                    return f64::INFINITY;
                }
                let k = xs.partition_point(|&x| x < v);
                if k == 0 {
                    return phi[0];
                }
                let p = self.p;
                let th = (v.powf(p) - xs[k - 1].powf(p)) / (xs[k].powf(p) - xs[k - 1].powf(p));
                (1.0 - th) * phi[k - 1] + th * phi[k]
            }
        }
    }

    /// Rescaled penalty `φ_t(v) = t φ(v/t)`; at `t = 0` it is 0 at `v = 0` and `+∞` otherwise.
    pub fn phi_t(&self, t: f64, v: f64) -> f64 {
        if t == 0.0 {
            if v == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            t * self.phi(v / t)
        }
    }

    /// `φ*(w) = sup_v (v w - φ(v))` over the v-grid.
    pub fn conjugate(&self, w: f64) -> f64 {
        self.v_grid
            .iter()
            .map(|&v| v * w - self.phi(v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// When `v ↦ φ_t(v)` is linear in `v^p`, the multiplier `λ*` with
    /// `φ_t(v) = λ* v^p`.
    pub fn critical_multiplier(&self, t: f64) -> Option<f64> {
        match self.shape {
            PhiShape::Power { coef, q } if (q - self.p).abs() < 1e-12 && t > 0.0 => {
                Some(coef * t.powf(1.0 - self.p))
            }
            _ => None,
        }
    }

    fn check_convex_in_pth_root(&self) -> Result<()> {
        let g = |u: f64| self.phi(u.powf(1.0 / self.p));
        let samples: Vec<f64> = (0..=40).map(|k| (k as f64 * 0.1).powf(self.p)).collect();
        for w in samples.windows(3) {
            let (a, b, c) = (g(w[0]), g(w[1]), g(w[2]));
            if !c.is_finite() || !b.is_finite() {
                continue;
            }
            let th = (w[1] - w[0]) / (w[2] - w[0]);
            if b > (1.0 - th) * a + th * c + 1e-9 * (1.0 + c.abs()) {
                return domain("v ↦ φ(v^(1/p)) is not convex");
            }
        }
        Ok(())
    }
}

/// Convex conjugate of either cost family.
pub enum ConjugateSource<'a> {
    Phi(&'a PhiCost),
    Control(&'a ControlCost),
}

/// `φ*(w)` or `L*(w)` by a supremum over the cost's finite grid.
pub fn legendre_conjugate(cost: ConjugateSource<'_>, w: f64) -> Result<f64> {
    if !(w >= 0.0) {
        return domain(format!("conjugate argument must be nonnegative, got {w}"));
    }
    Ok(match cost {
        ConjugateSource::Phi(p) => p.conjugate(w),
        ConjugateSource::Control(c) => c.conjugate(w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_self_conjugate() {
        let q = PhiCost::quadratic();
        for w in [0.0, 0.3, 1.0, 2.5, 7.0] {
            let c = legendre_conjugate(ConjugateSource::Phi(&q), w).unwrap();
            assert!((c - 0.5 * w * w).abs() <= 0.5 * DEFAULT_V_STEP * DEFAULT_V_STEP, "{w}");
        }
        assert!(legendre_conjugate(ConjugateSource::Phi(&q), -1.0).is_err());
    }

    #[test]
    fn ball_conjugate_is_linear() {
        let b = PhiCost::ball(0.37, 2.0).unwrap();
        for w in [0.0, 0.5, 3.0] {
            assert!((b.conjugate(w) - 0.37 * w).abs() < 1e-15);
        }
        assert_eq!(PhiCost::zero_budget(2.0).unwrap().conjugate(5.0), 0.0);
    }

    #[test]
    fn rescaled_penalty() {
        let q = PhiCost::quadratic();
        assert_eq!(q.phi_t(0.0, 0.0), 0.0);
        assert_eq!(q.phi_t(0.0, 0.1), f64::INFINITY);
        assert!((q.phi_t(0.5, 0.2) - 0.5 * 0.5 * 0.16).abs() < 1e-15);
        assert_eq!(q.critical_multiplier(0.25), Some(2.0));
    }

    #[test]
    fn invalid_penalties_are_rejected() {
        // v ↦ v^(3/2) composed with v^(1/2) is concave
        assert!(PhiCost::new(PhiShape::Power { coef: 1.0, q: 1.5 }, 2.0).is_err());
        assert!(PhiCost::new(
            PhiShape::Table { v: vec![0.0, 1.0, 2.0], phi: vec![0.0, 2.0, 3.0] },
            1.5
        )
        .is_err());
        let t = PhiCost::new(PhiShape::Table { v: vec![0.0, 1.0, 2.0], phi: vec![0.0, 1.0, 5.0] }, 2.0).unwrap();
        assert!((t.phi(2.5f64.sqrt()) - 3.0).abs() < 1e-12);
        assert_eq!(t.phi(2.5), f64::INFINITY);
    }

    #[test]
    fn control_cost_diagnostics() {
        let c = ControlCost::entropic(2.0, 0.5).unwrap();
        assert_eq!(c.len(), 9);
        assert_eq!(c.zero_cost_control(), Control { a: 1.0, b: 0.0, cost: 0.0 });
        assert_eq!(legendre_conjugate(ConjugateSource::Control(&c), 0.0).unwrap(), 0.0);
        // c_L: max (1 + |b|)/(1 + b²/2) over b ∈ {0, ±0.5, …}; b = 0.5 gives 1.5/1.125
        assert!((c.c_l() - 1.5 / 1.125).abs() < 1e-15);
        assert_eq!(c.symmetric_part().len(), 9);
        assert!(ControlCost::new(vec![Control { a: 1.0, b: 0.0, cost: 1.0 }]).is_err());
        assert!(ControlCost::new(vec![]).is_err());
    }
}
