use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::WeightedGrid;
use crate::error::{domain, Result};

/// Carrier class of a grid function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionClass {
    /// Finite everywhere; stands for an element of `C_κ`.
    Continuous,
    /// May carry `-∞` sentinels; stands for an element of `U_κ`.
    Usc,
}

/// An extended real in `[-∞, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::NegInf => None,
            ExtReal::Finite(v) => Some(v),
        }
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::NegInf, o) | (o, ExtReal::NegInf) => o,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a.max(b)),
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::NegInf, _) | (_, ExtReal::NegInf) => ExtReal::NegInf,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a.min(b)),
        }
    }

    /// Sum in `[-∞, ∞)`; `-∞` absorbs.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::NegInf,
        }
    }

    /// Multiplication by a strictly positive scalar.
    pub fn scale(self, c: f64) -> ExtReal {
        debug_assert!(c > 0.0);
        match self {
            ExtReal::NegInf => ExtReal::NegInf,
            ExtReal::Finite(a) => ExtReal::Finite(a * c),
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::NegInf, ExtReal::NegInf) => Some(Ordering::Equal),
            (ExtReal::NegInf, _) => Some(Ordering::Less),
            (_, ExtReal::NegInf) => Some(Ordering::Greater),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

/// Values on a [`WeightedGrid`]. A `-∞` value is stored as an explicit flag;
/// the float slot at a flagged point is kept at `0.0` and never read.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<WeightedGrid>,
    values: Vec<f64>,
    neg_inf: Vec<bool>,
    class: FunctionClass,
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        self.class == other.class
            && self.neg_inf == other.neg_inf
            && self.values == other.values
            && (Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid)
    }
}

impl GridFunction {
    /// Continuous function from finite lattice values.
    pub fn from_values(grid: Arc<WeightedGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return domain(format!("grid values must be finite, got {v}"));
        }
        let n = values.len();
        Ok(GridFunction {
            grid,
            values,
            neg_inf: vec![false; n],
            class: FunctionClass::Continuous,
        })
    }

    /// Samples `f` on the lattice.
    pub fn from_fn(grid: Arc<WeightedGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: Arc<WeightedGrid>, c: f64) -> Result<Self> {
        let n = grid.len();
        Self::from_values(grid, vec![c; n])
    }

    /// Upper semicontinuous function from extended values.
    pub fn from_extended(grid: Arc<WeightedGrid>, values: &[ExtReal]) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            ));
        }
        let mut finite = Vec::with_capacity(values.len());
        let mut flags = Vec::with_capacity(values.len());
        for v in values {
            match *v {
                ExtReal::NegInf => {
                    finite.push(0.0);
                    flags.push(true);
                }
                ExtReal::Finite(x) if x.is_finite() => {
                    finite.push(x);
                    flags.push(false);
                }
                ExtReal::Finite(x) => return domain(format!("non-finite value {x}")),
            }
        }
        Ok(GridFunction {
            grid,
            values: finite,
            neg_inf: flags,
            class: FunctionClass::Usc,
        })
    }

    /// Same grid, new finite values, continuous class.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::from_values(self.grid.clone(), values)
    }

    pub fn grid(&self) -> &WeightedGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<WeightedGrid> {
        &self.grid
    }

    pub fn class(&self) -> FunctionClass {
        self.class
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn has_neg_inf(&self) -> bool {
        self.neg_inf.iter().any(|&b| b)
    }

    pub fn is_neg_inf(&self, i: usize) -> bool {
        self.neg_inf[i]
    }

    pub fn get(&self, i: usize) -> ExtReal {
        if self.neg_inf[i] {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(self.values[i])
        }
    }

    pub fn extended(&self) -> Vec<ExtReal> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    /// Finite lattice values; fails when a `-∞` sentinel is present.
    pub fn values(&self) -> Result<&[f64]> {
        if self.has_neg_inf() {
            return domain("function carries -inf sentinels");
        }
        Ok(&self.values)
    }

    /// Lattice values of a function known to be finite everywhere.
    ///
    /// Panics if a sentinel is present; use [`GridFunction::values`] for a
    /// fallible accessor.
    pub fn finite(&self) -> &[f64] {
        assert!(!self.has_neg_inf(), "function carries -inf sentinels");
        &self.values
    }

    /// Re-tag a sentinel-free function as continuous.
    pub fn into_continuous(mut self) -> Result<Self> {
        if self.has_neg_inf() {
            return domain("cannot treat a function with -inf sentinels as continuous");
        }
        self.class = FunctionClass::Continuous;
        Ok(self)
    }

    /// Re-tag as upper semicontinuous.
    pub fn into_usc(mut self) -> Self {
        self.class = FunctionClass::Usc;
        self
    }

    pub fn require_continuous(&self, what: &str) -> Result<&[f64]> {
        if self.class != FunctionClass::Continuous {
            return domain(format!("{what} requires a continuous function"));
        }
        self.values()
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// Linear interpolation with clamped extension.
    pub fn interpolate(&self, x: f64) -> f64 {
        self.grid.interpolate(self.finite(), x)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let v = self.values()?.iter().map(|&x| f(x)).collect();
        self.with_values(v)
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.same_grid(other) {
            return domain("functions live on different grids");
        }
        let v = self
            .values()?
            .iter()
            .zip(other.values()?)
            .map(|(&a, &b)| f(a, b))
            .collect();
        self.with_values(v)
    }

    pub fn add_scalar(&self, c: f64) -> Result<Self> {
        self.map(|v| v + c)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| v * c)
    }

    pub fn neg(&self) -> Result<Self> {
        self.map(|v| -v)
    }

    /// Largest pointwise excess `self - other` (0 when `self <= other`).
    pub fn max_excess_over(&self, other: &GridFunction) -> f64 {
        self.finite()
            .iter()
            .zip(other.finite())
            .map(|(a, b)| a - b)
            .fold(0.0, f64::max)
    }

    /// Sup distance on the window `|x| <= radius`.
    pub fn sup_distance_on(&self, other: &GridFunction, radius: f64) -> f64 {
        let a = self.finite();
        let b = other.finite();
        self.grid
            .window(radius)
            .map(|i| (a[i] - b[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Plain sup distance over the whole grid.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.finite()
            .iter()
            .zip(other.finite())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<WeightedGrid> {
        Arc::new(WeightedGrid::symmetric(1.0, 0.5).unwrap())
    }

    #[test]
    fn rejects_infinite_values() {
        assert!(GridFunction::from_values(grid(), vec![0.0, 1.0, f64::INFINITY, 0.0, 0.0]).is_err());
        assert!(GridFunction::from_values(grid(), vec![0.0; 4]).is_err());
    }

    #[test]
    fn sentinel_is_a_flag() {
        let vals = [
            ExtReal::Finite(1.0),
            ExtReal::NegInf,
            ExtReal::Finite(0.0),
            ExtReal::Finite(0.0),
            ExtReal::Finite(2.0),
        ];
        let f = GridFunction::from_extended(grid(), &vals).unwrap();
        assert_eq!(f.class(), FunctionClass::Usc);
        assert!(f.is_neg_inf(1));
        assert!(f.values().is_err());
        assert!(f.clone().into_continuous().is_err());
        assert_eq!(f.extended(), vals.to_vec());
    }

    #[test]
    fn ext_real_arithmetic_is_total() {
        let a = ExtReal::Finite(1.0);
        assert_eq!(a.add(ExtReal::NegInf), ExtReal::NegInf);
        assert_eq!(ExtReal::NegInf.max(a), a);
        assert_eq!(ExtReal::NegInf.min(a), ExtReal::NegInf);
        assert!(ExtReal::NegInf < a);
        assert_eq!(a.scale(2.0), ExtReal::Finite(2.0));
    }
}
