use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::funcspace::{GridFunction, WeightedGrid};

/// Named test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    /// `e^{-x²/2}`.
    Bump,
    /// `e^{-x²}`.
    NarrowBump,
    /// `sin(0.8 x)`.
    Sine,
    /// `tanh x`.
    Tanh,
    /// `x e^{-x²/2}`.
    OddBump,
    /// `1 / (1 + x²/2)`.
    Lorentz,
    /// `clamp(x, -1, 1)`.
    Ramp,
    /// `min(|x|, 2)`.
    Kink,
    /// `cos(2x) / 2`.
    Wave,
    /// `max(0, 1 - |x|/2)`.
    Tent,
    /// `√min(|x|, 4)`, not Lipschitz at 0.
    Root,
}

impl Probe {
    pub const SMOOTH: [Probe; 5] = [Probe::Bump, Probe::Sine, Probe::Tanh, Probe::OddBump, Probe::Lorentz];

    /// Ten continuous probes mixing smooth, kinked and periodic shapes.
    pub const CORPUS: [Probe; 10] = [
        Probe::Bump,
        Probe::Sine,
        Probe::Tanh,
        Probe::OddBump,
        Probe::Lorentz,
        Probe::Ramp,
        Probe::Kink,
        Probe::Wave,
        Probe::Tent,
        Probe::NarrowBump,
    ];

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Probe::Bump => (-0.5 * x * x).exp(),
            Probe::NarrowBump => (-x * x).exp(),
            Probe::Sine => (0.8 * x).sin(),
            Probe::Tanh => x.tanh(),
            Probe::OddBump => x * (-0.5 * x * x).exp(),
            Probe::Lorentz => 1.0 / (1.0 + 0.5 * x * x),
            Probe::Ramp => x.clamp(-1.0, 1.0),
            Probe::Kink => x.abs().min(2.0),
            Probe::Wave => 0.5 * (2.0 * x).cos(),
            Probe::Tent => (1.0 - 0.5 * x.abs()).max(0.0),
            Probe::Root => x.abs().min(4.0).sqrt(),
        }
    }

    pub fn on(self, grid: &Arc<WeightedGrid>) -> Result<GridFunction> {
        GridFunction::from_fn(grid.clone(), |x| self.eval(x))
    }

    pub fn name(self) -> &'static str {
        match self {
            Probe::Bump => "bump",
            Probe::NarrowBump => "narrow_bump",
            Probe::Sine => "sine",
            Probe::Tanh => "tanh",
            Probe::OddBump => "odd_bump",
            Probe::Lorentz => "lorentz",
            Probe::Ramp => "ramp",
            Probe::Kink => "kink",
            Probe::Wave => "wave",
            Probe::Tent => "tent",
            Probe::Root => "root",
        }
    }
}
