use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Probe;
use crate::chernoff::Direction;
use crate::error::{LabError, Result};
use crate::operators::HjbScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ChernoffRun,
    GenCheck,
    HjbCompare,
    WassersteinCompare,
    Talagrand,
    GammaDemo,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ChernoffRun => "chernoff-run",
            ExperimentKind::GenCheck => "gen-check",
            ExperimentKind::HjbCompare => "hjb-compare",
            ExperimentKind::WassersteinCompare => "wasserstein-compare",
            ExperimentKind::Talagrand => "talagrand",
            ExperimentKind::GammaDemo => "gamma-demo",
        }
    }

    /// Main check tolerance when neither the config nor the command line sets one.
    pub fn default_tolerance(self) -> f64 {
        match self {
            ExperimentKind::ChernoffRun | ExperimentKind::HjbCompare | ExperimentKind::WassersteinCompare => 5e-2,
            ExperimentKind::GenCheck => 1e-2,
            ExperimentKind::Talagrand => 1e-9,
            ExperimentKind::GammaDemo => 1e-12,
        }
    }

    pub fn needs_model(self) -> bool {
        !matches!(self, ExperimentKind::Talagrand | ExperimentKind::GammaDemo)
    }
}

/// Replaces the model's grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub span: f64,
    pub dx: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    #[default]
    None,
    /// The entropic semigroup with the model's `[entropic]` parameters.
    Entropic,
}

/// Horizon, dyadic schedule `h_n = t 2^{-n}`, probe and reporting window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub t: f64,
    pub first: u32,
    pub last: u32,
    pub probe: Probe,
    pub window: f64,
    pub oracle: OracleKind,
    /// Largest admissible order violation between dyadic levels; unchecked when absent.
    pub monotone_tolerance: Option<f64>,
    /// Expected order of the dyadic iterates; inferred from the first levels when absent.
    pub expect: Option<Direction>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            t: 0.5,
            first: 1,
            last: 6,
            probe: Probe::NarrowBump,
            window: 2.0,
            oracle: OracleKind::None,
            monotone_tolerance: None,
            expect: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorSection {
    /// `h = t0 2^{-n}` for `n` in `first..=last`.
    pub t0: f64,
    pub first: i32,
    pub last: i32,
    /// Chernoff width used to evaluate `S(h)`; the largest `h` (one step) by default.
    pub width: Option<f64>,
    pub probes: Vec<Probe>,
    pub min_slope: f64,
    /// Probes expected in the upper Lipschitz set, and outside it. The ratios
    /// are taken over the whole grid, so members should be flat near its edge.
    pub lipschitz_members: Vec<Probe>,
    pub lipschitz_outsiders: Vec<Probe>,
}

impl Default for GeneratorSection {
    fn default() -> Self {
        GeneratorSection {
            t0: 1.0,
            first: 3,
            last: 8,
            width: None,
            probes: Probe::SMOOTH.to_vec(),
            min_slope: 0.8,
            lipschitz_members: vec![Probe::Bump, Probe::NarrowBump, Probe::Tanh, Probe::OddBump],
            lipschitz_outsiders: vec![Probe::Root, Probe::Kink],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HjbSection {
    /// Time step; `0.9` of the monotonicity bound by default.
    pub dt: Option<f64>,
    pub scheme: HjbScheme,
}

impl Default for HjbSection {
    fn default() -> Self {
        HjbSection {
            dt: None,
            scheme: HjbScheme::ExplicitUpwind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainSection {
    pub times: Vec<f64>,
    /// Violations up to `tolerance + 2 Δx r` pass, `r` the probe's Lipschitz constant.
    pub tolerance: f64,
}

impl Default for ChainSection {
    fn default() -> Self {
        ChainSection {
            times: vec![0.1, 0.25, 0.5],
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TalagrandSection {
    pub t: f64,
    pub means: Vec<f64>,
    /// Variances of the family as multiples of `t`.
    pub variance_ratios: Vec<f64>,
}

impl Default for TalagrandSection {
    fn default() -> Self {
        TalagrandSection {
            t: 0.5,
            means: vec![0.0, 0.5, 1.0, -2.0],
            variance_ratios: vec![0.25, 0.5, 1.0, 2.0, 4.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GammaSection {
    pub cases: usize,
    /// Sequence length per case.
    pub length: usize,
    pub span: f64,
    pub dx: f64,
}

impl Default for GammaSection {
    fn default() -> Self {
        GammaSection {
            cases: 20,
            length: 24,
            span: 2.0,
            dx: 0.05,
        }
    }
}

/// An experiment description, read from TOML.
///
/// ```toml
/// experiment = "chernoff-run"
/// model = "entropic.toml"   # relative to this file
/// tolerance = 0.05
/// seed = 0
///
/// [run]
/// t = 0.5
/// first = 1
/// last = 6
/// probe = "narrow_bump"
/// oracle = "entropic"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Reserved; every experiment is deterministic apart from `gamma-demo`,
    /// whose random corpus it seeds.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub generator: GeneratorSection,
    #[serde(default)]
    pub hjb: HjbSection,
    #[serde(default)]
    pub chain: ChainSection,
    #[serde(default)]
    pub talagrand: TalagrandSection,
    #[serde(default)]
    pub gamma: GammaSection,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            model: None,
            tolerance: None,
            out: None,
            seed: 0,
            grid: None,
            run: RunSection::default(),
            generator: GeneratorSection::default(),
            hjb: HjbSection::default(),
            chain: ChainSection::default(),
            talagrand: TalagrandSection::default(),
            gamma: GammaSection::default(),
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: ExperimentConfig = toml::from_str(s).map_err(|e| LabError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads a config file; a relative model path is resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut c = Self::from_toml_str(&std::fs::read_to_string(path)?)?;
        if let (Some(m), Some(dir)) = (&c.model, path.parent()) {
            if m.is_relative() {
                c.model = Some(dir.join(m));
            }
        }
        Ok(c)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| self.experiment.default_tolerance())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::Config(m));
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return bad(format!("tolerance must be positive, got {t}"));
            }
        }
        if self.experiment.needs_model() && self.model.is_none() {
            return bad(format!("{} needs a model file", self.experiment.name()));
        }
        let r = &self.run;
        if !(r.t > 0.0) || r.first > r.last || !(r.window > 0.0) {
            return bad("[run] needs t > 0, first <= last and window > 0".into());
        }
        let g = &self.generator;
        if g.first > g.last || !(g.t0 > 0.0) || g.probes.is_empty() {
            return bad("[generator] needs t0 > 0, first <= last and at least one probe".into());
        }
        if self.chain.times.iter().any(|t| !(*t > 0.0)) {
            return bad("[chain] times must be positive".into());
        }
        if self.gamma.length < 3 || self.gamma.cases == 0 {
            return bad("[gamma] needs at least one case and sequences of length >= 3".into());
        }
        Ok(())
    }
}
