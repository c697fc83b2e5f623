//! Discrete Γ-calculus on grid functions.
//!
//! Sequences `x_n → x` are represented by shrinking lattice windows
//! `B(x, δ_n)`; every result that may fail to be continuous is tagged usc.

mod hull;
mod limsup;
mod parallel;

pub use hull::{ball_average_limit, usc_hull_via_averages};
pub use limsup::{
    gamma_lim, gamma_limsup, gamma_limsup_report, window_max, GammaLimOutcome, GammaLimsup,
    WindowSchedule, UNBOUNDED_CEILING,
};
pub use parallel::{epsilon_parallel, gamma_domination_check, DominationRow, TailIndex};
