//! Discretized weighted function spaces.
//!
//! Functions live on a uniform lattice over `[-R, R]` and are extended by
//! their boundary values outside it. The weight κ is strictly positive and
//! bounded; compact sets are the nested windows `[-R_K, R_K]`.

mod derivative;
mod function;
mod grid;
pub mod io;
mod mollify;
mod norms;

pub use derivative::{discrete_lipschitz, fd_derivative};
pub use function::{ExtReal, FunctionClass, GridFunction};
pub use grid::{Weight, WeightedGrid, DEFAULT_COMPACT_RADII};
pub use mollify::{mollify, truncate, Cutoff, Mollifier};
pub use norms::{mixed_convergence_report, weighted_sup_norm, MixedConvergenceReport, NormPart, WindowErrors};
