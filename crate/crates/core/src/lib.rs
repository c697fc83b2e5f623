//! A numerical laboratory for convex monotone semigroups on weighted
//! spaces of continuous functions.
//!
//! The crate builds nonlinear semigroups `S(t)` from one-step operator
//! families `I(t)` by Chernoff iteration `I(t/k)^k`, evaluates classical and
//! Γ-generators, and checks comparison and equality statements on concrete
//! models with closed-form oracles:
//!
//! - [`funcspace`]: weighted grids, grid functions with a `-∞` sentinel,
//!   κ-weighted norms, mixed-topology checks, mollification, truncation and
//!   finite-difference stencils.
//! - [`gamma`]: discrete Γ-limsup / Γ-limit, upper ε-parallel functions and
//!   the averaged usc hull.
//! - [`operators`]: reference transitions, static control steps, drift and
//!   Wasserstein perturbations, the entropic semigroup, a monotone HJB
//!   finite-difference oracle, and 1-D transport / entropy helpers.
//! - [`chernoff`]: partitions, schedules, iteration and convergence
//!   diagnostics.
//! - [`generator`]: difference quotients, Γ-generators, Lipschitz-set
//!   classification, smooth generator oracles and the comparison harness.
//! - [`experiments`]: named experiments writing CSV/JSON reports, used by the
//!   `semigroup-lab` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chernoff;
pub mod error;
pub mod experiments;
pub mod funcspace;
pub mod gamma;
pub mod generator;
pub mod operators;

pub use error::{LabError, Result};
