//! Scattering modes, wave packets and Bohmian trajectories of the 1+1
//! dimensional Dirac equation at a potential step high enough for Klein
//! tunnelling (`V > 2κ`). Units: `ħ = c = 1`.
//!
//! The [`cli`] module holds the scenario-file runner behind the `kleinflow`
//! binary; everything else is plain library code.

// `!(a < b)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod dispersion;
pub mod error;
pub mod flow;
pub mod free_modes;
pub mod identities;
pub mod packets;
pub mod quadrature;
pub mod spinor;
pub mod step_modes;

pub use dispersion::PhysicalParams;
pub use error::{DomainViolation, Error, Result};
pub use spinor::{CurrentVector, SpacetimePoint, Spinor};
