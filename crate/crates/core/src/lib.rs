//! Relative equilibria of the planar (1+N)-point-vortex problem: one strong
//! vortex of unit circulation and N weak vortices of common circulation ε.
//!
//! The workflow is
//! 1. locate critical points of the limit potential ([`critical_search`]),
//! 2. continue nondegenerate ones to ε ≠ 0 ([`continuation`]),
//! 3. decide linear stability ([`stability`]) and cross-check by direct
//!    integration of the vortex equations ([`dynamics`]).

// Guards are written as `!(x > bound)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuation;
pub mod critical_search;
pub mod dynamics;
pub mod error;
pub mod limit_potential;
pub mod spectra;
pub mod stability;

pub use error::{Error, Result};
