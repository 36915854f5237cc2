//! Finitely repeated adversarial quantum hypothesis testing.
//!
//! A passive detector measures `n` copies of an unknown state with the
//! Helstrom projector for `rho1^{⊗n} - tau(n) rho0^{⊗n}`. A Stackelberg attacker
//! who knows the projector tilts the `H1` state by relative-entropy-regularized
//! best response, leaving the `H0` state untouched. The modules here build
//! both sides of that game, the radar spoofing scenario, and the diagnostics
//! used to measure how fast the error rates decay with `n`.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod attacker;
pub mod detector;
mod error;
pub mod qmat;
pub mod radar;

pub use error::{Error, Result};

pub use faer::c64;

/// Largest Hilbert-space dimension any dense operation will allocate.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Spectral floor substituted for non-positive eigenvalues before taking logs.
pub const DEFAULT_LOG_FLOOR: f64 = 1e-18;

/// Eigenvalues of `rho1^{⊗n} - tau rho0^{⊗n}` at or below this are not part of the
/// detection region.
pub const DEFAULT_ZERO_TOLERANCE: f64 = 1e-12;
