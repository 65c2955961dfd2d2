//! Numerics for path integrals restricted to differentiable Fourier paths.
//!
//! Paths are sine series `x(t) = Σ aₙ sin(nπt/T)` whose coefficients obey
//! `|aₙ| ≤ A/n^α`. The crate evaluates the resulting mean-square-velocity
//! series, the harmonic-oscillator modification factor `Π(T)` and its energy
//! shifts, a one-dimensional Casimir toy model, and an independent
//! Monte-Carlo sampler of the restricted measure.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod casimir;
pub mod commutator;
pub mod error;
pub mod mc;
pub mod oscillator;
pub mod paths;
pub mod quad;
pub mod special;
pub mod sum;
pub mod velocity;

pub use error::{Error, Result};
pub use paths::{Amplitude, ModelParams};
pub use special::SeriesValue;

/// Default relative tolerance of adaptive series.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Hard cap on the number of terms of any adaptive series.
pub const MAX_TERMS: usize = 10_000_000;
