//! Entire-function kernel Θ_ν, reciprocal gamma, Bessel first zeros and
//! complex zero location.
//!
//! The central object is
//!
//! ```text
//! Θ_ν(z) = Σ_{n≥0} (z/4)^n / (n! Γ(n+1+ν)),
//! ```
//!
//! entire in both `z` and the complex order `ν`, and tied to the modified
//! Bessel function of the first kind by `I_ν(z) = (z/2)^ν Θ_ν(z²)`. Poles of
//! Γ are absorbed by the convention `1/Γ(-m) = 0` for integer `m ≥ 0`, which
//! keeps every series coefficient finite.

mod bessel;
mod gamma;
mod theta;
mod zeros;

pub use bessel::{bessel_j, bessel_j_first_zero, bessel_j_zeros};
pub use gamma::reciprocal_gamma;
pub use theta::{theta, theta_derivative};
pub use zeros::{theta_zeros, Rect, ZeroScan};

use thiserror::Error;

/// Truncation control for the power series behind [`theta`].
#[derive(Debug, Clone, Copy)]
pub struct SeriesConfig {
    /// Relative tolerance on the discarded tail.
    pub rel_tol: f64,
    /// Hard cap on the number of series terms.
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        // Covers |z| <= 200 comfortably; callers probing larger arguments
        // (entire solutions at large radius) pass a bigger budget.
        Self {
            rel_tol: 1e-12,
            max_terms: 500,
        }
    }
}

impl SeriesConfig {
    pub fn with_max_terms(max_terms: usize) -> Self {
        Self {
            max_terms,
            ..Self::default()
        }
    }

    /// Same tolerance with a doubled term budget, used when re-checking
    /// candidate zeros at a stricter setting than the search itself.
    pub fn doubled(&self) -> Self {
        Self {
            rel_tol: self.rel_tol,
            max_terms: 2 * self.max_terms,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("series did not meet tolerance {rel_tol:e} within {max_terms} terms (|z| = {z_abs:.3e})")]
    NonConvergence {
        rel_tol: f64,
        max_terms: usize,
        z_abs: f64,
    },
    #[error("Bessel order must be non-negative, got {0}")]
    InvalidOrder(f64),
    #[error("no sign change of J_tau found while bracketing the first zero (tau = {0})")]
    BracketFailure(f64),
}
