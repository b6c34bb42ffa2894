//! Scalar domain types shared by every module.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};

/// Values above this are treated as saturated by the inverse maps.
pub const SATURATION: f64 = 1e15;

/// A nonnegative information quantity in nats (per channel use).
///
/// The only non-finite value that can exist is [`EntropyRate::SATURATED`],
/// produced by inverse maps whose argument exceeds [`SATURATION`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntropyRate(f64);

impl EntropyRate {
    pub const ZERO: EntropyRate = EntropyRate(0.0);
    pub const SATURATED: EntropyRate = EntropyRate(f64::INFINITY);

    pub fn new(nats: f64) -> Result<Self> {
        if !nats.is_finite() {
            return Err(BoundsError::Domain(format!("rate must be finite, got {nats}")));
        }
        if nats < 0.0 {
            return Err(BoundsError::Domain(format!("rate must be nonnegative, got {nats}")));
        }
        Ok(EntropyRate(nats))
    }

    /// Builds a rate from a value that is nonnegative up to rounding; tiny
    /// negative results of a subtraction are clamped to zero.
    pub(crate) fn clamped(nats: f64) -> Self {
        debug_assert!(!nats.is_nan());
        EntropyRate(nats.max(0.0))
    }

    #[inline]
    pub fn nats(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }

    pub fn is_saturated(self) -> bool {
        self.0.is_infinite()
    }
}

impl TryFrom<f64> for EntropyRate {
    type Error = BoundsError;

    fn try_from(value: f64) -> Result<Self> {
        EntropyRate::new(value)
    }
}

impl From<EntropyRate> for f64 {
    fn from(r: EntropyRate) -> f64 {
        r.0
    }
}

impl fmt::Display for EntropyRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nats", self.0)
    }
}

/// Density bound `alpha = sup_x ||dP_{Y|X=x}/dQ_Y||_inf`; always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BddDensityAlpha(f64);

impl BddDensityAlpha {
    pub const ONE: BddDensityAlpha = BddDensityAlpha(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 1.0 {
            return Err(BoundsError::Domain(format!(
                "density bound alpha must be finite and >= 1, got {alpha}"
            )));
        }
        Ok(BddDensityAlpha(alpha))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Stopping rule for the bisection and golden-section searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !abs_tol.is_finite() {
            return Err(BoundsError::Domain(format!("abs_tol must be positive, got {abs_tol}")));
        }
        if max_iter == 0 {
            return Err(BoundsError::Domain("max_iter must be at least 1".into()));
        }
        Ok(Tolerance { abs_tol, max_iter })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs_tol: 1e-10, max_iter: 200 }
    }
}
