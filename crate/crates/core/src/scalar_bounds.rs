//! Entropy-gap bound functions.
//!
//! For a relay message `I` with `h1 = H(I|X^n)/n` and `h2 = H(I|Y^n)/n`:
//!
//! | function | bound on `h2` | channel |
//! |----------|---------------|---------|
//! | [`gauss_gap_closed`] | `c(h) = ½ln(1+h+√(h²+2h)) + ½(h+√(h²+2h))` | Gaussian |
//! | [`gauss_gap_relaxed`] | `h + √(2h)` | Gaussian |
//! | [`lemma3_h2max`] | largest `h2` with `h2 − ½ln(1+2h2) ≤ h1` | Gaussian |
//! | [`bdd_gap_closed`] | `c_α(h)` | density bounded by `α` |
//!
//! `c` and `c_α` also have variational forms, `min_t {t + h/(1−e^{−2t})}` and
//! `min_t {(α−1)t + h/(1−e^{−t})}`, evaluated numerically by
//! [`gauss_gap_variational`] and [`bdd_gap_variational`]. The closed forms
//! follow from the stationarity conditions `t* = ½ln(1+h+√(h²+2h))` and
//! `e^{−t*} = 1+β/2−√(β+β²/4)` with `β = h/(α−1)`.
//!
//! All quantities are in nats.

use crate::error::{BoundsError, Result};
use crate::numeric::{bisect_increasing, bracket_from, golden_min};
use crate::types::{BddDensityAlpha, EntropyRate, Tolerance, SATURATION};

const BRACKET_START: f64 = 1e-6;
const MAX_DOUBLINGS: usize = 1100;

fn finite(h: EntropyRate) -> Result<f64> {
    if h.is_saturated() {
        Err(BoundsError::Domain("saturated rate is not a valid argument".into()))
    } else {
        Ok(h.nats())
    }
}

/// `√(h²+2h)` without squaring `h`.
#[inline]
fn root_h2_2h(h: f64) -> f64 {
    h.sqrt() * (h + 2.0).sqrt()
}

pub(crate) fn gauss_gap_value(h: f64) -> f64 {
    let u = h + root_h2_2h(h);
    0.5 * u.ln_1p() + 0.5 * u
}

/// `c(h)`, the Gaussian entropy-gap bound.
pub fn gauss_gap_closed(h: EntropyRate) -> Result<EntropyRate> {
    let h = finite(h)?;
    Ok(EntropyRate::clamped(gauss_gap_value(h)))
}

/// Minimizer of `t + h/(1−e^{−2t})` for `h > 0`.
pub fn gauss_gap_argmin(h: EntropyRate) -> Result<f64> {
    let h = finite(h)?;
    Ok(0.5 * (h + root_h2_2h(h)).ln_1p())
}

/// `c(h)` by direct numerical minimization of its variational form.
pub fn gauss_gap_variational(h: EntropyRate, tol: Tolerance) -> Result<EntropyRate> {
    let h = finite(h)?;
    if h == 0.0 {
        return Ok(EntropyRate::ZERO);
    }
    let objective = |t: f64| t + h / -(-2.0 * t).exp_m1();
    let bracket = bracket_from(&objective, BRACKET_START, MAX_DOUBLINGS)?;
    let (_, value) = golden_min(&objective, bracket, tol)?;
    Ok(EntropyRate::clamped(value))
}

/// The relaxed bound `h + √(2h)`.
pub fn gauss_gap_relaxed(h: EntropyRate) -> Result<EntropyRate> {
    let h = finite(h)?;
    Ok(EntropyRate::clamped(h + (2.0 * h).sqrt()))
}

/// Inverse of [`gauss_gap_closed`] by bisection on `[0, c0]` (valid since `c(h) >= h`).
pub fn gauss_gap_inverse(c0: EntropyRate, tol: Tolerance) -> Result<EntropyRate> {
    let c0 = finite(c0)?;
    if c0 == 0.0 {
        return Ok(EntropyRate::ZERO);
    }
    if c0 > SATURATION {
        return Ok(EntropyRate::SATURATED);
    }
    let h = bisect_increasing(gauss_gap_value, c0, 0.0, c0, tol)?;
    Ok(EntropyRate::clamped(h))
}

/// Closed-form inverse of `h ↦ h + √(2h)`.
pub fn relaxed_gap_inverse(c0: EntropyRate) -> Result<EntropyRate> {
    let c0 = finite(c0)?;
    // s = (−√2 + √(2+4c0))/2, rationalized
    let s = 2.0 * c0 / (2f64.sqrt() + (2.0 + 4.0 * c0).sqrt());
    Ok(EntropyRate::clamped(s * s))
}

/// The baseline map `h ↦ 2h + √(2h)` drawn as the thin curves of the
/// comparison plots (the prior bound on `h2` in terms of `h1`).
pub fn prior_gap(h: EntropyRate) -> Result<EntropyRate> {
    let h = finite(h)?;
    Ok(EntropyRate::clamped(2.0 * h + (2.0 * h).sqrt()))
}

/// Closed-form inverse of [`prior_gap`].
pub fn prior_gap_inverse(c0: EntropyRate) -> Result<EntropyRate> {
    let c0 = finite(c0)?;
    // s = (−√2 + √(2+8c0))/4, rationalized
    let s = 2.0 * c0 / (2f64.sqrt() + (2.0 + 8.0 * c0).sqrt());
    Ok(EntropyRate::clamped(s * s))
}

/// `½ln(1+2h2)`, the largest admissible `h2 − h1`.
pub fn lemma3_gap(h2: EntropyRate) -> Result<EntropyRate> {
    let h2 = finite(h2)?;
    Ok(EntropyRate::clamped(0.5 * (2.0 * h2).ln_1p()))
}

fn lemma3_excess(h2: f64) -> f64 {
    h2 - 0.5 * (2.0 * h2).ln_1p()
}

/// Largest `h2` compatible with `h1`, i.e. the inverse of `h2 ↦ h2 − ½ln(1+2h2)`.
pub fn lemma3_h2max(h1: EntropyRate, tol: Tolerance) -> Result<EntropyRate> {
    let h1 = finite(h1)?;
    if h1 == 0.0 {
        return Ok(EntropyRate::ZERO);
    }
    if h1 > SATURATION {
        return Ok(EntropyRate::SATURATED);
    }
    let lo = h1;
    let mut hi = h1 + 0.5 * (2.0 * (h1 + 2.0)).ln_1p() + 1.0;
    let mut expansions = 0;
    while lemma3_excess(hi) < h1 {
        hi = lo + 2.0 * (hi - lo);
        expansions += 1;
        if expansions > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(BoundsError::NonConvergence { iterations: expansions, best: hi });
        }
    }
    let h2 = bisect_increasing(lemma3_excess, h1, lo, hi, tol)?;
    Ok(EntropyRate::clamped(h2))
}

pub(crate) fn bdd_gap_value(h: f64, alpha: f64) -> f64 {
    if h == 0.0 {
        return 0.0;
    }
    let d = alpha - 1.0;
    if d == 0.0 {
        return h;
    }
    let beta = h / d;
    if d < 1e-12 && beta > 1e8 {
        // large-β expansion: h + d(1 + ln β) + d²/h + O(d/β²)
        return h + d * (1.0 + beta.ln()) + d * d / h;
    }
    let s = beta.sqrt() * (1.0 + 0.25 * beta).sqrt();
    // d·(β/2 + s) = h/2 + √(dh + h²/4)
    d * (0.5 * beta + s).ln_1p() + 0.5 * h + h.sqrt() * (d + 0.25 * h).sqrt()
}

/// `c_α(h)` in closed form; `c_1` is the identity.
pub fn bdd_gap_closed(h: EntropyRate, alpha: BddDensityAlpha) -> Result<EntropyRate> {
    let h = finite(h)?;
    Ok(EntropyRate::clamped(bdd_gap_value(h, alpha.value())))
}

/// Minimizer of `(α−1)t + h/(1−e^{−t})`, or `+∞` when `α = 1`.
pub fn bdd_gap_argmin(h: EntropyRate, alpha: BddDensityAlpha) -> Result<f64> {
    let h = finite(h)?;
    let d = alpha.value() - 1.0;
    if d == 0.0 {
        return Ok(f64::INFINITY);
    }
    let beta = h / d;
    let s = beta.sqrt() * (1.0 + 0.25 * beta).sqrt();
    // 1 + β/2 − s = 1/(1 + β/2 + s)
    Ok((0.5 * beta + s).ln_1p())
}

/// `c_α(h)` by numerical minimization of the variational form.
pub fn bdd_gap_variational(h: EntropyRate, alpha: BddDensityAlpha, tol: Tolerance) -> Result<EntropyRate> {
    let h = finite(h)?;
    let d = alpha.value() - 1.0;
    if h == 0.0 {
        return Ok(EntropyRate::ZERO);
    }
    if d == 0.0 {
        // infimum approached as t → ∞
        return Ok(EntropyRate::clamped(h));
    }
    let objective = |t: f64| d * t + h / -(-t).exp_m1();
    let bracket = bracket_from(&objective, BRACKET_START, MAX_DOUBLINGS)?;
    let (_, value) = golden_min(&objective, bracket, tol)?;
    Ok(EntropyRate::clamped(value))
}

/// Inverse of [`bdd_gap_closed`] in `h`, by bisection on `[0, c0]`.
pub fn bdd_gap_inverse(c0: EntropyRate, alpha: BddDensityAlpha, tol: Tolerance) -> Result<EntropyRate> {
    let c0 = finite(c0)?;
    if c0 == 0.0 {
        return Ok(EntropyRate::ZERO);
    }
    if alpha.value() == 1.0 {
        return Ok(EntropyRate::clamped(c0));
    }
    if c0 > SATURATION {
        return Ok(EntropyRate::SATURATED);
    }
    let a = alpha.value();
    let h = bisect_increasing(|h| bdd_gap_value(h, a), c0, 0.0, c0, tol)?;
    Ok(EntropyRate::clamped(h))
}
