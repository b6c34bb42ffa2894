//! The Ornstein–Uhlenbeck semigroup in one dimension and the closed-form
//! exponential instance of its reverse hypercontractivity.

use crate::error::{BoundsError, Result};
use crate::rhc_verify::quadrature::QuadratureRule;

/// `T_{x,t} f(y) = E[f(e^{−t}y + (1−e^{−t})x + √(1−e^{−2t}) V)]`, `V ~ N(0,1)`.
pub fn ou_apply(f: impl Fn(f64) -> f64, x: f64, y: f64, t: f64, rule: &QuadratureRule) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(BoundsError::Domain(format!("time must be >= 0, got {t}")));
    }
    let keep = (-t).exp();
    let centre = keep * y + -(-t).exp_m1() * x;
    let spread = (-(-2.0 * t).exp_m1()).sqrt();
    let value = rule.expect(|v| f(centre + spread * v));
    if !value.is_finite() {
        return Err(BoundsError::Domain(format!("integrand not finite near y={y}")));
    }
    Ok(value)
}

/// `½ ln((1−q)/(1−p))`, the smallest time at which the inequality holds.
pub fn borell_critical_time(p: f64, q: f64) -> f64 {
    0.5 * ((1.0 - q) / (1.0 - p)).ln()
}

/// `ln‖T_{x,t} f‖_q − ln‖f‖_p` for `f(u) = e^{λu}` under `N(x, 1)`:
/// `λ²[(1−p) − (1−q)e^{−2t}]/2`, zero exactly at the critical time.
pub fn check_borell_exponential(lambda: f64, x: f64, p: f64, q: f64, t: f64) -> Result<f64> {
    if !(q < p && p < 1.0) {
        return Err(BoundsError::Precondition(format!("need q < p < 1, got p={p}, q={q}")));
    }
    if !(t >= 0.0) || !lambda.is_finite() || !x.is_finite() {
        return Err(BoundsError::Precondition(format!("invalid lambda={lambda}, x={x}, t={t}")));
    }
    Ok(0.5 * lambda * lambda * ((1.0 - p) - (1.0 - q) * (-2.0 * t).exp()))
}
