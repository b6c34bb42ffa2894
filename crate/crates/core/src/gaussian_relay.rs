//! Capacity upper bounds for the symmetric Gaussian primitive relay channel
//! and the comparison curves built from them.
//!
//! With `γ = P/N` every bound has the form `min{½ln(1+2γ), ½ln(1+γ) + gain(C₀)}`;
//! the bounds differ only in the relay gain:
//!
//! | bound | gain |
//! |-------|------|
//! | cutset | `C₀` |
//! | relaxed baseline | `C₀ − prior_gap⁻¹(C₀)` |
//! | entropy-gap inverse | `C₀ − c⁻¹(C₀)` |
//! | log-slack | `½ln(1+2C₀)` |

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};
use crate::scalar_bounds::{gauss_gap_inverse, lemma3_h2max, prior_gap, prior_gap_inverse};
use crate::types::{EntropyRate, Tolerance};

/// Power `P`, per-link noise variance `N` and relay rate `C₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianRelayParams {
    power: f64,
    noise: f64,
    relay_rate: EntropyRate,
}

impl GaussianRelayParams {
    pub fn new(power: f64, noise: f64, relay_rate: EntropyRate) -> Result<Self> {
        if !(power > 0.0) || !power.is_finite() {
            return Err(BoundsError::Domain(format!("power must be positive, got {power}")));
        }
        if !(noise > 0.0) || !noise.is_finite() {
            return Err(BoundsError::Domain(format!("noise must be positive, got {noise}")));
        }
        if relay_rate.is_saturated() {
            return Err(BoundsError::Domain("relay rate must be finite".into()));
        }
        Ok(GaussianRelayParams { power, noise, relay_rate })
    }

    /// Unit noise variance with `P = snr`.
    pub fn from_snr(snr: f64, relay_rate: EntropyRate) -> Result<Self> {
        Self::new(snr, 1.0, relay_rate)
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn relay_rate(&self) -> EntropyRate {
        self.relay_rate
    }

    pub fn snr(&self) -> f64 {
        self.power / self.noise
    }

    /// `½ln(1+2γ)`: the destination sees both outputs.
    pub fn broadcast_cut(&self) -> f64 {
        0.5 * (2.0 * self.snr()).ln_1p()
    }

    /// `½ln(1+γ)`: the direct link alone.
    pub fn direct_link(&self) -> f64 {
        0.5 * self.snr().ln_1p()
    }

    fn cap(&self, relay_gain: f64) -> EntropyRate {
        EntropyRate::clamped(self.broadcast_cut().min(self.direct_link() + relay_gain))
    }
}

/// All Gaussian bounds for one parameter set; `best` is their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBoundReport {
    pub cutset: EntropyRate,
    pub lemma2_bound: EntropyRate,
    pub lemma3_bound: EntropyRate,
    pub relaxed_baseline: EntropyRate,
    pub best: EntropyRate,
}

pub fn cutset_bound(params: &GaussianRelayParams) -> EntropyRate {
    params.cap(params.relay_rate.nats())
}

pub fn capacity_ub_lemma2(params: &GaussianRelayParams, tol: Tolerance) -> Result<EntropyRate> {
    let c0 = params.relay_rate;
    let h = gauss_gap_inverse(c0, tol)?;
    if h.is_saturated() {
        return Ok(EntropyRate::clamped(params.broadcast_cut()));
    }
    Ok(params.cap(c0.nats() - h.nats()))
}

pub fn capacity_ub_lemma3(params: &GaussianRelayParams) -> EntropyRate {
    params.cap(lemma3_unclipped_gain(params.relay_rate))
}

/// The log-slack bound without the broadcast-cut minimum.
pub fn capacity_ub_lemma3_unclipped(params: &GaussianRelayParams) -> EntropyRate {
    EntropyRate::clamped(params.direct_link() + lemma3_unclipped_gain(params.relay_rate))
}

fn lemma3_unclipped_gain(c0: EntropyRate) -> f64 {
    0.5 * (2.0 * c0.nats()).ln_1p()
}

/// Baseline bound from the prior entropy-gap map `h ↦ 2h + √(2h)`.
pub fn capacity_ub_relaxed(params: &GaussianRelayParams) -> Result<EntropyRate> {
    let c0 = params.relay_rate;
    let h = prior_gap_inverse(c0)?;
    Ok(params.cap(c0.nats() - h.nats()))
}

pub fn report(params: &GaussianRelayParams, tol: Tolerance) -> Result<GaussianBoundReport> {
    let cutset = cutset_bound(params);
    let lemma2_bound = capacity_ub_lemma2(params, tol)?;
    let lemma3_bound = capacity_ub_lemma3(params);
    let relaxed_baseline = capacity_ub_relaxed(params)?;
    let best = [cutset, lemma2_bound, lemma3_bound, relaxed_baseline]
        .into_iter()
        .fold(cutset, |m, b| if b.nats() < m.nats() { b } else { m });
    Ok(GaussianBoundReport { cutset, lemma2_bound, lemma3_bound, relaxed_baseline, best })
}

/// Column-labelled numeric table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl CurveTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub const FIG1_COLUMNS: [&str; 3] = ["h1", "h2_relaxed", "h2_lemma3"];
pub const FIG2_COLUMNS: [&str; 6] = ["c0", "cutset", "relaxed", "lemma2", "lemma3", "lemma3_unclipped"];

/// `n_points` values uniformly spaced on `[0, max]`, endpoints exact.
fn uniform_grid(max: f64, n_points: usize) -> Vec<f64> {
    let last = (n_points - 1) as f64;
    (0..n_points)
        .map(|i| if i + 1 == n_points { max } else { max * i as f64 / last })
        .collect()
}

fn check_grid(max: EntropyRate, n_points: usize) -> Result<()> {
    if max.is_saturated() || !(max.nats() > 0.0) {
        return Err(BoundsError::Domain(format!("grid maximum must be positive, got {max}")));
    }
    if n_points < 2 {
        return Err(BoundsError::Domain(format!("need at least 2 grid points, got {n_points}")));
    }
    Ok(())
}

/// `h2` bounds as functions of `h1 ∈ [0, h1_max]`: the prior map and the
/// inverse of `h2 − ½ln(1+2h2)`.
pub fn emit_fig1_curves(h1_max: EntropyRate, n_points: usize, tol: Tolerance) -> Result<CurveTable> {
    check_grid(h1_max, n_points)?;
    let rows = uniform_grid(h1_max.nats(), n_points)
        .into_par_iter()
        .map(|h1| {
            let h1r = EntropyRate::clamped(h1);
            let thin = prior_gap(h1r)?.nats();
            let thick = lemma3_h2max(h1r, tol)?.nats();
            Ok(vec![h1, thin, thick])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveTable { columns: FIG1_COLUMNS.to_vec(), rows })
}

/// Capacity bounds over `C₀ ∈ [0, c0_max]` at fixed SNR (unit noise).
pub fn emit_fig2_curves(snr: f64, c0_max: EntropyRate, n_points: usize, tol: Tolerance) -> Result<CurveTable> {
    check_grid(c0_max, n_points)?;
    let rows = uniform_grid(c0_max.nats(), n_points)
        .into_par_iter()
        .map(|c0| {
            let params = GaussianRelayParams::from_snr(snr, EntropyRate::clamped(c0))?;
            Ok(vec![
                c0,
                cutset_bound(&params).nats(),
                capacity_ub_relaxed(&params)?.nats(),
                capacity_ub_lemma2(&params, tol)?.nats(),
                capacity_ub_lemma3(&params).nats(),
                capacity_ub_lemma3_unclipped(&params).nats(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveTable { columns: FIG2_COLUMNS.to_vec(), rows })
}
