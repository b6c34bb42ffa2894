//! Exact entropy gaps of small relay codes by enumeration.

use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::dmc_relay::DiscreteChannel;
use crate::error::{BoundsError, Result};
use crate::rhc_verify::quadrature::QuadratureRule;
use crate::types::EntropyRate;

pub const MAX_BLOCKLENGTH: usize = 3;
pub const MAX_MESSAGES: usize = 8;
const MAX_OUTPUT_SEQUENCES: usize = 1 << 12;

/// A block code, the channel shared by relay and destination, and the
/// relay's deterministic map from `Zⁿ` to message cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayInstance {
    channel: DiscreteChannel,
    codebook: Vec<Vec<usize>>,
    /// Cell of each relay output sequence, indexed row-major in `Zⁿ`.
    partition: Vec<usize>,
}

impl RelayInstance {
    pub fn new(channel: DiscreteChannel, codebook: Vec<Vec<usize>>, partition: Vec<usize>) -> Result<Self> {
        let m = codebook.len();
        if m == 0 || m > MAX_MESSAGES {
            return Err(BoundsError::SizeLimit(format!("need 1..={MAX_MESSAGES} codewords, got {m}")));
        }
        let n = codebook[0].len();
        if n == 0 || n > MAX_BLOCKLENGTH {
            return Err(BoundsError::SizeLimit(format!("blocklength must be 1..={MAX_BLOCKLENGTH}, got {n}")));
        }
        if let Some(bad) = codebook.iter().find(|c| c.len() != n) {
            return Err(BoundsError::DimensionMismatch { expected: n, found: bad.len() });
        }
        if let Some(&x) = codebook.iter().flatten().find(|&&x| x >= channel.inputs()) {
            return Err(BoundsError::Domain(format!("codeword symbol {x} outside input alphabet")));
        }
        let sequences = channel.outputs().pow(n as u32);
        if sequences > MAX_OUTPUT_SEQUENCES {
            return Err(BoundsError::SizeLimit(format!("{sequences} output sequences")));
        }
        if partition.len() != sequences {
            return Err(BoundsError::DimensionMismatch { expected: sequences, found: partition.len() });
        }
        Ok(RelayInstance { channel, codebook, partition })
    }

    pub fn channel(&self) -> &DiscreteChannel {
        &self.channel
    }

    pub fn codebook(&self) -> &[Vec<usize>] {
        &self.codebook
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    pub fn blocklength(&self) -> usize {
        self.codebook[0].len()
    }

    pub fn cells(&self) -> usize {
        self.partition.iter().max().map_or(0, |m| m + 1)
    }

    /// `Wⁿ(·|xⁿ)` over all output sequences.
    fn output_law(&self, codeword: &[usize]) -> Vec<f64> {
        codeword.iter().fold(vec![1.0], |acc, &x| {
            let row = self.channel.row(x);
            acc.iter().flat_map(|a| row.iter().map(move |w| a * w)).collect()
        })
    }
}

fn entropy(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs.into_iter().filter(|p| *p > 0.0).map(|p| -p * p.ln()).sum()
}

/// Exact `(H(I|Xⁿ)/n, H(I|Yⁿ)/n)` for a uniformly chosen message.
pub fn brute_force_entropy_gap(inst: &RelayInstance) -> Result<(EntropyRate, EntropyRate)> {
    let n = inst.blocklength() as f64;
    let m = inst.codebook.len() as f64;
    let cells = inst.cells();
    let laws: Vec<Vec<f64>> = inst.codebook.iter().map(|c| inst.output_law(c)).collect();

    let cell_given_x: Vec<Vec<f64>> = laws
        .iter()
        .map(|law| {
            let mut pi = vec![0.0; cells];
            for (z, w) in law.iter().enumerate() {
                pi[inst.partition[z]] += w;
            }
            pi
        })
        .collect();
    let h1 = cell_given_x.iter().map(|pi| entropy(pi.iter().copied())).sum::<f64>() / m;

    // Y has the same alphabet and law as Z
    let mut h2 = 0.0;
    for y in 0..inst.partition.len() {
        let mut joint = vec![0.0; cells];
        for (law, pi) in laws.iter().zip(&cell_given_x) {
            for (j, p) in joint.iter_mut().zip(pi) {
                *j += law[y] * p / m;
            }
        }
        let py: f64 = joint.iter().sum();
        if py > 0.0 {
            h2 += py * entropy(joint.iter().map(|j| j / py));
        }
    }
    Ok((EntropyRate::clamped(h1 / n), EntropyRate::clamped(h2 / n)))
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// `P(a < V ≤ b)` for `V ~ N(0,1)`, subtracting in whichever tail is accurate.
fn normal_interval(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    }
}

/// Single-letter Gaussian relay with a threshold quantizer at the relay.
///
/// `X` is uniform on `√snr · constellation`, `Z = X + V`, `Y = X + V'` with
/// independent unit-variance noises, and `I` is the index of the interval of
/// `Z` between consecutive thresholds. Returns `(H(I|X), H(I|Y))`; the first is
/// exact up to the normal CDF, the second uses the quadrature rule over `Y`.
pub fn gaussian_quantizer_gap(
    snr: f64,
    constellation: &[f64],
    thresholds: &[f64],
    rule: &QuadratureRule,
) -> Result<(EntropyRate, EntropyRate)> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(BoundsError::Domain(format!("snr must be positive, got {snr}")));
    }
    if constellation.is_empty() || constellation.iter().any(|c| !c.is_finite()) {
        return Err(BoundsError::Domain("constellation must be a nonempty list of finite points".into()));
    }
    if thresholds.windows(2).any(|w| !(w[0] < w[1])) || thresholds.iter().any(|t| !t.is_finite()) {
        return Err(BoundsError::Domain(format!("thresholds must be finite and increasing: {thresholds:?}")));
    }
    let scale = snr.sqrt();
    let points: Vec<f64> = constellation.iter().map(|c| c * scale).collect();
    let edges: Vec<f64> = std::iter::once(f64::NEG_INFINITY)
        .chain(thresholds.iter().copied())
        .chain(std::iter::once(f64::INFINITY))
        .collect();
    let cell_given_x: Vec<Vec<f64>> = points
        .iter()
        .map(|x| edges.windows(2).map(|e| normal_interval(e[0] - x, e[1] - x).max(0.0)).collect())
        .collect();
    let k = points.len() as f64;
    let h1 = cell_given_x.iter().map(|pi| entropy(pi.iter().copied())).sum::<f64>() / k;

    let cond_entropy_at = |y: f64| {
        let logs: Vec<f64> = points.iter().map(|x| -0.5 * (y - x) * (y - x)).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = weights.iter().sum();
        let cells = edges.len() - 1;
        entropy((0..cells).map(|i| {
            weights.iter().zip(&cell_given_x).map(|(w, pi)| w * pi[i]).sum::<f64>() / total
        }))
    };
    let h2 = points.iter().map(|x| rule.expect(|v| cond_entropy_at(x + v))).sum::<f64>() / k;
    if !h1.is_finite() || !h2.is_finite() {
        return Err(BoundsError::Domain("quadrature produced a non-finite entropy".into()));
    }
    Ok((EntropyRate::clamped(h1), EntropyRate::clamped(h2)))
}
