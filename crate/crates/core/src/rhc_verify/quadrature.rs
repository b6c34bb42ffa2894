//! Gauss–Hermite rules for expectations against the standard normal.

use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};

pub const DEFAULT_ORDER: usize = 64;
pub const MAX_ORDER: usize = 1024;

/// Orthonormal Hermite values `(p_m(z), p_{m−1}(z))` for weight `e^{−z²}`,
/// as mantissas times `e^{log_scale}`.
fn hermite_pair(z: f64, m: usize) -> (f64, f64, f64) {
    const PI_M4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    const RESCALE: f64 = 1e150;
    let (mut p1, mut p2, mut log_scale) = (PI_M4, 0.0, 0.0);
    for j in 1..=m {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
        if p1.abs() > RESCALE {
            p1 /= RESCALE;
            p2 /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    (p1, p2, log_scale)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e[i]` coupling `i` and `i+1` (implicit QL with Wilkinson
/// shifts). `z` is rotated along, so starting from `e₁` it ends as the first
/// components of the eigenvectors. `d` is overwritten with the eigenvalues.
fn symmetric_tridiagonal_eigen(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(BoundsError::NonConvergence { iterations, best: d[l] });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Nodes and weights with `E[g(V)] ≈ Σ w_i g(v_i)` for `V ~ N(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// `m`-point rule. Nodes start from the eigenvalues of the Jacobi matrix
    /// and are polished by Newton steps on the orthonormal Hermite
    /// recurrence; weights come from the same recurrence in log scale so
    /// that outer nodes underflow to zero weight instead of overflowing.
    pub fn gauss_hermite(m: usize) -> Result<Self> {
        if m == 0 || m > MAX_ORDER {
            return Err(BoundsError::Domain(format!("quadrature order must be in 1..={MAX_ORDER}, got {m}")));
        }
        let mut diag = vec![0.0; m];
        let mut off: Vec<f64> = (1..=m).map(|k| if k < m { (k as f64).sqrt() } else { 0.0 }).collect();
        let mut first = vec![0.0; m];
        first[0] = 1.0;
        symmetric_tridiagonal_eigen(&mut diag, &mut off, &mut first)?;
        diag.sort_by(f64::total_cmp);

        let n = m as f64;
        let mut nodes = Vec::with_capacity(m);
        let mut log_weights = Vec::with_capacity(m);
        for &v in &diag {
            // the recurrence is for weight e^{−z²}, z = v/√2
            let mut z = v / std::f64::consts::SQRT_2;
            for _ in 0..3 {
                let (pm, pm1, _) = hermite_pair(z, m);
                z -= pm / ((2.0 * n).sqrt() * pm1);
            }
            let (_, pm1, log_scale) = hermite_pair(z, m);
            let pp = (2.0 * n).sqrt() * pm1;
            log_weights.push(std::f64::consts::LN_2 - 2.0 * (pp.abs().ln() + log_scale));
            nodes.push(z * std::f64::consts::SQRT_2);
        }
        for i in 0..m / 2 {
            let j = m - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            let lw = 0.5 * (log_weights[i] + log_weights[j]);
            (nodes[i], nodes[j]) = (-x, x);
            (log_weights[i], log_weights[j]) = (lw, lw);
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        let top = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = log_weights.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(BoundsError::NonConvergence { iterations: 3, best: m as f64 });
        }
        Ok(QuadratureRule { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `E[g(V)]` for `V ~ N(0, 1)`.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(v, w)| w * g(*v)).sum()
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::gauss_hermite(DEFAULT_ORDER).expect("default order is valid")
    }
}
