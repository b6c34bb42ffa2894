//! Capacity bound for discrete memoryless symmetric primitive relay
//! channels with bounded density.
//!
//! The bound is `max_p min{I(X;Y,Z), I(X;Y) + C₀ − c_α⁻¹(C₀)}` with
//! `α = Σ_y max_x W(y|x)`. The cutset analogue drops the `c_α⁻¹` penalty.
//! Both objectives are concave in `p` and are maximized jointly by
//! projected supergradient ascent from a shared set of starting points,
//! plus an exhaustive simplex grid for small input alphabets.
//! Each maximum comes with an upper bound from the linearization
//! `max_q F(q) ≤ max_x ∂F/∂p_x + const`, minimized over the Lagrange weight
//! of the two branches, so every report carries its own optimality gap.
//! Gaps above the certification tolerance trigger a search over that weight
//! with multiplicative (Blahut–Arimoto style) updates for each weight.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};
use crate::numeric::dirichlet;
use crate::scalar_bounds::bdd_gap_inverse;
use crate::types::{BddDensityAlpha, EntropyRate, Tolerance};

const ROW_SUM_TOL: f64 = 1e-12;

/// Row-stochastic transition matrix `W(y|x)`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteChannel {
    inputs: usize,
    outputs: usize,
    probs: Vec<f64>,
}

impl DiscreteChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        let outputs = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != outputs) {
            return Err(BoundsError::DimensionMismatch { expected: outputs, found: bad.len() });
        }
        Self::from_flat(inputs, outputs, rows.into_iter().flatten().collect())
    }

    pub fn from_flat(inputs: usize, outputs: usize, probs: Vec<f64>) -> Result<Self> {
        if inputs < 2 || outputs < 2 {
            return Err(BoundsError::InvalidChannel(format!(
                "need at least 2 inputs and 2 outputs, got {inputs}x{outputs}"
            )));
        }
        if probs.len() != inputs * outputs {
            return Err(BoundsError::DimensionMismatch { expected: inputs * outputs, found: probs.len() });
        }
        for (x, row) in probs.chunks(outputs).enumerate() {
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(BoundsError::InvalidChannel(format!("row {x} has entry {v} outside [0,1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(BoundsError::InvalidChannel(format!("row {x} sums to {sum}")));
            }
        }
        Ok(DiscreteChannel { inputs, outputs, probs })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Noiseless channel on `k` symbols.
    pub fn identity(k: usize) -> Result<Self> {
        let rows = (0..k).map(|x| (0..k).map(|y| if x == y { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(rows)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.probs[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.probs.chunks(self.outputs)
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.outputs + y]
    }

    /// The channel `x ↦ (y, z)` with independent outputs `W(y|x)W(z|x)`;
    /// output `(y, z)` has index `y * |Y| + z`.
    pub fn product(&self) -> DiscreteChannel {
        let n = self.outputs;
        let probs = self
            .rows()
            .flat_map(|row| row.iter().flat_map(move |&a| row.iter().map(move |&b| a * b)))
            .collect();
        DiscreteChannel { inputs: self.inputs, outputs: n * n, probs }
    }

    /// Relabels inputs so that new input `i` is old input `perm[i]`.
    pub fn permute_inputs(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.inputs)?;
        let probs = perm.iter().flat_map(|&x| self.row(x).iter().copied()).collect();
        Ok(DiscreteChannel { inputs: self.inputs, outputs: self.outputs, probs })
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(BoundsError::DimensionMismatch { expected: n, found: perm.len() });
    }
    for &i in perm {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(BoundsError::Domain(format!("not a permutation of 0..{n}: {perm:?}")));
        }
    }
    Ok(())
}

/// Probability vector on the input alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputDistribution {
    probs: Vec<f64>,
}

impl InputDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(BoundsError::InvalidDistribution(format!("negative or non-finite entry in {probs:?}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(BoundsError::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(InputDistribution { probs })
    }

    pub fn uniform(k: usize) -> Self {
        InputDistribution { probs: vec![1.0 / k as f64; k] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// `Σ_y max_x W(y|x)`.
pub fn alpha_of_channel(w: &DiscreteChannel) -> BddDensityAlpha {
    let alpha: f64 = (0..w.outputs)
        .map(|y| (0..w.inputs).map(|x| w.get(x, y)).fold(0.0, f64::max))
        .sum();
    // column maxima of a stochastic matrix sum to at least 1 up to rounding
    BddDensityAlpha::new(alpha.max(1.0)).expect("column maxima sum is finite")
}

/// `I_∞(X;Y) = ln α` for a fully supported input distribution.
pub fn i_infinity(w: &DiscreteChannel) -> EntropyRate {
    EntropyRate::clamped(alpha_of_channel(w).value().ln())
}

/// Output floor used where an output has zero probability under `q` but
/// positive probability under some row; keeps divergences finite.
const OUTPUT_FLOOR: f64 = 1e-300;

fn output_law(p: &[f64], w: &DiscreteChannel) -> Vec<f64> {
    let mut q = vec![0.0; w.outputs];
    for (px, row) in p.iter().zip(w.rows()) {
        for (qy, wy) in q.iter_mut().zip(row) {
            *qy += px * wy;
        }
    }
    q
}

/// Per-input divergences `D(W_x ‖ q)`.
fn divergences(w: &DiscreteChannel, q: &[f64]) -> Vec<f64> {
    w.rows()
        .map(|row| {
            row.iter()
                .zip(q)
                .filter(|(wy, _)| **wy > 0.0)
                .map(|(wy, qy)| wy * (wy / qy.max(OUTPUT_FLOOR)).ln())
                .sum()
        })
        .collect()
}

/// Returns `I(X;Y)` and the per-input divergences `D(W_x ‖ pW)`.
fn info_and_divergences(p: &[f64], w: &DiscreteChannel) -> (f64, Vec<f64>) {
    let div = divergences(w, &output_law(p, w));
    let info = p.iter().zip(&div).map(|(px, d)| px * d).sum::<f64>();
    (info.max(0.0), div)
}

fn check_dims(p: &InputDistribution, w: &DiscreteChannel) -> Result<()> {
    if p.len() != w.inputs {
        return Err(BoundsError::DimensionMismatch { expected: w.inputs, found: p.len() });
    }
    Ok(())
}

/// `I(X;Y)` for input `p` through `w`.
pub fn mutual_info(p: &InputDistribution, w: &DiscreteChannel) -> Result<EntropyRate> {
    check_dims(p, w)?;
    Ok(EntropyRate::clamped(info_and_divergences(&p.probs, w).0))
}

/// `I(X;Y,Z)` where `Y` and `Z` are independent outputs of `w`.
pub fn mutual_info_product(p: &InputDistribution, w: &DiscreteChannel) -> Result<EntropyRate> {
    check_dims(p, w)?;
    Ok(EntropyRate::clamped(info_and_divergences(&p.probs, &w.product()).0))
}

/// Settings for the simplex maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Number of starting points (the uniform distribution plus Dirichlet draws).
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop when the projected-gradient step `‖p − Π(p + g)‖` falls below this.
    pub grad_tol: f64,
    /// Simplex grid resolution `1/mesh` for the exhaustive check.
    pub grid_mesh: usize,
    /// Largest input alphabet for which the grid check runs.
    pub grid_max_inputs: usize,
    /// Largest optimality gap accepted as certified.
    pub certify_tol: f64,
}

pub const DEFAULT_SEED: u64 = 0x5eed_2017;

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            starts: 16,
            seed: DEFAULT_SEED,
            max_iter: 20_000,
            grad_tol: 1e-8,
            grid_mesh: 200,
            grid_max_inputs: 4,
            certify_tol: 1e-6,
        }
    }
}

/// Result of the density-penalized maximization over input laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmcBoundReport {
    pub alpha: BddDensityAlpha,
    pub i_infinity: EntropyRate,
    /// `C₀ − c_α⁻¹(C₀)`, the relay gain that survives the entropy-gap bound.
    pub penalty: EntropyRate,
    pub cutset: EntropyRate,
    pub cor2_bound: EntropyRate,
    pub argmax_input: InputDistribution,
    /// Upper bound on how far `cor2_bound` and `cutset` may be below their true maxima.
    pub optimality_gap: f64,
    pub certified: bool,
}

/// Weights of the uniform law mixed into `pW` when forming dual certificates.
/// Outputs reachable only from unused inputs make `D(W_x ‖ pW)` infinite, and
/// the mixture caps that at a cost of `−ln(1−δ)` on every other input.
const DUAL_SMOOTHING: [f64; 9] = [0.0, 1e-12, 1e-10, 1e-8, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2];

/// Both branch values and divergence vectors at one input distribution.
struct Evaluation {
    both: f64,
    direct: f64,
    div_both: Vec<f64>,
    div_direct: Vec<f64>,
    q_both: Vec<f64>,
    q_direct: Vec<f64>,
}

impl Evaluation {
    fn at(p: &[f64], w: &DiscreteChannel, prod: &DiscreteChannel) -> Self {
        let q_both = output_law(p, prod);
        let q_direct = output_law(p, w);
        let div_both = divergences(prod, &q_both);
        let div_direct = divergences(w, &q_direct);
        let mean = |div: &[f64]| p.iter().zip(div).map(|(px, d)| px * d).sum::<f64>().max(0.0);
        Evaluation { both: mean(&div_both), direct: mean(&div_direct), div_both, div_direct, q_both, q_direct }
    }

    fn objective(&self, gain: f64) -> f64 {
        self.both.min(self.direct + gain)
    }

    /// Candidate ascent directions for `min{I(X;YZ), I(X;Y) + gain}`: the
    /// gradient of the active branch and, for finite gain, convex combinations
    /// of both branch gradients. Near the crossing of the branches only the
    /// combinations make progress.
    fn directions(&self, gain: f64, free: &[bool]) -> Vec<Vec<f64>> {
        let (g1, g2) = (&self.div_both, &self.div_direct);
        if !gain.is_finite() {
            return vec![g1.clone()];
        }
        let active = if self.both <= self.direct + gain { g1 } else { g2 };
        let mut out = vec![active.clone()];
        // θ at which both branches have equal slope along θ·g1 + (1−θ)·g2 on the free face.
        let n = free.iter().filter(|f| **f).count().max(1) as f64;
        let center = |g: &[f64]| -> Vec<f64> {
            let mean = g.iter().zip(free).filter(|(_, f)| **f).map(|(v, _)| v).sum::<f64>() / n;
            g.iter().zip(free).map(|(v, f)| if *f { v - mean } else { 0.0 }).collect()
        };
        let (c1, c2) = (center(g1), center(g2));
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let diff: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a - b).collect();
        let dd = dot(&diff, &diff);
        let mut thetas = vec![0.25, 0.5, 0.75];
        if dd > 0.0 {
            thetas.push((-dot(&diff, &c2) / dd).clamp(0.0, 1.0));
        }
        for t in thetas {
            out.push(g1.iter().zip(g2).map(|(u, v)| t * u + (1.0 - t) * v).collect());
        }
        out
    }

    /// Upper bound on `max_p min{I(X;YZ), I(X;Y) + gain}`.
    ///
    /// Valid for any pair of output laws `(Q₁, Q₂)`, since
    /// `min{I₁, I₂ + gain} ≤ Σ_x p_x [λ D(W²_x ‖ Q₁) + (1−λ)(D(W_x ‖ Q₂) + gain)]`.
    fn dual_bound(&self, w: &DiscreteChannel, prod: &DiscreteChannel, gain: f64) -> f64 {
        let smoothed = |ch: &DiscreteChannel, q: &[f64]| -> Vec<Vec<f64>> {
            DUAL_SMOOTHING
                .iter()
                .map(|&delta| {
                    let u = delta / q.len() as f64;
                    let mixed: Vec<f64> = q.iter().map(|qy| (1.0 - delta) * qy + u).collect();
                    divergences(ch, &mixed)
                })
                .collect()
        };
        let worst = |div: &[f64]| div.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let both = smoothed(prod, &self.q_both);
        if !gain.is_finite() {
            return both.iter().map(|d| worst(d)).fold(f64::INFINITY, f64::min);
        }
        let direct = smoothed(w, &self.q_direct);
        let mut best = f64::INFINITY;
        for div_both in &both {
            for div_direct in &direct {
                let lines: Vec<(f64, f64)> = div_both
                    .iter()
                    .zip(div_direct)
                    .map(|(d1, d2)| (d2 + gain, d1 - d2 - gain)) // value at λ: intercept + λ·slope
                    .collect();
                best = best.min(min_of_upper_envelope(&lines));
            }
        }
        best
    }
}

/// `min_{λ∈[0,1]} max_i (a_i + λ b_i)`; the minimum of a convex piecewise
/// linear function is attained at an endpoint or at a crossing of two lines.
fn min_of_upper_envelope(lines: &[(f64, f64)]) -> f64 {
    let envelope = |lam: f64| lines.iter().map(|(a, b)| a + lam * b).fold(f64::NEG_INFINITY, f64::max);
    let mut best = envelope(0.0).min(envelope(1.0));
    for (i, (a1, b1)) in lines.iter().enumerate() {
        for (a2, b2) in &lines[i + 1..] {
            if b1 != b2 {
                let lam = (a2 - a1) / (b1 - b2);
                if (0.0..=1.0).contains(&lam) {
                    best = best.min(envelope(lam));
                }
            }
        }
    }
    best
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    let mut p: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

struct Ascent {
    point: Vec<f64>,
}

/// Mass below which an input is treated as unused once ascent stalls.
const FREEZE_MASS: f64 = 1e-12;

/// Projects `p + step·g` onto the face of the simplex spanned by the free inputs.
fn step_on_face(p: &[f64], g: &[f64], step: f64, free: &[bool]) -> Vec<f64> {
    let sub: Vec<f64> = (0..p.len()).filter(|&x| free[x]).map(|x| p[x] + step * g[x]).collect();
    let mut projected = project_simplex(&sub).into_iter();
    free.iter().map(|&f| if f { projected.next().unwrap_or(0.0) } else { 0.0 }).collect()
}

/// Projected supergradient ascent. When no step improves the objective, inputs
/// with negligible mass are pinned to zero and ascent resumes on that face;
/// divergences of such inputs can be dominated by outputs no other input
/// reaches, which makes their gradient entries meaningless at finite steps.
fn ascend(start: Vec<f64>, gain: f64, w: &DiscreteChannel, prod: &DiscreteChannel, cfg: &OptimizerConfig) -> Ascent {
    let mut p = start;
    let mut free = vec![true; p.len()];
    let mut eval = Evaluation::at(&p, w, prod);
    let mut value = eval.objective(gain);
    let mut step = 1.0;
    'outer: for _ in 0..cfg.max_iter {
        let dirs = eval.directions(gain, &free);
        let stationarity = step_on_face(&p, &dirs[0], 1.0, &free)
            .iter()
            .zip(&p)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        if dirs.len() == 1 && stationarity < cfg.grad_tol {
            break;
        }
        let mut best: Option<(f64, f64, Vec<f64>, Evaluation)> = None;
        for d in &dirs {
            let mut s = step;
            while s >= 1e-18 {
                let cand = step_on_face(&p, d, s, &free);
                let cand_eval = Evaluation::at(&cand, w, prod);
                let cand_value = cand_eval.objective(gain);
                if cand_value > value {
                    if best.as_ref().is_none_or(|b| cand_value > b.0) {
                        best = Some((cand_value, s, cand, cand_eval));
                    }
                    break;
                }
                s *= 0.5;
            }
        }
        match best {
            Some((v, s, cand, cand_eval)) => {
                if v - value <= f64::EPSILON * value.abs() && dirs.len() > 1 && stationarity < cfg.grad_tol {
                    break;
                }
                p = cand;
                eval = cand_eval;
                value = v;
                step = (s * 2.0).min(1e6);
            }
            None => {
                let newly: Vec<usize> = (0..p.len()).filter(|&x| free[x] && p[x] <= FREEZE_MASS).collect();
                if newly.is_empty() || newly.len() == free.iter().filter(|f| **f).count() {
                    break;
                }
                for x in newly {
                    free[x] = false;
                    p[x] = 0.0;
                }
                let total: f64 = p.iter().sum();
                p.iter_mut().for_each(|x| *x /= total);
                eval = Evaluation::at(&p, w, prod);
                value = eval.objective(gain);
                step = 1.0;
                continue 'outer;
            }
        }
    }
    Ascent { point: p }
}

fn starting_points(k: usize, cfg: &OptimizerConfig) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts = vec![vec![1.0 / k as f64; k]];
    while starts.len() < cfg.starts.max(1) {
        // concentration below 1 pushes draws toward the vertices
        starts.push(dirichlet(&mut rng, k, 0.5));
    }
    starts
}

/// Both mutual informations at many points with reused buffers, via
/// `I = H(pW) − Σ_x p_x H(W_x)`.
struct InfoScratch<'a> {
    w: &'a DiscreteChannel,
    prod: &'a DiscreteChannel,
    row_entropy: Vec<f64>,
    q: Vec<f64>,
    q2: Vec<f64>,
}

fn entropy_of(probs: &[f64]) -> f64 {
    probs.iter().filter(|p| **p > 0.0).map(|p| -p * p.ln()).sum()
}

impl<'a> InfoScratch<'a> {
    fn new(w: &'a DiscreteChannel, prod: &'a DiscreteChannel) -> Self {
        InfoScratch {
            w,
            prod,
            row_entropy: w.rows().map(entropy_of).collect(),
            q: vec![0.0; w.outputs],
            q2: vec![0.0; prod.outputs],
        }
    }

    fn output_law(p: &[f64], ch: &DiscreteChannel, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (px, row) in p.iter().zip(ch.rows()) {
            if *px > 0.0 {
                out.iter_mut().zip(row).for_each(|(o, r)| *o += px * r);
            }
        }
    }

    /// `(I(X;Y,Z), I(X;Y))`.
    fn infos(&mut self, p: &[f64]) -> (f64, f64) {
        Self::output_law(p, self.w, &mut self.q);
        Self::output_law(p, self.prod, &mut self.q2);
        let cond: f64 = p.iter().zip(&self.row_entropy).map(|(px, h)| px * h).sum();
        let direct = (entropy_of(&self.q) - cond).max(0.0);
        let both = (entropy_of(&self.q2) - 2.0 * cond).max(0.0);
        (both, direct)
    }
}

/// Calls `visit` on every point of the simplex grid of mesh `1/m` whose
/// leading coordinates are already fixed in `p[..fixed]`.
fn for_each_grid_point(p: &mut [f64], fixed: usize, left: usize, m: usize, visit: &mut impl FnMut(&[f64])) {
    if fixed + 1 == p.len() {
        p[fixed] = left as f64 / m as f64;
        visit(p);
        return;
    }
    for i in 0..=left {
        p[fixed] = i as f64 / m as f64;
        for_each_grid_point(p, fixed + 1, left - i, m, visit);
    }
}

/// Best grid values `(cor2, cutset)` with their arguments over the simplex
/// grid of mesh `1/m`.
fn grid_search(
    k: usize,
    m: usize,
    gain_cor2: f64,
    gain_cutset: f64,
    w: &DiscreteChannel,
    prod: &DiscreteChannel,
) -> ((f64, Vec<f64>), (f64, Vec<f64>)) {
    let reduce = |a: (f64, Vec<f64>), b: (f64, Vec<f64>)| if b.0 > a.0 { b } else { a };
    let init = || ((f64::NEG_INFINITY, Vec::new()), (f64::NEG_INFINITY, Vec::new()));
    (0..=m)
        .into_par_iter()
        .map(|first| {
            let mut scratch = InfoScratch::new(w, prod);
            let (mut bc, mut bs) = init();
            let mut p = vec![0.0; k];
            p[0] = first as f64 / m as f64;
            for_each_grid_point(&mut p, 1, m - first, m, &mut |p| {
                let (both, direct) = scratch.infos(p);
                let vc = both.min(direct + gain_cor2);
                let vs = both.min(direct + gain_cutset);
                if vc > bc.0 {
                    bc = (vc, p.to_vec());
                }
                if vs > bs.0 {
                    bs = (vs, p.to_vec());
                }
            });
            (bc, bs)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(init(), |(ac, as_), (bc, bs)| (reduce(ac, bc), reduce(as_, bs)))
}

const REFINE_SEARCH_STEPS: usize = 48;
const REFINE_MAX_ITER: usize = 4000;
const REFINE_REVIVE_MASS: f64 = 1e-9;

/// Maximizes `λ·I(X;Y,Z) + (1−λ)·I(X;Y)` by the multiplicative update
/// `p_x ← p_x·exp(λ D(W²_x‖·) + (1−λ) D(W_x‖·)) / Z`, starting from `start`
/// with every input given a little mass. Returns the smallest value of
/// `max_x [λ D(W²_x‖·) + (1−λ)(D(W_x‖·) + gain)]` seen and the final law.
fn weighted_blahut(
    start: &[f64],
    lambda: f64,
    gain: f64,
    w: &DiscreteChannel,
    prod: &DiscreteChannel,
    tol: f64,
) -> (f64, Vec<f64>) {
    let k = start.len();
    let mut p: Vec<f64> = start.iter().map(|x| (x + REFINE_REVIVE_MASS / k as f64) / (1.0 + REFINE_REVIVE_MASS)).collect();
    let offset = if lambda < 1.0 { (1.0 - lambda) * gain } else { 0.0 };
    let mut best = f64::INFINITY;
    for _ in 0..REFINE_MAX_ITER {
        let e = Evaluation::at(&p, w, prod);
        let c: Vec<f64> = e.div_both.iter().zip(&e.div_direct).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let top = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean: f64 = p.iter().zip(&c).map(|(px, cx)| px * cx).sum();
        best = best.min(top + offset);
        if top - mean < tol {
            break;
        }
        let mut next: Vec<f64> = p.iter().zip(&c).map(|(px, cx)| px * (cx - top).exp()).collect();
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        p = next;
    }
    (best, p)
}

/// Tightens the certificate for `max_p min{I(X;Y,Z), I(X;Y) + gain}` by a
/// golden-section search over the branch weight `λ`, each weight solved by
/// [`weighted_blahut`]. Returns the laws visited; their dual bounds are at
/// least as tight as the weighted values found along the way.
fn refine_by_weights(start: &[f64], gain: f64, w: &DiscreteChannel, prod: &DiscreteChannel, tol: f64) -> Vec<Vec<f64>> {
    let inner_tol = tol * 1e-3;
    if !gain.is_finite() {
        return vec![weighted_blahut(start, 1.0, gain, w, prod, inner_tol).1];
    }
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut points = Vec::with_capacity(REFINE_SEARCH_STEPS + 2);
    let mut warm = start.to_vec();
    let mut eval_at = |lam: f64, points: &mut Vec<Vec<f64>>| -> f64 {
        let (u, p) = weighted_blahut(&warm, lam, gain, w, prod, inner_tol);
        warm.clone_from(&p);
        points.push(p);
        u
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = eval_at(x1, &mut points);
    let mut f2 = eval_at(x2, &mut points);
    for _ in 0..REFINE_SEARCH_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = eval_at(x1, &mut points);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = eval_at(x2, &mut points);
        }
    }
    eval_at(0.0, &mut points);
    eval_at(1.0, &mut points);
    points
}

struct JointOptimum {
    cor2: (f64, Vec<f64>),
    cutset: (f64, Vec<f64>),
    gap: f64,
}

/// Best law found for one objective and the tightest certificate seen.
struct Branch {
    gain: f64,
    value: f64,
    point: Vec<f64>,
    upper: f64,
}

impl Branch {
    fn new(gain: f64) -> Self {
        Branch { gain, value: f64::NEG_INFINITY, point: Vec::new(), upper: f64::INFINITY }
    }

    fn consider(&mut self, e: &Evaluation, p: &[f64], w: &DiscreteChannel, prod: &DiscreteChannel) {
        self.upper = self.upper.min(e.dual_bound(w, prod, self.gain));
        let v = e.objective(self.gain);
        if v > self.value {
            self.value = v;
            self.point = p.to_vec();
        }
    }
}

fn optimize(w: &DiscreteChannel, gain_cor2: f64, gain_cutset: f64, cfg: &OptimizerConfig) -> JointOptimum {
    let prod = w.product();
    let k = w.inputs;
    let starts = starting_points(k, cfg);
    let runs: Vec<(Ascent, Ascent)> = starts
        .into_par_iter()
        .map(|s| (ascend(s.clone(), gain_cor2, w, &prod, cfg), ascend(s, gain_cutset, w, &prod, cfg)))
        .collect();

    let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(2 * runs.len() + 2);
    for (a, b) in &runs {
        candidates.push(a.point.clone());
        candidates.push(b.point.clone());
    }
    if k <= cfg.grid_max_inputs && cfg.grid_mesh > 0 {
        let (gc, gs) = grid_search(k, cfg.grid_mesh, gain_cor2, gain_cutset, w, &prod);
        candidates.push(gc.1);
        candidates.push(gs.1);
    }

    let mut cor2 = Branch::new(gain_cor2);
    let mut cutset = Branch::new(gain_cutset);
    for p in candidates {
        let e = Evaluation::at(&p, w, &prod);
        cor2.consider(&e, &p, w, &prod);
        cutset.consider(&e, &p, w, &prod);
    }
    for refine_cor2 in [true, false] {
        let target = if refine_cor2 { &cor2 } else { &cutset };
        if target.upper - target.value <= cfg.certify_tol {
            continue;
        }
        for p in refine_by_weights(&target.point, target.gain, w, &prod, cfg.certify_tol) {
            let e = Evaluation::at(&p, w, &prod);
            cor2.consider(&e, &p, w, &prod);
            cutset.consider(&e, &p, w, &prod);
        }
    }
    let gap = (cor2.upper - cor2.value).max(cutset.upper - cutset.value).max(0.0);
    let (cor2, cutset) = ((cor2.value, cor2.point), (cutset.value, cutset.point));
    JointOptimum { cor2, cutset, gap }
}

/// Maximizes `min{I(X;Y,Z), I(X;Y) + C₀ − c_α⁻¹(C₀)}` over input laws, along
/// with its cutset analogue.
pub fn capacity_ub_cor2(w: &DiscreteChannel, c0: EntropyRate, tol: Tolerance) -> Result<DmcBoundReport> {
    capacity_ub_cor2_with(w, c0, None, tol, &OptimizerConfig::default())
}

/// As [`capacity_ub_cor2`], with an optional user-supplied density bound
/// and explicit optimizer settings.
pub fn capacity_ub_cor2_with(
    w: &DiscreteChannel,
    c0: EntropyRate,
    alpha_override: Option<BddDensityAlpha>,
    tol: Tolerance,
    cfg: &OptimizerConfig,
) -> Result<DmcBoundReport> {
    if c0.is_saturated() {
        return Err(BoundsError::Domain("relay rate must be finite".into()));
    }
    let alpha = alpha_override.unwrap_or_else(|| alpha_of_channel(w));
    let h = bdd_gap_inverse(c0, alpha, tol)?;
    // a saturated inverse leaves no relay gain beyond the broadcast cut
    let penalty = if h.is_saturated() { EntropyRate::ZERO } else { EntropyRate::clamped(c0.nats() - h.nats()) };
    let gain_cor2 = if h.is_saturated() { f64::INFINITY } else { penalty.nats() };
    let opt = optimize(w, gain_cor2, c0.nats(), cfg);
    Ok(DmcBoundReport {
        alpha,
        i_infinity: EntropyRate::clamped(alpha.value().ln()),
        penalty,
        cutset: EntropyRate::clamped(opt.cutset.0),
        cor2_bound: EntropyRate::clamped(opt.cor2.0),
        argmax_input: InputDistribution { probs: opt.cor2.1 },
        optimality_gap: opt.gap,
        certified: opt.gap <= cfg.certify_tol,
    })
}

/// `max_p min{I(X;Y,Z), I(X;Y) + C₀}`.
pub fn cutset_dmc(w: &DiscreteChannel, c0: EntropyRate, tol: Tolerance) -> Result<EntropyRate> {
    Ok(capacity_ub_cor2(w, c0, tol)?.cutset)
}
