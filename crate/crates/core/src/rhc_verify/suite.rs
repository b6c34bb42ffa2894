//! Randomized and enumerated verification suites.
//!
//! Every instance draws from its own ChaCha stream `(seed, index)`, so a
//! suite's records do not depend on thread scheduling and any failing
//! instance can be replayed from its index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dmc_relay::{alpha_of_channel, DiscreteChannel};
use crate::error::{BoundsError, Result};
use crate::numeric::dirichlet;
use crate::rhc_verify::brute_force::{brute_force_entropy_gap, gaussian_quantizer_gap, RelayInstance};
use crate::rhc_verify::ou::{borell_critical_time, check_borell_exponential};
use crate::rhc_verify::quadrature::{QuadratureRule, DEFAULT_ORDER, MAX_ORDER};
use crate::rhc_verify::semigroup::{check_mossel, check_mossel_log, ProductFunction, SemiSimpleSemigroup};
use crate::scalar_bounds::{bdd_gap_closed, gauss_gap_closed, lemma3_gap};
use crate::types::EntropyRate;

/// Slack allowed on exact-arithmetic margins.
pub const MARGIN_TOL: f64 = 1e-12;
/// Slack for the enumerated density-bound check.
pub const LEMMA4_TOL: f64 = 1e-9;
/// Slack for margins that go through Gauss–Hermite quadrature.
pub const QUADRATURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    Mossel,
    MosselLog,
    Jensen,
    BorellExp,
    Lemma4,
    Quantizer,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 6] = [
        SuiteKind::Mossel,
        SuiteKind::MosselLog,
        SuiteKind::Jensen,
        SuiteKind::BorellExp,
        SuiteKind::Lemma4,
        SuiteKind::Quantizer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Mossel => "mossel",
            SuiteKind::MosselLog => "mossel-log",
            SuiteKind::Jensen => "jensen",
            SuiteKind::BorellExp => "borell-exp",
            SuiteKind::Lemma4 => "lemma4",
            SuiteKind::Quantizer => "quantizer",
        }
    }

    pub fn default_count(self) -> usize {
        match self {
            SuiteKind::Mossel | SuiteKind::MosselLog => 10_000,
            SuiteKind::Jensen => 1_000,
            SuiteKind::BorellExp => 100,
            SuiteKind::Lemma4 => 200,
            SuiteKind::Quantizer => 50,
        }
    }
}

/// How the semigroup time is chosen for each instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeChoice {
    /// Random, sometimes exactly critical, never below it.
    Random,
    /// Random around the critical time, including times below it
    /// (Borell suite only).
    Straddle,
    Critical,
    Fixed(f64),
}

/// Knobs shared by the suites; `None` means "sample per instance".
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count: usize,
    pub max_factors: usize,
    pub max_alphabet: usize,
    pub factors: Option<usize>,
    pub time: TimeChoice,
    pub p: Option<f64>,
    pub q: Option<f64>,
}

impl SuiteConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        SuiteConfig {
            seed,
            count,
            max_factors: 3,
            max_alphabet: 4,
            factors: None,
            time: TimeChoice::Random,
            p: None,
            q: None,
        }
    }
}

/// Inputs of one checked instance, enough to replay it.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instance {
    Semigroup { factors: Vec<Vec<f64>>, values: Vec<f64>, time: f64, p: f64, q: f64 },
    Borell { lambda: f64, x: f64, p: f64, q: f64, t: f64, critical_t: f64 },
    Relay { channel: Vec<Vec<f64>>, codebook: Vec<Vec<usize>>, partition: Vec<usize>, alpha: f64, h1: f64, h2: f64 },
    Quantizer { snr: f64, constellation: Vec<f64>, thresholds: Vec<f64>, order: usize, h1: f64, h2: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRecord {
    pub suite: &'static str,
    pub index: usize,
    pub instance: Instance,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub records: Vec<VerifyRecord>,
}

impl SuiteReport {
    pub fn min_margin(&self) -> f64 {
        self.records.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn random_distribution(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    dirichlet(rng, k, 1.0)
}

fn random_factors(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Vec<Vec<f64>> {
    let n = cfg.factors.unwrap_or_else(|| rng.random_range(1..=cfg.max_factors));
    (0..n)
        .map(|_| {
            let k = rng.random_range(2..=cfg.max_alphabet);
            random_distribution(rng, k)
        })
        .collect()
}

/// Random table: mostly positive with occasional exact zeros.
fn random_values(rng: &mut ChaCha8Rng, size: usize, bounded: bool) -> Vec<f64> {
    let scale = if bounded { 1.0 } else { rng.random_range(-3.0f64..3.0).exp() };
    let mut v: Vec<f64> = (0..size)
        .map(|_| if rng.random_bool(0.1) { 0.0 } else { scale * rng.random::<f64>() })
        .collect();
    if v.iter().all(|x| *x == 0.0) {
        v[0] = scale;
    }
    v
}

fn ordered_indices(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> (f64, f64) {
    let lo = -2.0;
    loop {
        let a = cfg.p.unwrap_or_else(|| rng.random_range(lo..1.0));
        let b = cfg.q.unwrap_or_else(|| rng.random_range(lo..1.0));
        let (p, q) = match (cfg.p, cfg.q) {
            (None, None) => (a.max(b), a.min(b)),
            _ => (a, b),
        };
        if q < p || cfg.p.is_some() || cfg.q.is_some() {
            return (p, q);
        }
    }
}

fn pick_time(rng: &mut ChaCha8Rng, choice: TimeChoice, critical: f64, index: usize) -> f64 {
    match choice {
        TimeChoice::Critical => critical,
        TimeChoice::Fixed(t) => t,
        TimeChoice::Random => {
            if index.is_multiple_of(4) {
                critical
            } else {
                critical + rng.random_range(0.0..2.0) * critical.max(0.05)
            }
        }
        TimeChoice::Straddle => critical * rng.random_range(0.5..1.5),
    }
}

fn run_indexed<F>(cfg: &SuiteConfig, kind: SuiteKind, body: F) -> Result<SuiteReport>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Result<(Instance, f64, bool)> + Sync,
{
    let records = (0..cfg.count)
        .into_par_iter()
        .map(|index| {
            let mut rng = stream(cfg.seed, index);
            let (instance, margin, pass) = body(&mut rng, index)?;
            Ok(VerifyRecord { suite: kind.name(), index, instance, margin, pass })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport { suite: kind.name(), records })
}

/// Reverse hypercontractivity of semi-simple semigroups on random tables.
pub fn mossel_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_indexed(cfg, SuiteKind::Mossel, |rng, index| {
        let factors = random_factors(rng, cfg);
        let (p, q) = ordered_indices(rng, cfg);
        let crit = ((1.0 - q) / (1.0 - p)).ln();
        let time = pick_time(rng, cfg.time, crit, index);
        let sg = SemiSimpleSemigroup::new(factors.clone(), time)?;
        let f = ProductFunction::new(sg.measure().shape(), random_values(rng, sg.measure().size(), false))?;
        let margin = check_mossel(&sg, &f, p, q)?;
        let instance = Instance::Semigroup { factors, values: f.values().to_vec(), time, p, q };
        Ok((instance, margin, margin >= -MARGIN_TOL))
    })
}

/// The `q = 0` consequence `E[ln T_t f] ≥ (1 + 1/t) ln E[f]` for `f ∈ [0,1]`.
pub fn mossel_log_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_indexed(cfg, SuiteKind::MosselLog, |rng, _| {
        let factors = random_factors(rng, cfg);
        let time = match cfg.time {
            TimeChoice::Fixed(t) => t,
            _ => rng.random_range(-4.0f64..3.0).exp(),
        };
        let sg = SemiSimpleSemigroup::new(factors.clone(), time)?;
        let f = ProductFunction::new(sg.measure().shape(), random_values(rng, sg.measure().size(), true))?;
        let margin = check_mossel_log(&sg, &f)?;
        let instance = Instance::Semigroup { factors, values: f.values().to_vec(), time, p: 1.0, q: 0.0 };
        Ok((instance, margin, margin >= -MARGIN_TOL))
    })
}

/// `‖E f‖_p ≥ ‖f‖_p` for the full averaging operator and `p ∈ (0,1)`.
pub fn jensen_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_indexed(cfg, SuiteKind::Jensen, |rng, _| {
        let factors = random_factors(rng, cfg);
        let p = cfg.p.or(cfg.q).unwrap_or_else(|| rng.random_range(0.01..0.99));
        let time = match cfg.time {
            TimeChoice::Fixed(t) => t,
            _ => f64::INFINITY,
        };
        let sg = SemiSimpleSemigroup::new(factors.clone(), time)?;
        let f = ProductFunction::new(sg.measure().shape(), random_values(rng, sg.measure().size(), false))?;
        let margin = check_mossel(&sg, &f, p, p)?;
        let instance = Instance::Semigroup { factors, values: f.values().to_vec(), time, p, q: p };
        Ok((instance, margin, margin >= -MARGIN_TOL))
    })
}

/// Sign of the exponential-function margin against the critical time.
pub fn borell_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_indexed(cfg, SuiteKind::BorellExp, |rng, index| {
        let lambda = rng.random_range(-2.0..2.0);
        let x = rng.random_range(-3.0..3.0);
        let (p, q) = ordered_indices(rng, cfg);
        let critical_t = borell_critical_time(p, q);
        let time_choice = if cfg.time == TimeChoice::Random { TimeChoice::Straddle } else { cfg.time };
        let t = pick_time(rng, time_choice, critical_t, index);
        let margin = check_borell_exponential(lambda, x, p, q, t)?;
        let pass = if (t - critical_t).abs() <= 1e-12 * (1.0 + critical_t) {
            margin.abs() <= MARGIN_TOL
        } else if t > critical_t {
            margin >= -MARGIN_TOL
        } else {
            margin <= MARGIN_TOL
        };
        Ok((Instance::Borell { lambda, x, p, q, t, critical_t }, margin, pass))
    })
}

fn random_channel(rng: &mut ChaCha8Rng, index: usize) -> Result<DiscreteChannel> {
    if index.is_multiple_of(2) {
        const CROSSOVERS: [f64; 6] = [0.02, 0.05, 0.1, 0.2, 0.3, 0.45];
        DiscreteChannel::bsc(CROSSOVERS[(index / 2) % CROSSOVERS.len()])
    } else {
        DiscreteChannel::new((0..2).map(|_| random_distribution(rng, 3)).collect())
    }
}

/// Exact entropy gaps of small random relay codes against `c_α`.
pub fn lemma4_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_indexed(cfg, SuiteKind::Lemma4, |rng, index| {
        let channel = random_channel(rng, index)?;
        let n = cfg.factors.unwrap_or(1 + index % 3).min(3);
        let messages = rng.random_range(2..=4);
        let codebook: Vec<Vec<usize>> =
            (0..messages).map(|_| (0..n).map(|_| rng.random_range(0..channel.inputs())).collect()).collect();
        let sequences = channel.outputs().pow(n as u32);
        let cells = rng.random_range(2..=4usize).min(sequences);
        let partition: Vec<usize> = (0..sequences).map(|_| rng.random_range(0..cells)).collect();
        let inst = RelayInstance::new(channel.clone(), codebook.clone(), partition.clone())?;
        let (h1, h2) = brute_force_entropy_gap(&inst)?;
        let alpha = alpha_of_channel(&channel);
        let margin = bdd_gap_closed(h1, alpha)?.nats() - h2.nats();
        let instance = Instance::Relay {
            channel: channel.rows().map(<[f64]>::to_vec).collect(),
            codebook,
            partition,
            alpha: alpha.value(),
            h1: h1.nats(),
            h2: h2.nats(),
        };
        Ok((instance, margin, margin >= -LEMMA4_TOL))
    })
}

/// Largest change in `H(I|Y)` tolerated between quadrature orders `m` and `2m`.
pub const QUADRATURE_CONVERGENCE: f64 = 1e-9;

/// Quantizer gaps at the first order `m ≥ 64` whose result agrees with
/// order `2m` to [`QUADRATURE_CONVERGENCE`]; returns the `2m` result.
fn converged_quantizer_gap(
    constellation: &[f64],
    thresholds: &[f64],
    rules: &[QuadratureRule],
) -> Result<(EntropyRate, EntropyRate, usize)> {
    let mut prev = gaussian_quantizer_gap(1.0, constellation, thresholds, &rules[0])?;
    for rule in &rules[1..] {
        let next = gaussian_quantizer_gap(1.0, constellation, thresholds, rule)?;
        if (next.1.nats() - prev.1.nats()).abs() <= QUADRATURE_CONVERGENCE {
            return Ok((next.0, next.1, rule.order()));
        }
        prev = next;
    }
    Err(BoundsError::NonConvergence { iterations: rules.len(), best: prev.1.nats() })
}

/// One-letter Gaussian relays with threshold quantizers against `c` and the
/// `½ln(1+2h₂)` gap bound; the margin is the smaller slack of the two.
pub fn quantizer_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let rules = std::iter::successors(Some(DEFAULT_ORDER), |m| Some(2 * m))
        .take_while(|m| *m <= MAX_ORDER)
        .map(QuadratureRule::gauss_hermite)
        .collect::<Result<Vec<_>>>()?;
    run_indexed(cfg, SuiteKind::Quantizer, |rng, _| {
        let points = rng.random_range(2..=4);
        let constellation: Vec<f64> = (0..points).map(|_| rng.random_range(-3.0..3.0)).collect();
        let cuts = rng.random_range(1..=3);
        let mut thresholds: Vec<f64> = (0..cuts).map(|_| rng.random_range(-3.0..3.0)).collect();
        thresholds.sort_by(f64::total_cmp);
        thresholds.dedup();
        let (h1, h2, order) = converged_quantizer_gap(&constellation, &thresholds, &rules)?;
        let slack_c = gauss_gap_closed(h1)?.nats() - h2.nats();
        let slack_gap = lemma3_gap(h2)?.nats() - (h2.nats() - h1.nats());
        let margin = slack_c.min(slack_gap);
        let instance =
            Instance::Quantizer { snr: 1.0, constellation, thresholds, order, h1: h1.nats(), h2: h2.nats() };
        Ok((instance, margin, margin >= -QUADRATURE_TOL))
    })
}

pub fn run_suite(kind: SuiteKind, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.max_factors == 0 || cfg.max_alphabet < 2 {
        return Err(BoundsError::Domain("suite needs at least one factor and alphabet size 2".into()));
    }
    match kind {
        SuiteKind::Mossel => mossel_suite(cfg),
        SuiteKind::MosselLog => mossel_log_suite(cfg),
        SuiteKind::Jensen => jensen_suite(cfg),
        SuiteKind::BorellExp => borell_suite(cfg),
        SuiteKind::Lemma4 => lemma4_suite(cfg),
        SuiteKind::Quantizer => quantizer_suite(cfg),
    }
}
