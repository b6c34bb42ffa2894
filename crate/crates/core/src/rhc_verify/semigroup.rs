//! Semi-simple semigroups `T_t = ⊗_i [e^{−t} Id + (1−e^{−t}) P_i]` acting on
//! dense tables over `Y_1 × … × Y_n`, and the `L^p` norms they are measured in.

use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};

pub const MAX_FACTORS: usize = 4;
pub const MAX_ALPHABET: usize = 6;

/// Product probability measure `⊗_i P_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductMeasure {
    factors: Vec<Vec<f64>>,
}

impl ProductMeasure {
    pub fn new(factors: Vec<Vec<f64>>) -> Result<Self> {
        if factors.is_empty() || factors.len() > MAX_FACTORS {
            return Err(BoundsError::SizeLimit(format!(
                "need 1..={MAX_FACTORS} factors, got {}",
                factors.len()
            )));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.is_empty() || f.len() > MAX_ALPHABET {
                return Err(BoundsError::SizeLimit(format!(
                    "factor {i} has alphabet size {}, limit {MAX_ALPHABET}",
                    f.len()
                )));
            }
            if f.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
                return Err(BoundsError::InvalidDistribution(format!("factor {i}: {f:?}")));
            }
            let s: f64 = f.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(BoundsError::InvalidDistribution(format!("factor {i} sums to {s}")));
            }
        }
        Ok(ProductMeasure { factors })
    }

    pub fn factors(&self) -> &[Vec<f64>] {
        &self.factors
    }

    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(Vec::len).collect()
    }

    pub fn size(&self) -> usize {
        self.factors.iter().map(Vec::len).product()
    }

    /// Dense table of cell masses, row-major with the last factor fastest.
    pub fn weights(&self) -> Vec<f64> {
        self.factors.iter().fold(vec![1.0], |acc, f| {
            acc.iter().flat_map(|a| f.iter().map(move |p| a * p)).collect()
        })
    }
}

/// Nonnegative function on the product alphabet, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductFunction {
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl ProductFunction {
    pub fn new(shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let size: usize = shape.iter().product();
        if values.len() != size {
            return Err(BoundsError::DimensionMismatch { expected: size, found: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(BoundsError::Domain(format!("function values must be finite and >= 0, got {v}")));
        }
        Ok(ProductFunction { shape, values })
    }

    pub fn constant(shape: Vec<usize>, c: f64) -> Result<Self> {
        let size = shape.iter().product();
        Self::new(shape, vec![c; size])
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `T_t` for the product of simple semigroups with stationary measure `⊗ P_i`.
/// `time = +∞` is the full averaging operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiSimpleSemigroup {
    measure: ProductMeasure,
    time: f64,
}

impl SemiSimpleSemigroup {
    pub fn new(factors: Vec<Vec<f64>>, time: f64) -> Result<Self> {
        if !(time >= 0.0) {
            return Err(BoundsError::Domain(format!("time must be >= 0, got {time}")));
        }
        Ok(SemiSimpleSemigroup { measure: ProductMeasure::new(factors)?, time })
    }

    pub fn measure(&self) -> &ProductMeasure {
        &self.measure
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn at_time(&self, time: f64) -> Result<Self> {
        Self::new(self.measure.factors.clone(), time)
    }
}

/// Applies `T_t` one tensor axis at a time.
pub fn apply_semisimple(sg: &SemiSimpleSemigroup, f: &ProductFunction) -> Result<ProductFunction> {
    let shape = sg.measure.shape();
    if shape != f.shape {
        return Err(BoundsError::DimensionMismatch { expected: sg.measure.size(), found: f.values.len() });
    }
    let keep = (-sg.time).exp();
    let mix = -(-sg.time).exp_m1();
    let mut values = f.values.clone();
    let mut stride = values.len();
    for (axis, p) in sg.measure.factors.iter().enumerate() {
        let len = shape[axis];
        stride /= len;
        let block = len * stride;
        for outer in (0..values.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                let avg: f64 = p.iter().enumerate().map(|(y, py)| py * values[base + y * stride]).sum();
                for y in 0..len {
                    let v = &mut values[base + y * stride];
                    *v = keep * *v + mix * avg;
                }
            }
        }
    }
    Ok(ProductFunction { shape, values })
}

/// `‖f‖_{L^p(μ)}` for `p ≤ 1`; `p = 0` is the geometric mean `exp μ(ln f)`.
///
/// For `p ≤ 0` a zero of `f` on a cell of positive mass makes the norm 0.
pub fn lp_norm(f: &ProductFunction, measure: &ProductMeasure, p: f64) -> Result<f64> {
    if !(p <= 1.0) || !p.is_finite() {
        return Err(BoundsError::Domain(format!("norm index must be finite and <= 1, got {p}")));
    }
    if measure.shape() != f.shape {
        return Err(BoundsError::DimensionMismatch { expected: measure.size(), found: f.values.len() });
    }
    Ok(lp_norm_weighted(&f.values, &measure.weights(), p))
}

/// Norm against explicit cell weights summing to one.
pub(crate) fn lp_norm_weighted(values: &[f64], weights: &[f64], p: f64) -> f64 {
    let support = || values.iter().zip(weights).filter(|(_, w)| **w > 0.0);
    if p <= 0.0 && support().any(|(v, _)| *v == 0.0) {
        return 0.0;
    }
    if p == 0.0 {
        let mean_log: f64 = support().map(|(v, w)| w * v.ln()).sum();
        return mean_log.exp();
    }
    // ln ‖f‖_p = ln(1 + Σ μ (f^p − 1)) / p, accurate for small |p|
    let s: f64 = support().map(|(v, w)| w * (p * v.ln()).exp_m1()).sum();
    (s.ln_1p() / p).exp()
}

fn critical_time(p: f64, q: f64) -> f64 {
    ((1.0 - q) / (1.0 - p)).ln()
}

/// `‖T_t f‖_q − ‖f‖_p` under the stationary measure.
///
/// Requires `q ≤ p < 1` and `t ≥ ln((1−q)/(1−p))`; the margin is then nonnegative.
pub fn check_mossel(sg: &SemiSimpleSemigroup, f: &ProductFunction, p: f64, q: f64) -> Result<f64> {
    if !(q <= p && p < 1.0) || !q.is_finite() {
        return Err(BoundsError::Precondition(format!("need q <= p < 1, got p={p}, q={q}")));
    }
    let crit = critical_time(p, q);
    if sg.time < crit * (1.0 - 1e-12) {
        return Err(BoundsError::Precondition(format!(
            "time {} is below ln((1-q)/(1-p)) = {crit}",
            sg.time
        )));
    }
    let tf = apply_semisimple(sg, f)?;
    Ok(lp_norm(&tf, &sg.measure, q)? - lp_norm(f, &sg.measure, p)?)
}

/// `E[ln T_t f] − (1 + 1/t) ln E[f]` for `f` with values in `[0, 1]`.
pub fn check_mossel_log(sg: &SemiSimpleSemigroup, f: &ProductFunction) -> Result<f64> {
    if let Some(v) = f.values.iter().find(|v| **v > 1.0) {
        return Err(BoundsError::Precondition(format!("f must take values in [0,1], found {v}")));
    }
    if !(sg.time > 0.0) {
        return Err(BoundsError::Precondition("time must be positive".into()));
    }
    let mean = lp_norm(f, &sg.measure, 1.0)?;
    if mean == 0.0 {
        return Err(BoundsError::Precondition("f vanishes almost everywhere".into()));
    }
    let tf = apply_semisimple(sg, f)?;
    let geo = lp_norm(&tf, &sg.measure, 0.0)?;
    let mean_log = if geo > 0.0 { geo.ln() } else { f64::NEG_INFINITY };
    Ok(mean_log - (1.0 + 1.0 / sg.time) * mean.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform2() -> Vec<Vec<f64>> {
        vec![vec![0.5, 0.5]]
    }

    #[test]
    fn identity_at_time_zero() {
        let sg = SemiSimpleSemigroup::new(vec![vec![0.2, 0.8], vec![0.1, 0.3, 0.6]], 0.0).unwrap();
        let f = ProductFunction::new(vec![2, 3], vec![1.0, 2.0, 0.0, 4.0, 0.5, 3.0]).unwrap();
        assert_eq!(apply_semisimple(&sg, &f).unwrap(), f);
    }

    #[test]
    fn full_averaging_at_infinity() {
        let factors = vec![vec![0.2, 0.8], vec![0.1, 0.3, 0.6]];
        let sg = SemiSimpleSemigroup::new(factors.clone(), f64::INFINITY).unwrap();
        let f = ProductFunction::new(vec![2, 3], vec![1.0, 2.0, 0.0, 4.0, 0.5, 3.0]).unwrap();
        let mean: f64 = f.values().iter().zip(ProductMeasure::new(factors).unwrap().weights()).map(|(v, w)| v * w).sum();
        for v in apply_semisimple(&sg, &f).unwrap().values() {
            assert!((v - mean).abs() < 1e-15);
        }
    }

    #[test]
    fn single_coordinate_example() {
        let sg = SemiSimpleSemigroup::new(uniform2(), 2f64.ln()).unwrap();
        let f = ProductFunction::new(vec![2], vec![1.0, 0.0]).unwrap();
        let tf = apply_semisimple(&sg, &f).unwrap();
        assert!((tf.values()[0] - 0.75).abs() < 1e-15);
        assert!((tf.values()[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch() {
        let sg = SemiSimpleSemigroup::new(uniform2(), 1.0).unwrap();
        let f = ProductFunction::constant(vec![3], 1.0).unwrap();
        assert!(matches!(apply_semisimple(&sg, &f), Err(BoundsError::DimensionMismatch { .. })));
    }

    #[test]
    fn size_caps() {
        assert!(matches!(ProductMeasure::new(vec![vec![1.0]; 5]), Err(BoundsError::SizeLimit(_))));
        assert!(matches!(ProductMeasure::new(vec![vec![1.0 / 7.0; 7]]), Err(BoundsError::SizeLimit(_))));
    }

    #[test]
    fn norm_examples() {
        let mu = ProductMeasure::new(uniform2()).unwrap();
        let c = ProductFunction::constant(vec![2], 3.7).unwrap();
        for p in [-2.0, -0.3, 0.0, 1e-9, 0.5, 1.0] {
            assert!((lp_norm(&c, &mu, p).unwrap() - 3.7).abs() < 1e-14, "p={p}");
        }
        let e = std::f64::consts::E;
        let f = ProductFunction::new(vec![2], vec![e, e.powi(3)]).unwrap();
        assert!((lp_norm(&f, &mu, 0.0).unwrap() - e * e).abs() < 1e-13);
        assert!((lp_norm(&f, &mu, 1.0).unwrap() - 0.5 * (e + e.powi(3))).abs() < 1e-13);
        assert!(lp_norm(&f, &mu, 1.5).is_err());
    }

    #[test]
    fn norm_with_zero_cells() {
        let mu = ProductMeasure::new(uniform2()).unwrap();
        let f = ProductFunction::new(vec![2], vec![0.0, 4.0]).unwrap();
        assert_eq!(lp_norm(&f, &mu, 0.0).unwrap(), 0.0);
        assert_eq!(lp_norm(&f, &mu, -1.0).unwrap(), 0.0);
        assert!((lp_norm(&f, &mu, 0.5).unwrap() - 1.0).abs() < 1e-15);
        // a zero on a null cell does not count
        let mu = ProductMeasure::new(vec![vec![0.0, 1.0]]).unwrap();
        assert!((lp_norm(&f, &mu, -1.0).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn small_p_is_continuous_at_zero() {
        let mu = ProductMeasure::new(vec![vec![0.3, 0.7]]).unwrap();
        let f = ProductFunction::new(vec![2], vec![0.2, 5.0]).unwrap();
        let g = lp_norm(&f, &mu, 0.0).unwrap();
        for p in [1e-12, -1e-12] {
            assert!((lp_norm(&f, &mu, p).unwrap() - g).abs() < 1e-11);
        }
    }

    #[test]
    fn mossel_constant_function_has_zero_margin() {
        let sg = SemiSimpleSemigroup::new(vec![vec![0.3, 0.7], vec![0.5, 0.5]], 2.0).unwrap();
        let f = ProductFunction::constant(vec![2, 2], 2.5).unwrap();
        assert!(check_mossel(&sg, &f, 0.5, -0.5).unwrap().abs() < 1e-14);
    }

    #[test]
    fn mossel_preconditions() {
        let sg = SemiSimpleSemigroup::new(uniform2(), 0.1).unwrap();
        let f = ProductFunction::constant(vec![2], 1.0).unwrap();
        assert!(matches!(check_mossel(&sg, &f, 0.5, -0.5), Err(BoundsError::Precondition(_))));
        assert!(matches!(check_mossel(&sg, &f, 0.2, 0.5), Err(BoundsError::Precondition(_))));
        assert!(matches!(check_mossel(&sg, &f, 1.0, 0.5), Err(BoundsError::Precondition(_))));
    }

    #[test]
    fn log_form_on_indicator() {
        let sg = SemiSimpleSemigroup::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]], 1.0).unwrap();
        let f = ProductFunction::new(vec![2, 2], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(check_mossel_log(&sg, &f).unwrap() >= 0.0);
        let big = ProductFunction::new(vec![2, 2], vec![2.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(check_mossel_log(&sg, &big).is_err());
    }
}
