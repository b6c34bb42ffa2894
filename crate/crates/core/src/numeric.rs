//! One-dimensional search routines: bisection for monotone inverses and
//! golden-section minimization for unimodal objectives.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{BoundsError, Result};
use crate::types::Tolerance;

/// Symmetric Dirichlet draw on `k` points via normalized Gamma variates.
pub(crate) fn dirichlet<R: Rng + ?Sized>(rng: &mut R, k: usize, concentration: f64) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("concentration is positive");
    loop {
        let draw: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
        let total: f64 = draw.iter().sum();
        if total > 0.0 && total.is_finite() {
            return draw.iter().map(|g| g / total).collect();
        }
    }
}

/// Solves `f(x) = target` for nondecreasing `f` on `[lo, hi]`.
///
/// Requires `f(lo) <= target <= f(hi)`. Stops once the bracket is no wider
/// than `abs_tol` and the residual is within `abs_tol`, or when the bracket
/// has collapsed to adjacent floating-point numbers.
pub fn bisect_increasing<F>(f: F, target: f64, mut lo: f64, mut hi: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    debug_assert!(lo <= hi);
    let (flo, fhi) = (f(lo), f(hi));
    if flo > target || fhi < target {
        return Err(BoundsError::Domain(format!(
            "target {target} not bracketed by [{flo}, {fhi}] on [{lo}, {hi}]"
        )));
    }
    if flo == target {
        return Ok(lo);
    }
    if fhi == target {
        return Ok(hi);
    }
    for _ in 0..tol.max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            return Ok(closer(&f, target, lo, hi));
        }
        let fm = f(mid);
        if fm < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol.abs_tol {
            let x = closer(&f, target, lo, hi);
            if (f(x) - target).abs() <= tol.abs_tol {
                return Ok(x);
            }
        }
    }
    Err(BoundsError::NonConvergence { iterations: tol.max_iter, best: lo + 0.5 * (hi - lo) })
}

fn closer<F: Fn(f64) -> f64>(f: &F, target: f64, lo: f64, hi: f64) -> f64 {
    if (f(lo) - target).abs() <= (f(hi) - target).abs() {
        lo
    } else {
        hi
    }
}

/// Interval `[a, c]` known to contain the minimizer of a unimodal function.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub a: f64,
    pub c: f64,
}

/// Expands geometrically from `start` until the objective turns upward.
///
/// The objective must be unimodal on `(0, inf)`. If it already increases
/// between `start` and `2 * start` the minimizer lies in `(0, 2 * start]`.
pub fn bracket_from<F>(f: &F, start: f64, max_doublings: usize) -> Result<Bracket>
where
    F: Fn(f64) -> f64,
{
    let mut prev = start;
    let mut fprev = f(prev);
    let mut cur = 2.0 * start;
    let mut fcur = f(cur);
    if fcur >= fprev {
        return Ok(Bracket { a: 0.0, c: cur });
    }
    let mut before = prev;
    for _ in 0..max_doublings {
        before = prev;
        prev = cur;
        fprev = fcur;
        cur *= 2.0;
        fcur = f(cur);
        if fcur >= fprev {
            return Ok(Bracket { a: before, c: cur });
        }
        if !cur.is_finite() {
            break;
        }
    }
    Err(BoundsError::NonConvergence { iterations: max_doublings, best: before })
}

/// Golden-section search for the minimum of a unimodal function on `[a, c]`.
///
/// Terminates when the bracket width is at most `abs_tol` relative to the
/// current abscissa. Returns `(argmin, min)`.
pub fn golden_min<F>(f: &F, bracket: Bracket, tol: Tolerance) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut c) = (bracket.a, bracket.c);
    let mut x1 = c - INV_PHI * (c - a);
    let mut x2 = a + INV_PHI * (c - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..tol.max_iter {
        let (xm, fm) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        let width = c - a;
        if width <= tol.abs_tol * xm.abs().max(f64::MIN_POSITIVE) || x1 >= x2 {
            return Ok((xm, fm));
        }
        if f1 <= f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - INV_PHI * (c - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (c - a);
            f2 = f(x2);
        }
    }
    let best = if f1 <= f2 { x1 } else { x2 };
    Err(BoundsError::NonConvergence { iterations: tol.max_iter, best })
}
