use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use relay_bounds::gaussian_relay::*;
use relay_bounds::scalar_bounds::gauss_gap_closed;
use relay_bounds::{EntropyRate, GaussianRelayParams, Tolerance};

fn rate(x: f64) -> EntropyRate {
    EntropyRate::new(x).unwrap()
}

fn params(snr: f64, c0: f64) -> GaussianRelayParams {
    GaussianRelayParams::from_snr(snr, rate(c0)).unwrap()
}

#[test]
fn lemma2_bound_at_parametric_relay_rates() {
    // C₀ = c(r) leaves a relay gain of exactly c(r) − r
    let snr: f64 = 0.5;
    for r in [1e-4, 0.003, 0.02, 0.1] {
        let c0 = gauss_gap_closed(rate(r)).unwrap().nats();
        let got = capacity_ub_lemma2(&params(snr, c0), Tolerance::default()).unwrap().nats();
        let expected = (0.5 * (2.0 * snr).ln_1p()).min(0.5 * snr.ln_1p() + c0 - r);
        assert_abs_diff_eq!(got, expected, epsilon = 1e-9);
    }
}

#[test]
fn power_and_noise_enter_only_through_their_ratio() {
    let a = report(&params(2.0, 0.3), Tolerance::default()).unwrap();
    let scaled = GaussianRelayParams::new(6.0, 3.0, rate(0.3)).unwrap();
    let b = report(&scaled, Tolerance::default()).unwrap();
    assert_abs_diff_eq!(a.cutset.nats(), b.cutset.nats(), epsilon = 1e-15);
    assert_abs_diff_eq!(a.lemma2_bound.nats(), b.lemma2_bound.nats(), epsilon = 1e-15);
}

#[test]
fn large_relay_rate_saturates_at_broadcast_cut() {
    for c0 in [1e3, 1e9, 1e16] {
        let p = params(0.5, c0);
        let cut = 0.5 * 2f64.ln();
        assert_eq!(cutset_bound(&p).nats(), cut);
        assert_abs_diff_eq!(capacity_ub_lemma2(&p, Tolerance::default()).unwrap().nats(), cut, epsilon = 1e-15);
        assert_abs_diff_eq!(capacity_ub_relaxed(&p).unwrap().nats(), cut, epsilon = 1e-15);
        assert_abs_diff_eq!(capacity_ub_lemma3(&p).nats(), cut, epsilon = 1e-15);
    }
}

#[test]
fn zero_relay_rate_leaves_the_direct_link() {
    let p = params(3.0, 0.0);
    let direct = 0.5 * 4f64.ln();
    let r = report(&p, Tolerance::default()).unwrap();
    for b in [r.cutset, r.lemma2_bound, r.lemma3_bound, r.relaxed_baseline, r.best] {
        assert_abs_diff_eq!(b.nats(), direct, epsilon = 1e-15);
    }
}

#[test]
fn fig2_table_has_requested_shape() {
    let t = emit_fig2_curves(0.5, rate(0.27), 64, Tolerance::default()).unwrap();
    assert_eq!(t.len(), 64);
    for name in FIG2_COLUMNS {
        assert_eq!(t.column(name).unwrap().len(), 64);
    }
    let c0 = t.column("c0").unwrap();
    assert!(c0.windows(2).all(|w| w[0] < w[1]));
}

proptest! {
    #[test]
    fn bounds_are_ordered(snr in 1e-3f64..100.0, c0 in 0.0f64..5.0) {
        let p = params(snr, c0);
        let r = report(&p, Tolerance::default()).unwrap();
        let slack = 1e-12;
        prop_assert!(r.lemma2_bound.nats() <= r.relaxed_baseline.nats() + slack);
        prop_assert!(r.relaxed_baseline.nats() <= r.cutset.nats() + slack);
        prop_assert!(r.lemma3_bound.nats() <= r.cutset.nats() + slack);
        prop_assert!(r.cutset.nats() <= p.broadcast_cut() + slack);
        prop_assert!(r.lemma2_bound.nats() >= p.direct_link() - slack);
        prop_assert!(r.best.nats() <= r.lemma2_bound.nats().min(r.lemma3_bound.nats()));
        prop_assert!(capacity_ub_lemma3(&p).nats() <= capacity_ub_lemma3_unclipped(&p).nats());
    }

    #[test]
    fn bounds_grow_with_relay_rate(snr in 1e-2f64..20.0, c0 in 0.0f64..2.0, dc in 1e-3f64..1.0) {
        let tol = Tolerance::default();
        let (a, b) = (params(snr, c0), params(snr, c0 + dc));
        prop_assert!(capacity_ub_lemma2(&a, tol).unwrap().nats() <= capacity_ub_lemma2(&b, tol).unwrap().nats() + 1e-9);
        prop_assert!(capacity_ub_lemma3(&a).nats() <= capacity_ub_lemma3(&b).nats());
        prop_assert!(cutset_bound(&a).nats() <= cutset_bound(&b).nats());
    }
}
