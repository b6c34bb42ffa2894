use proptest::prelude::*;
use relay_bounds::rhc_verify::ou::ou_apply;
use relay_bounds::rhc_verify::semigroup::*;
use relay_bounds::{ProductFunction, QuadratureRule, SemiSimpleSemigroup};

fn prob_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, len).prop_map(|v| {
        let t: f64 = v.iter().sum();
        v.iter().map(|x| x / t).collect()
    })
}

/// Product measure factors together with a positive function on the grid.
fn measure_and_function() -> impl Strategy<Value = (Vec<Vec<f64>>, ProductFunction)> {
    prop::collection::vec(2usize..=4, 1..=3).prop_flat_map(|shape| {
        let size: usize = shape.iter().product();
        let factors: Vec<_> = shape.iter().map(|&n| prob_vec(n)).collect();
        (factors, prop::collection::vec(0.01f64..5.0, size))
            .prop_map(move |(f, values)| (f, ProductFunction::new(shape.clone(), values).unwrap()))
    })
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs()))
}

proptest! {
    #[test]
    fn semigroup_law((factors, f) in measure_and_function(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let ts = SemiSimpleSemigroup::new(factors.clone(), s).unwrap();
        let tt = ts.at_time(t).unwrap();
        let tst = ts.at_time(s + t).unwrap();
        let twice = apply_semisimple(&ts, &apply_semisimple(&tt, &f).unwrap()).unwrap();
        let once = apply_semisimple(&tst, &f).unwrap();
        prop_assert!(close(twice.values(), once.values(), 1e-12));
    }

    #[test]
    fn constants_are_fixed((factors, f) in measure_and_function(), t in 0.0f64..5.0, c in 0.1f64..10.0) {
        let sg = SemiSimpleSemigroup::new(factors, t).unwrap();
        let one = ProductFunction::constant(f.shape().to_vec(), c).unwrap();
        let out = apply_semisimple(&sg, &one).unwrap();
        prop_assert!(out.values().iter().all(|v| (v - c).abs() <= 1e-13 * c));
    }

    #[test]
    fn measure_is_stationary((factors, f) in measure_and_function(), t in 0.0f64..5.0) {
        let sg = SemiSimpleSemigroup::new(factors, t).unwrap();
        let before = lp_norm(&f, sg.measure(), 1.0).unwrap();
        let after = lp_norm(&apply_semisimple(&sg, &f).unwrap(), sg.measure(), 1.0).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * before);
    }

    #[test]
    fn time_zero_is_identity_and_infinity_averages((factors, f) in measure_and_function()) {
        let sg = SemiSimpleSemigroup::new(factors, 0.0).unwrap();
        prop_assert!(close(apply_semisimple(&sg, &f).unwrap().values(), f.values(), 0.0));
        let avg = sg.at_time(f64::INFINITY).unwrap();
        let mean = lp_norm(&f, sg.measure(), 1.0).unwrap();
        let out = apply_semisimple(&avg, &f).unwrap();
        prop_assert!(out.values().iter().all(|v| (v - mean).abs() <= 1e-12 * mean));
    }

    #[test]
    fn norms_are_monotone_in_the_index((factors, f) in measure_and_function(), p in -3.0f64..1.0, dp in 0.01f64..1.0) {
        let sg = SemiSimpleSemigroup::new(factors, 1.0).unwrap();
        let lo = lp_norm(&f, sg.measure(), p).unwrap();
        let hi = lp_norm(&f, sg.measure(), (p + dp).min(1.0)).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn reverse_hypercontractivity_holds_past_the_critical_time(
        (factors, f) in measure_and_function(),
        p in -2.0f64..0.95,
        gap in 0.0f64..3.0,
        extra in 0.0f64..1.0,
    ) {
        let q = p - gap;
        let t = ((1.0 - q) / (1.0 - p)).ln() * (1.0 + extra);
        let sg = SemiSimpleSemigroup::new(factors, t).unwrap();
        prop_assert!(check_mossel(&sg, &f, p, q).unwrap() >= -1e-12);
    }

    #[test]
    fn ou_semigroup_law(x in -2.0f64..2.0, y in -2.0f64..2.0, s in 0.05f64..1.5, t in 0.05f64..1.5) {
        let rule = QuadratureRule::gauss_hermite(48).unwrap();
        let f = |u: f64| (0.7 * u).sin() + 0.1 * u * u;
        let inner = |z: f64| ou_apply(f, x, z, t, &rule).unwrap();
        let twice = ou_apply(inner, x, y, s, &rule).unwrap();
        let once = ou_apply(f, x, y, s + t, &rule).unwrap();
        prop_assert!((twice - once).abs() <= 1e-10);
        prop_assert!((ou_apply(|_| 2.5, x, y, t, &rule).unwrap() - 2.5).abs() <= 1e-13);
    }
}
