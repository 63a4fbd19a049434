use fracsize::coefficients::{
    coefficient_set, coefficient_set_exact, drawdown_coefficients_dp, drawdown_coefficients_dp_exact,
    drawdown_coefficients_enum, drawdown_coefficients_enum_exact, updown_coefficients,
    updown_coefficients_exact, CoefficientConfig, DrawdownCoefficients,
};
use fracsize::{exact_expectations, Fraction, Method, TradeDistribution};
use num_bigint::BigInt;
use num_rational::BigRational;

fn max_gap(a: &DrawdownCoefficients<f64>, b: &DrawdownCoefficients<f64>) -> f64 {
    let rows = a.lambda.iter().chain(&a.run_up).zip(b.lambda.iter().chain(&b.run_up));
    rows.flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

fn three_outcome() -> TradeDistribution {
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    TradeDistribution::with_rational_probs(vec![-1.0, 2.0, 3.0], vec![q(1, 2), q(1, 4), q(1, 4)]).unwrap()
}

#[test]
fn dp_matches_enumeration_for_the_toss_game() {
    let dist = TradeDistribution::toss_game();
    let cfg = CoefficientConfig::default();
    for m in 1..=14 {
        let dp = drawdown_coefficients_dp(&dist, m, &cfg).unwrap();
        let en = drawdown_coefficients_enum(&dist, m, &cfg).unwrap();
        assert!(max_gap(&dp, &en) < 1e-12, "M={m}");
    }
}

#[test]
fn dp_matches_enumeration_exactly_for_three_outcomes() {
    let dist = three_outcome();
    let cfg = CoefficientConfig::default();
    for m in 1..=8 {
        let dp = drawdown_coefficients_dp_exact(&dist, m, &cfg).unwrap();
        let en = drawdown_coefficients_enum_exact(&dist, m, &cfg).unwrap();
        assert_eq!(dp, en, "M={m}");
    }
}

#[test]
fn updown_float_and_exact_routes_agree() {
    let dist = three_outcome();
    let cfg = CoefficientConfig::default();
    for m in [1, 4, 9, 17] {
        let exact = updown_coefficients_exact(&dist, m, &cfg).unwrap().to_f64();
        let float = updown_coefficients(&dist, m, &cfg).unwrap();
        for (a, b) in exact.up.iter().chain(&exact.down).zip(float.up.iter().chain(&float.down)) {
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "M={m}");
        }
    }
}

#[test]
fn real_valued_trades_use_enumeration() {
    let dist = TradeDistribution::new(vec![-1.0, std::f64::consts::E], vec![0.6, 0.4]).unwrap();
    let cfg = CoefficientConfig::default();
    assert!(drawdown_coefficients_dp(&dist, 5, &cfg).unwrap_err().is_method_error());
    let set = coefficient_set(&dist, 5, Method::Auto, &cfg).unwrap();
    assert_eq!(set.method, Method::Enumeration);
    let total: f64 = set.sum_lambda().iter().chain(set.sum_run_up().iter()).sum();
    assert!((total - 5.0).abs() < 1e-12);
}

#[test]
fn coefficients_linearize_the_expectations() {
    let dist = three_outcome();
    let cfg = CoefficientConfig::default();
    let f = Fraction::new(1e-3).unwrap();
    for m in 1..=9 {
        let set = coefficient_set_exact(&dist, m, Method::Dp, &cfg).unwrap().to_f64();
        let e = exact_expectations(&dist, f, m).unwrap();
        let lin = |w: &[f64]| -> f64 {
            w.iter()
                .zip(dist.normalized_trades())
                .map(|(w, a)| w * (f.value() * a).ln_1p())
                .sum()
        };
        assert!((lin(&set.updown.up) - e.e_u).abs() < 1e-12, "M={m}");
        assert!((lin(&set.sum_lambda()) - e.e_dcur).abs() < 1e-12, "M={m}");
    }
}

#[test]
fn expected_log_twr_is_linear_in_the_horizon() {
    let dist = three_outcome();
    for m in 1..=12 {
        for f in [0.05, 0.3, 0.6, 0.95] {
            let f = Fraction::new(f).unwrap();
            let e = exact_expectations(&dist, f, m).unwrap();
            assert!((e.e_z - m as f64 * dist.log_gamma(f)).abs() < 1e-10, "M={m}");
        }
    }
}
