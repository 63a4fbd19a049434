//! `U_n` / `D_n` over count vectors `(x_1..x_N)` with `sum x_i = M`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{exact_probs, CoefficientConfig, TradeSteps, UpDown, Weight};
use crate::error::Result;
use crate::model::TradeDistribution;

/// Number of count vectors, `C(M + N - 1, N - 1)`, or `None` on overflow.
pub fn composition_count(n: usize, m: usize) -> Option<u128> {
    let k = n.checked_sub(1)? as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul(m as u128 + i)? / i;
    }
    Some(acc)
}

fn for_each_composition(n: usize, m: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(x: &mut Vec<usize>, slot: usize, remaining: usize, visit: &mut dyn FnMut(&[usize])) {
        if slot + 1 == x.len() {
            x[slot] = remaining;
            visit(x);
            return;
        }
        for k in 0..=remaining {
            x[slot] = k;
            rec(x, slot + 1, remaining - k, visit);
        }
    }
    let mut x = vec![0; n];
    rec(&mut x, 0, m, &mut visit);
}

fn is_up(steps: &TradeSteps, x: &[usize]) -> bool {
    match steps {
        TradeSteps::Integer(v) => v.iter().zip(x).map(|(&t, &k)| t as i128 * k as i128).sum::<i128>() > 0,
        TradeSteps::Real(v) => v.iter().zip(x).map(|(&t, &k)| t * k as f64).sum::<f64>() > 0.0,
    }
}

fn accumulate<T: Weight>(up: &mut [T], down: &mut [T], x: &[usize], term: &T, is_up: bool) {
    let side = if is_up { up } else { down };
    for (acc, &k) in side.iter_mut().zip(x) {
        if k > 0 {
            *acc = acc.clone() + term.clone() * T::from_count(k as u64);
        }
    }
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `U_n`, `D_n` in `f64`. Terms are formed directly and fall back to log
/// space when the multinomial or the probability power leaves the `f64` range.
pub fn updown_coefficients(dist: &TradeDistribution, m: usize, config: &CoefficientConfig) -> Result<UpDown<f64>> {
    let n = dist.len();
    config.enumeration.check(composition_count(n, m))?;
    let steps = TradeSteps::for_distribution(dist, config.max_denominator);
    let probs = dist.probs();
    let log_probs: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
    let mut ln_fact = vec![0.0f64; m + 1];
    for k in 1..=m {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }

    let mut up = vec![0.0; n];
    let mut down = vec![0.0; n];
    for_each_composition(n, m, |x| {
        let mut remaining = m;
        let mut term = 1.0;
        for (i, &k) in x.iter().enumerate() {
            term *= binomial_f64(remaining, k) * probs[i].powi(k as i32);
            remaining -= k;
        }
        if !term.is_finite() || term == 0.0 {
            let log_term = ln_fact[m]
                + x.iter()
                    .enumerate()
                    .map(|(i, &k)| k as f64 * log_probs[i] - ln_fact[k])
                    .sum::<f64>();
            term = log_term.exp();
        }
        accumulate(&mut up, &mut down, x, &term, is_up(&steps, x));
    });
    Ok(UpDown { up, down })
}

/// `U_n`, `D_n` in exact rational arithmetic.
pub fn updown_coefficients_exact(
    dist: &TradeDistribution,
    m: usize,
    config: &CoefficientConfig,
) -> Result<UpDown<BigRational>> {
    let n = dist.len();
    config.enumeration.check(composition_count(n, m))?;
    let probs = exact_probs(dist)?;
    let steps = TradeSteps::for_distribution(dist, config.max_denominator);
    let mut fact = vec![BigInt::one(); m + 1];
    for k in 1..=m {
        fact[k] = &fact[k - 1] * BigInt::from(k);
    }
    // powers[i][k] = p_i^k
    let powers: Vec<Vec<BigRational>> = probs
        .iter()
        .map(|p| {
            let mut row = vec![BigRational::one(); m + 1];
            for k in 1..=m {
                row[k] = &row[k - 1] * p;
            }
            row
        })
        .collect();

    let mut up = vec![BigRational::zero(); n];
    let mut down = vec![BigRational::zero(); n];
    for_each_composition(n, m, |x| {
        let denom = x.iter().fold(BigInt::one(), |acc, &k| acc * &fact[k]);
        let mut term = BigRational::from_integer(&fact[m] / denom);
        for (i, &k) in x.iter().enumerate() {
            term *= &powers[i][k];
        }
        accumulate(&mut up, &mut down, x, &term, is_up(&steps, x));
    });
    Ok(UpDown { up, down })
}

#[cfg(test)]
mod tests {
    use super::super::tests::q;
    use super::*;

    #[test]
    fn composition_counts() {
        assert_eq!(composition_count(2, 100), Some(101));
        assert_eq!(composition_count(3, 4), Some(15));
        assert_eq!(composition_count(1, 7), Some(1));
        let mut seen = 0;
        for_each_composition(3, 4, |x| {
            assert_eq!(x.iter().sum::<usize>(), 4);
            seen += 1;
        });
        assert_eq!(seen, 15);
    }

    #[test]
    fn toss_game_examples() {
        let dist = TradeDistribution::toss_game();
        let cfg = CoefficientConfig::default();
        let m3 = updown_coefficients_exact(&dist, 3, &cfg).unwrap();
        assert_eq!(m3.up, vec![q(3, 8), q(9, 8)]);
        assert_eq!(m3.down, vec![q(9, 8), q(3, 8)]);
        let m1 = updown_coefficients_exact(&dist, 1, &cfg).unwrap();
        assert_eq!(m1.up, vec![q(0, 1), q(1, 2)]);
        assert_eq!(m1.down, vec![q(1, 2), q(0, 1)]);
        let m2 = updown_coefficients_exact(&dist, 2, &cfg).unwrap();
        assert_eq!(m2.up, vec![q(1, 2), q(1, 1)]);
        assert_eq!(m2.down, vec![q(1, 2), q(0, 1)]);
        let f = updown_coefficients(&dist, 3, &cfg).unwrap();
        assert_eq!(f.up, vec![0.375, 1.125]);
    }

    #[test]
    fn sums_match_horizon_times_probability() {
        let dist = TradeDistribution::toss_game();
        let cfg = CoefficientConfig::default();
        for m in [10, 100, 400] {
            let c = updown_coefficients(&dist, m, &cfg).unwrap();
            for i in 0..2 {
                let rel = (c.up[i] + c.down[i] - 0.5 * m as f64).abs() / m as f64;
                assert!(rel < 1e-13, "M={m} n={i}: {rel}");
            }
        }
    }

    #[test]
    fn log_space_fallback_for_huge_horizons() {
        // p^x underflows for M = 2000 at p = 1/2 on the extreme count vectors
        let dist = TradeDistribution::toss_game();
        let c = updown_coefficients(&dist, 2000, &CoefficientConfig::default()).unwrap();
        assert!(((c.up[1] + c.down[1]) / 1000.0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exact_requires_rationals() {
        let dist = TradeDistribution::new(vec![-1.0, 2.0], vec![0.5, 0.5]).unwrap();
        assert!(updown_coefficients_exact(&dist, 3, &CoefficientConfig::default()).is_err());
    }
}
