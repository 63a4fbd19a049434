//! `Λ_n^(ℓ)` / `R_n^(ℓ)` by walking every path.
//!
//! A path is counted under the `ℓ` for which all suffix sums of
//! `t_1..t_ℓ` are positive and all prefix sums of `t_{ℓ+1}..t_M` are
//! non-positive. That `ℓ` is the first index attaining the maximum of the
//! partial sums `S_0 = 0, S_1, .., S_M`, so every path has exactly one.

use num_rational::BigRational;

use super::{exact_probs, CoefficientConfig, DrawdownCoefficients, TradeSteps, Weight};
use crate::error::Result;
use crate::model::TradeDistribution;
use crate::paths::{fold_paths, path_count};

fn first_argmax<S>(steps: &[S], path: &[usize]) -> usize
where
    S: Copy + PartialOrd + std::ops::Add<Output = S> + Default,
{
    let mut cum = S::default();
    let mut best = S::default();
    let mut ell = 0;
    for (j, &i) in path.iter().enumerate() {
        cum = cum + steps[i];
        if cum > best {
            best = cum;
            ell = j + 1;
        }
    }
    ell
}

/// The `ℓ` under which a path (0-based trade indices) is counted.
pub fn classify_path(steps: &TradeSteps, path: &[usize]) -> usize {
    match steps {
        TradeSteps::Integer(v) => first_argmax(v, path),
        TradeSteps::Real(v) => first_argmax(v, path),
    }
}

fn enumerate<T: Weight>(
    dist: &TradeDistribution,
    probs: &[T],
    m: usize,
    config: &CoefficientConfig,
) -> Result<DrawdownCoefficients<T>> {
    let n = dist.len();
    config.enumeration.check(path_count(n, m))?;
    let steps = TradeSteps::for_distribution(dist, config.max_denominator);
    let counts_as_weight: Vec<T> = (0..=m as u64).map(T::from_count).collect();

    let coeffs = fold_paths(
        n,
        m,
        config.enumeration.execution,
        || DrawdownCoefficients::<T>::zeros(m, n),
        |acc, path| {
            let ell = classify_path(&steps, path);
            let p = path
                .iter()
                .fold(T::one(), |acc, &i| acc * probs[i].clone());
            let mut before = vec![0usize; n];
            let mut after = vec![0usize; n];
            for (j, &i) in path.iter().enumerate() {
                if j < ell {
                    before[i] += 1;
                } else {
                    after[i] += 1;
                }
            }
            for k in 0..n {
                if after[k] > 0 {
                    let cell = &mut acc.lambda[ell][k];
                    *cell = cell.clone() + p.clone() * counts_as_weight[after[k]].clone();
                }
                if before[k] > 0 {
                    let cell = &mut acc.run_up[ell][k];
                    *cell = cell.clone() + p.clone() * counts_as_weight[before[k]].clone();
                }
            }
        },
        |total, part| {
            for (dst, src) in total
                .lambda
                .iter_mut()
                .chain(total.run_up.iter_mut())
                .zip(part.lambda.into_iter().chain(part.run_up))
            {
                for (a, b) in dst.iter_mut().zip(src) {
                    *a = a.clone() + b;
                }
            }
        },
    );
    Ok(coeffs)
}

pub fn drawdown_coefficients_enum(
    dist: &TradeDistribution,
    m: usize,
    config: &CoefficientConfig,
) -> Result<DrawdownCoefficients<f64>> {
    enumerate(dist, dist.probs(), m, config)
}

pub fn drawdown_coefficients_enum_exact(
    dist: &TradeDistribution,
    m: usize,
    config: &CoefficientConfig,
) -> Result<DrawdownCoefficients<BigRational>> {
    let probs = exact_probs(dist)?;
    enumerate(dist, probs, m, config)
}

#[cfg(test)]
mod tests {
    use super::super::tests::q;
    use super::*;
    use crate::exec::Execution;
    use crate::model::{Fraction, Outcome};
    use crate::outcome::topping_index;
    use crate::paths::EnumerationConfig;

    /// Literal reading of the two segment conditions.
    fn satisfies_conditions(trades: &[i64], path: &[usize], ell: usize) -> bool {
        let run_up_ok = (1..=ell).all(|k| path[k - 1..ell].iter().map(|&i| trades[i]).sum::<i64>() > 0);
        let drawdown_ok =
            (ell + 1..=path.len()).all(|k| path[ell..k].iter().map(|&i| trades[i]).sum::<i64>() <= 0);
        run_up_ok && drawdown_ok
    }

    fn all_paths(n: usize, m: usize) -> Vec<Vec<usize>> {
        (0..n.pow(m as u32))
            .map(|mut code| {
                let mut p = vec![0; m];
                for slot in p.iter_mut().rev() {
                    *slot = code % n;
                    code /= n;
                }
                p
            })
            .collect()
    }

    #[test]
    fn each_path_satisfies_exactly_one_ell() {
        for (trades, m) in [(vec![-1i64, 2], 8), (vec![-1, 2, 3], 5), (vec![-2, 1, 1, 3], 4)] {
            let steps = TradeSteps::Integer(trades.clone());
            for path in all_paths(trades.len(), m) {
                let matching: Vec<usize> =
                    (0..=m).filter(|&l| satisfies_conditions(&trades, &path, l)).collect();
                assert_eq!(matching, vec![classify_path(&steps, &path)], "{path:?}");
            }
        }
    }

    #[test]
    fn toss_game_m3_per_ell_table() {
        let dist = TradeDistribution::toss_game();
        let c = drawdown_coefficients_enum_exact(&dist, 3, &CoefficientConfig::default()).unwrap();
        let z = q(0, 1);
        assert_eq!(c.run_up[3], vec![q(2, 8), q(7, 8)]);
        assert_eq!(c.lambda[3], vec![z.clone(), z.clone()]);
        assert_eq!(c.run_up[2], vec![q(1, 8), q(3, 8)]);
        assert_eq!(c.lambda[2], vec![q(2, 8), z.clone()]);
        assert_eq!(c.run_up[1], vec![z.clone(), q(1, 8)]);
        assert_eq!(c.lambda[1], vec![q(2, 8), z.clone()]);
        assert_eq!(c.run_up[0], vec![z.clone(), z.clone()]);
        assert_eq!(c.lambda[0], vec![q(5, 8), q(1, 8)]);
        assert_eq!(c.sum_lambda(), vec![q(9, 8), q(1, 8)]);
        assert_eq!(c.sum_run_up(), vec![q(3, 8), q(11, 8)]);
    }

    #[test]
    fn toss_game_m1() {
        let dist = TradeDistribution::toss_game();
        let c = drawdown_coefficients_enum_exact(&dist, 1, &CoefficientConfig::default()).unwrap();
        assert_eq!(c.sum_lambda(), vec![q(1, 2), q(0, 1)]);
        assert_eq!(c.sum_run_up(), vec![q(0, 1), q(1, 2)]);
    }

    #[test]
    fn classification_matches_topping_index_at_small_f() {
        let f = Fraction::new(1e-4).unwrap();
        for dist in [
            TradeDistribution::toss_game(),
            TradeDistribution::uniform(vec![-1.0, 2.0, 3.0]).unwrap(),
        ] {
            let steps = TradeSteps::for_distribution(&dist, 1_000_000);
            let m = if dist.len() == 2 { 10 } else { 6 };
            for path in all_paths(dist.len(), m) {
                let outcome = Outcome::new(&dist, path.clone()).unwrap();
                assert_eq!(classify_path(&steps, &path), topping_index(&dist, f, &outcome));
            }
        }
    }

    #[test]
    fn real_steps_fallback_classifies_like_integers() {
        let steps_i = TradeSteps::Integer(vec![-2, 1, 3]);
        let steps_r = TradeSteps::Real(vec![-2.0, 1.0, 3.0]);
        for path in all_paths(3, 5) {
            assert_eq!(classify_path(&steps_i, &path), classify_path(&steps_r, &path));
        }
    }

    #[test]
    fn independent_of_execution_mode() {
        let dist = TradeDistribution::new(vec![-1.0, 2.0, 3.0], vec![0.5, 0.3, 0.2]).unwrap();
        let mk = |execution| CoefficientConfig {
            enumeration: EnumerationConfig { execution, ..Default::default() },
            ..Default::default()
        };
        let a = drawdown_coefficients_enum(&dist, 9, &mk(Execution::Sequential)).unwrap();
        let b = drawdown_coefficients_enum(&dist, 9, &mk(Execution::Parallel)).unwrap();
        assert_eq!(a, b);
    }
}
