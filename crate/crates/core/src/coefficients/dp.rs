//! `Λ_n^(ℓ)` / `R_n^(ℓ)` by dynamic programming over integer partial sums.
//!
//! The run-up condition constrains draws `1..ℓ` and the drawdown condition
//! draws `ℓ+1..M`. The draws are independent, so
//!
//! ```text
//! Λ_n^(ℓ) = A(ℓ) · B_n(M - ℓ)        R_n^(ℓ) = A_n(ℓ) · B(M - ℓ)
//! ```
//!
//! where `A(ℓ)` is the probability that every suffix sum of a length-`ℓ`
//! path is positive, `B(m)` the probability that every prefix sum of a
//! length-`m` path is non-positive, and `A_n`, `B_n` the same events weighted
//! by the number of draws of trade `n`. Reversing an i.i.d. path preserves
//! its law, so `A` is computed as a prefix-sum event as well.

use num_rational::BigRational;

use super::{exact_probs, CoefficientConfig, DrawdownCoefficients, Weight};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::TradeDistribution;

/// Probability mass and weighted symbol counts of a prefix-sum event, for
/// every path length `0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentTables<T> {
    /// `mass[m]`: probability that a length-`m` path stays in the region.
    pub mass: Vec<T>,
    /// `counts[m][n]`: expected number of draws of trade `n` on such paths.
    pub counts: Vec<Vec<T>>,
}

/// Forward DP over the partial sum. `positive` selects the event "every
/// prefix sum `> 0`", otherwise "every prefix sum `<= 0`".
fn prefix_event_tables<T: Weight>(steps: &[i64], probs: &[T], m: usize, positive: bool) -> SegmentTables<T> {
    let n = steps.len();
    let reach = m as i64 * steps.iter().map(|s| s.abs()).max().unwrap_or(0);
    let width = (2 * reach + 1) as usize;
    let index = |s: i64| (s + reach) as usize;
    let allowed = |s: i64| if positive { s > 0 } else { s <= 0 };

    let mut mass = vec![T::zero(); width];
    let mut counts = vec![vec![T::zero(); n]; width];
    mass[index(0)] = T::one();

    let mut tables = SegmentTables {
        mass: vec![T::one()],
        counts: vec![vec![T::zero(); n]],
    };

    for _ in 0..m {
        let mut next_mass = vec![T::zero(); width];
        let mut next_counts = vec![vec![T::zero(); n]; width];
        for (s_idx, w) in mass.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let s = s_idx as i64 - reach;
            for (k, (&step, p)) in steps.iter().zip(probs).enumerate() {
                let t = s + step;
                if !allowed(t) {
                    continue;
                }
                let t_idx = index(t);
                let moved = w.clone() * p.clone();
                next_mass[t_idx] = next_mass[t_idx].clone() + moved.clone();
                let row = &mut next_counts[t_idx];
                for (c, src) in row.iter_mut().zip(&counts[s_idx]) {
                    if !src.is_zero() {
                        *c = c.clone() + src.clone() * p.clone();
                    }
                }
                row[k] = row[k].clone() + moved;
            }
        }
        mass = next_mass;
        counts = next_counts;

        let total = mass.iter().fold(T::zero(), |acc, w| acc + w.clone());
        let mut totals = vec![T::zero(); n];
        for row in &counts {
            for (acc, c) in totals.iter_mut().zip(row) {
                *acc = acc.clone() + c.clone();
            }
        }
        tables.mass.push(total);
        tables.counts.push(totals);
    }
    tables
}

fn integer_steps(dist: &TradeDistribution, config: &CoefficientConfig) -> Result<Vec<i64>> {
    let steps = dist.integer_trades(config.max_denominator).ok_or_else(|| {
        Error::NoIntegerScaling(format!(
            "no common denominator <= {} for trades {:?}",
            config.max_denominator,
            dist.trades()
        ))
    })?;
    if let Some(&big) = steps.iter().find(|s| s.abs() > config.dp_max_step) {
        return Err(Error::NoIntegerScaling(format!(
            "scaled trade {big} exceeds the step bound {}",
            config.dp_max_step
        )));
    }
    Ok(steps)
}

fn assemble<T: Weight>(
    steps: &[i64],
    probs: &[T],
    m: usize,
    execution: Execution,
) -> DrawdownCoefficients<T> {
    let n = steps.len();
    let mut both = execution.map_indexed(2, |which| prefix_event_tables(steps, probs, m, which == 0));
    let drawdown = both.pop().expect("two tables");
    let run_up = both.pop().expect("two tables");

    let mut out = DrawdownCoefficients::zeros(m, n);
    for ell in 0..=m {
        let rest = m - ell;
        for k in 0..n {
            if ell < m {
                out.lambda[ell][k] = run_up.mass[ell].clone() * drawdown.counts[rest][k].clone();
            }
            if ell >= 1 {
                out.run_up[ell][k] = run_up.counts[ell][k].clone() * drawdown.mass[rest].clone();
            }
        }
    }
    out
}

pub fn drawdown_coefficients_dp(
    dist: &TradeDistribution,
    m: usize,
    config: &CoefficientConfig,
) -> Result<DrawdownCoefficients<f64>> {
    let steps = integer_steps(dist, config)?;
    Ok(assemble(&steps, dist.probs(), m, config.enumeration.execution))
}

pub fn drawdown_coefficients_dp_exact(
    dist: &TradeDistribution,
    m: usize,
    config: &CoefficientConfig,
) -> Result<DrawdownCoefficients<BigRational>> {
    let steps = integer_steps(dist, config)?;
    let probs = exact_probs(dist)?;
    Ok(assemble(&steps, probs, m, config.enumeration.execution))
}

impl SegmentTables<f64> {
    /// Tables for "every prefix sum positive" (`positive = true`) or
    /// "every prefix sum non-positive".
    pub fn for_distribution(
        dist: &TradeDistribution,
        m: usize,
        positive: bool,
        config: &CoefficientConfig,
    ) -> Result<Self> {
        let steps = integer_steps(dist, config)?;
        Ok(prefix_event_tables(&steps, dist.probs(), m, positive))
    }
}
