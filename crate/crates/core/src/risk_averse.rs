//! Drawdown-aware optimal fraction: maximize
//! `sum_n q_n log(1 + f t_n / t̂)` with `q_n = U_n + sum_ℓ Λ_n^(ℓ)`,
//! i.e. the small-`f` form of `E(U) + E(D_cur)` over `M` draws.

use crate::coefficients::{coefficient_set, CoefficientConfig, Method};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::TradeDistribution;
use crate::optimizer::{optimal_f, solve_optimal_f, OptimalFraction, WeightedObjective, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct RiskAverseResult {
    pub m: usize,
    pub weights: Vec<f64>,
    pub optimum: OptimalFraction,
    /// Classical optimal f of the same distribution.
    pub classical: OptimalFraction,
    /// Route used for the drawdown coefficients.
    pub method: Method,
}

impl RiskAverseResult {
    pub fn fraction(&self) -> f64 {
        self.optimum.value()
    }

    /// Whether the drawdown penalty lowered (or kept) the classical fraction.
    pub fn is_more_conservative(&self) -> bool {
        self.optimum.value() <= self.classical.value() + 2.0 * DEFAULT_TOL
    }
}

pub fn risk_averse_fraction(dist: &TradeDistribution, m: usize, method: Method) -> Result<RiskAverseResult> {
    risk_averse_fraction_with(dist, m, method, &CoefficientConfig::default())
}

pub fn risk_averse_fraction_with(
    dist: &TradeDistribution,
    m: usize,
    method: Method,
    config: &CoefficientConfig,
) -> Result<RiskAverseResult> {
    let set = coefficient_set(dist, m, method, config)?;
    let weights = set.risk_weights();
    let objective = WeightedObjective::new(dist, weights.clone())?;
    let optimum = solve_optimal_f(&objective, DEFAULT_TOL)?;
    Ok(RiskAverseResult {
        m,
        weights,
        optimum,
        classical: optimal_f(dist)?,
        method: set.method,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub results: Vec<RiskAverseResult>,
    /// Index into `results` of the smallest fraction (first one on ties).
    pub min_index: usize,
}

impl Sweep {
    /// The conservative fraction: the minimum over the swept horizons.
    pub fn conservative_min(&self) -> &RiskAverseResult {
        &self.results[self.min_index]
    }
}

/// Solves each horizon in `horizons`; results keep the input order.
pub fn sweep_m(
    dist: &TradeDistribution,
    horizons: &[usize],
    method: Method,
    config: &CoefficientConfig,
) -> Result<Sweep> {
    if horizons.is_empty() {
        return Err(Error::Domain("empty list of horizons".into()));
    }
    // one level of parallelism: across horizons
    let inner = CoefficientConfig {
        enumeration: crate::paths::EnumerationConfig {
            execution: Execution::Sequential,
            ..config.enumeration
        },
        ..*config
    };
    let results = config
        .enumeration
        .execution
        .map_slice(horizons, |&m| risk_averse_fraction_with(dist, m, method, &inner))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let min_index = results
        .iter()
        .enumerate()
        .fold(0, |best, (i, r)| if r.fraction() < results[best].fraction() { i } else { best });
    Ok(Sweep { results, min_index })
}

/// Reference horizons for the 2:1 toss game.
pub const TABLE_HORIZONS: [usize; 20] = [
    2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 25, 30, 40, 50, 60, 70, 80, 90, 100,
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toss_game_m3() {
        let r = risk_averse_fraction(&TradeDistribution::toss_game(), 3, Method::Enumeration).unwrap();
        assert!((r.weights[0] - 1.5).abs() < 1e-15);
        assert!((r.weights[1] - 1.25).abs() < 1e-15);
        assert!((r.fraction() - 2.0 / 11.0).abs() < 1e-12);
        assert!((r.classical.value() - 0.25).abs() < 1e-12);
        assert!(r.is_more_conservative());
    }

    #[test]
    fn toss_game_m2_closed_form() {
        // q = (5/4, 1): root of -(5/4)/(1 - f) + 2/(1 + 2f) is f = 1/6
        let r = risk_averse_fraction(&TradeDistribution::toss_game(), 2, Method::Dp).unwrap();
        assert_eq!(r.weights, vec![1.25, 1.0]);
        assert!((r.fraction() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_minimum() {
        let dist = TradeDistribution::toss_game();
        let cfg = CoefficientConfig::default();
        let s = sweep_m(&dist, &[2, 3, 4, 5], Method::Auto, &cfg).unwrap();
        assert_eq!(s.conservative_min().m, 5);
        assert!((s.conservative_min().fraction() - 0.1613).abs() < 5e-4);
        let single = sweep_m(&dist, &[3], Method::Auto, &cfg).unwrap();
        assert!((single.conservative_min().fraction() - 2.0 / 11.0).abs() < 1e-12);
        assert!(sweep_m(&dist, &[], Method::Auto, &cfg).is_err());
    }

    #[test]
    fn unprofitable_weights_give_zero() {
        let dist = TradeDistribution::uniform(vec![-1.0, 0.9]).unwrap();
        let r = risk_averse_fraction(&dist, 4, Method::Auto).unwrap();
        assert!(r.optimum.is_boundary());
        assert_eq!(r.fraction(), 0.0);
    }
}
