//! Maximization of weighted log-wealth objectives
//! `h(f) = sum q_n log(1 + f t_n / t̂)` over `f` in `[0, 1)`.
//!
//! `h` is strictly concave, so its maximizer is the unique zero of the
//! strictly decreasing derivative `g(f) = sum q_n a_n / (1 + f a_n)` with
//! `a_n = t_n / t̂`. The solver brackets that zero by bisection and polishes
//! it with guarded Newton steps.

use crate::error::{Error, Result};
use crate::model::{Fraction, TradeDistribution};

/// Distance kept from the singular point `f = 1`.
pub const UPPER_GAP: f64 = 1e-12;

/// Default solver tolerance on the bracket width.
pub const DEFAULT_TOL: f64 = 1e-12;

/// `sum q_n log(1 + f t_n / t̂)` for a fixed set of trades.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedObjective {
    weights: Vec<f64>,
    trades: Vec<f64>,
    normalized: Vec<f64>,
}

impl WeightedObjective {
    pub fn new(dist: &TradeDistribution, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != dist.len() {
            return Err(Error::InvalidObjective(format!(
                "{} weights for {} trades",
                weights.len(),
                dist.len()
            )));
        }
        if weights.iter().any(|&q| !(q >= 0.0 && q.is_finite())) {
            return Err(Error::InvalidObjective(
                "weights must be finite and nonnegative".into(),
            ));
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidObjective("all weights are zero".into()));
        }
        Ok(Self {
            weights,
            trades: dist.trades().to_vec(),
            normalized: dist.normalized_trades(),
        })
    }

    /// The classical objective: weights are the trade probabilities.
    pub fn classical(dist: &TradeDistribution) -> Self {
        Self::new(dist, dist.probs().to_vec()).expect("probabilities are valid weights")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum q_n t_n`; the maximizer is interior iff this is positive.
    pub fn weighted_edge(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.trades)
            .map(|(q, t)| q * t)
            .sum()
    }

    pub fn value(&self, f: Fraction) -> f64 {
        self.value_unchecked(f.value())
    }

    fn value_unchecked(&self, f: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.normalized)
            .map(|(q, a)| q * (f * a).ln_1p())
            .sum()
    }

    /// The derivative `g(f) = sum q_n a_n / (1 + f a_n)`.
    pub fn derivative(&self, f: Fraction) -> f64 {
        self.derivative_unchecked(f.value())
    }

    fn derivative_unchecked(&self, f: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.normalized)
            .map(|(q, a)| q * a / (1.0 + f * a))
            .sum()
    }

    fn second_derivative(&self, f: f64) -> f64 {
        -self
            .weights
            .iter()
            .zip(&self.normalized)
            .map(|(q, a)| {
                let d = 1.0 + f * a;
                q * a * a / (d * d)
            })
            .sum::<f64>()
    }

    /// Same maximizer, weights divided by their sum.
    pub fn normalized(&self) -> Self {
        let total: f64 = self.weights.iter().sum();
        Self {
            weights: self.weights.iter().map(|q| q / total).collect(),
            ..self.clone()
        }
    }
}

/// The derivative of the objective at `f`; errors outside `[0, 1)`.
pub fn derivative_g(obj: &WeightedObjective, f: f64) -> Result<f64> {
    Ok(obj.derivative(Fraction::new(f)?))
}

/// Where the maximizer was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Unique zero of the derivative in `(0, 1)`.
    Interior,
    /// `sum q_n t_n <= 0`: the maximum sits at `f = 0`.
    Boundary,
    /// The derivative is still positive at `1 - UPPER_GAP`.
    UpperCap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalFraction {
    pub fraction: Fraction,
    pub objective_value: f64,
    pub location: Location,
}

impl OptimalFraction {
    pub fn value(&self) -> f64 {
        self.fraction.value()
    }

    pub fn is_boundary(&self) -> bool {
        self.location == Location::Boundary
    }
}

/// Solver settings. The bracket must satisfy `0 <= lower < upper < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub lower: f64,
    pub upper: f64,
    pub newton_polish: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            lower: 0.0,
            upper: 1.0 - UPPER_GAP,
            newton_polish: true,
        }
    }
}

/// Maximizes the objective with default settings and tolerance `tol`.
pub fn solve_optimal_f(obj: &WeightedObjective, tol: f64) -> Result<OptimalFraction> {
    solve_with(
        obj,
        SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}

pub fn solve_with(obj: &WeightedObjective, opts: SolverOptions) -> Result<OptimalFraction> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance {} must be positive", opts.tol)));
    }
    if !(0.0 <= opts.lower && opts.lower < opts.upper && opts.upper < 1.0) {
        return Err(Error::Domain(format!(
            "bracket [{}, {}] must lie in [0, 1)",
            opts.lower, opts.upper
        )));
    }
    let has_loss = obj
        .weights
        .iter()
        .zip(&obj.trades)
        .any(|(&q, &t)| q > 0.0 && t < 0.0);
    if !has_loss {
        return Err(Error::InvalidObjective(
            "no losing trade carries positive weight; the objective grows without bound towards f = 1"
                .into(),
        ));
    }
    if obj.weighted_edge() <= 0.0 {
        return Ok(OptimalFraction {
            fraction: Fraction::ZERO,
            objective_value: 0.0,
            location: Location::Boundary,
        });
    }

    let (mut lo, mut hi) = (opts.lower, opts.upper);
    if obj.derivative_unchecked(lo) <= 0.0 {
        // the zero lies left of the bracket; g(0) > 0 so restart from 0
        lo = 0.0;
    }
    if obj.derivative_unchecked(hi) > 0.0 {
        if hi >= 1.0 - UPPER_GAP {
            return Ok(OptimalFraction {
                fraction: Fraction(hi),
                objective_value: obj.value_unchecked(hi),
                location: Location::UpperCap,
            });
        }
        hi = 1.0 - UPPER_GAP;
        if obj.derivative_unchecked(hi) > 0.0 {
            return Ok(OptimalFraction {
                fraction: Fraction(hi),
                objective_value: obj.value_unchecked(hi),
                location: Location::UpperCap,
            });
        }
    }

    for _ in 0..200 {
        if hi - lo <= opts.tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if obj.derivative_unchecked(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut f = 0.5 * (lo + hi);

    if opts.newton_polish {
        for _ in 0..4 {
            let g = obj.derivative_unchecked(f);
            if g == 0.0 {
                break;
            }
            let step = g / obj.second_derivative(f);
            let next = f - step;
            if !(next >= lo && next <= hi) || obj.derivative_unchecked(next).abs() >= g.abs() {
                break;
            }
            f = next;
        }
    }

    Ok(OptimalFraction {
        fraction: Fraction(f),
        objective_value: obj.value_unchecked(f),
        location: Location::Interior,
    })
}

/// Classical optimal f of a distribution.
pub fn optimal_f(dist: &TradeDistribution) -> Result<OptimalFraction> {
    solve_optimal_f(&WeightedObjective::classical(dist), DEFAULT_TOL)
}

/// Closed-form Kelly fraction for a game winning `B` with probability `p`
/// and losing 1 otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KellyFraction {
    pub value: f64,
}

impl KellyFraction {
    /// False when the game has no edge (`value <= 0`).
    pub fn is_favorable(&self) -> bool {
        self.value > 0.0
    }

    /// The fraction to actually invest.
    pub fn clamped(&self) -> f64 {
        self.value.max(0.0)
    }
}

/// `p - (1 - p) / B`. Negative values are returned unclamped.
pub fn kelly_fraction(p: f64, b: f64) -> Result<KellyFraction> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("win probability {p} must lie in (0, 1)")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain(format!("payoff ratio {b} must be positive")));
    }
    Ok(KellyFraction {
        value: p - (1.0 - p) / b,
    })
}
