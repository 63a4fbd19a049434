//! Fraction-independent coefficients that linearize the expected log series
//! for small `f`:
//!
//! * `U_n`, `D_n`: expected count of trade `n` on paths whose trade sum is
//!   positive (resp. non-positive), so that `E(U) ≈ sum U_n log(1 + f a_n)`.
//! * `Λ_n^(ℓ)`, `R_n^(ℓ)`: expected count of trade `n` after (resp. up to)
//!   the first maximum `ℓ` of the path's partial trade sums, linearizing the
//!   current drawdown and the run-up.
//!
//! Every routine is generic over [`Weight`], so the same code runs in `f64`
//! and in exact rational arithmetic.

mod dp;
mod enumerate;
mod updown;

use std::fmt::Debug;
use std::ops::{Add, Mul};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{Fraction, TradeDistribution, MAX_SCALING_DENOMINATOR};
use crate::paths::{path_count, EnumerationConfig};

pub use dp::{drawdown_coefficients_dp, drawdown_coefficients_dp_exact, SegmentTables};
pub use enumerate::{
    classify_path, drawdown_coefficients_enum, drawdown_coefficients_enum_exact,
};
pub use updown::{composition_count, updown_coefficients, updown_coefficients_exact};

/// Scalar used by the coefficient routines.
pub trait Weight:
    Clone + Debug + PartialEq + Send + Sync + Zero + One + Add<Output = Self> + Mul<Output = Self>
{
    fn from_count(k: u64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Weight for f64 {
    fn from_count(k: u64) -> Self {
        k as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Weight for BigRational {
    fn from_count(k: u64) -> Self {
        BigRational::from_integer(k.into())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// How the drawdown coefficients are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Exhaustive walk over all `N^M` paths.
    Enumeration,
    /// Segment-factorized dynamic program over integer partial sums.
    Dp,
    /// Enumeration when `N^M` is within the cap, otherwise DP.
    #[default]
    Auto,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumeration" | "enum" => Ok(Method::Enumeration),
            "dp" => Ok(Method::Dp),
            "auto" => Ok(Method::Auto),
            other => Err(Error::Parse(format!(
                "unknown method '{other}' (expected enumeration, dp or auto)"
            ))),
        }
    }
}

/// Limits for the coefficient routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoefficientConfig {
    pub enumeration: EnumerationConfig,
    /// Largest `|s t_n|` accepted by the DP after integer scaling.
    pub dp_max_step: i64,
    /// Largest common denominator tried when scaling trades to integers.
    pub max_denominator: u64,
}

impl Default for CoefficientConfig {
    fn default() -> Self {
        Self {
            enumeration: EnumerationConfig::default(),
            dp_max_step: 64,
            max_denominator: MAX_SCALING_DENOMINATOR,
        }
    }
}

/// Partial-sum steps used to evaluate the sign conditions. Integer steps make
/// the strict and non-strict comparisons exact.
#[derive(Debug, Clone, PartialEq)]
pub enum TradeSteps {
    Integer(Vec<i64>),
    Real(Vec<f64>),
}

impl TradeSteps {
    pub fn for_distribution(dist: &TradeDistribution, max_denominator: u64) -> Self {
        match dist.integer_trades(max_denominator) {
            Some(v) => TradeSteps::Integer(v),
            None => TradeSteps::Real(dist.trades().to_vec()),
        }
    }
}

/// `U_n` and `D_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpDown<T> {
    pub up: Vec<T>,
    pub down: Vec<T>,
}

/// `Λ_n^(ℓ)` and `R_n^(ℓ)`, indexed `[ℓ][n]` with `ℓ` in `0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawdownCoefficients<T> {
    pub lambda: Vec<Vec<T>>,
    pub run_up: Vec<Vec<T>>,
}

fn column_sums<T: Weight>(rows: &[Vec<T>], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    for row in rows {
        for (acc, v) in out.iter_mut().zip(row) {
            *acc = acc.clone() + v.clone();
        }
    }
    out
}

impl<T: Weight> DrawdownCoefficients<T> {
    pub(crate) fn zeros(m: usize, n: usize) -> Self {
        Self {
            lambda: vec![vec![T::zero(); n]; m + 1],
            run_up: vec![vec![T::zero(); n]; m + 1],
        }
    }

    pub fn horizon(&self) -> usize {
        self.lambda.len() - 1
    }

    /// `sum_ℓ Λ_n^(ℓ)`.
    pub fn sum_lambda(&self) -> Vec<T> {
        column_sums(&self.lambda, self.lambda[0].len())
    }

    /// `sum_ℓ R_n^(ℓ)`.
    pub fn sum_run_up(&self) -> Vec<T> {
        column_sums(&self.run_up, self.run_up[0].len())
    }

    pub fn to_f64(&self) -> DrawdownCoefficients<f64> {
        let conv = |rows: &Vec<Vec<T>>| rows.iter().map(|r| r.iter().map(T::to_f64).collect()).collect();
        DrawdownCoefficients {
            lambda: conv(&self.lambda),
            run_up: conv(&self.run_up),
        }
    }
}

impl<T: Weight> UpDown<T> {
    pub fn to_f64(&self) -> UpDown<f64> {
        UpDown {
            up: self.up.iter().map(T::to_f64).collect(),
            down: self.down.iter().map(T::to_f64).collect(),
        }
    }
}

/// All coefficients for one horizon `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet<T = f64> {
    pub m: usize,
    pub updown: UpDown<T>,
    pub drawdown: DrawdownCoefficients<T>,
    /// Route used for the drawdown coefficients.
    pub method: Method,
}

impl<T: Weight> CoefficientSet<T> {
    pub fn n(&self) -> usize {
        self.updown.up.len()
    }

    pub fn sum_lambda(&self) -> Vec<T> {
        self.drawdown.sum_lambda()
    }

    pub fn sum_run_up(&self) -> Vec<T> {
        self.drawdown.sum_run_up()
    }

    /// `q_n = U_n + sum_ℓ Λ_n^(ℓ)`: the weights of the drawdown-aware objective.
    pub fn risk_weights(&self) -> Vec<T> {
        self.updown
            .up
            .iter()
            .zip(self.sum_lambda())
            .map(|(u, l)| u.clone() + l)
            .collect()
    }

    pub fn to_f64(&self) -> CoefficientSet<f64> {
        CoefficientSet {
            m: self.m,
            updown: self.updown.to_f64(),
            drawdown: self.drawdown.to_f64(),
            method: self.method,
        }
    }
}

/// Resolves `Auto` for a given distribution and horizon.
pub fn resolve_method(dist: &TradeDistribution, m: usize, method: Method, config: &CoefficientConfig) -> Method {
    match method {
        Method::Auto => match path_count(dist.len(), m) {
            Some(k) if k <= config.enumeration.cap as u128 => Method::Enumeration,
            _ => Method::Dp,
        },
        other => other,
    }
}

pub fn drawdown_coefficients(
    dist: &TradeDistribution,
    m: usize,
    method: Method,
    config: &CoefficientConfig,
) -> Result<(DrawdownCoefficients<f64>, Method)> {
    match resolve_method(dist, m, method, config) {
        Method::Dp => Ok((drawdown_coefficients_dp(dist, m, config)?, Method::Dp)),
        _ => Ok((
            drawdown_coefficients_enum(dist, m, config)?,
            Method::Enumeration,
        )),
    }
}

/// Computes the full coefficient set in `f64`.
pub fn coefficient_set(
    dist: &TradeDistribution,
    m: usize,
    method: Method,
    config: &CoefficientConfig,
) -> Result<CoefficientSet<f64>> {
    if m == 0 {
        return Err(Error::Domain("horizon M must be at least 1".into()));
    }
    let updown = updown_coefficients(dist, m, config)?;
    let (drawdown, method) = drawdown_coefficients(dist, m, method, config)?;
    Ok(CoefficientSet {
        m,
        updown,
        drawdown,
        method,
    })
}

/// Computes the full coefficient set in exact rational arithmetic. Requires
/// rational probabilities.
pub fn coefficient_set_exact(
    dist: &TradeDistribution,
    m: usize,
    method: Method,
    config: &CoefficientConfig,
) -> Result<CoefficientSet<BigRational>> {
    if m == 0 {
        return Err(Error::Domain("horizon M must be at least 1".into()));
    }
    let updown = updown_coefficients_exact(dist, m, config)?;
    let (drawdown, method) = match resolve_method(dist, m, method, config) {
        Method::Dp => (drawdown_coefficients_dp_exact(dist, m, config)?, Method::Dp),
        _ => (
            drawdown_coefficients_enum_exact(dist, m, config)?,
            Method::Enumeration,
        ),
    };
    Ok(CoefficientSet {
        m,
        updown,
        drawdown,
        method,
    })
}

pub(crate) fn exact_probs(dist: &TradeDistribution) -> Result<&[BigRational]> {
    dist.exact_probs().ok_or_else(|| {
        Error::Domain("exact arithmetic needs rational probabilities".into())
    })
}

/// The four linear combinations `sum_n c_n log(1 + f a_n)` for
/// `c = U, D, sum Λ, sum R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallFExpectation {
    pub u: f64,
    pub d: f64,
    pub d_cur: f64,
    pub r: f64,
}

pub fn smallf_expectation(
    coeffs: &CoefficientSet<f64>,
    dist: &TradeDistribution,
    f: Fraction,
) -> SmallFExpectation {
    let logs = dist.log_hprs(f);
    let dot = |c: &[f64]| c.iter().zip(&logs).map(|(c, l)| c * l).sum::<f64>();
    SmallFExpectation {
        u: dot(&coeffs.updown.up),
        d: dot(&coeffs.updown.down),
        d_cur: dot(&coeffs.sum_lambda()),
        r: dot(&coeffs.sum_run_up()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    pub(crate) fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn method_parsing() {
        assert_eq!("dp".parse::<Method>().unwrap(), Method::Dp);
        assert_eq!("enumeration".parse::<Method>().unwrap(), Method::Enumeration);
        assert!("magic".parse::<Method>().is_err());
    }

    #[test]
    fn toss_game_m3_full_set() {
        let dist = TradeDistribution::toss_game();
        let set = coefficient_set_exact(&dist, 3, Method::Enumeration, &CoefficientConfig::default()).unwrap();
        assert_eq!(set.updown.up, vec![q(3, 8), q(9, 8)]);
        assert_eq!(set.updown.down, vec![q(9, 8), q(3, 8)]);
        assert_eq!(set.sum_lambda(), vec![q(9, 8), q(1, 8)]);
        assert_eq!(set.sum_run_up(), vec![q(3, 8), q(11, 8)]);
        assert_eq!(set.risk_weights(), vec![q(12, 8), q(10, 8)]);
    }

    #[test]
    fn smallf_examples() {
        let dist = TradeDistribution::toss_game();
        let set = coefficient_set(&dist, 3, Method::Auto, &CoefficientConfig::default()).unwrap();
        let zero = smallf_expectation(&set, &dist, Fraction::ZERO);
        assert_eq!(zero, SmallFExpectation { u: 0.0, d: 0.0, d_cur: 0.0, r: 0.0 });
        for f in [0.01, 0.2, 0.7] {
            let e = smallf_expectation(&set, &dist, Fraction::new(f).unwrap());
            let (l1, l2) = ((1.0 - f).ln(), (1.0 + 2.0 * f).ln());
            assert!((e.d_cur - (9.0 / 8.0 * l1 + 1.0 / 8.0 * l2)).abs() < 1e-14);
            assert!((e.r - (3.0 / 8.0 * l1 + 11.0 / 8.0 * l2)).abs() < 1e-14);
            let mlg = 3.0 * dist.log_gamma(Fraction::new(f).unwrap());
            assert!((e.u + e.d - mlg).abs() < 1e-14);
            assert!((e.d_cur + e.r - mlg).abs() < 1e-14);
        }
    }

    #[test]
    fn auto_method_switches_on_cap() {
        let dist = TradeDistribution::toss_game();
        let mut cfg = CoefficientConfig::default();
        cfg.enumeration.cap = 1 << 10;
        assert_eq!(resolve_method(&dist, 10, Method::Auto, &cfg), Method::Enumeration);
        assert_eq!(resolve_method(&dist, 11, Method::Auto, &cfg), Method::Dp);
        let set = coefficient_set(&dist, 11, Method::Auto, &cfg).unwrap();
        assert_eq!(set.method, Method::Dp);
    }

    #[test]
    fn zero_horizon_is_rejected() {
        let dist = TradeDistribution::toss_game();
        assert!(coefficient_set(&dist, 0, Method::Auto, &CoefficientConfig::default()).is_err());
    }
}
