//! Trade distributions, investment fractions and draw sequences.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Tolerance on the probability sum for real-valued probabilities.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Largest denominator tried when looking for an integer scaling of the trades.
pub const MAX_SCALING_DENOMINATOR: u64 = 1_000_000;

/// A discrete trading system: trade results `t_n` drawn with probabilities `p_n`.
///
/// Probabilities are always available as `f64`. When they were supplied as
/// exact rationals that sum to exactly one, the rationals are kept too and the
/// coefficient routines can run in exact arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeDistribution {
    trades: Vec<f64>,
    probs: Vec<f64>,
    exact_probs: Option<Vec<BigRational>>,
    max_loss: f64,
}

impl TradeDistribution {
    /// Builds a distribution from real probabilities.
    pub fn new(trades: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        Self::validate_trades(&trades, probs.len())?;
        for (i, &p) in probs.iter().enumerate() {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidDistribution(format!(
                    "probability #{} is {p}, must be positive",
                    i + 1
                )));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let max_loss = max_loss(&trades);
        Ok(Self {
            trades,
            probs,
            exact_probs: None,
            max_loss,
        })
    }

    /// Builds a distribution from exact rational probabilities summing to one.
    pub fn with_rational_probs(trades: Vec<f64>, probs: Vec<BigRational>) -> Result<Self> {
        Self::validate_trades(&trades, probs.len())?;
        if let Some(i) = probs.iter().position(|p| !p.is_positive()) {
            return Err(Error::InvalidDistribution(format!(
                "probability #{} is {}, must be positive",
                i + 1,
                probs[i]
            )));
        }
        let total = probs.iter().fold(BigRational::zero(), |acc, p| acc + p);
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let real = probs.iter().map(rational_to_f64).collect();
        let max_loss = max_loss(&trades);
        Ok(Self {
            trades,
            probs: real,
            exact_probs: Some(probs),
            max_loss,
        })
    }

    /// Builds a distribution from observed frequencies; counts are normalized
    /// to exact rational probabilities.
    pub fn from_counts(trades: Vec<f64>, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidDistribution("all counts are zero".into()));
        }
        let probs = counts
            .iter()
            .map(|&c| BigRational::new(BigInt::from(c), BigInt::from(total)))
            .collect();
        Self::with_rational_probs(trades, probs)
    }

    /// Every trade occurs with probability `1/N`.
    pub fn uniform(trades: Vec<f64>) -> Result<Self> {
        let counts = vec![1; trades.len()];
        Self::from_counts(trades, &counts)
    }

    /// The 2:1 toss game: lose 1 or win 2 with equal probability.
    pub fn toss_game() -> Self {
        Self::uniform(vec![-1.0, 2.0]).expect("toss game is valid")
    }

    fn validate_trades(trades: &[f64], n_probs: usize) -> Result<()> {
        if trades.is_empty() {
            return Err(Error::InvalidDistribution("no trades given".into()));
        }
        if trades.len() != n_probs {
            return Err(Error::InvalidDistribution(format!(
                "{} trades but {} probabilities",
                trades.len(),
                n_probs
            )));
        }
        if let Some(i) = trades.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "trade #{} is not finite",
                i + 1
            )));
        }
        if let Some(i) = trades.iter().position(|&t| t == 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "trade #{} is zero; trade results must be nonzero",
                i + 1
            )));
        }
        if !trades.iter().any(|&t| t < 0.0) {
            return Err(Error::InvalidDistribution(
                "at least one losing trade is required".into(),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.trades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trades.is_empty()
    }

    pub fn trades(&self) -> &[f64] {
        &self.trades
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn exact_probs(&self) -> Option<&[BigRational]> {
        self.exact_probs.as_deref()
    }

    /// The maximal loss `max{|t_n| : t_n < 0}`.
    pub fn max_loss(&self) -> f64 {
        self.max_loss
    }

    /// Trades divided by the maximal loss; all are `>= -1`.
    pub fn normalized_trades(&self) -> Vec<f64> {
        self.trades.iter().map(|t| t / self.max_loss).collect()
    }

    /// `sum p_n t_n`.
    pub fn expectation(&self) -> f64 {
        self.trades
            .iter()
            .zip(&self.probs)
            .map(|(t, p)| t * p)
            .sum()
    }

    /// Holding-period return `1 + f t_n / t̂` of trade `n`.
    pub fn hpr(&self, n: usize, f: Fraction) -> f64 {
        1.0 + f.value() * self.trades[n] / self.max_loss
    }

    /// `log(1 + f t_n / t̂)` for every trade.
    pub fn log_hprs(&self, f: Fraction) -> Vec<f64> {
        self.trades
            .iter()
            .map(|t| (f.value() * t / self.max_loss).ln_1p())
            .collect()
    }

    /// The log of the weighted geometric mean of the holding-period returns,
    /// `sum p_n log(1 + f t_n / t̂)`: the expected log growth per draw.
    pub fn log_gamma(&self, f: Fraction) -> f64 {
        self.log_hprs(f)
            .iter()
            .zip(&self.probs)
            .map(|(l, p)| p * l)
            .sum()
    }

    /// Integer trades with the same sign pattern on every partial sum, if the
    /// trades are rational with a common denominator `<= max_denominator`.
    ///
    /// The result is reduced by the gcd of its entries, so `(-1, 2)` and
    /// `(-0.5, 1)` both map to `[-1, 2]`.
    pub fn integer_trades(&self, max_denominator: u64) -> Option<Vec<i64>> {
        integer_scaling(&self.trades, max_denominator)
    }
}

fn max_loss(trades: &[f64]) -> f64 {
    trades
        .iter()
        .filter(|&&t| t < 0.0)
        .map(|t| t.abs())
        .fold(0.0, f64::max)
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn smallest_denominator(x: f64, max_denominator: u64) -> Option<u64> {
    (1..=max_denominator).find(|&d| {
        let scaled = x * d as f64;
        (scaled - scaled.round()).abs() <= 1e-9 * scaled.abs().max(1.0)
    })
}

/// See [`TradeDistribution::integer_trades`].
pub fn integer_scaling(trades: &[f64], max_denominator: u64) -> Option<Vec<i64>> {
    let mut common: u64 = 1;
    for &t in trades {
        let d = smallest_denominator(t, max_denominator)?;
        common = common / gcd(common, d) * d;
        if common > max_denominator {
            return None;
        }
    }
    let scaled: Vec<i64> = trades
        .iter()
        .map(|t| (t * common as f64).round() as i64)
        .collect();
    let g = scaled
        .iter()
        .fold(0u64, |acc, v| gcd(acc, v.unsigned_abs()));
    if g == 0 || scaled.iter().any(|v| v.unsigned_abs() > 1 << 40) {
        return None;
    }
    Some(scaled.iter().map(|v| v / g as i64).collect())
}

/// An investment fraction `f` in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fraction(pub(crate) f64);

impl Fraction {
    pub const ZERO: Fraction = Fraction(0.0);

    pub fn new(f: f64) -> Result<Self> {
        if (0.0..1.0).contains(&f) {
            Ok(Fraction(f))
        } else {
            Err(Error::FractionDomain(f))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Fraction {
    type Error = Error;

    fn try_from(f: f64) -> Result<Self> {
        Fraction::new(f)
    }
}

/// A draw sequence `ω` of trade indices (0-based) with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    indices: Vec<usize>,
    probability: f64,
}

impl Outcome {
    pub fn new(dist: &TradeDistribution, indices: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= dist.len()) {
            return Err(Error::IndexOutOfRange(format!(
                "trade index {bad} with only {} trades",
                dist.len()
            )));
        }
        let probability = indices.iter().map(|&i| dist.probs()[i]).product();
        Ok(Self {
            indices,
            probability,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }
}

/// `TWR_m^n = prod_{j=m..n} (1 + f t_{ω_j} / t̂)` with 1-based inclusive
/// indices. The empty range `m = n + 1` gives 1.
pub fn twr_path(
    dist: &TradeDistribution,
    f: Fraction,
    outcome: &Outcome,
    m: usize,
    n: usize,
) -> Result<f64> {
    let len = outcome.len();
    if m == 0 || n > len || m > n + 1 {
        return Err(Error::IndexOutOfRange(format!(
            "range {m}..={n} on a path of length {len}"
        )));
    }
    Ok(outcome.indices()[m - 1..n]
        .iter()
        .map(|&i| dist.hpr(i, f))
        .product())
}

/// Exact sum of rationals; helper for tests and the CLI.
pub fn rational_sum<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigRational {
    values
        .into_iter()
        .fold(BigRational::zero(), |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(f: f64) -> Fraction {
        Fraction::new(f).unwrap()
    }

    #[test]
    fn expectation_examples() {
        let toss = TradeDistribution::toss_game();
        assert_eq!(toss.expectation(), 0.5);
        let sym = TradeDistribution::uniform(vec![-1.0, 1.0]).unwrap();
        assert_eq!(sym.expectation(), 0.0);
        let three = TradeDistribution::new(vec![-1.0, 2.0, -0.5], vec![0.25, 0.5, 0.25]).unwrap();
        assert!((three.expectation() - 0.625).abs() < 1e-15);
    }

    #[test]
    fn log_gamma_examples() {
        let toss = TradeDistribution::toss_game();
        assert_eq!(toss.log_gamma(Fraction::ZERO), 0.0);
        let expected = 0.5 * 0.75f64.ln() + 0.5 * 1.5f64.ln();
        assert!((toss.log_gamma(frac(0.25)) - expected).abs() < 1e-15);
        assert!((expected - 0.05889).abs() < 1e-5);
        // 0.25 beats its neighbours
        let best = toss.log_gamma(frac(0.25));
        for f in [0.2, 0.24, 0.249, 0.251, 0.26, 0.3] {
            assert!(toss.log_gamma(frac(f)) < best);
        }
    }

    #[test]
    fn twr_path_examples() {
        let toss = TradeDistribution::toss_game();
        let hh = Outcome::new(&toss, vec![1, 1]).unwrap();
        assert!((twr_path(&toss, frac(0.25), &hh, 1, 2).unwrap() - 2.25).abs() < 1e-15);
        assert_eq!(twr_path(&toss, Fraction::ZERO, &hh, 1, 2).unwrap(), 1.0);
        let t = Outcome::new(&toss, vec![0]).unwrap();
        assert_eq!(twr_path(&toss, frac(0.25), &t, 1, 1).unwrap(), 0.75);
        assert_eq!(twr_path(&toss, frac(0.25), &t, 2, 1).unwrap(), 1.0);
        assert!(twr_path(&toss, frac(0.25), &t, 0, 1).is_err());
        assert!(twr_path(&toss, frac(0.25), &t, 1, 2).is_err());
    }

    #[test]
    fn fraction_domain() {
        assert!(Fraction::new(1.0).is_err());
        assert!(Fraction::new(-0.1).is_err());
        assert!(Fraction::new(f64::NAN).is_err());
        assert!(Fraction::new(0.0).is_ok());
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(TradeDistribution::new(vec![-1.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(TradeDistribution::new(vec![1.0, 2.0], vec![0.5, 0.5]).is_err());
        assert!(TradeDistribution::new(vec![-1.0, 2.0], vec![0.5, 0.6]).is_err());
        assert!(TradeDistribution::new(vec![-1.0, 2.0], vec![0.0, 1.0]).is_err());
        assert!(TradeDistribution::new(vec![-1.0], vec![0.5, 0.5]).is_err());
        assert!(TradeDistribution::from_counts(vec![-1.0, 2.0], &[0, 0]).is_err());
    }

    #[test]
    fn counts_become_rationals() {
        let d = TradeDistribution::from_counts(vec![-3.0, 2.0, 5.0], &[2, 1, 1]).unwrap();
        let exact = d.exact_probs().unwrap();
        assert_eq!(exact[0], BigRational::new(1.into(), 2.into()));
        assert_eq!(d.max_loss(), 3.0);
        assert!(d.normalized_trades().iter().all(|&a| a >= -1.0));
    }

    #[test]
    fn integer_scaling_examples() {
        assert_eq!(integer_scaling(&[-1.0, 2.0], 1_000_000), Some(vec![-1, 2]));
        assert_eq!(integer_scaling(&[-0.5, 1.0], 1_000_000), Some(vec![-1, 2]));
        assert_eq!(integer_scaling(&[-1.5, 0.25], 1_000_000), Some(vec![-6, 1]));
        assert_eq!(integer_scaling(&[-1.0, std::f64::consts::PI], 1000), None);
    }
}
