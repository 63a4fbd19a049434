//! Reading trade distributions from CSV or JSON.
//!
//! CSV takes a header `trade,prob` or `trade,count`. Probabilities may be
//! written as fractions (`1/2`) or decimals (`0.25`); both are read exactly,
//! and the distribution keeps exact rationals when they sum to exactly one.
//! JSON takes `{"trades": [...], "probs": [...]}` with numbers or strings.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{rational_sum, TradeDistribution, PROB_SUM_TOL};

/// A probability as written in the input.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbValue {
    Exact(BigRational),
    Real(f64),
}

impl ProbValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ProbValue::Exact(r) => crate::model::rational_to_f64(r),
            ProbValue::Real(x) => *x,
        }
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mantissa: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = BigInt::from(10u32).pow(frac.len() as u32);
    let r = BigRational::new(mantissa, scale);
    Some(if neg { -r } else { r })
}

/// Parses `a/b`, a plain decimal, or any float literal.
pub fn parse_probability(s: &str) -> Result<ProbValue> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in '{s}'")))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in '{s}'")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(ProbValue::Exact(BigRational::new(num, den)));
    }
    if let Some(r) = parse_decimal(s) {
        return Ok(ProbValue::Exact(r));
    }
    s.parse::<f64>()
        .map(ProbValue::Real)
        .map_err(|_| Error::Parse(format!("cannot read probability '{s}'")))
}

fn parse_trade(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.contains('/') {
        return Ok(parse_probability(s)?.to_f64());
    }
    s.parse::<f64>()
        .map_err(|_| Error::Parse(format!("cannot read trade '{s}'")))
}

/// Builds a distribution, keeping exact probabilities when they sum to one.
pub fn distribution_from_values(trades: Vec<f64>, probs: Vec<ProbValue>) -> Result<TradeDistribution> {
    let exact: Option<Vec<BigRational>> = probs
        .iter()
        .map(|p| match p {
            ProbValue::Exact(r) => Some(r.clone()),
            ProbValue::Real(_) => None,
        })
        .collect();
    if let Some(exact) = exact {
        if rational_sum(&exact).is_one() {
            return TradeDistribution::with_rational_probs(trades, exact);
        }
    }
    let real: Vec<f64> = probs.iter().map(ProbValue::to_f64).collect();
    let total: f64 = real.iter().sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    TradeDistribution::new(trades, real)
}

pub fn parse_csv(text: &str) -> Result<TradeDistribution> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let trade_col = col("trade").ok_or_else(|| Error::Parse("missing 'trade' column".into()))?;
    let (weight_col, counts) = match (col("prob"), col("count")) {
        (Some(c), None) => (c, false),
        (None, Some(c)) => (c, true),
        (Some(_), Some(_)) => {
            return Err(Error::Parse("give either 'prob' or 'count', not both".into()))
        }
        (None, None) => return Err(Error::Parse("missing 'prob' or 'count' column".into())),
    };

    let mut trades = Vec::new();
    let mut weights = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| {
            record
                .get(i)
                .ok_or_else(|| Error::Parse(format!("row {}: missing field", line + 2)))
        };
        trades.push(parse_trade(field(trade_col)?)?);
        weights.push(field(weight_col)?.to_string());
    }

    if counts {
        let counts = weights
            .iter()
            .map(|w| {
                w.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("count '{w}' is not a nonnegative integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        TradeDistribution::from_counts(trades, &counts)
    } else {
        let probs = weights
            .iter()
            .map(|w| parse_probability(w))
            .collect::<Result<Vec<_>>>()?;
        distribution_from_values(trades, probs)
    }
}

fn json_number_text(v: &Value) -> Result<String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        other => Err(Error::Parse(format!("expected a number or string, got {other}"))),
    }
}

pub fn parse_json(text: &str) -> Result<TradeDistribution> {
    let value: Value = serde_json::from_str(text)?;
    let array = |key: &str| -> Result<Vec<String>> {
        value
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse(format!("missing array '{key}'")))?
            .iter()
            .map(json_number_text)
            .collect()
    };
    let trades = array("trades")?
        .iter()
        .map(|s| parse_trade(s))
        .collect::<Result<Vec<_>>>()?;
    let probs = array("probs")?
        .iter()
        .map(|s| parse_probability(s))
        .collect::<Result<Vec<_>>>()?;
    distribution_from_values(trades, probs)
}

/// Reads a `.json` file as JSON and anything else as CSV.
pub fn read_distribution(path: &Path) -> Result<TradeDistribution> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('{');
    if is_json {
        parse_json(&text)
    } else {
        parse_csv(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn probability_literals() {
        assert_eq!(parse_probability("1/2").unwrap(), ProbValue::Exact(q(1, 2)));
        assert_eq!(parse_probability(" 0.25 ").unwrap(), ProbValue::Exact(q(1, 4)));
        assert_eq!(parse_probability("1").unwrap(), ProbValue::Exact(q(1, 1)));
        assert_eq!(parse_probability("1e-1").unwrap(), ProbValue::Real(0.1));
        assert!(parse_probability("1/0").is_err());
        assert!(parse_probability("half").is_err());
    }

    #[test]
    fn csv_with_probs() {
        let d = parse_csv("trade,prob\n-1,1/2\n2,0.5\n").unwrap();
        assert_eq!(d.trades(), &[-1.0, 2.0]);
        assert_eq!(d.exact_probs().unwrap(), &[q(1, 2), q(1, 2)]);
    }

    #[test]
    fn csv_with_counts() {
        let d = parse_csv("trade,count\n-1,3\n2,1\n").unwrap();
        assert_eq!(d.exact_probs().unwrap(), &[q(3, 4), q(1, 4)]);
    }

    #[test]
    fn inexact_probabilities_fall_back_to_reals() {
        let d = parse_csv("trade,prob\n-1,0.3333333333333333\n2,0.3333333333333333\n3,0.33333333333333337\n").unwrap();
        assert!(d.exact_probs().is_none());
        assert!(parse_csv("trade,prob\n-1,0.3\n2,0.3\n").is_err());
    }

    #[test]
    fn json_forms() {
        let d = parse_json(r#"{"trades":[-1,2,3],"probs":["1/2","1/4",0.25]}"#).unwrap();
        assert_eq!(d.exact_probs().unwrap(), &[q(1, 2), q(1, 4), q(1, 4)]);
        assert!(parse_json(r#"{"trades":[-1,2]}"#).is_err());
    }

    #[test]
    fn malformed_csv() {
        assert!(parse_csv("x,prob\n-1,1\n").is_err());
        assert!(parse_csv("trade\n-1\n").is_err());
        assert!(parse_csv("trade,count\n-1,-3\n2,1\n").is_err());
        assert!(parse_csv("trade,prob,count\n-1,1,1\n").is_err());
    }
}
