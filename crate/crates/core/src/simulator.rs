//! Monte Carlo equity curves under fixed-fraction trading.
//!
//! Each run draws i.i.d. trades from its own ChaCha12 stream: the generator
//! is seeded with `seed` via `seed_from_u64` and run `k` uses stream `k`
//! (`set_stream`). Paths therefore do not depend on how many runs are
//! simulated or in which order. Capital is carried in log space.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{Fraction, TradeDistribution};

pub const DEFAULT_STEPS: usize = 10_000;
pub const DEFAULT_CAPITAL: f64 = 1000.0;
/// Histogram resolution: 100 bins of width 1% over `(-1, 0]`.
pub const HISTOGRAM_BINS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dist: TradeDistribution,
    pub fraction: Fraction,
    pub steps: usize,
    pub starting_capital: f64,
    pub seed: u64,
    pub runs: usize,
}

impl SimulationConfig {
    pub fn new(dist: TradeDistribution, fraction: Fraction) -> Self {
        Self {
            dist,
            fraction,
            steps: DEFAULT_STEPS,
            starting_capital: DEFAULT_CAPITAL,
            seed: 0,
            runs: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Domain("steps must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::Domain("runs must be at least 1".into()));
        }
        if !(self.starting_capital > 0.0 && self.starting_capital.is_finite()) {
            return Err(Error::Domain(format!(
                "starting capital {} must be positive",
                self.starting_capital
            )));
        }
        Ok(())
    }

    fn rng(&self, run: usize) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(run as u64);
        rng
    }
}

/// One simulated capital trajectory, indexed `t = 0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquityPath {
    /// Drawn trade indices `ω_1..ω_T` (0-based).
    pub draws: Vec<usize>,
    /// `log c_t`.
    pub log_equity: Vec<f64>,
    /// `log max_{s<=t} c_s`.
    pub log_running_max: Vec<f64>,
    /// `c_t / max_{s<=t} c_s - 1`, in `(-1, 0]`.
    pub drawdown: Vec<f64>,
}

impl EquityPath {
    pub fn steps(&self) -> usize {
        self.draws.len()
    }

    /// `c_t`; overflows to infinity only beyond `e^709`.
    pub fn capital(&self) -> Vec<f64> {
        self.log_equity.iter().map(|l| l.exp()).collect()
    }

    pub fn running_max(&self) -> Vec<f64> {
        self.log_running_max.iter().map(|l| l.exp()).collect()
    }

    /// `log(c_T / c_0)`.
    pub fn terminal_log_growth(&self) -> f64 {
        self.log_equity[self.log_equity.len() - 1] - self.log_equity[0]
    }

    /// Minimum of the current relative drawdown.
    pub fn max_drawdown(&self) -> f64 {
        self.drawdown.iter().copied().fold(0.0, f64::min)
    }
}

/// Walks one run, reporting `(t, draw, log c_t, log max c, drawdown)`.
fn walk(config: &SimulationConfig, run: usize, mut visit: impl FnMut(usize, usize, f64, f64, f64)) {
    let log_hprs = config.dist.log_hprs(config.fraction);
    let sampler = WeightedIndex::new(config.dist.probs()).expect("validated probabilities");
    let mut rng = config.rng(run);
    let mut log_c = config.starting_capital.ln();
    let mut log_max = log_c;
    for t in 1..=config.steps {
        let draw = sampler.sample(&mut rng);
        log_c += log_hprs[draw];
        if log_c > log_max {
            log_max = log_c;
        }
        visit(t, draw, log_c, log_max, (log_c - log_max).exp_m1());
    }
}

/// Simulates run `run` of the configuration.
pub fn simulate_run(config: &SimulationConfig, run: usize) -> Result<EquityPath> {
    config.validate()?;
    let start = config.starting_capital.ln();
    let mut path = EquityPath {
        draws: Vec::with_capacity(config.steps),
        log_equity: vec![start],
        log_running_max: vec![start],
        drawdown: vec![0.0],
    };
    walk(config, run, |_, draw, log_c, log_max, dd| {
        path.draws.push(draw);
        path.log_equity.push(log_c);
        path.log_running_max.push(log_max);
        path.drawdown.push(dd);
    });
    Ok(path)
}

/// Simulates all runs, in run order.
pub fn simulate(config: &SimulationConfig, execution: Execution) -> Result<Vec<EquityPath>> {
    config.validate()?;
    execution
        .map_indexed(config.runs, |run| simulate_run(config, run))
        .into_iter()
        .collect()
}

/// Pooled distribution of the current relative drawdown. Bin `k` holds
/// values in `(-(k+1)/100, -k/100]`; bin 0 contains the zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrawdownHistogram {
    counts: Vec<u64>,
    total: u64,
}

impl Default for DrawdownHistogram {
    fn default() -> Self {
        Self {
            counts: vec![0; HISTOGRAM_BINS],
            total: 0,
        }
    }
}

impl DrawdownHistogram {
    pub fn bin_of(dd: f64) -> usize {
        if dd >= 0.0 {
            return 0;
        }
        let k = (-dd * HISTOGRAM_BINS as f64).ceil() as usize;
        k.saturating_sub(1).min(HISTOGRAM_BINS - 1)
    }

    pub fn add(&mut self, dd: f64) {
        self.counts[Self::bin_of(dd)] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &DrawdownHistogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Relative frequency of each bin.
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| if self.total == 0 { 0.0 } else { c as f64 / self.total as f64 })
            .collect()
    }

    /// Frequency of drawdowns in bins lying entirely at or below `-k/100`,
    /// i.e. of values `<= -k/100` up to the bin containing the edge itself.
    pub fn frequency_beyond(&self, percent: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let tail: u64 = self.counts[percent.min(HISTOGRAM_BINS)..].iter().sum();
        tail as f64 / self.total as f64
    }
}

/// Histogram of `dd_t`, `t = 1..=T`, pooled over all given paths.
pub fn drawdown_distribution(paths: &[EquityPath]) -> DrawdownHistogram {
    let mut h = DrawdownHistogram::default();
    for p in paths {
        for &dd in &p.drawdown[1..] {
            h.add(dd);
        }
    }
    h
}

/// Per-run statistics, computed without storing the path.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub run: usize,
    pub terminal_log_growth: f64,
    pub max_drawdown: f64,
    pub histogram: DrawdownHistogram,
}

pub fn summarize_run(config: &SimulationConfig, run: usize) -> Result<RunSummary> {
    config.validate()?;
    let start = config.starting_capital.ln();
    let mut summary = RunSummary {
        run,
        terminal_log_growth: 0.0,
        max_drawdown: 0.0,
        histogram: DrawdownHistogram::default(),
    };
    walk(config, run, |_, _, log_c, _, dd| {
        summary.terminal_log_growth = log_c - start;
        summary.max_drawdown = summary.max_drawdown.min(dd);
        summary.histogram.add(dd);
    });
    Ok(summary)
}

pub fn summarize(config: &SimulationConfig, execution: Execution) -> Result<Vec<RunSummary>> {
    config.validate()?;
    execution
        .map_indexed(config.runs, |run| summarize_run(config, run))
        .into_iter()
        .collect()
}
