//! Data files behind the standard set of plots: derivative of the growth
//! objective, exact vs linearized expectation curves, the drawdown-aware
//! objective for a short and a long horizon, equity and drawdown curves, and
//! pooled drawdown histograms.

use crate::coefficients::{coefficient_set, smallf_expectation, CoefficientConfig, Method};
use crate::error::Result;
use crate::exec::Execution;
use crate::model::{Fraction, TradeDistribution};
use crate::optimizer::WeightedObjective;
use crate::outcome::exact_expectations_with;
use crate::paths::{path_count, EnumerationConfig};
use crate::report::{
    dd_hist_csv, equity_csv, exact_curves_csv, fmt_num, g_function_csv, FGrid,
};
use crate::simulator::{summarize, simulate_run, DrawdownHistogram, SimulationConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    pub short_horizon: usize,
    pub long_horizon: usize,
    pub fractions: Vec<f64>,
    pub steps: usize,
    pub runs: usize,
    pub seed: u64,
    pub capital: f64,
    pub grid: FGrid,
    pub sig: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            short_horizon: 3,
            long_horizon: 100,
            fractions: vec![0.16, 0.25],
            steps: 10_000,
            runs: 50,
            seed: 2024,
            capital: 1000.0,
            grid: FGrid::default(),
            sig: 6,
        }
    }
}

/// Returns `(file name, CSV contents)` pairs in a fixed order.
pub fn figure_tables(
    dist: &TradeDistribution,
    opts: &FigureOptions,
    config: &CoefficientConfig,
) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let sig = opts.sig;

    out.push((
        "g_function.csv".to_string(),
        g_function_csv(&WeightedObjective::classical(dist), &opts.grid, sig)?,
    ));

    let short = coefficient_set(dist, opts.short_horizon, Method::Auto, config)?;
    let long = coefficient_set(dist, opts.long_horizon, Method::Auto, config)?;
    out.push((
        format!("g_function_riskaverse_M{}.csv", opts.short_horizon),
        g_function_csv(&WeightedObjective::new(dist, short.risk_weights())?, &opts.grid, sig)?,
    ));
    out.push((
        format!("curves_M{}.csv", opts.short_horizon),
        exact_curves_csv(dist, opts.short_horizon, &opts.grid, Some(&short), &config.enumeration, sig)?,
    ));

    // drawdown-aware objective: exact where enumerable, linearized always
    let enumerable = |m: usize| {
        path_count(dist.len(), m).is_some_and(|k| k <= config.enumeration.cap as u128)
    };
    let inner = EnumerationConfig {
        execution: Execution::Sequential,
        ..config.enumeration
    };
    let mut objective = format!(
        "f,exact_M{s},approx_M{s},exact_M{l},approx_M{l}\n",
        s = opts.short_horizon,
        l = opts.long_horizon
    );
    let points = opts.grid.points()?;
    let rows = config.enumeration.execution.map_slice(&points, |&f| -> Result<String> {
        let mut cells = vec![fmt_num(f.value(), sig)];
        for (m, set) in [(opts.short_horizon, &short), (opts.long_horizon, &long)] {
            if enumerable(m) {
                let e = exact_expectations_with(dist, f, m, &inner)?;
                cells.push(fmt_num(e.e_u + e.e_dcur, sig));
            } else {
                cells.push(String::new());
            }
            let s = smallf_expectation(set, dist, f);
            cells.push(fmt_num(s.u + s.d_cur, sig));
        }
        Ok(cells.join(","))
    });
    for row in rows {
        objective.push_str(&row?);
        objective.push('\n');
    }
    out.push(("objective.csv".to_string(), objective));

    for &f in &opts.fractions {
        let cfg = SimulationConfig {
            steps: opts.steps,
            runs: opts.runs,
            seed: opts.seed,
            starting_capital: opts.capital,
            ..SimulationConfig::new(dist.clone(), Fraction::new(f)?)
        };
        let path = simulate_run(&cfg, 0)?;
        out.push((format!("equity_f{f}.csv"), equity_csv(&path, sig)?));
        let mut hist = DrawdownHistogram::default();
        for s in summarize(&cfg, config.enumeration.execution)? {
            hist.merge(&s.histogram);
        }
        out.push((format!("dd_hist_f{f}.csv"), dd_hist_csv(&hist, sig)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn produces_every_table() {
        let opts = FigureOptions {
            long_horizon: 30,
            steps: 200,
            runs: 3,
            grid: FGrid { start: 0.0, stop: 0.9, step: 0.1 },
            ..Default::default()
        };
        let tables = figure_tables(&TradeDistribution::toss_game(), &opts, &CoefficientConfig::default()).unwrap();
        let names: Vec<&str> = tables.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            vec![
                "g_function.csv",
                "g_function_riskaverse_M3.csv",
                "curves_M3.csv",
                "objective.csv",
                "equity_f0.16.csv",
                "dd_hist_f0.16.csv",
                "equity_f0.25.csv",
                "dd_hist_f0.25.csv",
            ]
        );
        let objective = &tables[3].1;
        assert!(objective.starts_with("f,exact_M3,approx_M3,exact_M30,approx_M30\n"));
        // M = 30 is beyond the default cap: exact column empty
        assert!(objective.lines().nth(2).unwrap().contains(",,"));
        let equity = &tables[4].1;
        assert_eq!(equity.lines().count(), 202);
    }
}
