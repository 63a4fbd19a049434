//! CSV rendering. All numbers use a dot decimal separator and a fixed number
//! of significant digits, so identical inputs give identical bytes.

use crate::coefficients::{smallf_expectation, CoefficientSet, Weight};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{Fraction, TradeDistribution};
use crate::optimizer::WeightedObjective;
use crate::outcome::exact_expectations_with;
use crate::paths::EnumerationConfig;
use crate::risk_averse::Sweep;
use crate::simulator::{DrawdownHistogram, EquityPath, RunSummary, HISTOGRAM_BINS};

pub const DEFAULT_SIG_DIGITS: usize = 6;

/// Formats `x` with `sig` significant digits. Magnitudes outside
/// `[1e-5, 1e15)` switch to exponent notation.
pub fn fmt_num(x: f64, sig: usize) -> String {
    let sig = sig.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // round first so that 9.9999996 -> 10.0000 gets the right exponent
    let rounded: f64 = format!("{:.*e}", sig - 1, x).parse().unwrap_or(x);
    let exp = rounded.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", sig - 1, x)
    }
}

fn render(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

/// `n,U,D,sumLambda,sumR` with 1-based `n`.
pub fn coefficients_csv<T: Weight>(set: &CoefficientSet<T>, fmt: impl Fn(&T) -> String) -> Result<String> {
    let (sl, sr) = (set.sum_lambda(), set.sum_run_up());
    render(
        &header(&["n", "U", "D", "sumLambda", "sumR"]),
        (0..set.n()).map(|k| {
            vec![
                (k + 1).to_string(),
                fmt(&set.updown.up[k]),
                fmt(&set.updown.down[k]),
                fmt(&sl[k]),
                fmt(&sr[k]),
            ]
        }),
    )
}

/// `ell,n,Lambda,R` for every `ℓ` in `0..=M`.
pub fn per_ell_csv<T: Weight>(set: &CoefficientSet<T>, fmt: impl Fn(&T) -> String) -> Result<String> {
    let dd = &set.drawdown;
    render(
        &header(&["ell", "n", "Lambda", "R"]),
        (0..=set.m).flat_map(|ell| {
            let fmt = &fmt;
            (0..set.n()).map(move |k| {
                vec![
                    ell.to_string(),
                    (k + 1).to_string(),
                    fmt(&dd.lambda[ell][k]),
                    fmt(&dd.run_up[ell][k]),
                ]
            })
        }),
    )
}

/// Inclusive grid `start, start + step, .., stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for FGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 0.99,
            step: 0.01,
        }
    }
}

impl FGrid {
    pub fn points(&self) -> Result<Vec<Fraction>> {
        if self.step.is_nan() || self.step <= 0.0 || self.stop < self.start {
            return Err(Error::Domain(format!("empty or invalid f-grid {self:?}")));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| Fraction::new(self.start + i as f64 * self.step))
            .collect()
    }
}

/// `f,E_U,E_D,E_Dcur,E_R,E_Z`, plus `u,d,d_cur,r` when coefficients are given.
pub fn exact_curves_csv(
    dist: &TradeDistribution,
    m: usize,
    grid: &FGrid,
    approx: Option<&CoefficientSet<f64>>,
    config: &EnumerationConfig,
    sig: usize,
) -> Result<String> {
    let points = grid.points()?;
    // parallel over grid points; each enumeration runs sequentially
    let inner = EnumerationConfig {
        execution: Execution::Sequential,
        ..*config
    };
    let rows = config
        .execution
        .map_slice(&points, |&f| -> Result<Vec<String>> {
            let e = exact_expectations_with(dist, f, m, &inner)?;
            let mut row: Vec<String> = [f.value(), e.e_u, e.e_d, e.e_dcur, e.e_r, e.e_z]
                .iter()
                .map(|&x| fmt_num(x, sig))
                .collect();
            if let Some(set) = approx {
                let s = smallf_expectation(set, dist, f);
                row.extend([s.u, s.d, s.d_cur, s.r].iter().map(|&x| fmt_num(x, sig)));
            }
            Ok(row)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut cols = header(&["f", "E_U", "E_D", "E_Dcur", "E_R", "E_Z"]);
    if approx.is_some() {
        cols.extend(header(&["u", "d", "d_cur", "r"]));
    }
    render(&cols, rows)
}

/// `f,u,d,d_cur,r,u_plus_d_cur`: the coefficient-based curves only, for
/// horizons too long to enumerate.
pub fn approx_curves_csv(dist: &TradeDistribution, set: &CoefficientSet<f64>, grid: &FGrid, sig: usize) -> Result<String> {
    let rows = grid.points()?.into_iter().map(|f| {
        let s = smallf_expectation(set, dist, f);
        [f.value(), s.u, s.d, s.d_cur, s.r, s.u + s.d_cur]
            .iter()
            .map(|&x| fmt_num(x, sig))
            .collect()
    });
    render(&header(&["f", "u", "d", "d_cur", "r", "u_plus_d_cur"]), rows)
}

/// `M,f_riskaverse,f_opt,q1..qN`.
pub fn sweep_csv(sweep: &Sweep, sig: usize) -> Result<String> {
    let n = sweep.results[0].weights.len();
    let mut cols = header(&["M", "f_riskaverse", "f_opt"]);
    cols.extend((1..=n).map(|k| format!("q{k}")));
    render(
        &cols,
        sweep.results.iter().map(|r| {
            let mut row = vec![
                r.m.to_string(),
                fmt_num(r.fraction(), sig),
                fmt_num(r.classical.value(), sig),
            ];
            row.extend(r.weights.iter().map(|&q| fmt_num(q, sig)));
            row
        }),
    )
}

/// `f,g,h` for the objective: derivative and value over the grid.
pub fn g_function_csv(objective: &WeightedObjective, grid: &FGrid, sig: usize) -> Result<String> {
    let rows = grid.points()?.into_iter().map(|f| {
        vec![
            fmt_num(f.value(), sig),
            fmt_num(objective.derivative(f), sig),
            fmt_num(objective.value(f), sig),
        ]
    });
    render(&header(&["f", "g", "h"]), rows)
}

/// `t,capital,log_equity,dd` for `t = 0..=T`.
pub fn equity_csv(path: &EquityPath, sig: usize) -> Result<String> {
    let rows = path
        .log_equity
        .iter()
        .zip(&path.drawdown)
        .enumerate()
        .map(|(t, (&log_c, &dd))| {
            vec![
                t.to_string(),
                fmt_num(log_c.exp(), sig),
                fmt_num(log_c, sig),
                fmt_num(dd, sig),
            ]
        });
    render(&header(&["t", "capital", "log_equity", "dd"]), rows)
}

/// `bin,frequency`; `bin` is the upper edge `-k/100` of bin `k`.
pub fn dd_hist_csv(hist: &DrawdownHistogram, sig: usize) -> Result<String> {
    let freqs = hist.frequencies();
    let rows = (0..HISTOGRAM_BINS).map(|k| {
        let edge = if k == 0 { "0".to_string() } else { format!("-{:.2}", k as f64 / 100.0) };
        vec![edge, fmt_num(freqs[k], sig)]
    });
    render(&header(&["bin", "frequency"]), rows)
}

/// `run,terminal_log_growth,max_drawdown`.
pub fn run_summary_csv(summaries: &[RunSummary], sig: usize) -> Result<String> {
    let rows = summaries.iter().map(|s| {
        vec![
            s.run.to_string(),
            fmt_num(s.terminal_log_growth, sig),
            fmt_num(s.max_drawdown, sig),
        ]
    });
    render(&header(&["run", "terminal_log_growth", "max_drawdown"]), rows)
}
