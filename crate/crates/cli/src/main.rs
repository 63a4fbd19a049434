use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracsize::coefficients::{coefficient_set, coefficient_set_exact};
use fracsize::figures::{figure_tables, FigureOptions};
use fracsize::io::read_distribution;
use fracsize::optimizer::{kelly_fraction, solve_optimal_f, WeightedObjective};
use fracsize::report::{
    approx_curves_csv, coefficients_csv, dd_hist_csv, equity_csv, exact_curves_csv, fmt_num, per_ell_csv,
    run_summary_csv, sweep_csv, FGrid,
};
use fracsize::risk_averse::{risk_averse_fraction_with, sweep_m, Sweep, TABLE_HORIZONS};
use fracsize::simulator::{simulate_run, summarize, DrawdownHistogram, SimulationConfig};
use fracsize::{CoefficientConfig, Execution, Fraction, Method, TradeDistribution};

const OUT_DIR_ENV: &str = "FRACSIZE_OUT_DIR";

/// Fixed-fraction position sizing: optimal f, drawdown-aware optimal f,
/// exact outcome-space curves and Monte Carlo equity simulation.
///
/// Trade distributions are read from CSV (`trade,prob` or `trade,count`) or
/// JSON (`{"trades": [...], "probs": [...]}`); probabilities may be written
/// as exact fractions such as `1/2`. All tables are CSV with a header row.
#[derive(Debug, Parser)]
#[command(name = "fracsize", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Significant digits of printed numbers.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u16).range(1..=17))]
    precision: u16,

    /// Maximum number of paths or compositions enumerated before refusing.
    #[arg(long, global = true, default_value_t = fracsize::paths::DEFAULT_ENUMERATION_CAP)]
    cap: u64,

    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct DistArg {
    /// Trade distribution file (.csv or .json).
    #[arg(long)]
    dist: PathBuf,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// First fraction of the grid.
    #[arg(long, default_value_t = 0.0)]
    f_start: f64,
    /// Last fraction of the grid (inclusive).
    #[arg(long, default_value_t = 0.99)]
    f_stop: f64,
    /// Grid spacing.
    #[arg(long, default_value_t = 0.01)]
    f_step: f64,
}

impl GridArgs {
    fn grid(&self) -> FGrid {
        FGrid { start: self.f_start, stop: self.f_stop, step: self.f_step }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classical optimal fraction maximizing the expected log holding period return.
    OptimalF {
        #[command(flatten)]
        dist: DistArg,
        /// Bracket tolerance of the root finder.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Closed-form Kelly fraction p - (1 - p)/B of a two-outcome game.
    Kelly {
        /// Win probability.
        #[arg(long)]
        p: f64,
        /// Payoff ratio: win per unit lost.
        #[arg(long)]
        b: f64,
    },
    /// Up/down and drawdown/run-up coefficients for horizon M.
    Coefficients {
        #[command(flatten)]
        dist: DistArg,
        /// Horizon (number of trades).
        #[arg(long = "M")]
        m: usize,
        /// Print the per-index table `ell,n,Lambda,R` instead of the sums.
        #[arg(long)]
        per_ell: bool,
        /// Exact rational arithmetic (requires rational probabilities).
        #[arg(long)]
        exact: bool,
        /// Route for the drawdown coefficients.
        #[arg(long, default_value = "auto")]
        method: Method,
        /// Write to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact expectations E_U, E_D, E_Dcur, E_R, E_Z over an f-grid.
    ExactCurves {
        #[command(flatten)]
        dist: DistArg,
        #[arg(long = "M")]
        m: usize,
        #[command(flatten)]
        grid: GridArgs,
        /// Append the small-f approximations u, d, d_cur, r.
        #[arg(long)]
        approx: bool,
        /// Only the small-f approximations; works for any M.
        #[arg(long, conflicts_with = "approx")]
        approx_only: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Drawdown-aware optimal fraction for horizon M.
    RiskAverse {
        #[command(flatten)]
        dist: DistArg,
        #[arg(long = "M")]
        m: usize,
        #[arg(long, default_value = "auto")]
        method: Method,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Drawdown-aware optimal fraction over a range or list of horizons.
    ///
    /// The smallest fraction found is reported on stderr.
    Sweep {
        #[command(flatten)]
        dist: DistArg,
        /// Horizons: `a..b` (inclusive) or a comma-separated list.
        /// Defaults to 2..10,15,20,25,30,40,..,100.
        #[arg(long = "M", value_parser = parse_horizons)]
        m: Option<Horizons>,
        #[arg(long, default_value = "auto")]
        method: Method,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo equity curves at a fixed fraction.
    ///
    /// Writes equity.csv (run 0), dd_hist.csv (drawdowns pooled over all
    /// runs and times) and summary.csv (one row per run).
    Simulate {
        #[command(flatten)]
        dist: DistArg,
        /// Fraction of the largest loss risked per trade.
        #[arg(long)]
        f: f64,
        #[arg(long, default_value_t = fracsize::simulator::DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = fracsize::simulator::DEFAULT_CAPITAL)]
        capital: f64,
        /// Output directory.
        #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
        out: PathBuf,
    },
    /// All tables behind the standard plots.
    Figures {
        #[command(flatten)]
        dist: DistArg,
        /// Short horizon of the drawdown-aware objective.
        #[arg(long, default_value_t = 3)]
        short_m: usize,
        /// Long horizon of the drawdown-aware objective.
        #[arg(long, default_value_t = 100)]
        long_m: usize,
        /// Simulated fractions (comma-separated).
        #[arg(long, value_delimiter = ',', default_values_t = [0.16, 0.25])]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = fracsize::simulator::DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, default_value_t = 50)]
        runs: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[command(flatten)]
        grid: GridArgs,
        /// Output directory.
        #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone)]
struct Horizons(Vec<usize>);

fn parse_horizons(s: &str) -> Result<Horizons, String> {
    let bad = |_| format!("invalid horizon list {s:?}");
    let list: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
        if a > b {
            return Err(format!("empty horizon range {s:?}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(bad)).collect::<Result<_, _>>()?
    };
    if list.is_empty() || list.contains(&0) {
        return Err("horizons must be positive".into());
    }
    Ok(Horizons(list))
}

fn load(dist: &DistArg) -> fracsize::Result<TradeDistribution> {
    read_distribution(&dist.dist)
}

fn emit(text: &str, output: Option<&Path>) -> fracsize::Result<()> {
    match output {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_files(dir: &Path, files: &[(String, String)]) -> fracsize::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, text) in files {
        fs::write(dir.join(name), text)?;
    }
    Ok(())
}

fn run(cli: Cli) -> fracsize::Result<()> {
    let sig = cli.common.precision as usize;
    let mut config = CoefficientConfig::default();
    config.enumeration.cap = cli.common.cap;
    if cli.common.sequential {
        config.enumeration.execution = Execution::Sequential;
    }
    let execution = config.enumeration.execution;

    match cli.command {
        Command::OptimalF { dist, tol } => {
            let dist = load(&dist)?;
            let r = solve_optimal_f(&WeightedObjective::classical(&dist), tol)?;
            let text = format!(
                "f_opt,log_gamma,location\n{},{},{:?}\n",
                fmt_num(r.value(), sig),
                fmt_num(r.objective_value, sig),
                r.location
            );
            emit(&text, None)
        }
        Command::Kelly { p, b } => {
            let k = kelly_fraction(p, b)?;
            let text = format!(
                "kelly,clamped,favorable\n{},{},{}\n",
                fmt_num(k.value, sig),
                fmt_num(k.clamped(), sig),
                k.is_favorable()
            );
            emit(&text, None)
        }
        Command::Coefficients { dist, m, per_ell, exact, method, output } => {
            let dist = load(&dist)?;
            let text = if exact {
                let set = coefficient_set_exact(&dist, m, method, &config)?;
                if per_ell {
                    per_ell_csv(&set, |x| x.to_string())?
                } else {
                    coefficients_csv(&set, |x| x.to_string())?
                }
            } else {
                let set = coefficient_set(&dist, m, method, &config)?;
                let fmt = |x: &f64| fmt_num(*x, sig);
                if per_ell { per_ell_csv(&set, fmt)? } else { coefficients_csv(&set, fmt)? }
            };
            emit(&text, output.as_deref())
        }
        Command::ExactCurves { dist, m, grid, approx, approx_only, output } => {
            let dist = load(&dist)?;
            let text = if approx_only {
                let set = coefficient_set(&dist, m, Method::Auto, &config)?;
                approx_curves_csv(&dist, &set, &grid.grid(), sig)?
            } else {
                let set = approx.then(|| coefficient_set(&dist, m, Method::Auto, &config)).transpose()?;
                exact_curves_csv(&dist, m, &grid.grid(), set.as_ref(), &config.enumeration, sig)?
            };
            emit(&text, output.as_deref())
        }
        Command::RiskAverse { dist, m, method, output } => {
            let dist = load(&dist)?;
            let result = risk_averse_fraction_with(&dist, m, method, &config)?;
            let sweep = Sweep { results: vec![result], min_index: 0 };
            emit(&sweep_csv(&sweep, sig)?, output.as_deref())
        }
        Command::Sweep { dist, m, method, output } => {
            let dist = load(&dist)?;
            let horizons = m.map(|h| h.0).unwrap_or_else(|| TABLE_HORIZONS.to_vec());
            let sweep = sweep_m(&dist, &horizons, method, &config)?;
            emit(&sweep_csv(&sweep, sig)?, output.as_deref())?;
            let min = sweep.conservative_min();
            eprintln!("conservative fraction {} at M = {}", fmt_num(min.fraction(), sig), min.m);
            Ok(())
        }
        Command::Simulate { dist, f, steps, runs, seed, capital, out } => {
            let cfg = SimulationConfig {
                steps,
                runs,
                seed,
                starting_capital: capital,
                ..SimulationConfig::new(load(&dist)?, Fraction::new(f)?)
            };
            cfg.validate()?;
            let first = simulate_run(&cfg, 0)?;
            let summaries = summarize(&cfg, execution)?;
            let mut hist = DrawdownHistogram::default();
            for s in &summaries {
                hist.merge(&s.histogram);
            }
            write_files(
                &out,
                &[
                    ("equity.csv".into(), equity_csv(&first, sig)?),
                    ("dd_hist.csv".into(), dd_hist_csv(&hist, sig)?),
                    ("summary.csv".into(), run_summary_csv(&summaries, sig)?),
                ],
            )
        }
        Command::Figures { dist, short_m, long_m, fractions, steps, runs, seed, grid, out } => {
            let dist = load(&dist)?;
            let opts = FigureOptions {
                short_horizon: short_m,
                long_horizon: long_m,
                fractions,
                steps,
                runs,
                seed,
                grid: grid.grid(),
                sig,
                ..FigureOptions::default()
            };
            write_files(&out, &figure_tables(&dist, &opts, &config)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_method_error() { 3 } else { 2 })
        }
    }
}
