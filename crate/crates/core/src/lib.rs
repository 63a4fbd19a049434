//! Fixed-fraction position sizing for discrete trade distributions.
//!
//! * [`optimizer`]: classical optimal f and weighted log-growth objectives,
//!   plus the two-outcome Kelly closed form.
//! * [`outcome`]: exact evaluation over all `N^M` draw sequences of the
//!   terminal log TWR and its up/down and run-up/current-drawdown parts.
//! * [`coefficients`]: the fraction-independent weights that linearize those
//!   expectations for small `f`, by enumeration or by dynamic programming.
//! * [`risk_averse`]: the fraction maximizing expected up-trade plus current
//!   drawdown, and sweeps over the horizon `M`.
//! * [`simulator`]: seeded Monte Carlo equity curves and drawdown statistics.
//!
//! Data-parallel loops go through [`exec::Execution`]; building without the
//! default `parallel` feature makes every loop sequential.

pub mod coefficients;
pub mod error;
pub mod exec;
pub mod figures;
pub mod io;
pub mod model;
pub mod optimizer;
pub mod outcome;
pub mod paths;
pub mod report;
pub mod risk_averse;
pub mod simulator;
mod sum;

pub use coefficients::{CoefficientConfig, CoefficientSet, Method};
pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{twr_path, Fraction, Outcome, TradeDistribution};
pub use optimizer::{kelly_fraction, optimal_f, solve_optimal_f, OptimalFraction, WeightedObjective};
pub use outcome::{decompose_path, exact_expectations, topping_index, Expectations, PathDecomposition};
pub use paths::EnumerationConfig;
pub use risk_averse::{risk_averse_fraction, sweep_m, RiskAverseResult, Sweep};
pub use simulator::{simulate, EquityPath, SimulationConfig};
pub use sum::KahanSum;
