//! Exact evaluation over the full outcome space: the log series of a single
//! path (terminal log TWR, its positive and negative parts, the run-up to the
//! running maximum and the current drawdown from it) and their expectations
//! at a fixed fraction.

use crate::error::Result;
use crate::model::{Fraction, Outcome, TradeDistribution};
use crate::paths::{fold_paths, path_count, EnumerationConfig};
use crate::sum::KahanSum;

/// Two running maxima closer than this count as tied; the earlier one wins.
pub const TIE_TOL: f64 = 1e-14;

/// Log series of one path at one fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDecomposition {
    /// Topping index: first time the running TWR reaches its maximum above 1,
    /// or 0 if it never exceeds 1.
    pub ell_star: usize,
    /// `log TWR_1^M`.
    pub z: f64,
    /// `log max(1, TWR_1^M)`.
    pub u: f64,
    /// `log min(1, TWR_1^M)`.
    pub d: f64,
    /// `log TWR_{ℓ*+1}^M`: the current drawdown.
    pub d_cur: f64,
    /// `log TWR_1^{ℓ*}`: the run-up.
    pub r: f64,
}

fn decompose_indices(log_hprs: &[f64], path: &[usize]) -> PathDecomposition {
    let mut cum = 0.0;
    let mut best = 0.0;
    let mut ell_star = 0;
    for (j, &i) in path.iter().enumerate() {
        cum += log_hprs[i];
        if cum > best + TIE_TOL {
            best = cum;
            ell_star = j + 1;
        }
    }
    let d_cur: f64 = path[ell_star..].iter().map(|&i| log_hprs[i]).sum();
    PathDecomposition {
        ell_star,
        z: cum,
        u: cum.max(0.0),
        d: cum.min(0.0),
        d_cur,
        r: best,
    }
}

/// Topping index `ℓ*` of a path.
pub fn topping_index(dist: &TradeDistribution, f: Fraction, outcome: &Outcome) -> usize {
    decompose_path(dist, f, outcome).ell_star
}

pub fn decompose_path(dist: &TradeDistribution, f: Fraction, outcome: &Outcome) -> PathDecomposition {
    decompose_indices(&dist.log_hprs(f), outcome.indices())
}

/// Expectations of the path log series over all `N^M` paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expectations {
    pub e_z: f64,
    pub e_u: f64,
    pub e_d: f64,
    pub e_dcur: f64,
    pub e_r: f64,
}

#[derive(Default)]
struct Acc {
    z: KahanSum,
    u: KahanSum,
    d: KahanSum,
    d_cur: KahanSum,
    r: KahanSum,
}

impl Acc {
    fn merge(&mut self, other: Acc) {
        self.z.merge(&other.z);
        self.u.merge(&other.u);
        self.d.merge(&other.d);
        self.d_cur.merge(&other.d_cur);
        self.r.merge(&other.r);
    }
}

pub fn exact_expectations(dist: &TradeDistribution, f: Fraction, m: usize) -> Result<Expectations> {
    exact_expectations_with(dist, f, m, &EnumerationConfig::default())
}

pub fn exact_expectations_with(
    dist: &TradeDistribution,
    f: Fraction,
    m: usize,
    config: &EnumerationConfig,
) -> Result<Expectations> {
    config.check(path_count(dist.len(), m))?;
    let log_hprs = dist.log_hprs(f);
    let probs = dist.probs();
    let acc = fold_paths(
        dist.len(),
        m,
        config.execution,
        Acc::default,
        |acc, path| {
            let p: f64 = path.iter().map(|&i| probs[i]).product();
            let dec = decompose_indices(&log_hprs, path);
            acc.z.add(p * dec.z);
            acc.u.add(p * dec.u);
            acc.d.add(p * dec.d);
            acc.d_cur.add(p * dec.d_cur);
            acc.r.add(p * dec.r);
        },
        Acc::merge,
    );
    Ok(Expectations {
        e_z: acc.z.value(),
        e_u: acc.u.value(),
        e_d: acc.d.value(),
        e_dcur: acc.d_cur.value(),
        e_r: acc.r.value(),
    })
}

/// Calls `visit` with every path of length `m`, its probability and its
/// decomposition at `f`. Sequential, in odometer order.
pub fn for_each_decomposition(
    dist: &TradeDistribution,
    f: Fraction,
    m: usize,
    config: &EnumerationConfig,
    mut visit: impl FnMut(&[usize], f64, &PathDecomposition),
) -> Result<()> {
    config.check(path_count(dist.len(), m))?;
    let log_hprs = dist.log_hprs(f);
    let probs = dist.probs();
    let mut path = vec![0usize; m];
    let n = dist.len();
    loop {
        let p: f64 = path.iter().map(|&i| probs[i]).product();
        visit(&path, p, &decompose_indices(&log_hprs, &path));
        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            path[pos] += 1;
            if path[pos] < n {
                break;
            }
            path[pos] = 0;
        }
    }
}
