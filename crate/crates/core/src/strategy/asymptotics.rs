//! Asymptotic checks on the digital-option variant of the strategy.
//!
//! With a budget of 1 spread evenly, each period buys digitals worth `1/n`
//! struck at `c(n)`, where `c(n)` solves `Q(G >= c) = 1/n` over a horizon of
//! `1/n` with the discount factor treated as 1. The trigger probabilities are
//! `p = P(G >= c)` and `q = 1/n`.

use super::config::{Sizing, StrategyConfig};
use super::simulate::simulate;
use super::Estimate;
use crate::error::{domain, Error, Result};
use crate::measure::{MarketParams, Measure};
use crate::pricing::LogLaw;
use crate::root::bisect;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRow {
    pub periods: u32,
    pub strike_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub periods: u32,
    pub strike_ratio: f64,
    pub p: f64,
    pub q: f64,
    /// `p / q`, from the log probabilities.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaRow {
    pub periods: u32,
    pub strike_ratio: f64,
    pub beta: Estimate,
    /// Sample correlation between the payoff and the regressor.
    pub correlation: f64,
}

fn check_increasing(n_list: &[u32]) -> Result<()> {
    if n_list.is_empty() {
        return Err(domain("empty list of period counts"));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) || n_list[0] == 0 {
        return Err(domain(format!("period counts must be positive and increasing, got {n_list:?}")));
    }
    Ok(())
}

/// `c(n)` with `Q(S_{1/n} / S_0 >= c) = 1/n` (undiscounted).
fn unit_budget_strike(n: u32, market: &MarketParams) -> Result<f64> {
    let target = 1.0 / n as f64;
    if target >= 1.0 {
        return Err(Error::InfeasibleBudget {
            spend: target,
            min: 0.0,
            max: 1.0,
        });
    }
    let law = LogLaw::new(market, Measure::RiskNeutral, target);
    let ln_target = target.ln();
    let half = 40.0 * law.std;
    let ln_c = bisect(
        |ln_c| law.ln_upper_tail(ln_c) - ln_target,
        law.mean - half,
        law.mean + half,
        1e-14,
    )?;
    Ok(ln_c.exp())
}

/// Strike ratios of the unit-budget digital strategy for each `n`.
pub fn c_growth(n_list: &[u32], market: &MarketParams) -> Result<Vec<GrowthRow>> {
    check_increasing(n_list)?;
    n_list
        .iter()
        .map(|&n| {
            Ok(GrowthRow {
                periods: n,
                strike_ratio: unit_budget_strike(n, market)?,
            })
        })
        .collect()
}

fn ratio_row(n: u32, c: f64, market: &MarketParams) -> RatioRow {
    let tau = 1.0 / n as f64;
    let ln_p = LogLaw::new(market, Measure::Physical, tau).ln_upper_tail(c.ln());
    let ln_q = LogLaw::new(market, Measure::RiskNeutral, tau).ln_upper_tail(c.ln());
    RatioRow {
        periods: n,
        strike_ratio: c,
        p: ln_p.exp(),
        q: ln_q.exp(),
        ratio: (ln_p - ln_q).exp(),
    }
}

/// `p(n) / q(n)` along the unit-budget strikes `c(n)`; here `q = 1/n`.
pub fn ratio_pq_growth(n_list: &[u32], market: &MarketParams) -> Result<Vec<RatioRow>> {
    c_growth(n_list, market)?
        .into_iter()
        .map(|row| Ok(ratio_row(row.periods, row.strike_ratio, market)))
        .collect()
}

/// `p / q` with the strike ratio held at `c` while `n` grows. The ratio tends
/// to the bounded short-horizon value `exp(ln c (mu - r) / sigma^2)`.
pub fn ratio_pq_fixed_strike(c: f64, n_list: &[u32], market: &MarketParams) -> Result<Vec<RatioRow>> {
    check_increasing(n_list)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(domain(format!("strike ratio must be positive, got {c}")));
    }
    Ok(n_list.iter().map(|&n| ratio_row(n, c, market)).collect())
}

/// Simulated beta of the strategy for each `n`, with the same seed for every
/// `n` so the comparison uses common random numbers. A budget-sized
/// configuration re-solves `c` for each `n`; a strike-sized one keeps `c`.
pub fn beta_convergence(cfg: &StrategyConfig, n_list: &[u32], num_paths: usize, seed: u64) -> Result<Vec<BetaRow>> {
    check_increasing(n_list)?;
    n_list
        .iter()
        .map(|&n| {
            let run = cfg.with_periods(n)?;
            let sim = simulate(&run, num_paths, seed)?;
            let corr = correlation(&sim.payoffs, &sim.regressor);
            Ok(BetaRow {
                periods: n,
                strike_ratio: sim.resolved.strike_ratio,
                beta: sim.stats.beta,
                correlation: corr,
            })
        })
        .collect()
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa > 0.0 && sbb > 0.0 {
        sab / (saa * sbb).sqrt()
    } else {
        0.0
    }
}

/// Budget-sized configuration of the unit-budget digital strategy.
pub fn unit_budget_digital(periods: u32, market: MarketParams) -> Result<StrategyConfig> {
    StrategyConfig::new(periods, Sizing::Budget(1.0), super::OptionFamily::Digital, market)
}
