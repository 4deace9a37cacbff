//! The sequential option-buying strategy.
//!
//! The year is cut into `n` holding periods. At the start of period `i` the
//! strategy buys `1/S_{t_i}` options struck at `c S_{t_i}` and expiring at
//! `t_{i+1}`. Because every contract is homogeneous in the spot, each period
//! costs the same `C(1, c)` and pays `f(G_i)` where `G_i = S_{t_{i+1}}/S_{t_i}`
//! is the period's gross return; the `f(G_i)` are i.i.d. The strike ratio
//! `c` and the annual budget `I = n C(1, c)` determine each other.

mod analytic;
mod asymptotics;
mod config;
mod simulate;

pub use analytic::{analytic_annual_stats, binomial_sharpe, binomial_sharpe_lower_bound, per_period_moments, PeriodMoments};
pub use asymptotics::{
    beta_convergence, c_growth, ratio_pq_fixed_strike, ratio_pq_growth, unit_budget_digital, BetaRow,
    GrowthRow, RatioRow,
};
pub use config::{
    solve_c, BetaRegressor, CashAccount, OptionFamily, ResolvedStrategy, Sizing, StrategyConfig,
};
pub use simulate::{simulate, simulate_with, trace_path, PathTrace, Simulation, DEFAULT_CHUNK_SIZE};

/// A statistic, with its Monte Carlo standard error when it was estimated
/// from samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: Option<f64>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: None,
        }
    }

    pub fn sampled(value: f64, std_error: f64) -> Self {
        Self {
            value,
            std_error: Some(std_error),
        }
    }

    /// Distance to `target` in standard errors; infinite for exact values
    /// that differ.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = self.value - target;
        match self.std_error {
            Some(se) if se > 0.0 => diff / se,
            _ if diff == 0.0 => 0.0,
            _ => f64::INFINITY.copysign(diff),
        }
    }
}

/// Annual statistics of the strategy.
///
/// `expected_payoff` and `payoff_std` describe the option proceeds valued at
/// year end. `sharpe` is `(E[W] - B) / std(W)`, the rate-form Sharpe ratio
/// scaled by the budget, where `W` is terminal wealth and `B` the benchmark:
/// the budget itself under the zero-interest account, or the budget grown at
/// `r` under the risk-free account. `beta` regresses `W / I - 1` on the
/// underlying's annual return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyStats {
    pub budget: f64,
    pub strike_ratio: f64,
    pub expected_payoff: Estimate,
    pub payoff_std: Estimate,
    /// `(E[W] - I) / I`.
    pub expected_return: Estimate,
    /// `None` when the sampled payoff has no spread.
    pub sharpe: Option<Estimate>,
    pub beta: Estimate,
}
