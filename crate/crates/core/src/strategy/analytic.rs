use super::config::{BetaRegressor, CashAccount, OptionFamily, ResolvedStrategy, StrategyConfig};
use super::{Estimate, StrategyStats};
use crate::error::{Error, Result};
use crate::measure::{MarketParams, Measure};
use crate::pricing::{relative_physical_moments, LogLaw, Payoff};

/// Physical moments of one period's payoff `f(G)` on a unit spot, plus its
/// covariances with the period's gross and log return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodMoments {
    pub mean: f64,
    pub variance: f64,
    /// `Cov(f(G), G)`.
    pub cov_gross: f64,
    /// `Cov(f(G), ln G)`.
    pub cov_log: f64,
}

/// Moments of the payoff of one holding period, identical for every period.
pub fn per_period_moments(
    c: f64,
    periods: u32,
    market: &MarketParams,
    family: &OptionFamily,
) -> Result<PeriodMoments> {
    let tau = 1.0 / periods as f64;
    let payoff = family.payoff(c);
    let law = LogLaw::new(market, Measure::Physical, tau);

    let (mean, variance) = match payoff {
        Payoff::Digital { strike } => bernoulli(law.upper_tail(strike.ln())),
        Payoff::DoubleDigital { lower, upper } => bernoulli(law.interval(lower.ln(), upper.ln())),
        _ => {
            let m = relative_physical_moments(&payoff, market, tau)?;
            (m.mean, m.std * m.std)
        }
    };

    let growth = payoff.degree();
    let support = match payoff {
        Payoff::DoubleDigital { lower, upper } => (lower.ln(), upper.ln()),
        _ => (c.ln(), f64::INFINITY),
    };
    let kinks = [support.0, support.1];
    let gross_mean = (market.mu() * tau).exp();
    let cov_gross = law.expect(
        |u| payoff.value(u.exp()) * (u.exp() - gross_mean),
        support,
        &kinks,
        growth + 1.0,
    )?;
    let cov_log = law.expect(|u| payoff.value(u.exp()) * (u - law.mean), support, &kinks, growth)?;

    Ok(PeriodMoments {
        mean,
        variance,
        cov_gross,
        cov_log,
    })
}

fn bernoulli(p: f64) -> (f64, f64) {
    (p, p * (1.0 - p))
}

/// Year-end value of one unit paid at the end of period `i`.
pub(crate) fn proceeds_weights(cfg: &StrategyConfig) -> Vec<f64> {
    let n = cfg.periods as f64;
    (0..cfg.periods)
        .map(|i| match cfg.cash {
            CashAccount::ZeroInterest => 1.0,
            CashAccount::RiskFree => (cfg.market.r() * (1.0 - (i + 1) as f64 / n)).exp(),
        })
        .collect()
}

/// Cash left at year end after paying every premium out of the budget.
pub(crate) fn leftover_cash(cfg: &StrategyConfig, resolved: &ResolvedStrategy) -> f64 {
    match cfg.cash {
        CashAccount::ZeroInterest => 0.0,
        CashAccount::RiskFree => {
            let r = cfg.market.r();
            let n = cfg.periods as f64;
            let spent: f64 = (0..cfg.periods)
                .map(|i| resolved.premium * (r * (1.0 - i as f64 / n)).exp())
                .sum();
            resolved.budget * r.exp() - spent
        }
    }
}

/// Year-end wealth the budget would reach in the cash account alone.
pub(crate) fn benchmark(cfg: &StrategyConfig, budget: f64) -> f64 {
    match cfg.cash {
        CashAccount::ZeroInterest => budget,
        CashAccount::RiskFree => budget * cfg.market.r().exp(),
    }
}

/// Closed-form annual statistics from the per-period moments and
/// independence across periods.
pub fn analytic_annual_stats(cfg: &StrategyConfig) -> Result<StrategyStats> {
    let resolved = cfg.resolve()?;
    let pm = per_period_moments(resolved.strike_ratio, cfg.periods, &cfg.market, &cfg.family)?;
    let budget = resolved.budget;
    if !(budget > 0.0) {
        return Err(Error::Degenerate(format!(
            "premium at c = {} underflows to zero",
            resolved.strike_ratio
        )));
    }

    let weights = proceeds_weights(cfg);
    let sum_w: f64 = weights.iter().sum();
    let sum_w2: f64 = weights.iter().map(|w| w * w).sum();

    let expected_payoff = pm.mean * sum_w;
    let variance = pm.variance * sum_w2;
    if !(variance > 0.0) {
        return Err(Error::Degenerate(format!(
            "annual payoff variance is {variance:e} at c = {}",
            resolved.strike_ratio
        )));
    }
    let std = variance.sqrt();
    let wealth = expected_payoff + leftover_cash(cfg, &resolved);
    let sharpe = (wealth - benchmark(cfg, budget)) / std;

    let (mu, sigma) = (cfg.market.mu(), cfg.market.sigma());
    let tau = resolved.tau;
    let (cov, var_x) = match cfg.regressor {
        BetaRegressor::GrossReturn => {
            // Cov(sum w_i f_i, prod G_j) = sum_i w_i Cov(f_i, G_i) E[G]^{n-1}
            let others = (mu * tau * (cfg.periods as f64 - 1.0)).exp();
            (sum_w * pm.cov_gross * others, (2.0 * mu).exp() * (sigma * sigma).exp_m1())
        }
        BetaRegressor::LogReturn => (sum_w * pm.cov_log, sigma * sigma),
    };

    Ok(StrategyStats {
        budget,
        strike_ratio: resolved.strike_ratio,
        expected_payoff: Estimate::exact(expected_payoff),
        payoff_std: Estimate::exact(std),
        expected_return: Estimate::exact((wealth - budget) / budget),
        sharpe: Some(Estimate::exact(sharpe)),
        beta: Estimate::exact(cov / (budget * var_x)),
    })
}

/// Sharpe ratio of a sequence of independent unit bets with trigger
/// probabilities `probs` bought for a total of `budget`:
/// `(sum p - budget) / sqrt(sum p (1 - p))`.
pub fn binomial_sharpe(probs: &[f64], budget: f64) -> Result<f64> {
    let total: f64 = probs.iter().sum();
    let var: f64 = probs.iter().map(|p| p * (1.0 - p)).sum();
    if !(var > 0.0) {
        return Err(Error::Degenerate("binomial payoff has zero variance".into()));
    }
    Ok((total - budget) / var.sqrt())
}

/// `(sum p - budget) / sqrt(sum p)`, a lower bound on [`binomial_sharpe`]
/// whenever `sum p >= budget`.
pub fn binomial_sharpe_lower_bound(probs: &[f64], budget: f64) -> Result<f64> {
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate("no trigger probability".into()));
    }
    Ok((total - budget) / total.sqrt())
}
