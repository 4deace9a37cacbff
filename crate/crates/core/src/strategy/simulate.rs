//! Monte Carlo execution of the strategy.
//!
//! Each path owns a ChaCha8 stream: the key comes from the master seed and
//! the stream id is the path index. A path's draws therefore do not depend
//! on which worker runs it or how paths are chunked, and summary statistics
//! are folded sequentially in path order afterwards, so results are
//! bit-identical for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::analytic::{benchmark, leftover_cash, proceeds_weights};
use super::config::{BetaRegressor, CashAccount, ResolvedStrategy, StrategyConfig};
use super::{Estimate, StrategyStats};
use crate::error::{domain, Error, Result};
use crate::measure::Measure;
use crate::pricing::Payoff;

pub const DEFAULT_CHUNK_SIZE: usize = 4096;

#[derive(Debug, Clone)]
pub struct Simulation {
    pub stats: StrategyStats,
    pub resolved: ResolvedStrategy,
    /// Year-end option proceeds per path.
    pub payoffs: Vec<f64>,
    /// Beta regressor per path (gross or log annual return of the underlying).
    pub regressor: Vec<f64>,
}

/// Everything that happened along one path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace {
    pub gross_returns: Vec<f64>,
    /// Payoff of the period's position, paid at the period's end.
    pub payoffs: Vec<f64>,
    /// Cash held right after each purchase.
    pub cash_after_purchase: Vec<f64>,
}

struct PathEngine {
    base: ChaCha8Rng,
    payoff: Payoff,
    log_mean: f64,
    log_std: f64,
    periods: u32,
}

impl PathEngine {
    fn new(cfg: &StrategyConfig, resolved: &ResolvedStrategy, seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
            payoff: cfg.family.payoff(resolved.strike_ratio),
            log_mean: cfg.market.log_mean(Measure::Physical, resolved.tau),
            log_std: cfg.market.log_std(resolved.tau),
            periods: cfg.periods,
        }
    }

    /// Runs path `index`, handing `(period, gross return, payoff)` to `visit`.
    fn run<F: FnMut(usize, f64, f64)>(&self, index: u64, mut visit: F) {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        for i in 0..self.periods as usize {
            let z: f64 = rng.sample(StandardNormal);
            let gross = (self.log_mean + self.log_std * z).exp();
            visit(i, gross, self.payoff.value(gross));
        }
    }
}

pub fn simulate(cfg: &StrategyConfig, num_paths: usize, seed: u64) -> Result<Simulation> {
    simulate_with(cfg, num_paths, seed, DEFAULT_CHUNK_SIZE)
}

/// [`simulate`] with an explicit work-chunk size.
pub fn simulate_with(cfg: &StrategyConfig, num_paths: usize, seed: u64, chunk_size: usize) -> Result<Simulation> {
    if num_paths < 2 {
        return Err(domain(format!("need at least 2 paths, got {num_paths}")));
    }
    if chunk_size == 0 {
        return Err(domain("chunk size must be positive"));
    }
    let resolved = cfg.resolve()?;
    if !(resolved.budget > 0.0) {
        return Err(Error::Degenerate(format!(
            "premium at c = {} underflows to zero",
            resolved.strike_ratio
        )));
    }
    let engine = PathEngine::new(cfg, &resolved, seed);
    let weights = proceeds_weights(cfg);

    let mut payoffs = vec![0.0; num_paths];
    let mut regressor = vec![0.0; num_paths];
    payoffs
        .par_chunks_mut(chunk_size)
        .zip(regressor.par_chunks_mut(chunk_size))
        .enumerate()
        .for_each(|(k, (pay, reg))| {
            for (j, (pay, reg)) in pay.iter_mut().zip(reg.iter_mut()).enumerate() {
                let index = (k * chunk_size + j) as u64;
                let mut proceeds = 0.0;
                let mut log_total = 0.0;
                engine.run(index, |i, gross, payoff| {
                    proceeds += weights[i] * payoff;
                    log_total += gross.ln();
                });
                *pay = proceeds;
                *reg = match cfg.regressor {
                    BetaRegressor::GrossReturn => log_total.exp_m1(),
                    BetaRegressor::LogReturn => log_total,
                };
            }
        });

    let stats = summarize(cfg, &resolved, &payoffs, &regressor)?;
    Ok(Simulation {
        stats,
        resolved,
        payoffs,
        regressor,
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn summarize(cfg: &StrategyConfig, resolved: &ResolvedStrategy, payoffs: &[f64], regressor: &[f64]) -> Result<StrategyStats> {
    let n = payoffs.len() as f64;
    let budget = resolved.budget;

    let m = mean(payoffs);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &y in payoffs {
        let d = y - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let var = m2 * n / (n - 1.0);
    let std = var.sqrt();

    let se_mean = std / n.sqrt();
    let se_std = if m2 > 0.0 {
        ((m4 - m2 * m2).max(0.0) / (4.0 * m2 * n)).sqrt()
    } else {
        0.0
    };

    let wealth = m + leftover_cash(cfg, resolved);
    let sharpe = (std > 0.0).then(|| {
        let sr = (wealth - benchmark(cfg, budget)) / std;
        let skew = m3 / m2.powf(1.5);
        let kurt = m4 / (m2 * m2);
        let v = (1.0 + 0.25 * sr * sr * (kurt - 1.0) - sr * skew).max(0.0) / n;
        Estimate::sampled(sr, v.sqrt())
    });

    // beta of W / I - 1; the deterministic leftover cash does not move it
    let x_bar = mean(regressor);
    let y_bar = m / budget;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &p) in regressor.iter().zip(payoffs) {
        let dx = x - x_bar;
        let dy = p / budget - y_bar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return Err(Error::Degenerate("underlying return has no sample variance".into()));
    }
    let beta = sxy / sxx;
    let resid = (syy - beta * sxy).max(0.0);
    let se_beta = if n > 2.0 { (resid / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };

    Ok(StrategyStats {
        budget,
        strike_ratio: resolved.strike_ratio,
        expected_payoff: Estimate::sampled(m, se_mean),
        payoff_std: Estimate::sampled(std, se_std),
        expected_return: Estimate::sampled((wealth - budget) / budget, se_mean / budget),
        sharpe,
        beta: Estimate::sampled(beta, se_beta),
    })
}

/// Replays path `index` of a simulation with `seed` period by period,
/// including the cash account.
pub fn trace_path(cfg: &StrategyConfig, seed: u64, index: u64) -> Result<PathTrace> {
    let resolved = cfg.resolve()?;
    let engine = PathEngine::new(cfg, &resolved, seed);
    let n = cfg.periods as usize;
    let r = match cfg.cash {
        CashAccount::ZeroInterest => 0.0,
        CashAccount::RiskFree => cfg.market.r(),
    };
    let tau = resolved.tau;
    let mut trace = PathTrace {
        gross_returns: Vec::with_capacity(n),
        payoffs: Vec::with_capacity(n),
        cash_after_purchase: Vec::with_capacity(n),
    };
    // proceeds of expired options, carried in the cash account
    let mut proceeds = 0.0;
    engine.run(index, |i, gross, payoff| {
        let reserve = if r == 0.0 {
            resolved.premium * (n - i - 1) as f64
        } else {
            let t = i as f64 * tau;
            let spent: f64 = (0..=i).map(|k| resolved.premium * (r * (t - k as f64 * tau)).exp()).sum();
            resolved.budget * (r * t).exp() - spent
        };
        trace.cash_after_purchase.push(reserve + proceeds);
        trace.gross_returns.push(gross);
        trace.payoffs.push(payoff);
        proceeds = proceeds * (r * tau).exp() + payoff;
    });
    Ok(trace)
}
