//! Log-return densities under the physical and risk-neutral measures and the
//! state-price ratio between them.
//!
//! Over a horizon `tau` the log gross return `x = ln(S_tau / S_0)` is normal
//! with variance `sigma^2 tau` under both measures. Only the location moves:
//! `(mu - sigma^2/2) tau` under `P` and `(r - sigma^2/2) tau` under `Q`.
//! Densities here are densities of `x`; the lognormal `1/y` kernel in price
//! space is the change of variables `y = S_0 e^x`.

use crate::error::{domain, ensure_finite, ensure_positive, Result};
use crate::normal;

/// The market: drift `mu`, short rate `r` and volatility `sigma`, all per
/// annum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    mu: f64,
    r: f64,
    sigma: f64,
}

impl MarketParams {
    pub fn new(mu: f64, r: f64, sigma: f64) -> Result<Self> {
        ensure_finite("mu", mu)?;
        ensure_finite("r", r)?;
        ensure_positive("sigma", sigma)?;
        Ok(Self { mu, r, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.mu, self.r, sigma)
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(mu, self.r, self.sigma)
    }

    /// `mu > r`: the risky asset earns a premium over the bank account.
    pub fn risk_premium_positive(&self) -> bool {
        self.mu > self.r
    }

    /// `(mu + r) / sigma^2`. Above 1, shortening the horizon pushes `dQ/dP`
    /// down toward its short-time limit; at exactly 1 the ratio does not
    /// depend on the horizon at all.
    pub fn inversion_ratio(&self) -> f64 {
        (self.mu + self.r) / (self.sigma * self.sigma)
    }

    pub fn drift(&self, measure: Measure) -> f64 {
        match measure {
            Measure::Physical => self.mu,
            Measure::RiskNeutral => self.r,
        }
    }

    /// Mean of the log return over `tau`.
    pub fn log_mean(&self, measure: Measure, tau: f64) -> f64 {
        (self.drift(measure) - 0.5 * self.sigma * self.sigma) * tau
    }

    /// Standard deviation of the log return over `tau`.
    pub fn log_std(&self, tau: f64) -> f64 {
        self.sigma * tau.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Physical,
    RiskNeutral,
}

/// A log gross return `x = ln(S_tau / S_0)` realised over `tau` years.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogReturn {
    x: f64,
    tau: f64,
}

impl LogReturn {
    pub fn new(x: f64, tau: f64) -> Result<Self> {
        ensure_finite("log return", x)?;
        ensure_positive("tau", tau)?;
        Ok(Self { x, tau })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

pub fn log_density(lr: &LogReturn, p: &MarketParams, measure: Measure) -> f64 {
    ln_log_density(lr, p, measure).exp()
}

/// Natural log of [`log_density`]; finite where the density itself underflows.
pub fn ln_log_density(lr: &LogReturn, p: &MarketParams, measure: Measure) -> f64 {
    let s = p.log_std(lr.tau);
    normal::ln_pdf((lr.x - p.log_mean(measure, lr.tau)) / s) - s.ln()
}

/// Density of `x` under `P`: normal with mean `(mu - sigma^2/2) tau` and
/// variance `sigma^2 tau`.
pub fn physical_log_density(lr: &LogReturn, p: &MarketParams) -> f64 {
    log_density(lr, p, Measure::Physical)
}

/// Density of `x` under `Q`: as under `P` with the drift replaced by `r`.
pub fn risk_neutral_log_density(lr: &LogReturn, p: &MarketParams) -> f64 {
    log_density(lr, p, Measure::RiskNeutral)
}

/// `ln(dQ/dP)` at `x`, in closed form.
pub fn ln_rn_ratio(lr: &LogReturn, p: &MarketParams) -> f64 {
    let var = p.sigma * p.sigma;
    let tau = lr.tau;
    (p.r - p.mu) * (lr.x / var - tau * (p.r + p.mu) / (2.0 * var) + 0.5 * tau)
}

/// The state-price ratio `dQ/dP` at log return `x`:
///
/// ```text
/// exp((r - mu) (x / sigma^2 - tau (r + mu) / (2 sigma^2) + tau / 2))
/// ```
///
/// For `mu > r` it is strictly decreasing in `x`, tending to 0 in the upper
/// tail and to infinity in the lower tail.
pub fn rn_ratio(lr: &LogReturn, p: &MarketParams) -> f64 {
    ln_rn_ratio(lr, p).exp()
}

/// `dP/dQ`, the reciprocal of [`rn_ratio`].
pub fn physical_ratio(lr: &LogReturn, p: &MarketParams) -> f64 {
    (-ln_rn_ratio(lr, p)).exp()
}

/// `tau -> 0` limit of [`rn_ratio`] at log-moneyness `x`: `exp(x (r - mu) / sigma^2)`.
/// Equals 1 at the money.
pub fn short_time_ratio(x: f64, p: &MarketParams) -> Result<f64> {
    ensure_finite("log-moneyness", x)?;
    Ok((x * (p.r - p.mu) / (p.sigma * p.sigma)).exp())
}

/// `exp(x (mu - r) / sigma^2)`, the short-horizon `dP/dQ`.
pub fn short_time_physical_ratio(x: f64, p: &MarketParams) -> Result<f64> {
    ensure_finite("log-moneyness", x)?;
    Ok((x * (p.mu - p.r) / (p.sigma * p.sigma)).exp())
}

/// Log return at which `dQ/dP = 1`: `tau ((r + mu) - sigma^2) / 2`.
pub fn neutral_point(tau: f64, p: &MarketParams) -> f64 {
    0.5 * tau * ((p.r + p.mu) - p.sigma * p.sigma)
}

/// The volatility `sqrt(mu + r)` at which the horizon term of the ratio
/// vanishes, so `rn_ratio` coincides with `short_time_ratio` for every `tau`.
/// Only `mu` and `r` are used.
pub fn critical_volatility(p: &MarketParams) -> Result<f64> {
    let level = p.mu + p.r;
    if level > 0.0 {
        Ok(level.sqrt())
    } else {
        Err(domain(format!(
            "no inversion level: mu + r = {level} is not positive"
        )))
    }
}
