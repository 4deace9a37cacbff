use crate::error::{domain, ensure_positive, Error, Result};
use crate::measure::{MarketParams, Measure};
use crate::pricing::{self, LogLaw, OptionSpec, Payoff};
use crate::root::bisect;

/// Bisection tolerance on `ln c`.
const LN_C_TOL: f64 = 0.0;
/// Search range for `ln c`; beyond it a price is numerically 0 or maximal.
const LN_C_LIMIT: f64 = 700.0;

/// Which of the budget `I` and the strike ratio `c` is chosen; the other is
/// implied by `n C(1, c) = I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sizing {
    /// Annual budget `I` in units of the initial spot.
    Budget(f64),
    /// Strike-to-spot ratio `c`.
    StrikeRatio(f64),
}

/// The contract bought each period, written relative to the spot at purchase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptionFamily {
    VanillaCall,
    Digital,
    /// Pays on `[c S, band c S]`; `band > 1`.
    DoubleDigital { band: f64 },
    PowerCall { power: f64 },
}

impl OptionFamily {
    /// Spot-relative payoff for strike ratio `c`.
    pub fn payoff(&self, c: f64) -> Payoff {
        match *self {
            OptionFamily::VanillaCall => Payoff::VanillaCall { strike: c },
            OptionFamily::Digital => Payoff::Digital { strike: c },
            OptionFamily::DoubleDigital { band } => Payoff::DoubleDigital {
                lower: c,
                upper: c * band,
            },
            OptionFamily::PowerCall { power } => Payoff::PowerCall { strike: c, power },
        }
    }

    pub fn spec(&self, c: f64, tau: f64) -> Result<OptionSpec> {
        match *self {
            OptionFamily::VanillaCall => OptionSpec::vanilla_call(c, tau),
            OptionFamily::Digital => OptionSpec::digital(c, tau),
            OptionFamily::DoubleDigital { band } => OptionSpec::double_digital(c, c * band, tau),
            OptionFamily::PowerCall { power } => OptionSpec::power_call(c, power, tau),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            OptionFamily::DoubleDigital { band } if !(band.is_finite() && band > 1.0) => {
                Err(domain(format!("double digital band must exceed 1, got {band}")))
            }
            OptionFamily::PowerCall { power } if !(power.is_finite() && power >= 0.0) => {
                Err(domain(format!("power must be finite and >= 0, got {power}")))
            }
            _ => Ok(()),
        }
    }

    /// Discounted price of one contract on a unit spot.
    pub fn unit_price(&self, c: f64, tau: f64, market: &MarketParams) -> Result<f64> {
        let discount = (-market.r() * tau).exp();
        let law = LogLaw::new(market, Measure::RiskNeutral, tau);
        Ok(match *self {
            OptionFamily::VanillaCall => pricing::unit_call_closed_form(c, tau, market),
            OptionFamily::Digital => discount * law.upper_tail(c.ln()),
            OptionFamily::DoubleDigital { band } => discount * law.interval(c.ln(), (c * band).ln()),
            OptionFamily::PowerCall { .. } => pricing::power_call_price(1.0, &self.spec(c, tau)?, market)?,
        })
    }

    /// Smallest `ln c` of the branch on which the unit price is strictly
    /// decreasing. Only the double digital has a finite one: its price peaks
    /// where the band is centred on the risk-neutral log mean.
    fn decreasing_from(&self, tau: f64, market: &MarketParams) -> f64 {
        match *self {
            OptionFamily::DoubleDigital { band } => {
                market.log_mean(Measure::RiskNeutral, tau) - 0.5 * band.ln()
            }
            _ => f64::NEG_INFINITY,
        }
    }
}

/// How idle cash and option proceeds are carried to year end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CashAccount {
    /// Bank account without interest; the Sharpe benchmark is 0.
    #[default]
    ZeroInterest,
    /// Cash accrues at the short rate `r`; the benchmark is `I e^r`.
    RiskFree,
}

/// Regressor for the strategy's beta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaRegressor {
    /// `S_1 / S_0 - 1`.
    #[default]
    GrossReturn,
    /// `ln(S_1 / S_0)`.
    LogReturn,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    pub periods: u32,
    pub sizing: Sizing,
    pub family: OptionFamily,
    pub market: MarketParams,
    pub cash: CashAccount,
    pub regressor: BetaRegressor,
}

/// A configuration with both `c` and `I` known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedStrategy {
    pub strike_ratio: f64,
    pub budget: f64,
    /// Per-period spend `I / n`, equal to the unit price at `c`.
    pub premium: f64,
    pub tau: f64,
}

impl StrategyConfig {
    pub fn new(periods: u32, sizing: Sizing, family: OptionFamily, market: MarketParams) -> Result<Self> {
        let cfg = Self {
            periods,
            sizing,
            family,
            market,
            cash: CashAccount::default(),
            regressor: BetaRegressor::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_cash(mut self, cash: CashAccount) -> Self {
        self.cash = cash;
        self
    }

    pub fn with_regressor(mut self, regressor: BetaRegressor) -> Self {
        self.regressor = regressor;
        self
    }

    pub fn with_periods(mut self, periods: u32) -> Result<Self> {
        self.periods = periods;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sizing(mut self, sizing: Sizing) -> Result<Self> {
        self.sizing = sizing;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.periods == 0 {
            return Err(domain("need at least one holding period"));
        }
        match self.sizing {
            Sizing::Budget(i) => ensure_positive("budget", i)?,
            Sizing::StrikeRatio(c) => ensure_positive("strike ratio", c)?,
        }
        self.family.validate()
    }

    pub fn tau(&self) -> f64 {
        1.0 / self.periods as f64
    }

    pub fn resolve(&self) -> Result<ResolvedStrategy> {
        self.validate()?;
        let tau = self.tau();
        let n = self.periods as f64;
        let (c, premium) = match self.sizing {
            Sizing::Budget(budget) => {
                let c = solve_c(budget, self.periods, &self.market, &self.family)?;
                (c, budget / n)
            }
            Sizing::StrikeRatio(c) => (c, self.family.unit_price(c, tau, &self.market)?),
        };
        Ok(ResolvedStrategy {
            strike_ratio: c,
            budget: premium * n,
            premium,
            tau,
        })
    }
}

/// The strike ratio `c` whose per-period unit price equals `budget / periods`.
///
/// Bisection on `ln c` over a bracket grown outward from `[-1, 1]` along the
/// branch where the price is strictly decreasing, so the root is unique.
pub fn solve_c(budget: f64, periods: u32, market: &MarketParams, family: &OptionFamily) -> Result<f64> {
    ensure_positive("budget", budget)?;
    if periods == 0 {
        return Err(domain("need at least one holding period"));
    }
    family.validate()?;
    let tau = 1.0 / periods as f64;
    let target = budget / periods as f64;
    let price = |ln_c: f64| family.unit_price(ln_c.exp(), tau, market);

    let floor = family.decreasing_from(tau, market);
    let mut lo = if floor.is_finite() { floor } else { -1.0 };
    let mut step = 1.0;
    let mut top = price(lo)?;
    while top <= target {
        if floor.is_finite() || lo < -LN_C_LIMIT {
            return Err(Error::InfeasibleBudget {
                spend: target,
                min: 0.0,
                max: top,
            });
        }
        lo -= step;
        step *= 2.0;
        top = price(lo)?;
    }

    let mut hi = lo.max(0.0) + 1.0;
    step = 1.0;
    while price(hi)? >= target {
        if hi > LN_C_LIMIT {
            return Err(Error::InfeasibleBudget {
                spend: target,
                min: price(hi)?,
                max: top,
            });
        }
        lo = hi;
        hi += step;
        step *= 2.0;
    }

    // price errors cannot occur inside a bracket whose ends priced fine, but
    // surface them rather than bisecting on garbage
    let mut failure = None;
    let root = bisect(
        |ln_c| match price(ln_c) {
            Ok(p) => p - target,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        LN_C_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(root?.exp())
}
