//! Measure analytics, option valuation and a sequential out-of-the-money
//! option-buying strategy in the Black-Scholes-Merton world.
//!
//! The crate is organised bottom-up:
//!
//! - [`measure`]: densities of the log-return under the physical measure `P`
//!   and the risk-neutral measure `Q`, the Radon-Nikodym ratio `dQ/dP`, its
//!   short-horizon limit and the critical ("inversion") volatility.
//! - [`pricing`]: vanilla, digital, double digital and power calls, priced
//!   under `Q` and described under `P`, with closed forms cross-checked by
//!   adaptive quadrature.
//! - [`strategy`]: the self-financing schedule that buys one fresh
//!   out-of-the-money option per holding period, analytic annual statistics,
//!   a reproducible Monte Carlo engine and the divergence/zero-beta checks.
//! - [`smile`]: the bounded measure-ratio construction and the heuristic
//!   volatility smile it induces.
//!
//! Numerical plumbing lives in [`normal`], [`quadrature`] and [`root`].

pub mod error;
pub mod measure;
pub mod normal;
pub mod pricing;
pub mod quadrature;
pub mod root;
pub mod smile;
pub mod strategy;

pub use error::{Error, Result};
pub use measure::{LogReturn, MarketParams, Measure};
pub use pricing::{Discounting, OptionSpec, Payoff, Valuation};
pub use smile::SmileParams;
pub use strategy::{
    BetaRegressor, CashAccount, Estimate, OptionFamily, Sizing, StrategyConfig, StrategyStats,
};
