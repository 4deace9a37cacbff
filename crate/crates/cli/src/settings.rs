//! Flat `key = value` configuration.
//!
//! Values are layered: built-in defaults, then a config file, then
//! command-line overrides. Blank lines and lines starting with `#` are
//! skipped in files. Lists are comma or semicolon separated.

use anyhow::{anyhow, bail, Context, Result};
use otmcall::{BetaRegressor, CashAccount, MarketParams, OptionFamily, SmileParams};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interest {
    Zero,
    Rate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub mu: f64,
    pub r: f64,
    pub sigma: f64,
    pub sigmas: Vec<f64>,
    pub periods: u32,
    pub j_min: u32,
    pub j_max: u32,
    pub c_step: f64,
    pub c: Option<f64>,
    pub budget: Option<f64>,
    pub family: String,
    pub band: f64,
    pub power: f64,
    pub paths: usize,
    pub seed: u64,
    pub chunk_size: usize,
    pub interest: Interest,
    pub regressor: BetaRegressor,
    // price
    pub kind: String,
    pub spot: f64,
    pub strike: f64,
    pub upper: Option<f64>,
    pub tau: f64,
    // ratio
    pub taus: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub x_step: f64,
    // asymptotic checks
    pub n_list: Vec<u32>,
    pub beta_n_list: Vec<u32>,
    pub beta_paths: usize,
    pub beta_threshold: f64,
    pub strikes: Vec<f64>,
    pub fixed_c: f64,
    // smile
    pub sigma0: f64,
    pub r_plus: f64,
    pub r_minus: f64,
    pub flat_sigma: Option<f64>,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_step: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            mu: 0.1,
            r: 0.04,
            sigma: 0.2,
            sigmas: vec![0.2, 0.3, 0.4, 0.5],
            periods: 12,
            j_min: 1,
            j_max: 50,
            c_step: 0.005,
            c: None,
            budget: None,
            family: "call".into(),
            band: 1.05,
            power: 2.0,
            paths: 0,
            seed: 42,
            chunk_size: otmcall::strategy::DEFAULT_CHUNK_SIZE,
            interest: Interest::Zero,
            regressor: BetaRegressor::GrossReturn,
            kind: "call".into(),
            spot: 1.0,
            strike: 1.1,
            upper: None,
            tau: 1.0 / 12.0,
            taus: vec![1.0 / 252.0, 1.0 / 12.0, 1.0],
            x_min: -0.5,
            x_max: 0.5,
            x_step: 0.05,
            n_list: vec![12, 60, 252, 1000],
            beta_n_list: vec![12, 240],
            beta_paths: 100_000,
            beta_threshold: 0.05,
            strikes: vec![1.05, 1.1, 1.2],
            fixed_c: 1.01,
            sigma0: 0.2,
            r_plus: 2.0,
            r_minus: -2.0,
            flat_sigma: None,
            grid_min: -5.0,
            grid_max: 5.0,
            grid_step: 0.01,
        }
    }
}

fn num(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().with_context(|| format!("{key}: `{v}` is not a number"))?;
    if !x.is_finite() {
        bail!("{key}: `{v}` is not finite");
    }
    Ok(x)
}

fn int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| anyhow!("{key}: `{v}` is not a non-negative integer"))
}

fn list<T, F: Fn(&str, &str) -> Result<T>>(key: &str, v: &str, parse: F) -> Result<Vec<T>> {
    let items: Vec<T> = v
        .split([',', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        bail!("{key}: empty list");
    }
    Ok(items)
}

fn optional(key: &str, v: &str) -> Result<Option<f64>> {
    if v.is_empty() || v == "none" {
        Ok(None)
    } else {
        num(key, v).map(Some)
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "mu" => self.mu = num(key, v)?,
            "r" => self.r = num(key, v)?,
            "sigma" => self.sigma = num(key, v)?,
            "sigmas" => self.sigmas = list(key, v, num)?,
            "n" | "periods" => self.periods = int(key, v)?,
            "j_min" => self.j_min = int(key, v)?,
            "j_max" => self.j_max = int(key, v)?,
            "c_step" => self.c_step = num(key, v)?,
            "c" => self.c = optional(key, v)?,
            "budget" => self.budget = optional(key, v)?,
            "family" => self.family = v.to_string(),
            "band" => self.band = num(key, v)?,
            "power" => self.power = num(key, v)?,
            "paths" => self.paths = int(key, v)?,
            "seed" => self.seed = int(key, v)?,
            "chunk_size" => self.chunk_size = int(key, v)?,
            "interest" => {
                self.interest = match v {
                    "zero" => Interest::Zero,
                    "r" => Interest::Rate,
                    _ => bail!("interest: expected `zero` or `r`, got `{v}`"),
                }
            }
            "regressor" => {
                self.regressor = match v {
                    "gross" => BetaRegressor::GrossReturn,
                    "log" => BetaRegressor::LogReturn,
                    _ => bail!("regressor: expected `gross` or `log`, got `{v}`"),
                }
            }
            "kind" => self.kind = v.to_string(),
            "spot" => self.spot = num(key, v)?,
            "strike" => self.strike = num(key, v)?,
            "upper" => self.upper = optional(key, v)?,
            "tau" => self.tau = num(key, v)?,
            "taus" => self.taus = list(key, v, num)?,
            "x_min" => self.x_min = num(key, v)?,
            "x_max" => self.x_max = num(key, v)?,
            "x_step" => self.x_step = num(key, v)?,
            "n_list" => self.n_list = list(key, v, int)?,
            "beta_n_list" => self.beta_n_list = list(key, v, int)?,
            "beta_paths" => self.beta_paths = int(key, v)?,
            "beta_threshold" => self.beta_threshold = num(key, v)?,
            "strikes" => self.strikes = list(key, v, num)?,
            "fixed_c" => self.fixed_c = num(key, v)?,
            "sigma0" => self.sigma0 = num(key, v)?,
            "r_plus" => self.r_plus = num(key, v)?,
            "r_minus" => self.r_minus = num(key, v)?,
            "flat_sigma" => self.flat_sigma = optional(key, v)?,
            "grid_min" => self.grid_min = num(key, v)?,
            "grid_max" => self.grid_max = num(key, v)?,
            "grid_step" => self.grid_step = num(key, v)?,
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    /// Applies `key = value` lines.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", lineno + 1))?;
            self.set(k, v).with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        self.apply_text(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Applies a `key=value` override from the command line.
    pub fn apply_override(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("override `{pair}` is not key=value"))?;
        self.set(k, v)
    }

    pub fn market(&self) -> Result<MarketParams> {
        Ok(MarketParams::new(self.mu, self.r, self.sigma)?)
    }

    pub fn market_with_sigma(&self, sigma: f64) -> Result<MarketParams> {
        Ok(MarketParams::new(self.mu, self.r, sigma)?)
    }

    pub fn option_family(&self) -> Result<OptionFamily> {
        Ok(match self.family.as_str() {
            "call" => OptionFamily::VanillaCall,
            "digital" => OptionFamily::Digital,
            "double-digital" => OptionFamily::DoubleDigital { band: self.band },
            "power" => OptionFamily::PowerCall { power: self.power },
            other => bail!("family: expected call, digital, double-digital or power, got `{other}`"),
        })
    }

    pub fn cash(&self) -> CashAccount {
        match self.interest {
            Interest::Zero => CashAccount::ZeroInterest,
            Interest::Rate => CashAccount::RiskFree,
        }
    }

    pub fn smile_params(&self) -> Result<SmileParams> {
        Ok(SmileParams::new(self.sigma0, self.r_plus, self.r_minus)?)
    }

    pub fn interest_name(&self) -> &'static str {
        match self.interest {
            Interest::Zero => "zero",
            Interest::Rate => "r",
        }
    }

    pub fn regressor_name(&self) -> &'static str {
        match self.regressor {
            BetaRegressor::GrossReturn => "gross",
            BetaRegressor::LogReturn => "log",
        }
    }

    /// Metadata fragment naming the market and strategy conventions.
    pub fn describe_market(&self) -> String {
        format!("mu={} r={}", self.mu, self.r)
    }

    pub fn describe_strategy(&self) -> String {
        let family = match self.family.as_str() {
            "double-digital" => format!("double-digital band={}", self.band),
            "power" => format!("power p={}", self.power),
            f => f.to_string(),
        };
        format!(
            "n={} family={family} interest={} regressor={} premium=discounted paths={} seed={} chunk_size={}",
            self.periods,
            self.interest_name(),
            self.regressor_name(),
            self.paths,
            self.seed,
            self.chunk_size
        )
    }

    pub fn sigmas_text(&self) -> String {
        join(&self.sigmas)
    }

    pub fn list_text<T: ToString>(xs: &[T]) -> String {
        join(xs)
    }
}
