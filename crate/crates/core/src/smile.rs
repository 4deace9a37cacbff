//! A volatility smile induced by bounding the short-horizon measure ratio.
//!
//! With a flat volatility the short-horizon ratio `dP/dQ ~ exp(x (mu - r) / sigma^2)`
//! is unbounded in the log-moneyness `x = ln(K / S_0)`. Requiring instead
//!
//! ```text
//! R_- < x (mu - r) / sigma(x)^2 < R_+
//! ```
//!
//! forces `sigma(x)` to grow like `sqrt(|x| (mu - r) / R)` in the wings. The
//! curve built here interpolates the two wings with
//! `L(x) = sign(x) (1 - e^{-sqrt|x|}) R` and adds a base level `sigma_0`:
//!
//! ```text
//! sigma(x) = sigma_0 + sqrt(x (mu - r) / L(x)),   sigma(0) = sigma_0.
//! ```
//!
//! The construction is purely formal. Buying pressure on short-dated OTM calls
//! would intuitively lower implied volatility; the bound above raises it.

use crate::error::{domain, ensure_positive, Result};
use crate::measure::MarketParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmileParams {
    sigma0: f64,
    r_plus: f64,
    r_minus: f64,
}

impl SmileParams {
    pub fn new(sigma0: f64, r_plus: f64, r_minus: f64) -> Result<Self> {
        ensure_positive("sigma0", sigma0)?;
        ensure_positive("R+", r_plus)?;
        if !(r_minus.is_finite() && r_minus < 0.0) {
            return Err(domain(format!("R- must be negative and finite, got {r_minus}")));
        }
        Ok(Self {
            sigma0,
            r_plus,
            r_minus,
        })
    }

    /// `R_+ = -R_- = bound`.
    pub fn symmetric(sigma0: f64, bound: f64) -> Result<Self> {
        Self::new(sigma0, bound, -bound)
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn r_plus(&self) -> f64 {
        self.r_plus
    }

    pub fn r_minus(&self) -> f64 {
        self.r_minus
    }

    pub fn is_symmetric(&self) -> bool {
        self.r_plus == -self.r_minus
    }

    /// Bound magnitude governing the wing on the side of `x`.
    fn bound_for(&self, x: f64) -> f64 {
        if x < 0.0 {
            -self.r_minus
        } else {
            self.r_plus
        }
    }
}

/// `L(x) = sign(x) (1 - e^{-sqrt|x|}) R`, with `sign(0) = 0`. Odd, bounded by
/// `R` in absolute value, tends to `+-R`.
pub fn logistic_l(x: f64, bound: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x.signum() * -(-x.abs().sqrt()).exp_m1() * bound
}

/// The heuristic smile `sigma(x)` at log-moneyness `x`. Asymmetric bounds
/// scale `L` by `R_+` for `x > 0` and by `|R_-|` for `x < 0`.
pub fn smile_sigma(x: f64, sp: &SmileParams, market: &MarketParams) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("log-moneyness must be finite, got {x}")));
    }
    let premium = market.mu() - market.r();
    if !(premium > 0.0) {
        return Err(domain(format!(
            "smile direction undefined without a positive risk premium (mu - r = {premium})"
        )));
    }
    if x == 0.0 {
        return Ok(sp.sigma0);
    }
    // x / L(x) = |x| / ((1 - e^{-sqrt|x|}) R), positive on both sides
    let ratio = x.abs() / (-(-x.abs().sqrt()).exp_m1() * sp.bound_for(x));
    Ok(sp.sigma0 + (premium * ratio).sqrt())
}

/// The wing asymptote `sigma_0 + sqrt(|x| (mu - r) / R)`.
pub fn wing_asymptote(x: f64, sp: &SmileParams, market: &MarketParams) -> f64 {
    sp.sigma0 + (x.abs() * (market.mu() - market.r()) / sp.bound_for(x)).sqrt()
}

/// Evenly spaced log-moneyness grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            lo: -5.0,
            hi: 5.0,
            step: 0.01,
        }
    }
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.hi >= self.lo) {
            return Err(domain(format!("invalid grid [{}, {}]", self.lo, self.hi)));
        }
        ensure_positive("grid step", self.step)?;
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        Ok((0..=count).map(|k| self.lo + k as f64 * self.step).collect())
    }
}

pub fn smile_curve(sp: &SmileParams, market: &MarketParams, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter().map(|&x| Ok((x, smile_sigma(x, sp, market)?))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// `x (mu - r) / sigma^2 >= R_+`
    Upper,
    /// `x (mu - r) / sigma^2 <= R_-`
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditPoint {
    pub x: f64,
    pub sigma: f64,
    pub ratio: f64,
    pub violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub points: Vec<AuditPoint>,
}

impl AuditReport {
    pub fn violations(&self) -> impl Iterator<Item = &AuditPoint> {
        self.points.iter().filter(|p| p.violation.is_some())
    }

    pub fn violation_count(&self) -> usize {
        self.violations().count()
    }

    pub fn passed(&self) -> bool {
        self.violation_count() == 0
    }
}

/// Evaluates `x (mu - r) / sigma(x)^2` on `grid` and flags every point outside
/// the open band `(R_-, R_+)`.
pub fn ratio_bound_audit<F>(sigma_curve: F, sp: &SmileParams, market: &MarketParams, grid: &[f64]) -> Result<AuditReport>
where
    F: Fn(f64) -> f64,
{
    let premium = market.mu() - market.r();
    let points = grid
        .iter()
        .map(|&x| {
            let sigma = sigma_curve(x);
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(domain(format!("sigma({x}) = {sigma} is not positive")));
            }
            let ratio = x * premium / (sigma * sigma);
            let violation = if ratio >= sp.r_plus {
                Some(Violation::Upper)
            } else if ratio <= sp.r_minus {
                Some(Violation::Lower)
            } else {
                None
            };
            Ok(AuditPoint {
                x,
                sigma,
                ratio,
                violation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AuditReport { points })
}

/// `exp(R) - 1`: the least upper bound on short-horizon expected returns
/// once the measure ratio is capped at `e^R`.
pub fn max_expected_return(sp: &SmileParams) -> Result<f64> {
    if !sp.is_symmetric() {
        return Err(domain("max expected return needs R+ = -R-"));
    }
    Ok(sp.r_plus.exp_m1())
}

/// `exp(R) - 1` for a bare bound; `R = 0` gives 0.
pub fn max_expected_return_for(bound: f64) -> Result<f64> {
    if !(bound.is_finite() && bound >= 0.0) {
        return Err(domain(format!("bound must be >= 0, got {bound}")));
    }
    Ok(bound.exp_m1())
}
