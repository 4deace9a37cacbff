//! Valuation under `Q` and payoff moments under `P` for European vanilla,
//! digital, double digital and power calls.
//!
//! Every contract here is homogeneous in the spot: with strike-to-spot ratio
//! `c = K / S_t` the payoff in units of `S_t^degree` depends only on the gross
//! return `G = S_T / S_t`. All integrals are therefore taken over
//! `u = ln G`, which is normal under either measure, and scaled back to the
//! spot at the end.
//!
//! Closed forms (via Gaussian tails) are the primary route for vanilla,
//! digital and double digital contracts; the quadrature routes exist to check
//! them and to value power payoffs, which have no convenient closed form.

use crate::error::{domain, ensure_positive, Error, Result};
use crate::measure::{MarketParams, Measure};
use crate::normal;
use crate::quadrature::Integrator;

/// Gaussian truncation half-width, in standard deviations of the log return.
pub const TRUNCATION_SDS: f64 = 12.0;

/// Relative tolerance handed to the adaptive quadrature.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;

/// Trigger probabilities below this are refused by [`digital_expected_return`].
pub const PROBABILITY_GUARD: f64 = 1e-300;

/// Whether a premium is discounted by `e^{-r tau}` when it is compared with
/// an undiscounted physical expectation.
///
/// [`Discounting::Ignore`] is the zero-interest bank-account convention: the
/// discount factor is treated as 1, so an expected return is simply
/// `E_P[payoff] / E_Q[payoff] - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Discounting {
    #[default]
    Ignore,
    Apply,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payoff {
    /// `(S_T - K)^+`
    VanillaCall { strike: f64 },
    /// `1{S_T >= K}`
    Digital { strike: f64 },
    /// `1{a <= S_T <= b}`
    DoubleDigital { lower: f64, upper: f64 },
    /// `((S_T - K)^+)^p`, with `0^0 = 0` so that `p = 0` is a digital.
    PowerCall { strike: f64, power: f64 },
}

impl Payoff {
    /// Payoff at terminal price `s_t`.
    pub fn value(&self, s_t: f64) -> f64 {
        match *self {
            Payoff::VanillaCall { strike } => (s_t - strike).max(0.0),
            Payoff::Digital { strike } => indicator(s_t >= strike),
            Payoff::DoubleDigital { lower, upper } => indicator(lower <= s_t && s_t <= upper),
            Payoff::PowerCall { strike, power } => powered_excess(s_t - strike, power),
        }
    }

    /// Homogeneity degree `d`: `payoff(l S) = l^d payoff(S)` when the strikes
    /// scale with `l` too.
    pub fn degree(&self) -> f64 {
        match *self {
            Payoff::VanillaCall { .. } => 1.0,
            Payoff::Digital { .. } | Payoff::DoubleDigital { .. } => 0.0,
            Payoff::PowerCall { power, .. } => power,
        }
    }

    /// The same contract written on the gross return `S_T / spot`.
    pub fn relative_to(&self, spot: f64) -> Payoff {
        match *self {
            Payoff::VanillaCall { strike } => Payoff::VanillaCall { strike: strike / spot },
            Payoff::Digital { strike } => Payoff::Digital { strike: strike / spot },
            Payoff::DoubleDigital { lower, upper } => Payoff::DoubleDigital {
                lower: lower / spot,
                upper: upper / spot,
            },
            Payoff::PowerCall { strike, power } => Payoff::PowerCall {
                strike: strike / spot,
                power,
            },
        }
    }

    /// Log-price interval outside which the payoff vanishes.
    fn log_support(&self) -> (f64, f64) {
        match *self {
            Payoff::VanillaCall { strike }
            | Payoff::Digital { strike }
            | Payoff::PowerCall { strike, .. } => (strike.ln(), f64::INFINITY),
            Payoff::DoubleDigital { lower, upper } => (lower.ln(), upper.ln()),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match *self {
            Payoff::VanillaCall { strike }
            | Payoff::Digital { strike }
            | Payoff::PowerCall { strike, .. } => vec![strike.ln()],
            Payoff::DoubleDigital { lower, upper } => vec![lower.ln(), upper.ln()],
        }
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub(crate) fn powered_excess(excess: f64, power: f64) -> f64 {
    if excess > 0.0 {
        if power == 1.0 {
            excess
        } else {
            excess.powf(power)
        }
    } else {
        0.0
    }
}

/// One European contract with `tau` years to expiry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionSpec {
    payoff: Payoff,
    tau: f64,
}

impl OptionSpec {
    /// `strike = 0` is allowed: the payoff is then the terminal price itself.
    pub fn vanilla_call(strike: f64, tau: f64) -> Result<Self> {
        check_strike(strike, true)?;
        Self::build(Payoff::VanillaCall { strike }, tau)
    }

    pub fn digital(strike: f64, tau: f64) -> Result<Self> {
        check_strike(strike, false)?;
        Self::build(Payoff::Digital { strike }, tau)
    }

    pub fn double_digital(lower: f64, upper: f64, tau: f64) -> Result<Self> {
        check_strike(lower, false)?;
        if !(upper.is_finite() && upper > lower) {
            return Err(domain(format!(
                "double digital needs 0 < a < b, got [{lower}, {upper}]"
            )));
        }
        Self::build(Payoff::DoubleDigital { lower, upper }, tau)
    }

    pub fn power_call(strike: f64, power: f64, tau: f64) -> Result<Self> {
        check_strike(strike, true)?;
        if !(power.is_finite() && power >= 0.0) {
            return Err(domain(format!("power must be finite and >= 0, got {power}")));
        }
        Self::build(Payoff::PowerCall { strike, power }, tau)
    }

    fn build(payoff: Payoff, tau: f64) -> Result<Self> {
        ensure_positive("tau", tau)?;
        Ok(Self { payoff, tau })
    }

    pub fn payoff(&self) -> Payoff {
        self.payoff
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

fn check_strike(strike: f64, allow_zero: bool) -> Result<()> {
    let ok = strike.is_finite() && (strike > 0.0 || allow_zero && strike == 0.0);
    if ok {
        Ok(())
    } else {
        Err(domain(format!("strike must be positive and finite, got {strike}")))
    }
}

fn check_spot(spot: f64) -> Result<()> {
    ensure_positive("spot", spot)
}

/// Price and physical description of one contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Valuation {
    /// Discounted risk-neutral expectation of the payoff.
    pub price: f64,
    /// Undiscounted `E_P[payoff]`.
    pub physical_mean: f64,
    /// Standard deviation of the payoff under `P`.
    pub physical_std: f64,
    /// `physical_mean / premium - 1`, the premium discounted per the
    /// [`Discounting`] flag.
    pub expected_return: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalMoments {
    pub mean: f64,
    pub std: f64,
}

/// The law of `u = ln(S_T / S_t)` under one measure.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogLaw {
    pub mean: f64,
    pub std: f64,
}

impl LogLaw {
    pub fn new(market: &MarketParams, measure: Measure, tau: f64) -> Self {
        Self {
            mean: market.log_mean(measure, tau),
            std: market.log_std(tau),
        }
    }

    /// `E[h(u)]` by adaptive quadrature over the truncated Gaussian.
    ///
    /// `support` bounds where `h` can be non-zero; `growth` is the exponent
    /// `k` for integrands that grow like `e^{k u}`, which moves the mass
    /// to `mean + k std^2`.
    pub fn expect<F>(&self, h: F, support: (f64, f64), kinks: &[f64], growth: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let (m, s) = (self.mean, self.std);
        let lo = support.0.max(m - TRUNCATION_SDS * s);
        let center = m + growth.max(0.0) * s * s;
        let hi = support.1.min(lo.max(center) + TRUNCATION_SDS * s);
        if !(hi > lo) {
            return Ok(0.0);
        }
        let density = |u: f64| {
            let z = (u - m) / s;
            h(u) * (-0.5 * z * z).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
        };
        let integral = Integrator::with_rel_tol(QUADRATURE_REL_TOL).integrate(density, lo, hi, kinks)?;
        Ok(integral.value)
    }

    /// `P(u >= ln c)`.
    pub fn upper_tail(&self, ln_c: f64) -> f64 {
        normal::sf((ln_c - self.mean) / self.std)
    }

    pub fn ln_upper_tail(&self, ln_c: f64) -> f64 {
        normal::ln_sf((ln_c - self.mean) / self.std)
    }

    pub fn interval(&self, ln_a: f64, ln_b: f64) -> f64 {
        normal::interval_prob((ln_a - self.mean) / self.std, (ln_b - self.mean) / self.std)
    }

    pub fn ln_interval(&self, ln_a: f64, ln_b: f64) -> f64 {
        normal::ln_interval_prob((ln_a - self.mean) / self.std, (ln_b - self.mean) / self.std)
    }
}

/// `E[payoff(G)]` for a spot-relative payoff under `measure`, by quadrature.
pub(crate) fn relative_expectation(
    payoff: &Payoff,
    market: &MarketParams,
    measure: Measure,
    tau: f64,
) -> Result<f64> {
    let law = LogLaw::new(market, measure, tau);
    let p = *payoff;
    law.expect(|u| p.value(u.exp()), p.log_support(), &p.kinks(), p.degree())
}

/// `(mean, std)` of a spot-relative payoff under `P`, by quadrature. The
/// variance is integrated in centred form over the whole real line.
pub(crate) fn relative_physical_moments(
    payoff: &Payoff,
    market: &MarketParams,
    tau: f64,
) -> Result<PhysicalMoments> {
    let law = LogLaw::new(market, Measure::Physical, tau);
    let p = *payoff;
    let mean = law.expect(|u| p.value(u.exp()), p.log_support(), &p.kinks(), p.degree())?;
    let var = law.expect(
        |u| {
            let d = p.value(u.exp()) - mean;
            d * d
        },
        (f64::NEG_INFINITY, f64::INFINITY),
        &p.kinks(),
        2.0 * p.degree(),
    )?;
    Ok(PhysicalMoments {
        mean,
        std: var.max(0.0).sqrt(),
    })
}

fn vanilla_strike(spec: &OptionSpec) -> Result<f64> {
    match spec.payoff {
        Payoff::VanillaCall { strike } => Ok(strike),
        _ => Err(domain(format!("expected a vanilla call, got {:?}", spec.payoff))),
    }
}

fn digital_strike(spec: &OptionSpec) -> Result<f64> {
    match spec.payoff {
        Payoff::Digital { strike } => Ok(strike),
        _ => Err(domain(format!("expected a digital, got {:?}", spec.payoff))),
    }
}

/// Closed-form call on a unit spot with strike ratio `c`.
pub(crate) fn unit_call_closed_form(c: f64, tau: f64, market: &MarketParams) -> f64 {
    if c == 0.0 {
        return 1.0;
    }
    let s = market.log_std(tau);
    let r = market.r();
    let d1 = (-c.ln() + (r + 0.5 * market.sigma() * market.sigma()) * tau) / s;
    let d2 = d1 - s;
    (normal::cdf(d1) - c * (-r * tau).exp() * normal::cdf(d2)).max(0.0)
}

/// `e^{-r tau} E_Q (S_T - K)^+`, closed form.
pub fn call_price(spot: f64, spec: &OptionSpec, market: &MarketParams) -> Result<f64> {
    check_spot(spot)?;
    let strike = vanilla_strike(spec)?;
    Ok(spot * unit_call_closed_form(strike / spot, spec.tau, market))
}

/// The same price by adaptive quadrature of the risk-neutral integral.
pub fn call_price_quadrature(spot: f64, spec: &OptionSpec, market: &MarketParams) -> Result<f64> {
    check_spot(spot)?;
    vanilla_strike(spec)?;
    let rel = spec.payoff.relative_to(spot);
    let undiscounted = relative_expectation(&rel, market, Measure::RiskNeutral, spec.tau)?;
    Ok(spot * (-market.r() * spec.tau).exp() * undiscounted)
}

/// Closed form and quadrature side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub closed_form: f64,
    pub quadrature: f64,
}

impl CrossCheck {
    pub fn relative_difference(&self) -> f64 {
        if self.closed_form == self.quadrature {
            0.0
        } else {
            (self.quadrature - self.closed_form).abs() / self.closed_form.abs()
        }
    }
}

pub fn call_price_cross_check(spot: f64, spec: &OptionSpec, market: &MarketParams) -> Result<CrossCheck> {
    Ok(CrossCheck {
        closed_form: call_price(spot, spec, market)?,
        quadrature: call_price_quadrature(spot, spec, market)?,
    })
}

/// `E_P (S_T - K)^+` and its standard deviation under `P`, no discounting.
pub fn call_physical_moments(spot: f64, spec: &OptionSpec, market: &MarketParams) -> Result<PhysicalMoments> {
    check_spot(spot)?;
    vanilla_strike(spec)?;
    let m = relative_physical_moments(&spec.payoff.relative_to(spot), market, spec.tau)?;
    Ok(PhysicalMoments {
        mean: spot * m.mean,
        std: spot * m.std,
    })
}

/// `ln P(S_T >= K)` (or under `Q`), in log space.
pub fn ln_digital_prob(spot: f64, spec: &OptionSpec, market: &MarketParams, measure: Measure) -> Result<f64> {
    check_spot(spot)?;
    let strike = digital_strike(spec)?;
    Ok(LogLaw::new(market, measure, spec.tau).ln_upper_tail((strike / spot).ln()))
}

/// Trigger probability of a digital under `measure`.
pub fn digital_prob(spot: f64, spec: &OptionSpec, market: &MarketParams, measure: Measure) -> Result<f64> {
    check_spot(spot)?;
    let strike = digital_strike(spec)?;
    Ok(LogLaw::new(market, measure, spec.tau).upper_tail((strike / spot).ln()))
}

/// `e^{-r tau} Q(S_T >= K)`.
pub fn digital_price(spot: f64, spec: &OptionSpec, market: &MarketParams) -> Result<f64> {
    Ok((-market.r() * spec.tau).exp() * digital_prob(spot, spec, market, Measure::RiskNeutral)?)
}

/// `P(S_T >= K)`, the physical probability that the digital pays.
pub fn digital_physical_prob(spot: f64, spec: &OptionSpec, market: &MarketParams) -> Result<f64> {
    digital_prob(spot, spec, market, Measure::Physical)
}

/// Trigger probability by quadrature of the lognormal `1/y` kernel over
/// price space, `[K, S e^{max(ln c, m) + 12 s}]`.
pub fn digital_prob_quadrature(
    spot: f64,
    spec: &OptionSpec,
    market: &MarketParams,
    measure: Measure,
) -> Result<f64> {
    check_spot(spot)?;
    let strike = digital_strike(spec)?;
    let law = LogLaw::new(market, measure, spec.tau);
    let (m, s) = (law.mean, law.std);
    let norm = 1.0 / (s * (2.0 * std::f64::consts::PI).sqrt());
    let kernel = |y: f64| {
        let z = ((y / spot).ln() - m) / s;
        norm * (-0.5 * z * z).exp() / y
    };
    let lo = strike.max(spot * (m - TRUNCATION_SDS * s).exp());
    let hi = spot * ((strike / spot).ln().max(m) + TRUNCATION_SDS * s).exp();
    // the kernel is concentrated near the mode; give the integrator a hint
    let mode = spot * (m - s * s).exp();
    let integral = Integrator::with_rel_tol(1e-12).integrate(kernel, lo, hi, &[mode, spot * m.exp()])?;
    Ok(integral.value)
}

/// `R = p / q - 1` with `p = P(S_T >= K)` and `q = Q(S_T >= K)`, discounted
/// or not per `discounting`. Evaluated in log space.
pub fn digital_expected_return(
    spot: f64,
    spec: &OptionSpec,
    market: &MarketParams,
    discounting: Discounting,
) -> Result<f64> {
    let ln_p = ln_digital_prob(spot, spec, market, Measure::Physical)?;
    let ln_q = ln_digital_prob(spot, spec, market, Measure::RiskNeutral)?;
    if ln_q < PROBABILITY_GUARD.ln() {
        return Err(Error::StrikeTooDeep {
            probability: ln_q.exp(),
            guard: PROBABILITY_GUARD,
        });
    }
    let carry = match discounting {
        Discounting::Ignore => 0.0,
        Discounting::Apply => market.r() * spec.tau,
    };
    Ok((ln_p - ln_q + carry).exp_m1())
}

/// Lower bound on [`digital_expected_return`] (zero-interest convention):
///
/// ```text
/// exp((mu - r) (ln(K/S) / sigma^2 - (mu + r) tau / (2 sigma^2) + tau / 2)) - 1
/// ```
///
/// which is `dP/dQ - 1` at the strike. Holds because `dP/dQ` is increasing
/// in the log return when `mu > r`.
pub fn digital_return_lower_bound(spot: f64, spec: &OptionSpec, market: &MarketParams) -> Result<f64> {
    check_spot(spot)?;
    let strike = digital_strike(spec)?;
    let (mu, r, var) = (market.mu(), market.r(), market.sigma() * market.sigma());
    let tau = spec.tau;
    let exponent = (mu - r) * ((strike / spot).ln() / var - (mu + r) * tau / (2.0 * var) + 0.5 * tau);
    Ok(exponent.exp_m1())
}

fn interval(spec: &OptionSpec) -> Result<(f64, f64)> {
    match spec.payoff {
        Payoff::DoubleDigital { lower, upper } => Ok((lower, upper)),
        _ => Err(domain(format!("expected a double digital, got {:?}", spec.payoff))),
    }
}

/// `P(a <= S_T <= b)` (or under `Q`).
pub fn double_digital_prob(spot: f64, spec: &OptionSpec, market: &MarketParams, measure: Measure) -> Result<f64> {
    check_spot(spot)?;
    let (a, b) = interval(spec)?;
    Ok(LogLaw::new(market, measure, spec.tau).interval((a / spot).ln(), (b / spot).ln()))
}

pub fn ln_double_digital_prob(spot: f64, spec: &OptionSpec, market: &MarketParams, measure: Measure) -> Result<f64> {
    check_spot(spot)?;
    let (a, b) = interval(spec)?;
    Ok(LogLaw::new(market, measure, spec.tau).ln_interval((a / spot).ln(), (b / spot).ln()))
}

/// `e^{-r tau} Q(a <= S_T <= b)`.
pub fn double_digital_price(spot: f64, spec: &OptionSpec, market: &MarketParams) -> Result<f64> {
    Ok((-market.r() * spec.tau).exp() * double_digital_prob(spot, spec, market, Measure::RiskNeutral)?)
}

pub fn double_digital_physical_prob(spot: f64, spec: &OptionSpec, market: &MarketParams) -> Result<f64> {
    double_digital_prob(spot, spec, market, Measure::Physical)
}

fn power_params(spec: &OptionSpec) -> Result<(f64, f64)> {
    match spec.payoff {
        Payoff::PowerCall { strike, power } => Ok((strike, power)),
        _ => Err(domain(format!("expected a power call, got {:?}", spec.payoff))),
    }
}

/// `e^{-r tau} E_Q ((S_T - K)^+)^p` by quadrature.
pub fn power_call_price(spot: f64, spec: &OptionSpec, market: &MarketParams) -> Result<f64> {
    check_spot(spot)?;
    let (_, power) = power_params(spec)?;
    let rel = spec.payoff.relative_to(spot);
    let undiscounted = relative_expectation(&rel, market, Measure::RiskNeutral, spec.tau)?;
    Ok(spot.powf(power) * (-market.r() * spec.tau).exp() * undiscounted)
}

pub fn power_call_physical_moments(spot: f64, spec: &OptionSpec, market: &MarketParams) -> Result<PhysicalMoments> {
    check_spot(spot)?;
    let (_, power) = power_params(spec)?;
    let m = relative_physical_moments(&spec.payoff.relative_to(spot), market, spec.tau)?;
    let scale = spot.powf(power);
    Ok(PhysicalMoments {
        mean: scale * m.mean,
        std: scale * m.std,
    })
}

/// Price, physical moments and expected return for any supported contract.
pub fn value(spot: f64, spec: &OptionSpec, market: &MarketParams, discounting: Discounting) -> Result<Valuation> {
    let (price, moments) = match spec.payoff {
        Payoff::VanillaCall { .. } => (
            call_price(spot, spec, market)?,
            call_physical_moments(spot, spec, market)?,
        ),
        Payoff::Digital { .. } => {
            let p = digital_physical_prob(spot, spec, market)?;
            (digital_price(spot, spec, market)?, bernoulli(p))
        }
        Payoff::DoubleDigital { .. } => {
            let p = double_digital_physical_prob(spot, spec, market)?;
            (double_digital_price(spot, spec, market)?, bernoulli(p))
        }
        Payoff::PowerCall { .. } => (
            power_call_price(spot, spec, market)?,
            power_call_physical_moments(spot, spec, market)?,
        ),
    };
    let premium = match discounting {
        Discounting::Ignore => price * (market.r() * spec.tau).exp(),
        Discounting::Apply => price,
    };
    if !(premium > 0.0) {
        return Err(Error::Degenerate(format!(
            "premium of {:?} underflows to zero; expected return undefined",
            spec.payoff
        )));
    }
    Ok(Valuation {
        price,
        physical_mean: moments.mean,
        physical_std: moments.std,
        expected_return: moments.mean / premium - 1.0,
    })
}

fn bernoulli(p: f64) -> PhysicalMoments {
    PhysicalMoments {
        mean: p,
        std: (p * (1.0 - p)).max(0.0).sqrt(),
    }
}
