use otmcall::pricing::*;
use otmcall::{MarketParams, Measure};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

const MU: f64 = 0.1;
const R: f64 = 0.04;

fn market(sigma: f64) -> MarketParams {
    MarketParams::new(MU, R, sigma).unwrap()
}

/// Sample mean and standard error of `h(G)` for `G` lognormal under `measure`.
fn monte_carlo<H: Fn(f64) -> f64>(m: &MarketParams, measure: Measure, tau: f64, draws: usize, seed: u64, h: H) -> (f64, f64) {
    let drift = match measure {
        Measure::Physical => m.mu(),
        Measure::RiskNeutral => m.r(),
    };
    let loc = (drift - 0.5 * m.sigma() * m.sigma()) * tau;
    let scale = m.sigma() * tau.sqrt();
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..draws {
        let z: f64 = rng.sample(StandardNormal);
        let v = h((loc + scale * z).exp());
        s += v;
        s2 += v * v;
    }
    let n = draws as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn call_matches_risk_neutral_monte_carlo() {
    let m = market(0.2);
    let tau = 1.0 / 12.0;
    let spec = OptionSpec::vanilla_call(1.05, tau).unwrap();
    let price = call_price(1.0, &spec, &m).unwrap();
    let disc = (-R * tau).exp();
    let (mc, se) = monte_carlo(&m, Measure::RiskNeutral, tau, 10_000_000, 11, |g| disc * (g - 1.05).max(0.0));
    assert!((price - mc).abs() < 3.0 * se, "{price} vs {mc} +- {se}");
}

#[test]
fn call_physical_moments_match_monte_carlo() {
    let m = market(0.3);
    let tau = 1.0 / 12.0;
    let spec = OptionSpec::vanilla_call(1.1, tau).unwrap();
    let pm = call_physical_moments(1.0, &spec, &m).unwrap();
    let (mean, se) = monte_carlo(&m, Measure::Physical, tau, 4_000_000, 12, |g| (g - 1.1).max(0.0));
    assert!((pm.mean - mean).abs() < 3.0 * se, "{} vs {mean} +- {se}", pm.mean);
    let (m2, se2) = monte_carlo(&m, Measure::Physical, tau, 4_000_000, 13, |g| {
        let d = (g - 1.1).max(0.0) - pm.mean;
        d * d
    });
    let var = pm.std * pm.std;
    assert!((var - m2).abs() < 3.0 * se2, "{var} vs {m2} +- {se2}");
}

#[test]
fn call_limits() {
    let m = market(0.25);
    let tau = 0.5;
    let zero = OptionSpec::vanilla_call(0.0, tau).unwrap();
    assert!((call_price(3.0, &zero, &m).unwrap() - 3.0).abs() < 1e-15);
    assert!((call_price_quadrature(3.0, &zero, &m).unwrap() - 3.0).abs() < 1e-9);
    let pm = call_physical_moments(3.0, &zero, &m).unwrap();
    assert!((pm.mean / (3.0 * (MU * tau).exp()) - 1.0).abs() < 1e-9);

    let mut last = f64::INFINITY;
    for k in 1..60 {
        let spec = OptionSpec::vanilla_call(0.5 * k as f64, tau).unwrap();
        let p = call_price(1.0, &spec, &m).unwrap();
        assert!(p < last || p == 0.0);
        last = p;
    }
    assert!(last < 1e-50);
}

#[test]
fn call_decreasing_and_convex_in_strike() {
    let m = market(0.3);
    let tau = 1.0 / 12.0;
    let prices: Vec<f64> = (0..200)
        .map(|k| call_price(1.0, &OptionSpec::vanilla_call(0.8 + 0.0025 * k as f64, tau).unwrap(), &m).unwrap())
        .collect();
    for w in prices.windows(3) {
        assert!(w[1] < w[0]);
        assert!(w[0] - 2.0 * w[1] + w[2] > 0.0);
    }
}

#[test]
fn homogeneity_in_spot() {
    let m = market(0.4);
    let tau = 1.0 / 12.0;
    for &l in &[0.01, 2.5, 100.0] {
        let call = |s: f64| call_price(s, &OptionSpec::vanilla_call(1.1 * s, tau).unwrap(), &m).unwrap();
        assert!((call(l) / (l * call(1.0)) - 1.0).abs() < 1e-13);
        let moments = |s: f64| call_physical_moments(s, &OptionSpec::vanilla_call(1.1 * s, tau).unwrap(), &m).unwrap();
        assert!((moments(l).std / (l * moments(1.0).std) - 1.0).abs() < 1e-12);
        let dig = |s: f64| digital_price(s, &OptionSpec::digital(1.1 * s, tau).unwrap(), &m).unwrap();
        assert!((dig(l) / dig(1.0) - 1.0).abs() < 1e-13);
        let pow = |s: f64| power_call_price(s, &OptionSpec::power_call(1.1 * s, 2.0, tau).unwrap(), &m).unwrap();
        assert!((pow(l) / (l * l * pow(1.0)) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn equal_drifts_collapse_measures() {
    let m = MarketParams::new(0.04, 0.04, 0.3).unwrap();
    let tau = 0.25;
    let spec = OptionSpec::vanilla_call(1.1, tau).unwrap();
    let pm = call_physical_moments(1.0, &spec, &m).unwrap();
    let price = call_price(1.0, &spec, &m).unwrap();
    assert!((pm.mean / ((0.04 * tau).exp() * price) - 1.0).abs() < 1e-9);
    for k in [0.5, 1.0, 1.5, 3.0] {
        let d = OptionSpec::digital(k, tau).unwrap();
        assert_eq!(digital_expected_return(1.0, &d, &m, Discounting::Ignore).unwrap(), 0.0);
    }
}

#[test]
fn digital_closed_form_matches_kernel_quadrature() {
    let tau = 1.0 / 12.0;
    for sigma in [0.2, 0.3, 0.4, 0.5] {
        let m = market(sigma);
        for j in 1..=50 {
            let spec = OptionSpec::digital(1.0 + 0.005 * j as f64, tau).unwrap();
            for measure in [Measure::Physical, Measure::RiskNeutral] {
                let closed = digital_prob(1.0, &spec, &m, measure).unwrap();
                let quad = digital_prob_quadrature(1.0, &spec, &m, measure).unwrap();
                assert!((quad / closed - 1.0).abs() < 1e-10, "sigma {sigma} j {j}: {closed} vs {quad}");
            }
        }
    }
}

#[test]
fn digital_limits() {
    let m = market(0.2);
    let tau = 1.0 / 12.0;
    let tiny = OptionSpec::digital(1e-30, tau).unwrap();
    assert!((digital_price(1.0, &tiny, &m).unwrap() - (-R * tau).exp()).abs() < 1e-15);
    let median = (m.log_mean(Measure::RiskNeutral, tau)).exp();
    let mid = OptionSpec::digital(median, tau).unwrap();
    assert!((digital_prob(1.0, &mid, &m, Measure::RiskNeutral).unwrap() - 0.5).abs() < 1e-15);
    assert!(OptionSpec::digital(0.0, tau).is_err());
    assert!(OptionSpec::digital(-1.0, tau).is_err());
    for k in [0.5, 1.0, 1.3] {
        let p = digital_price(1.0, &OptionSpec::digital(k, tau).unwrap(), &m).unwrap();
        assert!(p > 0.0 && p <= (-R * tau).exp());
    }
}

#[test]
fn digital_return_respects_lower_bound() {
    for sigma in [0.2, 0.3, 0.4, 0.5] {
        let m = market(sigma);
        for n in [4u32, 12, 52, 252] {
            let tau = 1.0 / n as f64;
            for j in 0..=50 {
                let spec = OptionSpec::digital(1.0 + 0.005 * j as f64, tau).unwrap();
                let ret = digital_expected_return(1.0, &spec, &m, Discounting::Ignore).unwrap();
                let bound = digital_return_lower_bound(1.0, &spec, &m).unwrap();
                // hand-written bound with tau = 1/n
                let c: f64 = 1.0 + 0.005 * j as f64;
                let s2 = sigma * sigma;
                let nf = n as f64;
                let by_hand = ((MU - R) * (c.ln() / s2 - (MU + R) / (2.0 * nf * s2) + 1.0 / (2.0 * nf))).exp() - 1.0;
                assert!((bound - by_hand).abs() < 1e-14);
                assert!(ret >= bound, "sigma {sigma} n {n} j {j}: {ret} < {bound}");
            }
        }
    }
}

#[test]
fn digital_return_grows_with_strike() {
    let m = market(0.2);
    let tau = 1.0 / 12.0;
    let rets: Vec<f64> = [1.05, 1.1, 1.2]
        .iter()
        .map(|&k| digital_expected_return(1.0, &OptionSpec::digital(k, tau).unwrap(), &m, Discounting::Ignore).unwrap())
        .collect();
    assert!(rets[0] < rets[1] && rets[1] < rets[2], "{rets:?}");
    // p/q against the short-horizon bound at the strike
    let spec = OptionSpec::digital(1.1, tau).unwrap();
    let p = digital_physical_prob(1.0, &spec, &m).unwrap();
    let q = digital_prob(1.0, &spec, &m, Measure::RiskNeutral).unwrap();
    assert!(p / q - 1.0 >= digital_return_lower_bound(1.0, &spec, &m).unwrap());
}

#[test]
fn digital_return_discounting_flag() {
    let m = market(0.3);
    let tau = 0.5;
    let spec = OptionSpec::digital(1.2, tau).unwrap();
    let plain = digital_expected_return(1.0, &spec, &m, Discounting::Ignore).unwrap();
    let disc = digital_expected_return(1.0, &spec, &m, Discounting::Apply).unwrap();
    assert!(((1.0 + disc) / (1.0 + plain) - (R * tau).exp()).abs() < 1e-14);
}

#[test]
fn deep_strike_is_refused() {
    let m = market(0.2);
    let spec = OptionSpec::digital(1e6, 1.0 / 252.0).unwrap();
    let err = digital_expected_return(1.0, &spec, &m, Discounting::Ignore).unwrap_err();
    assert!(matches!(err, otmcall::Error::StrikeTooDeep { .. }));
    // the log probability itself is still finite
    assert!(ln_digital_prob(1.0, &spec, &m, Measure::RiskNeutral).unwrap().is_finite());
}

#[test]
fn double_digital_additivity_and_limits() {
    let m = market(0.3);
    let tau = 1.0 / 12.0;
    let price = |a: f64, b: f64| double_digital_price(1.0, &OptionSpec::double_digital(a, b, tau).unwrap(), &m).unwrap();
    let (a, b, c) = (0.95, 1.02, 1.2);
    assert!((price(a, b) + price(b, c) - price(a, c)).abs() < 1e-15);
    let d = |k: f64| digital_price(1.0, &OptionSpec::digital(k, tau).unwrap(), &m).unwrap();
    assert!((price(a, c) - (d(a) - d(c))).abs() < 1e-15);
    assert!((price(1e-12, 1e12) - (-R * tau).exp()).abs() < 1e-15);
    assert!(OptionSpec::double_digital(1.2, 1.2, tau).is_err());
    assert!(OptionSpec::double_digital(1.3, 1.2, tau).is_err());
}

#[test]
fn shrinking_interval_recovers_measure_ratio() {
    let m = market(0.2);
    let tau = 1.0 / 12.0;
    let (y, h) = (1.1, 1e-5);
    let spec = OptionSpec::double_digital(y * (1.0 - h), y * (1.0 + h), tau).unwrap();
    let q = double_digital_prob(1.0, &spec, &m, Measure::RiskNeutral).unwrap();
    let p = double_digital_physical_prob(1.0, &spec, &m).unwrap();
    let ratio = otmcall::measure::rn_ratio(&otmcall::LogReturn::new(y.ln(), tau).unwrap(), &m);
    assert!((q / p / ratio - 1.0).abs() < 1e-3);
    let ln_q = ln_double_digital_prob(1.0, &spec, &m, Measure::RiskNeutral).unwrap();
    assert!((ln_q - q.ln()).abs() < 1e-12);
}

#[test]
fn power_call_reduces_to_call_and_digital() {
    let m = market(0.3);
    let tau = 1.0 / 12.0;
    for k in [0.9, 1.0, 1.1, 1.25] {
        let p1 = power_call_price(1.0, &OptionSpec::power_call(k, 1.0, tau).unwrap(), &m).unwrap();
        let call = call_price(1.0, &OptionSpec::vanilla_call(k, tau).unwrap(), &m).unwrap();
        assert!((p1 / call - 1.0).abs() < 1e-10, "k {k}");
        let p0 = power_call_price(1.0, &OptionSpec::power_call(k, 0.0, tau).unwrap(), &m).unwrap();
        let dig = digital_price(1.0, &OptionSpec::digital(k, tau).unwrap(), &m).unwrap();
        assert!((p0 / dig - 1.0).abs() < 1e-10, "k {k}");
        let m0 = power_call_physical_moments(1.0, &OptionSpec::power_call(k, 0.0, tau).unwrap(), &m).unwrap();
        let p = digital_physical_prob(1.0, &OptionSpec::digital(k, tau).unwrap(), &m).unwrap();
        assert!((m0.mean / p - 1.0).abs() < 1e-10);
        assert!((m0.std / (p * (1.0 - p)).sqrt() - 1.0).abs() < 1e-8);
    }
    // the payoff convention 0^0 = 0
    let zero = Payoff::PowerCall { strike: 1.0, power: 0.0 };
    assert_eq!(zero.value(1.0), 0.0);
    assert_eq!(zero.value(1.0 + 1e-12), 1.0);
}

#[test]
fn power_call_matches_monte_carlo() {
    let m = market(0.3);
    let tau = 1.0 / 12.0;
    let spec = OptionSpec::power_call(1.1, 2.0, tau).unwrap();
    let price = power_call_price(1.0, &spec, &m).unwrap();
    let disc = (-R * tau).exp();
    let (mc, se) = monte_carlo(&m, Measure::RiskNeutral, tau, 10_000_000, 14, |g| disc * (g - 1.1).max(0.0).powi(2));
    assert!((price - mc).abs() < 3.0 * se, "{price} vs {mc} +- {se}");
    let pm = power_call_physical_moments(1.0, &spec, &m).unwrap();
    let (mc_p, se_p) = monte_carlo(&m, Measure::Physical, tau, 10_000_000, 15, |g| (g - 1.1).max(0.0).powi(2));
    assert!((pm.mean - mc_p).abs() < 3.0 * se_p, "{} vs {mc_p} +- {se_p}", pm.mean);
}

#[test]
fn valuation_summary() {
    let m = market(0.2);
    let tau = 1.0 / 12.0;
    let spec = OptionSpec::vanilla_call(1.05, tau).unwrap();
    let v = value(1.0, &spec, &m, Discounting::Ignore).unwrap();
    let pm = call_physical_moments(1.0, &spec, &m).unwrap();
    assert_eq!(v.price, call_price(1.0, &spec, &m).unwrap());
    assert!((v.expected_return - (pm.mean / (v.price * (R * tau).exp()) - 1.0)).abs() < 1e-14);
    let v_disc = value(1.0, &spec, &m, Discounting::Apply).unwrap();
    assert!((v_disc.expected_return - (pm.mean / v.price - 1.0)).abs() < 1e-14);
    assert!(v.physical_std >= 0.0);

    let d = OptionSpec::digital(1.05, tau).unwrap();
    let vd = value(1.0, &d, &m, Discounting::Ignore).unwrap();
    let r = digital_expected_return(1.0, &d, &m, Discounting::Ignore).unwrap();
    assert!((vd.expected_return - r).abs() < 1e-12);

    let hopeless = OptionSpec::vanilla_call(1e9, 1.0 / 252.0).unwrap();
    assert!(matches!(value(1.0, &hopeless, &m, Discounting::Ignore), Err(otmcall::Error::Degenerate(_))));
}

#[test]
fn wrong_contract_kind_is_rejected() {
    let m = market(0.2);
    let d = OptionSpec::digital(1.1, 0.1).unwrap();
    assert!(call_price(1.0, &d, &m).is_err());
    let c = OptionSpec::vanilla_call(1.1, 0.1).unwrap();
    assert!(digital_price(1.0, &c, &m).is_err());
    assert!(power_call_price(1.0, &c, &m).is_err());
    assert!(call_price(0.0, &c, &m).is_err());
    assert!(OptionSpec::vanilla_call(1.0, 0.0).is_err());
    assert!(OptionSpec::power_call(1.0, -0.5, 0.1).is_err());
}
