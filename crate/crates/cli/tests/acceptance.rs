//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary so every verdict is printed, including passes.
//! The process fails if any criterion fails.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use otmcall::measure::{critical_volatility, rn_ratio};
use otmcall::pricing::{call_price, call_price_quadrature, digital_expected_return, Discounting, OptionSpec};
use otmcall::smile::{ratio_bound_audit, smile_sigma, Grid};
use otmcall::strategy::{
    analytic_annual_stats, beta_convergence, binomial_sharpe, binomial_sharpe_lower_bound, c_growth,
    per_period_moments, ratio_pq_growth, simulate, unit_budget_digital, OptionFamily, Sizing, StrategyConfig,
};
use otmcall::{Estimate, LogReturn, MarketParams, SmileParams};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

const MU: f64 = 0.1;
const R: f64 = 0.04;

type Verdict = Result<String, String>;

fn market(sigma: f64) -> MarketParams {
    MarketParams::new(MU, R, sigma).unwrap()
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_time(limit: Duration, elapsed: Duration, v: Verdict) -> Verdict {
    let note = format!("runtime {:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs());
    match v {
        Ok(d) if elapsed < limit => Ok(format!("{d}; {note}")),
        Ok(d) | Err(d) => Err(format!("{d}; {note}")),
    }
}

fn pricing_oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let tau = 1.0 / 12.0;
    let mut worst = 0.0f64;
    let mut count = 0;
    for sigma in [0.2, 0.3, 0.4, 0.5] {
        let m = market(sigma);
        for j in 1..=50 {
            let spec = OptionSpec::vanilla_call(1.0 + 0.005 * j as f64, tau).unwrap();
            let closed = call_price(1.0, &spec, &m).unwrap();
            let quad = call_price_quadrature(1.0, &spec, &m).unwrap();
            worst = worst.max((quad - closed).abs() / closed);
            count += 1;
        }
    }
    let v = check(worst < 1e-8, format!("{count} grid points, max relative error {worst:.3e} (< 1e-8)"));
    within_time(Duration::from_secs(10), start.elapsed(), v)
}

/// `q(x) / p(x)` for two Gaussians with a common variance: the normalising
/// constants cancel, and the exponent difference is evaluated exactly in
/// rational arithmetic from the binary inputs before a single `exp`.
fn exact_density_quotient(x: f64, tau: f64, m: &MarketParams) -> f64 {
    let q = |v: f64| BigRational::from_float(v).unwrap();
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let (x, tau, mu, r, sigma) = (q(x), q(tau), q(m.mu()), q(m.r()), q(m.sigma()));
    let var = &sigma * &sigma;
    let mean_p = (&mu - &half * &var) * &tau;
    let mean_q = (&r - &half * &var) * &tau;
    let dp = &x - &mean_p;
    let dq = &x - &mean_q;
    let two_s2 = BigRational::from_integer(BigInt::from(2)) * &var * &tau;
    let exponent: BigRational = (&dp * &dp - &dq * &dq) / two_s2;
    assert!(!exponent.is_zero() || dp == dq);
    exponent.to_f64().unwrap().exp()
}

fn measure_ratio_identity() -> Verdict {
    let m = market(0.2);
    let mut worst = 0.0f64;
    let mut count = 0;
    for tau in [1.0 / 252.0, 1.0 / 12.0, 1.0] {
        for i in 0..=600 {
            let x = -3.0 + 0.01 * i as f64;
            let closed = rn_ratio(&LogReturn::new(x, tau).unwrap(), &m);
            let oracle = exact_density_quotient(x, tau, &m);
            worst = worst.max((closed / oracle - 1.0).abs());
            count += 1;
        }
    }
    check(worst < 1e-12, format!("{count} points, max relative error {worst:.3e} (< 1e-12)"))
}

fn critical_volatility_level() -> Verdict {
    let m = market(0.2);
    let crit = critical_volatility(&m).unwrap();
    let level_ok = (crit - 0.14f64.sqrt()).abs() < 1e-15 && (crit - 0.3742).abs() < 5e-5 && crit >= 0.37;
    let at = market(crit);
    let mut worst = 0.0f64;
    for i in 0..=60 {
        let x = -3.0 + 0.1 * i as f64;
        let base = rn_ratio(&LogReturn::new(x, 1.0).unwrap(), &at);
        for tau in [1e-8, 1.0 / 252.0, 1.0 / 12.0, 0.5, 5.0] {
            let other = rn_ratio(&LogReturn::new(x, tau).unwrap(), &at);
            worst = worst.max((other / base - 1.0).abs());
        }
    }
    check(
        level_ok && worst < 1e-12,
        format!("sigma_crit = {crit:.12} vs sqrt(0.14) = {:.12}; max tau drift {worst:.3e} (< 1e-12)", 0.14f64.sqrt()),
    )
}

fn z(est: &Estimate, exact: f64) -> f64 {
    est.z_score(exact)
}

fn strategy_consistency() -> Verdict {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for (sigma, c) in [(0.2, 1.1), (0.5, 1.25)] {
        let cfg = StrategyConfig::new(12, Sizing::StrikeRatio(c), OptionFamily::VanillaCall, market(sigma)).unwrap();
        let exact = analytic_annual_stats(&cfg).unwrap();
        let sim = simulate(&cfg, 1_000_000, 2024).unwrap().stats;
        let zs = [
            z(&sim.expected_payoff, exact.expected_payoff.value),
            z(&sim.payoff_std, exact.payoff_std.value),
            z(&sim.sharpe.unwrap(), exact.sharpe.unwrap().value),
        ];
        ok &= zs.iter().all(|v| v.abs() < 4.0);
        details.push(format!(
            "sigma={sigma} c={c}: z(mean)={:.2} z(std)={:.2} z(sharpe)={:.2} [sharpe {:.4}]",
            zs[0],
            zs[1],
            zs[2],
            exact.sharpe.unwrap().value
        ));
    }
    within_time(Duration::from_secs(60), start.elapsed(), check(ok, details.join("; ")))
}

fn digital_binomial_formula() -> Verdict {
    let mut details = Vec::new();
    let mut ok = true;
    for (sigma, n) in [(0.2, 12), (0.4, 52)] {
        let cfg = unit_budget_digital(n, market(sigma)).unwrap();
        let c = cfg.resolve().unwrap().strike_ratio;
        let p = per_period_moments(c, n, &cfg.market, &OptionFamily::Digital).unwrap().mean;
        let nf = n as f64;
        let formula = (nf * p - 1.0) / (nf * p * (1.0 - p)).sqrt();
        let sim = simulate(&cfg, 400_000, 99).unwrap().stats.sharpe.unwrap();
        let zs = sim.z_score(formula);
        ok &= zs.abs() < 4.0;
        details.push(format!("sigma={sigma} n={n}: formula {formula:.4}, simulated {:.4} (z={zs:.2})", sim.value));
    }
    let mut points = 0;
    let mut violations = 0;
    for sigma in [0.2, 0.3, 0.4, 0.5] {
        for n in [4u32, 12, 52, 252] {
            let cfg = unit_budget_digital(n, market(sigma)).unwrap();
            let stats = analytic_annual_stats(&cfg).unwrap();
            let p = per_period_moments(stats.strike_ratio, n, &cfg.market, &OptionFamily::Digital).unwrap().mean;
            let probs = vec![p; n as usize];
            let sharpe = binomial_sharpe(&probs, 1.0).unwrap();
            let bound = binomial_sharpe_lower_bound(&probs, 1.0).unwrap();
            let analytic = stats.sharpe.unwrap().value;
            points += 1;
            if !(analytic >= bound && sharpe >= bound && (analytic - sharpe).abs() < 1e-12) {
                violations += 1;
            }
        }
    }
    ok &= violations == 0;
    details.push(format!("lower bound held at {}/{points} grid points", points - violations));
    check(ok, details.join("; "))
}

fn divergence_checks() -> Verdict {
    let m = market(0.2);
    let n = [12, 60, 252, 1000];
    let cs: Vec<f64> = c_growth(&n, &m).unwrap().iter().map(|g| g.strike_ratio).collect();
    let ratios: Vec<f64> = ratio_pq_growth(&n, &m).unwrap().iter().map(|r| r.ratio).collect();
    let rets: Vec<f64> = [1.05, 1.1, 1.2]
        .iter()
        .map(|&k| digital_expected_return(1.0, &OptionSpec::digital(k, 1.0 / 12.0).unwrap(), &m, Discounting::Ignore).unwrap())
        .collect();
    let inc = |xs: &[f64]| xs.windows(2).all(|w| w[1] > w[0]);
    let c_ok = inc(&cs) && cs[3] > cs[2];
    let fmt = |xs: &[f64]| xs.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>().join(", ");
    check(
        c_ok && inc(&ratios) && inc(&rets),
        format!(
            "c(n) increasing: {c_ok} [{}], margin c(1000)-c(252) = {:.5}; p/q increasing: {} [{}]; digital return increasing in K: {} [{}]",
            fmt(&cs),
            cs[3] - cs[2],
            inc(&ratios),
            fmt(&ratios),
            inc(&rets),
            fmt(&rets)
        ),
    )
}

fn zero_beta() -> Verdict {
    let cfg = unit_budget_digital(12, market(0.2)).unwrap();
    let rows = beta_convergence(&cfg, &[12, 240], 100_000, 7).unwrap();
    let (b12, b240) = (rows[0].beta, rows[1].beta);
    let small = b240.value.abs() < 0.05;
    let smaller = b240.value.abs() < b12.value.abs();
    check(
        small && smaller,
        format!(
            "beta(n=12) = {:.4} +- {:.4}, beta(n=240) = {:.4} +- {:.4}; below 0.05: {small}; smaller than n=12: {smaller}; correlation {:.3} -> {:.3}",
            b12.value,
            b12.std_error.unwrap(),
            b240.value,
            b240.std_error.unwrap(),
            rows[0].correlation,
            rows[1].correlation
        ),
    )
}

fn sharpe_monotone_in_n() -> Verdict {
    let sharpes: Vec<f64> = [4u32, 12, 52, 252]
        .iter()
        .map(|&n| {
            let cfg = StrategyConfig::new(n, Sizing::StrikeRatio(1.1), OptionFamily::VanillaCall, market(0.2)).unwrap();
            analytic_annual_stats(&cfg).unwrap().sharpe.unwrap().value
        })
        .collect();
    let ok = sharpes.windows(2).all(|w| w[1] > w[0]);
    check(
        ok,
        format!(
            "Sharpe at n = 4, 12, 52, 252: {}",
            sharpes.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn smile_properties() -> Verdict {
    let m = market(0.2);
    let sp = SmileParams::symmetric(0.2, 2.0).unwrap();
    let base_ok = smile_sigma(0.0, &sp, &m).unwrap() == 0.2;
    let grid = Grid::default().points().unwrap();
    let mut worst_even = 0.0f64;
    for &x in &grid {
        let (a, b) = (smile_sigma(x, &sp, &m).unwrap(), smile_sigma(-x, &sp, &m).unwrap());
        worst_even = worst_even.max((a - b).abs() / a);
    }
    let curve = ratio_bound_audit(|x| smile_sigma(x, &sp, &m).unwrap(), &sp, &m, &grid).unwrap();
    let flat = ratio_bound_audit(|_| 0.2, &sp, &m, &grid).unwrap();
    let threshold = 2.0 * 0.2 * 0.2 / (0.1 - 0.04);
    let flat_exact = flat.points.iter().all(|p| p.violation.is_some() == (p.x.abs() >= threshold));
    let flat_some = flat.violation_count() > 0;
    check(
        base_ok && worst_even < 1e-12 && curve.passed() && flat_exact && flat_some,
        format!(
            "sigma(0) = sigma0: {base_ok}; evenness error {worst_even:.1e}; curve violations {}; flat violations {} exactly where |x| >= {threshold:.6}: {flat_exact}",
            curve.violation_count(),
            flat.violation_count()
        ),
    )
}

fn run_sweep(config: &Path, out: &Path, threads: &str) -> Result<(), String> {
    let output = Command::new(env!("CARGO_BIN_EXE_otmcall"))
        .args(["sweep", "--config"])
        .arg(config)
        .args(["--seed", "31", "--out"])
        .arg(out)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if output.status.success() {
        Ok(())
    } else {
        Err(format!("sweep exited with {}", output.status))
    }
}

fn sweep_determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("sweep.cfg");
    std::fs::write(&config, "sigmas = 0.2, 0.5\nj_max = 10\npaths = 2000\n").map_err(|e| e.to_string())?;
    let (a, b, c) = (dir.path().join("a.csv"), dir.path().join("b.csv"), dir.path().join("c.csv"));
    run_sweep(&config, &a, "4")?;
    run_sweep(&config, &b, "4")?;
    run_sweep(&config, &c, "1")?;
    let read = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
    let (ba, bb, bc) = (read(&a)?, read(&b)?, read(&c)?);
    let rows = String::from_utf8_lossy(&ba).lines().count().saturating_sub(2);
    check(
        ba == bb && ba == bc && rows == 20,
        format!("{} bytes, {rows} rows; identical reruns: {}; identical on one thread: {}", ba.len(), ba == bb, ba == bc),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("pricing oracle equivalence", pricing_oracle_equivalence),
        ("measure-ratio identity", measure_ratio_identity),
        ("critical volatility", critical_volatility_level),
        ("strategy consistency", strategy_consistency),
        ("digital binomial formula", digital_binomial_formula),
        ("divergence checks", divergence_checks),
        ("zero beta", zero_beta),
        ("Sharpe monotone in n", sharpe_monotone_in_n),
        ("smile properties", smile_properties),
        ("sweep determinism", sweep_determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match &verdict {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if verdict.is_err() {
            failed += 1;
        }
        println!("criterion {:>2} {tag} {name}: {detail}", k + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
