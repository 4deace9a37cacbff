//! The subcommands, each turning [`Settings`] into a table plus a short
//! human-readable report.

use anyhow::{bail, Result};
use otmcall::measure::{critical_volatility, log_density, rn_ratio, short_time_ratio};
use otmcall::pricing::{self, Discounting, OptionSpec};
use otmcall::smile::{ratio_bound_audit, smile_sigma, AuditReport, Grid};
use otmcall::strategy::{
    analytic_annual_stats, beta_convergence, c_growth, ratio_pq_fixed_strike, ratio_pq_growth, simulate_with,
    unit_budget_digital, Sizing, StrategyConfig, StrategyStats,
};
use otmcall::{Error, LogReturn, Measure};

use crate::settings::{Interest, Settings};
use crate::svg::Chart;
use crate::table::{fmt_num, Cell, Table};

pub struct Output {
    pub table: Table,
    /// Lines for the terminal; never part of the CSV.
    pub report: Vec<String>,
    pub chart: Option<Chart>,
}

/// Short machine-readable name of a library error.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Quadrature { .. } => "quadrature",
        Error::Root(_) => "root",
        Error::InfeasibleBudget { .. } => "infeasible_budget",
        Error::StrikeTooDeep { .. } => "strike_too_deep",
        Error::Degenerate(_) => "degenerate",
    }
}

fn discounting(s: &Settings) -> Discounting {
    match s.interest {
        Interest::Zero => Discounting::Ignore,
        Interest::Rate => Discounting::Apply,
    }
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn run_price(s: &Settings) -> Result<Output> {
    let market = s.market()?;
    let spec = match s.kind.as_str() {
        "call" => OptionSpec::vanilla_call(s.strike, s.tau)?,
        "digital" => OptionSpec::digital(s.strike, s.tau)?,
        "double-digital" => OptionSpec::double_digital(s.strike, s.upper.unwrap_or(s.strike * s.band), s.tau)?,
        "power" => OptionSpec::power_call(s.strike, s.power, s.tau)?,
        other => bail!("kind: expected call, digital, double-digital or power, got `{other}`"),
    };
    let v = pricing::value(s.spot, &spec, &market, discounting(s))?;
    let check = match s.kind.as_str() {
        "call" => Some(pricing::call_price_quadrature(s.spot, &spec, &market)?),
        "digital" => Some(
            (-market.r() * s.tau).exp()
                * pricing::digital_prob_quadrature(s.spot, &spec, &market, Measure::RiskNeutral)?,
        ),
        _ => None,
    };
    let upper = match spec.payoff() {
        otmcall::Payoff::DoubleDigital { upper, .. } => Some(upper),
        _ => None,
    };
    let power = (s.kind == "power").then_some(s.power);

    let meta = format!(
        "command=price {} sigma={} kind={} interest={} expected_return=physical_mean/premium-1",
        s.describe_market(),
        s.sigma,
        s.kind,
        s.interest_name()
    );
    let mut table = Table::new(
        meta,
        &[
            "kind", "spot", "strike", "upper", "power", "tau", "price", "physical_mean", "physical_std",
            "expected_return", "quadrature_price", "relative_difference",
        ],
    );
    let rel = check.map(|q| if q == v.price { 0.0 } else { (q - v.price).abs() / v.price });
    table.push(vec![
        s.kind.as_str().into(),
        s.spot.into(),
        s.strike.into(),
        upper.into(),
        power.into(),
        s.tau.into(),
        v.price.into(),
        v.physical_mean.into(),
        v.physical_std.into(),
        v.expected_return.into(),
        check.into(),
        rel.into(),
    ]);
    Ok(Output {
        table,
        report: Vec::new(),
        chart: None,
    })
}

fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    Ok(Grid { lo, hi, step }.points()?)
}

pub fn run_ratio(s: &Settings) -> Result<Output> {
    let market = s.market()?;
    let xs = grid(s.x_min, s.x_max, s.x_step)?;
    let critical = critical_volatility(&market);
    let mut report = vec![match &critical {
        Ok(v) => format!(
            "critical volatility sqrt(mu + r) = {}; (mu + r) / sigma^2 = {} at sigma = {}",
            fmt_num(*v),
            fmt_num((market.mu() + market.r()) / (market.sigma() * market.sigma())),
            market.sigma()
        ),
        Err(e) => format!("no critical volatility: {e}"),
    }];
    if !market.risk_premium_positive() {
        report.push("mu <= r: the ratio is not decreasing in x".into());
    }

    let meta = format!(
        "command=ratio {} sigma={} taus={} ratio=dQ/dP",
        s.describe_market(),
        s.sigma,
        Settings::list_text(&s.taus)
    );
    let mut table = Table::new(
        meta,
        &["tau", "x", "rn_ratio", "short_time_ratio", "physical_density", "risk_neutral_density"],
    );
    let mut chart = Chart::new("dQ/dP", "x = ln(S/S0)", "ratio");
    for &tau in &s.taus {
        let mut pts = Vec::with_capacity(xs.len());
        for &x in &xs {
            let lr = LogReturn::new(x, tau)?;
            let ratio = rn_ratio(&lr, &market);
            pts.push((x, ratio));
            table.push(vec![
                tau.into(),
                x.into(),
                ratio.into(),
                short_time_ratio(x, &market)?.into(),
                log_density(&lr, &market, Measure::Physical).into(),
                log_density(&lr, &market, Measure::RiskNeutral).into(),
            ]);
        }
        chart.add(format!("tau={}", fmt_num(tau)), pts);
    }
    Ok(Output {
        table,
        report,
        chart: Some(chart),
    })
}

fn strategy_config(s: &Settings, sigma: f64, sizing: Sizing) -> Result<StrategyConfig> {
    Ok(StrategyConfig::new(s.periods, sizing, s.option_family()?, s.market_with_sigma(sigma)?)?
        .with_cash(s.cash())
        .with_regressor(s.regressor))
}

fn se(e: &otmcall::Estimate) -> Cell {
    e.std_error.into()
}

pub fn run_sweep(s: &Settings) -> Result<Output> {
    if s.sigmas.is_empty() {
        bail!("sigmas: need at least one volatility");
    }
    if s.j_min > s.j_max {
        bail!("j_min {} exceeds j_max {}", s.j_min, s.j_max);
    }
    s.option_family()?;
    let with_mc = s.paths > 0;

    let mut columns = vec!["sigma", "j", "c", "implied_I", "expected_return_pct", "sharpe", "beta"];
    if with_mc {
        columns.extend([
            "mc_expected_return_pct",
            "mc_expected_return_pct_se",
            "mc_sharpe",
            "mc_sharpe_se",
            "mc_beta",
            "mc_beta_se",
        ]);
    }
    columns.push("status");
    let meta = format!(
        "command=sweep {} sigmas={} j={}..{} c=1+{}*j {} sharpe=(E[W]-B)/std(W)",
        s.describe_market(),
        s.sigmas_text(),
        s.j_min,
        s.j_max,
        s.c_step,
        s.describe_strategy()
    );
    let mut table = Table::new(meta, &columns);
    let mut chart = Chart::new("analytic Sharpe ratio", "strike-to-spot ratio c", "Sharpe");
    let width = columns.len();

    for &sigma in &s.sigmas {
        let mut pts = Vec::new();
        for j in s.j_min..=s.j_max {
            let c = 1.0 + s.c_step * j as f64;
            let mut row: Vec<Cell> = vec![sigma.into(), j.into(), c.into()];
            let cfg = strategy_config(s, sigma, Sizing::StrikeRatio(c))?;
            let analytic = analytic_annual_stats(&cfg);
            let mut status = String::from("ok");
            match &analytic {
                Ok(a) => {
                    let sharpe = a.sharpe.map(|e| e.value);
                    if let Some(v) = sharpe {
                        pts.push((c, v));
                    }
                    row.extend([
                        a.budget.into(),
                        (100.0 * a.expected_return.value).into(),
                        sharpe.into(),
                        a.beta.value.into(),
                    ]);
                }
                Err(e) => {
                    status = format!("infeasible:{}", error_kind(e));
                    row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
                }
            }
            if with_mc {
                match simulate_with(&cfg, s.paths, s.seed, s.chunk_size) {
                    Ok(sim) => {
                        let st = sim.stats;
                        row.extend([
                            (100.0 * st.expected_return.value).into(),
                            st.expected_return.std_error.map(|v| 100.0 * v).into(),
                            st.sharpe.map(|e| e.value).into(),
                            st.sharpe.and_then(|e| e.std_error).into(),
                            st.beta.value.into(),
                            se(&st.beta),
                        ]);
                    }
                    Err(e) => {
                        if status == "ok" {
                            status = format!("mc_failed:{}", error_kind(&e));
                        }
                        row.extend(std::iter::repeat_n(Cell::Empty, 6));
                    }
                }
            }
            row.push(status.into());
            debug_assert_eq!(row.len(), width);
            table.push(row);
        }
        chart.add(format!("sigma={sigma}"), pts);
    }
    let infeasible = table.rows.iter().filter(|r| !matches!(r.last(), Some(Cell::Text(t)) if t == "ok")).count();
    let report = vec![format!("{} rows, {} not ok", table.rows.len(), infeasible)];
    Ok(Output {
        table,
        report,
        chart: Some(chart),
    })
}

fn stats_row(source: &str, st: &StrategyStats) -> Vec<Cell> {
    let sharpe = st.sharpe;
    vec![
        source.into(),
        st.budget.into(),
        st.strike_ratio.into(),
        st.expected_payoff.value.into(),
        se(&st.expected_payoff),
        st.payoff_std.value.into(),
        se(&st.payoff_std),
        st.expected_return.value.into(),
        se(&st.expected_return),
        sharpe.map(|e| e.value).into(),
        sharpe.and_then(|e| e.std_error).into(),
        st.beta.value.into(),
        se(&st.beta),
        "ok".into(),
    ]
}

pub fn run_simulate(s: &Settings) -> Result<Output> {
    let sizing = match (s.c, s.budget) {
        (Some(_), Some(_)) => bail!("set either c or budget, not both"),
        (Some(c), None) => Sizing::StrikeRatio(c),
        (None, Some(i)) => Sizing::Budget(i),
        (None, None) => Sizing::StrikeRatio(1.1),
    };
    if s.paths < 2 {
        bail!("paths: need at least 2 for a simulation, got {}", s.paths);
    }
    let cfg = strategy_config(s, s.sigma, sizing)?;
    let sizing_text = match sizing {
        Sizing::StrikeRatio(c) => format!("c={c}"),
        Sizing::Budget(i) => format!("budget={i}"),
    };
    let meta = format!(
        "command=simulate {} sigma={} {sizing_text} {} sharpe=(E[W]-B)/std(W)",
        s.describe_market(),
        s.sigma,
        s.describe_strategy()
    );
    let columns = [
        "source", "budget", "c", "expected_payoff", "expected_payoff_se", "payoff_std", "payoff_std_se",
        "expected_return", "expected_return_se", "sharpe", "sharpe_se", "beta", "beta_se", "status",
    ];
    let mut table = Table::new(meta, &columns);
    let mut report = Vec::new();
    let analytic = analytic_annual_stats(&cfg);
    match &analytic {
        Ok(a) => table.push(stats_row("analytic", a)),
        Err(e) => {
            let mut row = vec![Cell::from("analytic")];
            row.extend(std::iter::repeat_n(Cell::Empty, columns.len() - 2));
            row.push(format!("failed:{}", error_kind(e)).into());
            table.push(row);
        }
    }
    let sim = simulate_with(&cfg, s.paths, s.seed, s.chunk_size)?;
    table.push(stats_row("monte_carlo", &sim.stats));
    if let Ok(a) = &analytic {
        let z = |name: &str, est: &otmcall::Estimate, exact: f64| format!("{name}: z = {}", fmt_num(est.z_score(exact)));
        report.push(z("mean", &sim.stats.expected_payoff, a.expected_payoff.value));
        report.push(z("std", &sim.stats.payoff_std, a.payoff_std.value));
        if let (Some(m), Some(x)) = (sim.stats.sharpe, a.sharpe) {
            report.push(z("sharpe", &m, x.value));
        }
        report.push(z("beta", &sim.stats.beta, a.beta.value));
    }
    Ok(Output {
        table,
        report,
        chart: None,
    })
}

pub fn run_appendix_checks(s: &Settings) -> Result<Output> {
    let market = s.market()?;
    let meta = format!(
        "command=appendix {} sigma={} n_list={} beta_n_list={} beta_paths={} seed={} strikes={} tau={} fixed_c={} budget=1 q_discount=1 regressor={}",
        s.describe_market(),
        s.sigma,
        Settings::list_text(&s.n_list),
        Settings::list_text(&s.beta_n_list),
        s.beta_paths,
        s.seed,
        Settings::list_text(&s.strikes),
        s.tau,
        s.fixed_c,
        s.regressor_name()
    );
    let mut table = Table::new(meta, &["check", "n", "strike_ratio", "value", "std_error", "detail"]);
    let mut report = Vec::new();

    let growth = c_growth(&s.n_list, &market)?;
    let cs: Vec<f64> = growth.iter().map(|g| g.strike_ratio).collect();
    for g in &growth {
        table.push(vec!["c_growth".into(), g.periods.into(), g.strike_ratio.into(), g.strike_ratio.into(), Cell::Empty, Cell::Empty]);
    }
    report.push(format!(
        "{} c(n) strictly increasing: {}",
        verdict(strictly_increasing(&cs)),
        growth.iter().map(|g| format!("c({})={}", g.periods, fmt_num(g.strike_ratio))).collect::<Vec<_>>().join(" ")
    ));

    let ratios = ratio_pq_growth(&s.n_list, &market)?;
    let rs: Vec<f64> = ratios.iter().map(|r| r.ratio).collect();
    for r in &ratios {
        table.push(vec!["ratio_pq".into(), r.periods.into(), r.strike_ratio.into(), r.ratio.into(), Cell::Empty, format!("p={} q={}", fmt_num(r.p), fmt_num(r.q)).into()]);
    }
    report.push(format!(
        "{} p/q strictly increasing: {}",
        verdict(strictly_increasing(&rs)),
        ratios.iter().map(|r| format!("n={}:{}", r.periods, fmt_num(r.ratio))).collect::<Vec<_>>().join(" ")
    ));

    let fixed = ratio_pq_fixed_strike(s.fixed_c, &s.n_list, &market)?;
    let limit = short_time_ratio(s.fixed_c.ln(), &market)?.recip();
    for r in &fixed {
        table.push(vec!["ratio_pq_fixed_c".into(), r.periods.into(), r.strike_ratio.into(), r.ratio.into(), Cell::Empty, format!("limit={}", fmt_num(limit)).into()]);
    }
    report.push(format!(
        "INFO p/q at fixed c={} tends to the bounded value {}: last {}",
        s.fixed_c,
        fmt_num(limit),
        fmt_num(fixed.last().map_or(f64::NAN, |r| r.ratio))
    ));

    let mut rets = Vec::new();
    for &k in &s.strikes {
        let spec = OptionSpec::digital(k, s.tau)?;
        let ret = pricing::digital_expected_return(1.0, &spec, &market, Discounting::Ignore)?;
        rets.push(ret);
        table.push(vec!["digital_return".into(), Cell::Empty, k.into(), ret.into(), Cell::Empty, format!("tau={}", fmt_num(s.tau)).into()]);
    }
    report.push(format!(
        "{} digital expected return strictly increasing in K: {}",
        verdict(strictly_increasing(&rets)),
        rets.iter().map(|r| fmt_num(*r)).collect::<Vec<_>>().join(" ")
    ));

    let base = unit_budget_digital(s.beta_n_list[0].max(2), market)?.with_regressor(s.regressor);
    let betas = beta_convergence(&base, &s.beta_n_list, s.beta_paths, s.seed)?;
    for b in &betas {
        table.push(vec!["beta".into(), b.periods.into(), b.strike_ratio.into(), b.beta.value.into(), se(&b.beta), format!("correlation={}", fmt_num(b.correlation)).into()]);
    }
    if let (Some(first), Some(last)) = (betas.first(), betas.last()) {
        let small = last.beta.value.abs() < s.beta_threshold;
        let shrinks = last.beta.value.abs() < first.beta.value.abs();
        report.push(format!(
            "{} |beta| at n={} below {}: {} (se {})",
            verdict(small),
            last.periods,
            s.beta_threshold,
            fmt_num(last.beta.value),
            fmt_num(last.beta.std_error.unwrap_or(f64::NAN))
        ));
        report.push(format!(
            "{} |beta| at n={} smaller than at n={}: {} vs {}",
            verdict(shrinks),
            last.periods,
            first.periods,
            fmt_num(last.beta.value),
            fmt_num(first.beta.value)
        ));
    }
    Ok(Output {
        table,
        report,
        chart: None,
    })
}

fn audit_line(label: &str, audit: &AuditReport) -> String {
    let n = audit.violation_count();
    let mut line = format!("{label}: {n} violations on {} points", audit.points.len());
    if n > 0 {
        let inner = audit.violations().map(|p| p.x.abs()).fold(f64::INFINITY, f64::min);
        line.push_str(&format!(", nearest at |x| = {}", fmt_num(inner)));
    }
    line
}

pub fn run_smile(s: &Settings) -> Result<Output> {
    let market = s.market()?;
    if !market.risk_premium_positive() {
        bail!("smile needs mu > r (got mu = {}, r = {}); the construction has no direction otherwise", s.mu, s.r);
    }
    let sp = s.smile_params()?;
    let xs = grid(s.grid_min, s.grid_max, s.grid_step)?;
    let shape = if sp.is_symmetric() { "symmetric" } else { "asymmetric-extension" };
    let meta = format!(
        "command=smile {} sigma0={} r_plus={} r_minus={} shape={shape} grid={}..{} step={} flat_sigma={}",
        s.describe_market(),
        s.sigma0,
        s.r_plus,
        s.r_minus,
        s.grid_min,
        s.grid_max,
        s.grid_step,
        s.flat_sigma.map_or("none".into(), |v| v.to_string())
    );
    let mut columns = vec!["x", "sigma", "ratio", "violation"];
    if s.flat_sigma.is_some() {
        columns.extend(["flat_ratio", "flat_violation"]);
    }
    let mut table = Table::new(meta, &columns);

    let audit = ratio_bound_audit(|x| smile_sigma(x, &sp, &market).unwrap_or(f64::NAN), &sp, &market, &xs)?;
    let flat = s
        .flat_sigma
        .map(|v| ratio_bound_audit(|_| v, &sp, &market, &xs))
        .transpose()?;
    let flag = |v: Option<otmcall::smile::Violation>| -> Cell {
        match v {
            None => "".into(),
            Some(otmcall::smile::Violation::Upper) => "upper".into(),
            Some(otmcall::smile::Violation::Lower) => "lower".into(),
        }
    };
    for (k, p) in audit.points.iter().enumerate() {
        let mut row = vec![p.x.into(), p.sigma.into(), p.ratio.into(), flag(p.violation)];
        if let Some(f) = &flat {
            row.push(f.points[k].ratio.into());
            row.push(flag(f.points[k].violation));
        }
        table.push(row);
    }

    let mut report = vec![audit_line("smile curve audit", &audit)];
    if let (Some(v), Some(f)) = (s.flat_sigma, &flat) {
        let premium = market.mu() - market.r();
        report.push(format!(
            "{} (thresholds x >= {} and x <= {})",
            audit_line(&format!("flat sigma={v} audit"), f),
            fmt_num(sp.r_plus() * v * v / premium),
            fmt_num(sp.r_minus() * v * v / premium)
        ));
    }
    if sp.is_symmetric() {
        report.push(format!("max expected return exp(R) - 1 = {}", fmt_num(otmcall::smile::max_expected_return(&sp)?)));
    }
    let mut chart = Chart::new("volatility smile", "x = ln(K/S0)", "sigma");
    chart.add("sigma(x)", audit.points.iter().map(|p| (p.x, p.sigma)).collect());
    if let Some(v) = s.flat_sigma {
        chart.add("flat", xs.iter().map(|&x| (x, v)).collect());
    }
    Ok(Output {
        table,
        report,
        chart: Some(chart),
    })
}
