use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use otmcall_cli::{commands, Output, Settings};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "otmcall", version, about = "Out-of-the-money option strategy analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Value one contract under both measures.
    Price(Common),
    /// Tabulate the measure ratio dQ/dP over log returns.
    Ratio(Common),
    /// Strategy statistics over a volatility by strike grid.
    Sweep(Common),
    /// Monte Carlo run of one strategy next to its analytic statistics.
    Simulate(Common),
    /// Strike growth, p/q growth and beta decay of the unit-budget digital strategy.
    Appendix(Common),
    /// Smile curve and measure-ratio bound audit.
    Smile(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum InterestFlag {
    Zero,
    R,
}

#[derive(Args)]
struct Common {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override any config key, e.g. `--set sigmas=0.2,0.3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long, value_enum)]
    interest: Option<InterestFlag>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also draw the table as an SVG line chart.
    #[arg(long)]
    svg: Option<PathBuf>,
}

impl Common {
    fn settings(&self) -> Result<Settings> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            s.apply_file(path)?;
        }
        for pair in &self.set {
            s.apply_override(pair)?;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(paths) = self.paths {
            s.paths = paths;
            s.beta_paths = paths;
        }
        if let Some(i) = self.interest {
            s.set("interest", match i {
                InterestFlag::Zero => "zero",
                InterestFlag::R => "r",
            })?;
        }
        Ok(s)
    }
}

fn emit(out: Output, common: &Common) -> Result<()> {
    let csv = out.table.to_csv();
    match &common.out {
        Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    if let Some(path) = &common.svg {
        let chart = out.chart.unwrap_or_default();
        std::fs::write(path, chart.to_svg()).with_context(|| format!("writing {}", path.display()))?;
    }
    for line in out.report {
        eprintln!("{line}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let (common, runner): (&Common, fn(&Settings) -> Result<Output>) = match &cli.command {
        Command::Price(c) => (c, commands::run_price),
        Command::Ratio(c) => (c, commands::run_ratio),
        Command::Sweep(c) => (c, commands::run_sweep),
        Command::Simulate(c) => (c, commands::run_simulate),
        Command::Appendix(c) => (c, commands::run_appendix_checks),
        Command::Smile(c) => (c, commands::run_smile),
    };
    let settings = common.settings()?;
    emit(runner(&settings)?, common)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e
                .chain()
                .find_map(|c| c.downcast_ref::<otmcall::Error>())
                .map_or("usage", otmcall_cli::error_kind);
            let message = format!("{e:#}").replace(['\n', '"'], " ");
            eprintln!("error kind={kind} message=\"{message}\"");
            ExitCode::from(2)
        }
    }
}
