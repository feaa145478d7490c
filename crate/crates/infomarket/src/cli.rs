//! Command-line drivers: parse a scenario file, run sweeps and solvers,
//! emit CSV for plotting and golden-file regression.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 solver non-convergence,
//! 3 certification failure. Service indices are 1-based on the command line
//! and in CSV headers.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::demand::{demand_analytic, demand_monte_carlo, DemandError, DemandResult};
use crate::equilibrium::{best_response, nash_solve, verify_epsilon_nash, EquilibriumError};
use crate::market::{MarketError, PriceVector, Scenario, ValuationDistribution};
use crate::output::{format_sig, write_csv, SIG_DIGITS};
use crate::scenario::{ScenarioError, ScenarioFile, VoiSection};
use crate::voi::{expected_voi, information_gain, select_source};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Price competition and value-of-information analysis for markets of
/// binary sensing services.
#[derive(Debug, Parser)]
#[command(name = "infomarket", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep one service's price and emit every service's demand as CSV.
    DemandSweep(SweepArgs),
    /// Sweep one service's price and emit that service's profit as CSV.
    ProfitSweep(SweepArgs),
    /// Best response of one service against a grid of opponent prices (CSV).
    BrCurve(CurveArgs),
    /// Solve for Nash equilibrium prices and certify the result.
    Nash(NashArgs),
    /// Value-of-information report for the scenario's decision problem.
    Voi(VoiArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Scenario file path.
    #[arg(long)]
    scenario: PathBuf,
    /// 1-based index of the service whose price is swept.
    #[arg(long)]
    service: usize,
    /// Comma-separated prices of the other services, in index order.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    fixed: Vec<f64>,
    /// First swept price.
    #[arg(long)]
    sweep_lo: f64,
    /// Last swept price.
    #[arg(long)]
    sweep_hi: f64,
    /// Number of grid points (at least 2).
    #[arg(long, default_value_t = 201)]
    steps: usize,
    /// Monte Carlo sample count, used for empirical valuations.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Seed for all Monte Carlo draws.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Scenario file path (must have exactly two services).
    #[arg(long)]
    scenario: PathBuf,
    /// 1-based index of the responding service.
    #[arg(long)]
    service: usize,
    /// First opponent price; defaults to the solver's lower price bound.
    #[arg(long)]
    sweep_lo: Option<f64>,
    /// Last opponent price; defaults to the solver's upper price bound.
    #[arg(long)]
    sweep_hi: Option<f64>,
    /// Number of grid points (at least 2).
    #[arg(long, default_value_t = 41)]
    steps: usize,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NashArgs {
    /// Scenario file path.
    #[arg(long)]
    scenario: PathBuf,
    /// Comma-separated initial prices; defaults to the midpoint of the
    /// price bounds for every service.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    initial: Option<Vec<f64>>,
    /// Certification threshold for unilateral deviation gains.
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// Deviation grid size per service for certification.
    #[arg(long, default_value_t = 10_000)]
    check_grid: usize,
    /// Write the iteration trace CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VoiArgs {
    /// Scenario file path (must contain a [voi] section).
    #[arg(long)]
    scenario: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses arguments and runs the selected command, returning the process
/// exit code. The first argument is the program name.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::DemandSweep(args) => cmd_demand_sweep(args),
        Command::ProfitSweep(args) => cmd_profit_sweep(args),
        Command::BrCurve(args) => cmd_br_curve(args),
        Command::Nash(args) => cmd_nash(args),
        Command::Voi(args) => cmd_voi(args),
    }
}

fn load(path: &PathBuf) -> Result<ScenarioFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(ScenarioFile::parse(&text)?)
}

fn emit(out: Option<&PathBuf>, payload: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, payload)?,
        None => io::stdout().write_all(payload)?,
    }
    Ok(())
}

fn service_index(scenario: &Scenario, one_based: usize) -> Result<usize, CliError> {
    if one_based == 0 || one_based > scenario.num_services() {
        return Err(CliError::Usage(format!(
            "service index {one_based} out of range 1..={}",
            scenario.num_services()
        )));
    }
    Ok(one_based - 1)
}

fn sweep_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::Usage(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(CliError::Usage(format!(
            "sweep bounds must satisfy lo <= hi, got [{lo}, {hi}]"
        )));
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

/// Full price vector with `fixed` in the non-swept slots and a placeholder
/// in slot `swept`.
fn assemble_prices(
    scenario: &Scenario,
    swept: usize,
    fixed: &[f64],
) -> Result<PriceVector, CliError> {
    let n = scenario.num_services();
    if fixed.len() != n - 1 {
        return Err(CliError::Usage(format!(
            "--fixed needs {} prices (one per non-swept service), got {}",
            n - 1,
            fixed.len()
        )));
    }
    let mut prices = Vec::with_capacity(n);
    let mut it = fixed.iter();
    for s in 0..n {
        if s == swept {
            prices.push(0.0);
        } else {
            prices.push(*it.next().expect("length checked"));
        }
    }
    Ok(PriceVector::new(prices)?)
}

/// Analytic demand for uniform valuations, seeded Monte Carlo otherwise.
fn evaluate_demand(
    scenario: &Scenario,
    prices: &PriceVector,
    samples: usize,
    seed: u64,
) -> Result<DemandResult, DemandError> {
    match scenario.valuation() {
        ValuationDistribution::Uniform { .. } => demand_analytic(scenario, prices),
        ValuationDistribution::Empirical { .. } => {
            demand_monte_carlo(scenario, prices, samples, seed)
        }
    }
}

fn cmd_demand_sweep(args: SweepArgs) -> Result<i32, CliError> {
    let file = load(&args.scenario)?;
    let scenario = &file.scenario;
    let swept = service_index(scenario, args.service)?;
    let base = assemble_prices(scenario, swept, &args.fixed)?;
    let grid = sweep_grid(args.sweep_lo, args.sweep_hi, args.steps)?;

    let mut header = vec!["swept_price".to_string()];
    header.extend((1..=scenario.num_services()).map(|s| format!("demand_{s}")));
    let mut rows = Vec::with_capacity(grid.len());
    for p in grid {
        let demand = evaluate_demand(
            scenario,
            &base.with_price(swept, p),
            args.samples,
            args.seed,
        )?;
        let mut row = vec![p];
        row.extend(demand.demand);
        rows.push(row);
    }
    let mut payload = Vec::new();
    write_csv(&mut payload, &header, rows)?;
    emit(args.out.as_ref(), &payload)?;
    Ok(EXIT_OK)
}

fn cmd_profit_sweep(args: SweepArgs) -> Result<i32, CliError> {
    let file = load(&args.scenario)?;
    let scenario = &file.scenario;
    let swept = service_index(scenario, args.service)?;
    let base = assemble_prices(scenario, swept, &args.fixed)?;
    let grid = sweep_grid(args.sweep_lo, args.sweep_hi, args.steps)?;
    let cost = scenario.services()[swept].fixed_cost();

    let header = vec!["swept_price".to_string(), format!("profit_{}", swept + 1)];
    let mut rows = Vec::with_capacity(grid.len());
    for p in grid {
        let demand = evaluate_demand(
            scenario,
            &base.with_price(swept, p),
            args.samples,
            args.seed,
        )?;
        rows.push(vec![p, p * demand.demand[swept] - cost]);
    }
    let mut payload = Vec::new();
    write_csv(&mut payload, &header, rows)?;
    emit(args.out.as_ref(), &payload)?;
    Ok(EXIT_OK)
}

fn cmd_br_curve(args: CurveArgs) -> Result<i32, CliError> {
    let file = load(&args.scenario)?;
    let scenario = &file.scenario;
    if scenario.num_services() != 2 {
        return Err(CliError::Usage(format!(
            "br-curve needs a two-service scenario, this one has {}",
            scenario.num_services()
        )));
    }
    let responder = service_index(scenario, args.service)?;
    let cfg = file.solver.resolve(scenario);
    cfg.validate()?;
    let lo = args.sweep_lo.unwrap_or(cfg.price_lo);
    let hi = args.sweep_hi.unwrap_or(cfg.price_hi);
    let grid = sweep_grid(lo, hi, args.steps)?;

    let other = 1 - responder;
    let header = vec!["opponent_price".to_string(), "best_response".to_string()];
    let mut rows = Vec::with_capacity(grid.len());
    for q in grid {
        let prices = PriceVector::new(vec![0.0, 0.0])?.with_price(other, q);
        let br = best_response(responder, &prices, scenario, &cfg)?;
        rows.push(vec![q, br.price]);
    }
    let mut payload = Vec::new();
    write_csv(&mut payload, &header, rows)?;
    emit(args.out.as_ref(), &payload)?;
    Ok(EXIT_OK)
}

fn cmd_nash(args: NashArgs) -> Result<i32, CliError> {
    let file = load(&args.scenario)?;
    let scenario = &file.scenario;
    let cfg = file.solver.resolve(scenario);
    cfg.validate()?;

    let initial = match args.initial {
        Some(prices) => {
            if prices.len() != scenario.num_services() {
                return Err(CliError::Usage(format!(
                    "--initial needs {} prices, got {}",
                    scenario.num_services(),
                    prices.len()
                )));
            }
            PriceVector::new(prices)?
        }
        None => {
            let mid = 0.5 * (cfg.price_lo + cfg.price_hi);
            PriceVector::new(vec![mid; scenario.num_services()])?
        }
    };

    let result = nash_solve(scenario, &cfg, &initial)?;
    let cert = verify_epsilon_nash(&result.prices, scenario, args.epsilon, args.check_grid)?;

    let fmt = |x: f64| format_sig(x, SIG_DIGITS);
    let join = |v: &[f64]| v.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(", ");
    let mut summary = String::new();
    summary.push_str(&format!("mode: {}\n", scenario.mode().name()));
    summary.push_str(&format!("services: {}\n", scenario.num_services()));
    summary.push_str(&format!("prices: {}\n", join(result.prices.as_slice())));
    summary.push_str(&format!("profits: {}\n", join(&result.profits)));
    summary.push_str(&format!("iterations: {}\n", result.iterations));
    summary.push_str(&format!("converged: {}\n", result.converged));
    summary.push_str(&format!("epsilon: {}\n", fmt(args.epsilon)));
    for check in &cert.checks {
        summary.push_str(&format!(
            "service {}: worst deviation gain {} at price {}\n",
            check.service + 1,
            fmt(check.best_deviation_gain),
            fmt(check.best_deviation_price),
        ));
    }
    summary.push_str(&format!("certified: {}\n", cert.passed));
    print!("{summary}");

    let header: Vec<String> = std::iter::once("iteration".to_string())
        .chain((1..=scenario.num_services()).map(|s| format!("p_{s}")))
        .collect();
    let rows = result.trace.iter().enumerate().map(|(i, prices)| {
        let mut row = vec![i as f64];
        row.extend_from_slice(prices.as_slice());
        row
    });
    let mut payload = Vec::new();
    write_csv(&mut payload, &header, rows)?;
    match args.out.as_ref() {
        Some(path) => fs::write(path, &payload)?,
        None => {
            println!();
            io::stdout().write_all(&payload)?;
        }
    }

    if !result.converged {
        Ok(EXIT_NO_CONVERGENCE)
    } else if !cert.passed {
        Ok(EXIT_CERTIFICATION)
    } else {
        Ok(EXIT_OK)
    }
}

fn cmd_voi(args: VoiArgs) -> Result<i32, CliError> {
    let file = load(&args.scenario)?;
    let voi: &VoiSection = file
        .voi
        .as_ref()
        .ok_or_else(|| CliError::Usage("scenario has no [voi] section".to_string()))?;

    let fmt = |x: f64| format_sig(x, SIG_DIGITS);
    let mut report = String::new();
    for (i, source) in voi.sources.iter().enumerate() {
        let problem = voi
            .base
            .with_channel(source.observations.clone(), source.channel.clone())
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let analysis = expected_voi(&problem);
        report.push_str(&format!(
            "source {}: {} observations, cost {}\n",
            i + 1,
            source.observations.len(),
            fmt(source.cost)
        ));
        report.push_str(&format!(
            "prior action: {}\n",
            problem.actions()[analysis.prior_action]
        ));
        for (y, a) in analysis.posterior_actions.iter().enumerate() {
            report.push_str(&format!(
                "action after {}: {}\n",
                problem.observations()[y],
                problem.actions()[*a]
            ));
        }
        report.push_str(&format!(
            "expected value: {}\n",
            fmt(analysis.expected_value)
        ));
        report.push_str(&format!(
            "gain: {}\n",
            fmt(information_gain(&problem, source.cost))
        ));
    }
    if voi.sources.len() > 1 {
        let (index, gain) =
            select_source(&voi.base, &voi.sources).map_err(|e| CliError::Usage(e.to_string()))?;
        report.push_str(&format!(
            "selected source: {} (gain {})\n",
            index + 1,
            fmt(gain)
        ));
    }
    emit(args.out.as_ref(), report.as_bytes())?;
    Ok(EXIT_OK)
}
