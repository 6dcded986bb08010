mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ghqc::bench::{run_suite, Suite};
use ghqc::oracles::{mc_price, McConfig};
use ghqc::pricers::{price, Discretization, PricingRequest, Scheme};

use config::ContractFile;
use report::{relative_error, write_csv, Row};

/// Environment variable holding the log filter (`error`, `warn`, `info`,
/// `debug`, `trace`).
const LOG_ENV: &str = "GHQC_LOG";

#[derive(Parser)]
#[command(name = "ghqc", version, about = "Exotic option pricing by Gauss-Hermite quadrature on cubic splines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price the contract described in a file.
    Price(PriceArgs),
    /// Run a reference suite and report errors against its exact prices.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Ghqc,
    GhqcM,
    Fd,
    Mc,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Ghqc => "ghqc",
            Method::GhqcM => "ghqc-m",
            Method::Fd => "fd",
            Method::Mc => "mc",
        }
    }

    fn scheme(self) -> Option<Scheme> {
        match self {
            Method::Ghqc => Some(Scheme::Ghqc),
            Method::GhqcM => Some(Scheme::GhqcM),
            Method::Fd => Some(Scheme::CrankNicolson),
            Method::Mc => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteName {
    Table1,
    Table2,
    Table3,
}

#[derive(Args, Debug)]
struct MeshArgs {
    /// Space intervals.
    #[arg(long = "M")]
    space_intervals: Option<usize>,
    /// Time steps (per year for the vanilla suites).
    #[arg(long = "N")]
    time_steps: Option<usize>,
    /// Quadrature order.
    #[arg(long = "q")]
    order: Option<usize>,
    /// Aux-grid intervals for path-dependent contracts.
    #[arg(long = "NA")]
    aux_intervals: Option<usize>,
    /// Domain half-width in standard deviations.
    #[arg(long)]
    width: Option<f64>,
}

impl MeshArgs {
    fn apply(&self, d: &mut Discretization) {
        if let Some(v) = self.space_intervals {
            d.space_intervals = v;
        }
        if let Some(v) = self.time_steps {
            d.time_steps = v;
        }
        if let Some(v) = self.order {
            d.order = v;
        }
        if let Some(v) = self.aux_intervals {
            d.aux_intervals = v;
        }
        if let Some(v) = self.width {
            d.width = v;
        }
    }
}

#[derive(Args, Debug)]
struct PriceArgs {
    #[arg(long)]
    contract: PathBuf,
    #[arg(long, value_enum, default_value = "ghqc")]
    method: Method,
    #[command(flatten)]
    mesh: MeshArgs,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Monte Carlo paths.
    #[arg(long, default_value_t = 200_000)]
    paths: usize,
    /// CSV output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave wall times out of the CSV so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(value_enum)]
    suite: SuiteName,
    #[arg(long, value_enum, default_value = "ghqc")]
    method: Method,
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timing: bool,
}

/// Exit status for an error: 3 for numerical failures, 2 for everything
/// else (unreadable or invalid input).
fn exit_code(err: &anyhow::Error) -> u8 {
    use ghqc::Error::*;
    match err.chain().find_map(|e| e.downcast_ref::<ghqc::Error>()) {
        Some(RootNotConverged { .. } | IllConditioned { .. } | OutOfRange { .. } | Numerical(_)) => 3,
        _ => 2,
    }
}

fn millis(d: Duration, timing: bool) -> Option<f64> {
    timing.then_some(d.as_secs_f64() * 1e3)
}

fn ensure_finite(id: &str, price: f64) -> Result<()> {
    if !price.is_finite() {
        return Err(ghqc::Error::Numerical(format!("{id}: non-finite price {price}")).into());
    }
    Ok(())
}

fn run_price(args: &PriceArgs) -> Result<()> {
    let file = ContractFile::load(&args.contract)?;
    log::info!("loaded {} from {}", file.id, args.contract.display());

    let row = match args.method.scheme() {
        None => {
            if args.paths < 2 {
                bail!(ghqc::Error::InvalidParameter("at least two Monte Carlo paths are needed".into()));
            }
            let start = std::time::Instant::now();
            let cfg = McConfig::new(args.paths, args.seed);
            let r = mc_price(&file.contract, &file.market, file.spot, &cfg)?;
            ensure_finite(&file.id, r.price)?;
            println!("id          {}", file.id);
            println!("method      mc ({} paths, seed {})", args.paths, args.seed);
            println!("price       {:.6}", r.price);
            println!("std error   {:.6}", r.std_error);
            Row {
                id: file.id.clone(),
                method: args.method.name().into(),
                space_intervals: None,
                time_steps: None,
                q: None,
                aux_intervals: None,
                price: r.price,
                reference: file.reference,
                rel_error: relative_error(r.price, file.reference),
                wall_millis: millis(start.elapsed(), !args.no_timing),
            }
        }
        Some(scheme) => {
            let mut disc = file.discretization.clone().with_scheme(scheme);
            args.mesh.apply(&mut disc);
            log::info!("discretization {disc:?}");
            let mut request = PricingRequest::new(
                file.contract.clone(),
                file.market.clone(),
                file.centre.unwrap_or(file.spot),
                disc.clone(),
            );
            if file.centre.is_some() {
                request = request.with_readout(vec![file.spot]);
            }
            let r = price(&request)?;
            let value = if file.centre.is_some() { r.curve[0].1 } else { r.price };
            ensure_finite(&file.id, value)?;
            let d = &r.diagnostics;
            if d.series_unconverged > 0 {
                log::warn!("{}: {} barrier series hit the term cap", file.id, d.series_unconverged);
            }
            println!("id          {}", file.id);
            println!(
                "method      {} (M={}, N={}, q={}, N_A={}, width={})",
                args.method.name(),
                disc.space_intervals,
                disc.time_steps,
                disc.order,
                disc.aux_intervals,
                disc.width
            );
            println!("price       {value:.6}");
            println!(
                "diagnostics outside={} aux_clamps={} series_unconverged={}",
                d.outside_points, d.aux_clamps, d.series_unconverged
            );
            Row {
                id: file.id.clone(),
                method: args.method.name().into(),
                space_intervals: Some(disc.space_intervals),
                time_steps: Some(disc.time_steps),
                q: Some(disc.order),
                aux_intervals: Some(disc.aux_intervals),
                price: value,
                reference: file.reference,
                rel_error: relative_error(value, file.reference),
                wall_millis: millis(r.wall, !args.no_timing),
            }
        }
    };
    if let (Some(reference), Some(e)) = (row.reference, row.rel_error) {
        println!("reference   {reference:.6} (relative error {e:.3e})");
    }
    if let Some(ms) = row.wall_millis {
        println!("wall        {ms:.2} ms");
    }
    if let Some(out) = &args.out {
        write_csv(out, &[row])?;
    }
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<()> {
    let suite = match args.suite {
        SuiteName::Table1 => Suite::Table1,
        SuiteName::Table2 => Suite::Table2,
        SuiteName::Table3 => Suite::Table3,
    };
    let Some(scheme) = args.method.scheme() else {
        bail!(ghqc::Error::InvalidParameter("bench suites run with ghqc, ghqc-m or fd".into()));
    };
    let mut base = suite.default_discretization(scheme);
    args.mesh.apply(&mut base);
    log::info!("{} with {base:?}", suite.name());

    let result = run_suite(suite, &base).with_context(|| format!("{} failed", suite.name()))?;
    let mut rows: Vec<Row> = result
        .cases
        .iter()
        .map(|c| {
            ensure_finite(&c.case.id, c.price)?;
            let d = &c.discretization;
            Ok(Row {
                id: c.case.id.clone(),
                method: args.method.name().into(),
                space_intervals: Some(d.space_intervals),
                time_steps: Some(d.time_steps),
                q: Some(d.order),
                aux_intervals: Some(d.aux_intervals),
                price: c.price,
                reference: Some(c.case.exact),
                rel_error: relative_error(c.price, Some(c.case.exact)),
                wall_millis: millis(c.wall, !args.no_timing),
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.id.cmp(&b.id));

    println!("{:<28} {:>12} {:>12} {:>11}", "case", "price", "exact", "rel error");
    for r in &rows {
        println!(
            "{:<28} {:>12.6} {:>12.6} {:>11.3e}",
            r.id,
            r.price,
            r.reference.unwrap_or(f64::NAN),
            r.rel_error.unwrap_or(f64::NAN)
        );
    }
    println!("rRMSE vs exact: {:.3e}", result.against_exact().rrmse);
    if !args.no_timing {
        println!("wall: {:.1} ms", result.wall.as_secs_f64() * 1e3);
    }
    if let Some(out) = &args.out {
        write_csv(out, &rows)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Price(a) => run_price(a),
        Command::Bench(a) => run_bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
