//! Benchmark suites with embedded reference prices, and relative-error
//! reporting.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Deserialize;

use crate::contracts::{Contract, Knockout, OptionKind, TarnSpec, VanillaSpec};
use crate::error::{Error, Result};
use crate::model::Market;
use crate::pricers::{price, Discretization, PricingRequest, Scheme};

const TABLE1: &str = include_str!("../data/table1.toml");
const TABLE2: &str = include_str!("../data/table2.toml");
const TABLE3: &str = include_str!("../data/table3.toml");

/// Root mean square of `(estimate - reference) / reference`.
pub fn rrmse(estimates: &[f64], references: &[f64]) -> f64 {
    assert_eq!(estimates.len(), references.len(), "rrmse needs paired values");
    if estimates.is_empty() {
        return 0.0;
    }
    let sum: f64 = estimates.iter().zip(references).map(|(e, r)| ((e - r) / r).powi(2)).sum();
    (sum / estimates.len() as f64).sqrt()
}

/// Relative errors of a suite against one reference column.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub reference: String,
    pub relative_errors: Vec<f64>,
    pub rrmse: f64,
}

impl ErrorReport {
    pub fn new(reference: impl Into<String>, estimates: &[f64], references: &[f64]) -> Self {
        Self {
            reference: reference.into(),
            relative_errors: estimates.iter().zip(references).map(|(e, r)| (e - r) / r).collect(),
            rrmse: rrmse(estimates, references),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Bermudan puts.
    Table1,
    /// American puts.
    Table2,
    /// TARN calls.
    Table3,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Table1 => "table1",
            Suite::Table2 => "table2",
            Suite::Table3 => "table3",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "table1" => Some(Suite::Table1),
            "table2" => Some(Suite::Table2),
            "table3" => Some(Suite::Table3),
            _ => None,
        }
    }

    /// Published mesh of the suite for the given scheme.
    pub fn default_discretization(self, scheme: Scheme) -> Discretization {
        match (self, scheme) {
            (Suite::Table1, Scheme::CrankNicolson) => Discretization::new(400, 1500, 2),
            (Suite::Table1, _) => Discretization::new(200, 250, 5),
            (Suite::Table2, _) => Discretization::new(500, 3000, 16),
            (Suite::Table3, _) => Discretization::new(500, 300, 6).with_aux(50),
        }
        .with_scheme(scheme)
    }
}

/// One benchmark case with its references.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub id: String,
    pub contract: Contract,
    pub market: Market,
    pub spot: f64,
    /// Whether the suite's step count is per year of maturity.
    pub steps_per_year: bool,
    pub exact: f64,
    pub published_ghqc: f64,
    /// Published finite-difference value where available.
    pub published_fd: Option<f64>,
    /// Published Monte Carlo value where available.
    pub published_mc: Option<f64>,
}

#[derive(Deserialize)]
struct T1Case {
    spot: f64,
    vol: f64,
    maturity: f64,
    exact: f64,
    ghqc: f64,
    cn: f64,
}

#[derive(Deserialize)]
struct T1 {
    strike: f64,
    rate: f64,
    drift: f64,
    exercises_per_year: usize,
    cases: Vec<T1Case>,
}

#[derive(Deserialize)]
struct T2Case {
    spot: f64,
    exact: f64,
    ghqc: f64,
}

#[derive(Deserialize)]
struct T2 {
    strike: f64,
    maturity: f64,
    vol: f64,
    rate: f64,
    dividend: f64,
    centre: f64,
    cases: Vec<T2Case>,
}

#[derive(Deserialize)]
struct T3Case {
    knockout: Knockout,
    target: f64,
    exact: f64,
    ghqc: f64,
    fd: f64,
    mc: f64,
}

#[derive(Deserialize)]
struct T3 {
    spot: f64,
    strike: f64,
    vol: f64,
    rate: f64,
    fixings: usize,
    days_between_fixings: f64,
    cases: Vec<T3Case>,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> T {
    toml::from_str(text).expect("embedded reference data is valid")
}

/// Cases of a suite. Vanilla cases that differ only in spot share one
/// backward pass centred at the strike (or the listed centre) and are read
/// out at their own spots.
pub fn cases(suite: Suite) -> Vec<Case> {
    match suite {
        Suite::Table1 => {
            let t: T1 = parse(TABLE1);
            t.cases
                .iter()
                .map(|c| Case {
                    id: format!("put-S{}-v{}-T{}", c.spot, c.vol, c.maturity),
                    contract: Contract::Vanilla(VanillaSpec::bermudan(
                        OptionKind::Put,
                        t.strike,
                        c.maturity,
                        t.exercises_per_year,
                    )),
                    market: Market::constant(t.drift, t.rate, c.vol),
                    spot: c.spot,
                    steps_per_year: true,
                    exact: c.exact,
                    published_ghqc: c.ghqc,
                    published_fd: Some(c.cn),
                    published_mc: None,
                })
                .collect()
        }
        Suite::Table2 => {
            let t: T2 = parse(TABLE2);
            t.cases
                .iter()
                .map(|c| Case {
                    id: format!("american-S{}", c.spot),
                    contract: Contract::Vanilla(VanillaSpec::american(OptionKind::Put, t.strike, t.maturity)),
                    market: Market::constant(t.rate - t.dividend, t.rate, t.vol),
                    spot: c.spot,
                    steps_per_year: true,
                    exact: c.exact,
                    published_ghqc: c.ghqc,
                    published_fd: None,
                    published_mc: None,
                })
                .collect()
        }
        Suite::Table3 => {
            let t: T3 = parse(TABLE3);
            let dates: Vec<f64> = (1..=t.fixings).map(|k| k as f64 * t.days_between_fixings / 365.0).collect();
            t.cases
                .iter()
                .map(|c| Case {
                    id: format!("tarn-{}-U{}", knockout_name(c.knockout), c.target),
                    contract: Contract::Tarn(TarnSpec {
                        strike: t.strike,
                        option: OptionKind::Call,
                        target: c.target,
                        knockout: c.knockout,
                        fixing_dates: dates.clone(),
                    }),
                    market: Market::constant(t.rate, t.rate, t.vol),
                    spot: t.spot,
                    steps_per_year: false,
                    exact: c.exact,
                    published_ghqc: c.ghqc,
                    published_fd: Some(c.fd),
                    published_mc: Some(c.mc),
                })
                .collect()
        }
    }
}

pub fn knockout_name(k: Knockout) -> &'static str {
    match k {
        Knockout::FullGain => "full-gain",
        Knockout::NoGain => "no-gain",
        Knockout::PartGain => "part-gain",
    }
}

/// Result of one priced case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub case: Case,
    pub discretization: Discretization,
    pub price: f64,
    pub wall: Duration,
}

/// Result of a whole suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub suite: Suite,
    pub cases: Vec<CaseResult>,
    pub wall: Duration,
}

impl SuiteResult {
    pub fn prices(&self) -> Vec<f64> {
        self.cases.iter().map(|c| c.price).collect()
    }

    pub fn against_exact(&self) -> ErrorReport {
        let refs: Vec<f64> = self.cases.iter().map(|c| c.case.exact).collect();
        ErrorReport::new("exact", &self.prices(), &refs)
    }
}

/// Discretization of a case: step counts per year are scaled by maturity.
fn case_discretization(case: &Case, base: &Discretization) -> Result<Discretization> {
    let mut d = base.clone();
    if case.steps_per_year {
        let n = base.time_steps as f64 * case.contract.maturity();
        if (n - n.round()).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("{} steps per year do not fit maturity", base.time_steps)));
        }
        d.time_steps = n.round() as usize;
    }
    Ok(d)
}

/// Prices a suite. `base.time_steps` is per year for the vanilla suites
/// and absolute for the TARN suite.
pub fn run_suite(suite: Suite, base: &Discretization) -> Result<SuiteResult> {
    let start = Instant::now();
    let all = cases(suite);
    let results = match suite {
        Suite::Table1 => {
            let t: T1 = parse(TABLE1);
            let order: Vec<String> = all.iter().map(|c| c.id.clone()).collect();
            let mut groups: Vec<Vec<Case>> = Vec::new();
            for c in all {
                let key = |x: &Case| (x.market.clone(), x.contract.maturity().to_bits());
                match groups.iter_mut().find(|g| key(&g[0]) == key(&c)) {
                    Some(g) => g.push(c),
                    None => groups.push(vec![c]),
                }
            }
            let done = groups.par_iter().map(|g| run_group(g, base, t.strike)).collect::<Result<Vec<_>>>()?;
            let mut flat: Vec<CaseResult> = done.into_iter().flatten().collect();
            flat.sort_by_key(|r| order.iter().position(|id| *id == r.case.id));
            flat
        }
        Suite::Table2 => {
            let t: T2 = parse(TABLE2);
            run_group(&all, base, t.centre)?
        }
        Suite::Table3 => all
            .par_iter()
            .map(|c| {
                let d = case_discretization(c, base)?;
                let t0 = Instant::now();
                let r = price(&PricingRequest::new(c.contract.clone(), c.market.clone(), c.spot, d.clone()))?;
                Ok(CaseResult { case: c.clone(), discretization: d, price: r.price, wall: t0.elapsed() })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(SuiteResult { suite, cases: results, wall: start.elapsed() })
}

/// Cases sharing a contract and market, priced in a single pass centred at
/// `centre` and read out at each case's spot.
fn run_group(all: &[Case], base: &Discretization, centre: f64) -> Result<Vec<CaseResult>> {
    let first = &all[0];
    let d = case_discretization(first, base)?;
    let spots: Vec<f64> = all.iter().map(|c| c.spot).collect();
    let t0 = Instant::now();
    let r = price(
        &PricingRequest::new(first.contract.clone(), first.market.clone(), centre, d.clone()).with_readout(spots),
    )?;
    let wall = t0.elapsed();
    Ok(all
        .iter()
        .zip(&r.curve)
        .map(|(c, &(_, p))| CaseResult { case: c.clone(), discretization: d.clone(), price: p, wall })
        .collect())
}
