//! Contract files.
//!
//! A contract file is TOML with a few top-level keys and three sections:
//!
//! ```toml
//! id = "bermudan-put"        # optional, defaults to the file stem
//! spot = 36.0                # spot price S(0)
//! centre = 40.0              # optional grid centre; the price is read out at `spot`
//! reference = 4.4781         # optional reference price for the relative error
//!
//! [market]                   # rates and volatility per year, as decimals
//! drift = 0.06               # risk-neutral drift (rate minus dividend yield)
//! rate = 0.06                # discount rate
//! vol = 0.2
//!
//! [contract]
//! kind = "vanilla"           # vanilla | barrier | asian | tarn | gmwb
//! option = "put"
//! strike = 40.0
//! maturity = 1.0             # years
//! style = "bermudan"         # european | bermudan | american
//! dates = [0.1, 0.2, 0.3]    # exercise dates in years
//!
//! [discretization]           # optional; command-line flags take precedence
//! space_intervals = 200
//! time_steps = 250           # total steps, a multiple of the date count
//! order = 5
//! aux_intervals = 50
//! width = 3.0                # domain half-width in standard deviations
//! ```
//!
//! Piecewise-constant markets use `[[market.segments]]` tables with
//! `until`, `drift`, `rate` and `vol`; the last segment extends forever.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ghqc::contracts::Contract;
use ghqc::model::{Market, MarketSegment};
use ghqc::pricers::Discretization;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum MarketSection {
    Flat { drift: f64, rate: f64, vol: f64 },
    Segmented { segments: Vec<MarketSegment> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    id: Option<String>,
    spot: f64,
    centre: Option<f64>,
    reference: Option<f64>,
    market: MarketSection,
    contract: Contract,
    discretization: Option<Discretization>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractFile {
    pub id: String,
    pub spot: f64,
    pub centre: Option<f64>,
    pub reference: Option<f64>,
    pub market: Market,
    pub contract: Contract,
    pub discretization: Discretization,
}

impl ContractFile {
    pub fn parse(text: &str, default_id: &str) -> Result<Self> {
        let raw: RawFile = toml::from_str(text)?;
        let market = match raw.market {
            MarketSection::Flat { drift, rate, vol } => Market::constant(drift, rate, vol),
            MarketSection::Segmented { segments } => Market { segments },
        };
        market.validate()?;
        raw.contract.validate()?;
        let positive = |v: f64| v > 0.0;
        if !positive(raw.spot) || raw.centre.is_some_and(|c| !positive(c)) {
            bail!("spot and centre must be positive");
        }
        Ok(Self {
            id: raw.id.unwrap_or_else(|| default_id.to_string()),
            spot: raw.spot,
            centre: raw.centre,
            reference: raw.reference,
            market,
            contract: raw.contract,
            discretization: raw.discretization.unwrap_or_default(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("contract");
        Self::parse(&text, stem).with_context(|| format!("invalid contract file {}", path.display()))
    }
}
