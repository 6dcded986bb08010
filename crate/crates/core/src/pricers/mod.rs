//! Backward-induction drivers: terminal payoff, per-step expectation,
//! date updates, and the readout at today's spot.

mod barrier;
mod path;
mod vanilla;

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use barrier::price_barrier;
pub use path::{price_asian, price_gmwb, price_tarn};
pub use vanilla::price_vanilla;

use crate::contracts::Contract;
use crate::engine::{BackwardStep, GhqcStepper, StepWeight, WeightScheme};
use crate::error::{invalid, Result};
use crate::model::{Market, MarketParams, SpatialGrid, TimeGrid};
use crate::oracles::fd::CnStepper;
use crate::quadrature::GaussHermiteRule;
use crate::spline::{Spline, SplineMode};

/// Backward step used by a pricing run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Quadrature on spline with Gauss-Hermite weights.
    #[default]
    Ghqc,
    /// Quadrature on spline with moment-matched weights.
    GhqcM,
    /// Crank-Nicolson finite differences on the same grid.
    CrankNicolson,
}

/// Mesh and method settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Discretization {
    /// Space intervals `M` (the grid has `M + 1` nodes).
    pub space_intervals: usize,
    /// Total time steps `N`; must be a multiple of the number of dates.
    pub time_steps: usize,
    /// Quadrature order `q`.
    pub order: usize,
    /// Aux-grid intervals `N_A` for path-dependent contracts.
    pub aux_intervals: usize,
    /// Far-boundary width in standard deviations.
    pub width: f64,
    pub spline: SplineMode,
    pub scheme: Scheme,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            space_intervals: 200,
            time_steps: 50,
            order: 5,
            aux_intervals: 50,
            width: 3.0,
            spline: SplineMode::FastCentral,
            scheme: Scheme::Ghqc,
        }
    }
}

impl Discretization {
    pub fn new(space_intervals: usize, time_steps: usize, order: usize) -> Self {
        Self { space_intervals, time_steps, order, ..Self::default() }
    }

    pub fn with_aux(mut self, aux_intervals: usize) -> Self {
        self.aux_intervals = aux_intervals;
        self
    }

    pub fn with_width(mut self, width: f64) -> Self {
        self.width = width;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_spline(mut self, spline: SplineMode) -> Self {
        self.spline = spline;
        self
    }

    /// Steps per date interval for a schedule of `dates` dates.
    pub(crate) fn substeps(&self, dates: usize) -> Result<usize> {
        if self.time_steps == 0 || !self.time_steps.is_multiple_of(dates) {
            return Err(invalid(format!(
                "time steps ({}) must be a positive multiple of the number of dates ({dates})",
                self.time_steps
            )));
        }
        Ok(self.time_steps / dates)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingRequest {
    pub contract: Contract,
    pub market: Market,
    pub spot: f64,
    pub discretization: Discretization,
    /// Further spots read from the same backward pass.
    pub readout_spots: Vec<f64>,
}

impl PricingRequest {
    pub fn new(contract: Contract, market: Market, spot: f64, discretization: Discretization) -> Self {
        Self { contract, market, spot, discretization, readout_spots: Vec::new() }
    }

    pub fn with_readout(mut self, spots: Vec<f64>) -> Self {
        self.readout_spots = spots;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Quadrature points that fell outside the grid while building steps.
    pub outside_points: usize,
    /// Aux-axis reads clamped to the aux range.
    pub aux_clamps: usize,
    /// Barrier series evaluations that hit the term cap.
    pub series_unconverged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingResult {
    pub price: f64,
    /// `(spot, price)` for each requested readout spot.
    pub curve: Vec<(f64, f64)>,
    pub diagnostics: Diagnostics,
    pub wall: Duration,
}

/// Prices any contract.
pub fn price(request: &PricingRequest) -> Result<PricingResult> {
    let start = Instant::now();
    request.contract.validate()?;
    if !(request.spot > 0.0) {
        return Err(invalid("spot must be positive"));
    }
    let mut out = match &request.contract {
        Contract::Vanilla(c) => price_vanilla(c, request)?,
        Contract::Barrier(c) => price_barrier(c, request)?,
        Contract::Asian(c) => price_asian(c, request)?,
        Contract::Tarn(c) => price_tarn(c, request)?,
        Contract::Gmwb(c) => price_gmwb(c, request)?,
    };
    out.wall = start.elapsed();
    Ok(out)
}

/// Time grid with `substeps` steps per date interval plus market
/// parameters on it.
pub(crate) fn schedule(
    dates: &[f64],
    disc: &Discretization,
    market: &Market,
    fee: f64,
) -> Result<(TimeGrid, Vec<usize>, MarketParams)> {
    let substeps = disc.substeps(dates.len())?;
    let (times, date_steps) = TimeGrid::with_dates(dates, substeps)?;
    let params = market.params_for(&times, fee)?;
    Ok((times, date_steps, params))
}

/// Builds the stepper selected by the discretization.
pub(crate) fn make_stepper(
    disc: &Discretization,
    grid: SpatialGrid,
    params: MarketParams,
    times: TimeGrid,
    weighting: Option<Arc<dyn StepWeight>>,
) -> Result<Box<dyn BackwardStep>> {
    let scheme = match disc.scheme {
        Scheme::Ghqc => WeightScheme::GaussHermite,
        Scheme::GhqcM => WeightScheme::MomentMatched,
        Scheme::CrankNicolson => {
            if weighting.is_some() {
                return Err(invalid("finite differences do not support step weightings"));
            }
            return Ok(Box::new(CnStepper::new(grid, params, times)?));
        }
    };
    let rule = GaussHermiteRule::new(disc.order)?;
    let mut st = GhqcStepper::new(grid, params, times, rule, scheme, disc.spline)?;
    if let Some(w) = weighting {
        st = st.with_weighting(w);
    }
    Ok(Box::new(st))
}

/// Spline readout of a `t = 0` vector at the requested spots.
pub(crate) fn readout(
    values: &[f64],
    grid: &SpatialGrid,
    mode: SplineMode,
    spot: f64,
    extra: &[f64],
) -> Result<(f64, Vec<(f64, f64)>)> {
    let spline = Spline::fit_uniform(mode, grid.knots(), values)?;
    let at = |s: f64| spline.eval(grid.x_of(s));
    Ok((at(spot), extra.iter().map(|&s| (s, at(s))).collect()))
}

/// Event index at each step index (`None` for plain steps).
pub(crate) fn date_lookup(date_steps: &[usize], steps: usize) -> Vec<Option<usize>> {
    let mut out = vec![None; steps + 1];
    for (k, &n) in date_steps.iter().enumerate() {
        out[n] = Some(k);
    }
    out
}
