//! Lognormal market model and its space/time discretisation.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spline::UniformKnots;

/// Piecewise-constant market parameters over one time interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketSegment {
    /// End of the interval (years).
    pub until: f64,
    /// Risk-neutral drift of the underlying (rate minus dividend yield).
    pub drift: f64,
    /// Discount rate.
    pub rate: f64,
    pub vol: f64,
}

/// Market description as a list of piecewise-constant segments. The last
/// segment extends to infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Market {
    pub segments: Vec<MarketSegment>,
}

impl Market {
    pub fn constant(drift: f64, rate: f64, vol: f64) -> Self {
        Self { segments: vec![MarketSegment { until: f64::INFINITY, drift, rate, vol }] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(invalid("market needs at least one segment"));
        }
        for s in &self.segments {
            if !(s.vol > 0.0 && s.vol.is_finite()) {
                return Err(invalid(format!("volatility must be positive, got {}", s.vol)));
            }
            if !s.drift.is_finite() || !s.rate.is_finite() {
                return Err(invalid("drift and rate must be finite"));
            }
        }
        if self.segments.windows(2).any(|p| !(p[1].until > p[0].until)) {
            return Err(invalid("market segments must have increasing end times"));
        }
        Ok(())
    }

    /// Segment in force at time `t` (left-open intervals).
    pub fn at(&self, t: f64) -> &MarketSegment {
        self.segments.iter().find(|s| t <= s.until).unwrap_or_else(|| self.segments.last().expect("validated"))
    }

    /// Per-step parameters on a time grid, sampled at the step midpoints.
    pub fn params_for(&self, times: &TimeGrid, fee: f64) -> Result<MarketParams> {
        self.validate()?;
        let n = times.steps();
        let mut drift = Vec::with_capacity(n);
        let mut rate = Vec::with_capacity(n);
        let mut vol = Vec::with_capacity(n);
        for i in 1..=n {
            let seg = self.at(0.5 * (times.time(i - 1) + times.time(i)));
            drift.push(seg.drift);
            rate.push(seg.rate);
            vol.push(seg.vol);
        }
        MarketParams::new(drift, rate, vol, fee)
    }
}

/// Per-step drift, discount rate and volatility, `n = 1..=N` stored at
/// index `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketParams {
    drift: Vec<f64>,
    rate: Vec<f64>,
    vol: Vec<f64>,
    fee: f64,
}

impl MarketParams {
    pub fn new(drift: Vec<f64>, rate: Vec<f64>, vol: Vec<f64>, fee: f64) -> Result<Self> {
        let n = drift.len();
        if rate.len() != n || vol.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: rate.len().min(vol.len()) });
        }
        if vol.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(invalid("volatility must be positive in every step"));
        }
        if !fee.is_finite() {
            return Err(invalid("fee must be finite"));
        }
        Ok(Self { drift, rate, vol, fee })
    }

    pub fn constant(drift: f64, rate: f64, vol: f64, steps: usize) -> Result<Self> {
        Self::new(vec![drift; steps], vec![rate; steps], vec![vol; steps], 0.0)
    }

    pub fn with_fee(mut self, fee: f64) -> Self {
        self.fee = fee;
        self
    }

    pub fn steps(&self) -> usize {
        self.drift.len()
    }

    pub fn fee(&self) -> f64 {
        self.fee
    }

    /// Drift of step `n` (1-based) net of the fee.
    pub fn drift(&self, n: usize) -> f64 {
        self.drift[n - 1] - self.fee
    }

    pub fn rate(&self, n: usize) -> f64 {
        self.rate[n - 1]
    }

    pub fn vol(&self, n: usize) -> f64 {
        self.vol[n - 1]
    }
}

/// Time discretisation `0 = t_0 < t_1 < ... < t_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times[0] != 0.0 {
            return Err(invalid("time grid must start at 0 and contain at least one step"));
        }
        if times.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(invalid("time grid must be strictly increasing"));
        }
        Ok(Self { times })
    }

    pub fn uniform(maturity: f64, steps: usize) -> Result<Self> {
        if !(maturity > 0.0) || steps == 0 {
            return Err(invalid("uniform time grid needs T > 0 and N >= 1"));
        }
        Self::new((0..=steps).map(|i| maturity * i as f64 / steps as f64).collect())
    }

    /// Subdivides each interval between consecutive `dates` into
    /// `substeps` equal steps. Returns the grid and, for every date, its
    /// step index.
    pub fn with_dates(dates: &[f64], substeps: usize) -> Result<(Self, Vec<usize>)> {
        if dates.is_empty() || substeps == 0 {
            return Err(invalid("need at least one date and one step per date"));
        }
        let mut times = vec![0.0];
        let mut indices = Vec::with_capacity(dates.len());
        let mut prev = 0.0;
        for &d in dates {
            if !(d > prev) {
                return Err(invalid(format!(
                    "monitoring dates must be positive and increasing (got {d} after {prev})"
                )));
            }
            for k in 1..=substeps {
                times.push(if k == substeps { d } else { prev + (d - prev) * k as f64 / substeps as f64 });
            }
            indices.push(times.len() - 1);
            prev = d;
        }
        Ok((Self::new(times)?, indices))
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn time(&self, n: usize) -> f64 {
        self.times[n]
    }

    pub fn dt(&self, n: usize) -> f64 {
        self.times[n] - self.times[n - 1]
    }

    pub fn maturity(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Uniform grid in `X = ln(S / S(0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    spot: f64,
    knots: UniformKnots,
}

impl SpatialGrid {
    pub fn new(spot: f64, x_min: f64, x_max: f64, intervals: usize) -> Result<Self> {
        if !(spot > 0.0 && spot.is_finite()) {
            return Err(Error::InvalidGrid(format!("spot must be positive, got {spot}")));
        }
        if intervals < 4 {
            return Err(Error::InvalidGrid(format!("need at least 4 intervals, got {intervals}")));
        }
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!("bad log-domain [{x_min}, {x_max}]")));
        }
        let dx = (x_max - x_min) / intervals as f64;
        Ok(Self { spot, knots: UniformKnots::new(x_min, dx, intervals)? })
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn intervals(&self) -> usize {
        self.knots.intervals
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.knots.dx
    }

    pub fn x_min(&self) -> f64 {
        self.knots.x0
    }

    pub fn x_max(&self) -> f64 {
        self.knots.last()
    }

    pub fn x(&self, m: usize) -> f64 {
        self.knots.knot(m)
    }

    pub fn s(&self, m: usize) -> f64 {
        self.spot * self.x(m).exp()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|m| self.x(m)).collect()
    }

    pub fn asset_values(&self) -> Vec<f64> {
        (0..self.len()).map(|m| self.s(m)).collect()
    }

    pub fn knots(&self) -> UniformKnots {
        self.knots
    }

    /// Log-coordinate of an asset level.
    pub fn x_of(&self, s: f64) -> f64 {
        (s / self.spot).ln()
    }
}

/// Log-domain `[X_min, X_max]` covering `width` standard deviations either
/// side of the spot and of the mean at maturity, using time-averaged
/// drift and volatility.
pub fn boundary_domain(params: &MarketParams, times: &TimeGrid, width: f64) -> Result<(f64, f64)> {
    if !(width > 0.0) {
        return Err(invalid(format!("width must be positive, got {width}")));
    }
    if params.steps() != times.steps() {
        return Err(Error::DimensionMismatch { expected: times.steps(), actual: params.steps() });
    }
    let mut nu_total = 0.0;
    let mut var_total = 0.0;
    for n in 1..=times.steps() {
        let dt = times.dt(n);
        let s = params.vol(n);
        nu_total += (params.drift(n) - 0.5 * s * s) * dt;
        var_total += s * s * dt;
    }
    if !(var_total > 0.0) {
        return Err(invalid("degenerate volatility"));
    }
    let spread = width * var_total.sqrt();
    Ok(((nu_total - spread).min(-spread), (nu_total + spread).max(spread)))
}

/// Builds the uniform log-asset grid with `intervals` cells on the
/// far-boundary domain of [`boundary_domain`].
pub fn build_grid(
    spot: f64,
    params: &MarketParams,
    times: &TimeGrid,
    intervals: usize,
    width: f64,
) -> Result<SpatialGrid> {
    let (lo, hi) = boundary_domain(params, times, width)?;
    SpatialGrid::new(spot, lo, hi, intervals)
}

/// Log-drift, log-volatility and discount factor of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTransition {
    /// `(mu - sigma^2 / 2) dt`
    pub drift: f64,
    /// `sigma sqrt(dt)`
    pub vol: f64,
    /// `exp(-r dt)`
    pub discount: f64,
}

impl StepTransition {
    pub fn new(drift: f64, rate: f64, vol: f64, dt: f64) -> Self {
        Self { drift: (drift - 0.5 * vol * vol) * dt, vol: vol * dt.sqrt(), discount: (-rate * dt).exp() }
    }
}

/// Transition constants of step `n` (`1 <= n <= N`).
pub fn transition(params: &MarketParams, times: &TimeGrid, n: usize) -> Result<StepTransition> {
    if n == 0 || n > times.steps() || n > params.steps() {
        return Err(invalid(format!("step index {n} outside 1..={}", times.steps())));
    }
    Ok(StepTransition::new(params.drift(n), params.rate(n), params.vol(n), times.dt(n)))
}
