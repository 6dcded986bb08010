use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::{validate_dates, OptionKind};
use crate::engine::StepWeight;
use crate::error::{invalid, Result};
use crate::model::{MarketParams, SpatialGrid, TimeGrid};

/// Default truncation tolerance of the double-barrier series.
pub const SERIES_TOL: f64 = 1e-12;
/// Maximum number of series terms.
pub const SERIES_CAP: usize = 50;

/// Relative slack when deciding whether a grid node sits on a barrier.
const LEVEL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monitoring {
    /// Barrier checked on the monitoring dates only.
    Discrete,
    /// Continuous monitoring of the single finite barrier.
    ContinuousSingle,
    /// Continuous monitoring of both barriers.
    ContinuousDouble,
}

/// Knock-out option with per-period barriers. Period `k` ends on
/// `monitoring_dates[k]`; the last date is the maturity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub strike: f64,
    pub option: OptionKind,
    pub monitoring_dates: Vec<f64>,
    /// Lower barrier per period (one value applies to all periods; empty
    /// or 0 means none).
    #[serde(default)]
    pub lower: Vec<f64>,
    /// Upper barrier per period (empty or infinite means none).
    #[serde(default)]
    pub upper: Vec<f64>,
    pub monitoring: Monitoring,
}

fn per_period(levels: &[f64], k: usize, none: f64) -> f64 {
    match levels.len() {
        0 => none,
        1 => levels[0],
        _ => levels[k],
    }
}

impl BarrierSpec {
    pub fn maturity(&self) -> f64 {
        self.monitoring_dates.last().copied().unwrap_or(0.0)
    }

    pub fn periods(&self) -> usize {
        self.monitoring_dates.len()
    }

    /// `(L, U)` of period `k` (0-based).
    pub fn band(&self, k: usize) -> (f64, f64) {
        (per_period(&self.lower, k, 0.0), per_period(&self.upper, k, f64::INFINITY))
    }

    /// Smallest lower and largest upper barrier over all periods.
    pub fn outer_band(&self) -> (f64, f64) {
        (0..self.periods()).map(|k| self.band(k)).fold((f64::INFINITY, 0.0), |(l, u), (bl, bu)| (l.min(bl), u.max(bu)))
    }

    pub fn validate(&self) -> Result<()> {
        validate_dates(&self.monitoring_dates, "barrier monitoring")?;
        if !(self.strike > 0.0) {
            return Err(invalid("barrier: strike must be positive"));
        }
        let n = self.periods();
        for (name, v) in [("lower", &self.lower), ("upper", &self.upper)] {
            if v.len() > 1 && v.len() != n {
                return Err(invalid(format!("barrier: {name} needs 0, 1 or {n} levels, got {}", v.len())));
            }
        }
        for k in 0..n {
            let (l, u) = self.band(k);
            if !(l >= 0.0) || !(u > l) {
                return Err(invalid(format!("barrier: period {k} needs 0 <= L < U (got {l}, {u})")));
            }
            if self.monitoring == Monitoring::ContinuousSingle && l > 0.0 && u.is_finite() {
                return Err(invalid("barrier: single-barrier monitoring with two finite barriers"));
            }
        }
        Ok(())
    }

    /// Payoff at maturity, zero outside the last period's band.
    pub fn terminal_payoff(&self, grid: &SpatialGrid) -> Vec<f64> {
        let mut v: Vec<f64> = (0..grid.len()).map(|m| self.option.payoff(grid.s(m), self.strike)).collect();
        self.knock_out(&mut v, grid, self.periods() - 1);
        v
    }

    /// Zeroes nodes strictly outside the closed band of period `k`.
    pub fn knock_out(&self, values: &mut [f64], grid: &SpatialGrid, k: usize) {
        let (l, u) = self.band(k);
        for (m, v) in values.iter_mut().enumerate() {
            let s = grid.s(m);
            if s < l * (1.0 - LEVEL_SLACK) || s > u * (1.0 + LEVEL_SLACK) {
                *v = 0.0;
            }
        }
    }
}

/// Probability of staying on one side of `barrier` over a step, given
/// both endpoints. Zero when the endpoints straddle or touch the barrier.
pub fn no_hit_single(s: f64, s_next: f64, barrier: f64, vol: f64, dt: f64) -> f64 {
    if barrier <= 0.0 || barrier.is_infinite() {
        return 1.0;
    }
    if (s - barrier) * (s_next - barrier) <= 0.0 {
        return 0.0;
    }
    let e = 2.0 * (s_next / barrier).ln() * (s / barrier).ln() / (vol * vol * dt);
    (1.0 - (-e).exp()).clamp(0.0, 1.0)
}

/// Double-barrier survival probability and whether the series converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoHit {
    pub prob: f64,
    pub converged: bool,
}

/// Probability of staying strictly inside `(lower, upper)` over a step,
/// given both endpoints (method of images).
pub fn no_hit_double(s: f64, s_next: f64, lower: f64, upper: f64, vol: f64, dt: f64, tol: f64) -> NoHit {
    if !(s > lower && s < upper && s_next > lower && s_next < upper) {
        return NoHit { prob: 0.0, converged: true };
    }
    if lower <= 0.0 {
        return NoHit { prob: no_hit_single(s, s_next, upper, vol, dt), converged: true };
    }
    if upper.is_infinite() {
        return NoHit { prob: no_hit_single(s, s_next, lower, vol, dt), converged: true };
    }
    let two_var = 2.0 * vol * vol * dt;
    let x = (s_next / s).ln();
    let alpha = 2.0 * (upper / lower).ln();
    let beta = 2.0 * (upper / s).ln();
    let gamma = 2.0 * (s / lower).ln();
    let r = |z: f64| (-z * (z - 2.0 * x) / two_var).exp();
    let mut p = 1.0;
    let mut converged = false;
    for m in 1..=SERIES_CAP {
        let am = alpha * m as f64;
        let term = r(am) + r(-am) - r(am - gamma) - r(-am + beta);
        p += term;
        if term.abs() < tol {
            converged = true;
            break;
        }
    }
    NoHit { prob: p.clamp(0.0, 1.0), converged }
}

#[derive(Debug, Clone, Copy)]
struct StepInfo {
    period: usize,
    vol: f64,
    dt: f64,
    ends_on_date: bool,
}

/// Barrier multiplier for the quadrature points of each step.
pub struct BarrierWeight {
    spec: BarrierSpec,
    steps: Vec<StepInfo>,
    unconverged: AtomicUsize,
}

impl BarrierWeight {
    /// `date_steps[k]` is the step index of monitoring date `k`.
    pub fn new(spec: BarrierSpec, params: &MarketParams, times: &TimeGrid, date_steps: &[usize]) -> Result<Self> {
        if date_steps.len() != spec.periods() {
            return Err(invalid("barrier: one step index per monitoring date required"));
        }
        let mut steps = Vec::with_capacity(times.steps());
        let mut k = 0;
        for n in 1..=times.steps() {
            while k < date_steps.len() && date_steps[k] < n {
                k += 1;
            }
            let period = k.min(spec.periods() - 1);
            steps.push(StepInfo {
                period,
                vol: params.vol(n),
                dt: times.dt(n),
                ends_on_date: date_steps.get(k) == Some(&n),
            });
        }
        Ok(Self { spec, steps, unconverged: AtomicUsize::new(0) })
    }

    /// Series evaluations that hit the term cap.
    pub fn unconverged(&self) -> usize {
        self.unconverged.load(Ordering::Relaxed)
    }
}

impl StepWeight for BarrierWeight {
    fn key(&self, n: usize) -> u64 {
        let info = self.steps[n - 1];
        let (l, u) = self.spec.band(info.period);
        let mut h = DefaultHasher::new();
        (l.to_bits(), u.to_bits(), info.ends_on_date).hash(&mut h);
        h.finish()
    }

    fn weight(&self, n: usize, s: f64, s_next: f64) -> f64 {
        let info = self.steps[n - 1];
        let (l, u) = self.spec.band(info.period);
        match self.spec.monitoring {
            Monitoring::Discrete => {
                if info.ends_on_date && (s_next < l || s_next > u) {
                    0.0
                } else {
                    1.0
                }
            }
            Monitoring::ContinuousSingle => {
                let b = if l > 0.0 { l } else { u };
                no_hit_single(s, s_next, b, info.vol, info.dt)
            }
            Monitoring::ContinuousDouble => {
                let r = no_hit_double(s, s_next, l, u, info.vol, info.dt, SERIES_TOL);
                if !r.converged {
                    self.unconverged.fetch_add(1, Ordering::Relaxed);
                }
                r.prob
            }
        }
    }
}
