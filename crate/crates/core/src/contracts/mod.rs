//! Contract definitions, terminal payoffs and the updates applied on
//! exercise, monitoring, fixing and withdrawal dates.

pub mod asian;
pub mod barrier;
pub mod gmwb;
pub mod tarn;
pub mod vanilla;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spline::{Stencil, UniformKnots};

pub use asian::{asian_jump, AsianSpec, AsianStrike};
pub use barrier::{no_hit_double, no_hit_single, BarrierSpec, BarrierWeight, Monitoring, NoHit};
pub use gmwb::{gmwb_jump, GmwbMode, GmwbSpec};
pub use tarn::{tarn_jump, Knockout, TarnSpec};
pub use vanilla::{exercise_update, ExerciseStyle, VanillaSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

impl OptionKind {
    /// `+1` for calls, `-1` for puts.
    pub fn sign(self) -> f64 {
        match self {
            OptionKind::Call => 1.0,
            OptionKind::Put => -1.0,
        }
    }

    /// `max(0, sign * (s - k))`.
    pub fn payoff(self, s: f64, k: f64) -> f64 {
        (self.sign() * (s - k)).max(0.0)
    }
}

/// Any supported contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Contract {
    Vanilla(VanillaSpec),
    Barrier(BarrierSpec),
    Asian(AsianSpec),
    Tarn(TarnSpec),
    Gmwb(GmwbSpec),
}

impl Contract {
    pub fn validate(&self) -> Result<()> {
        match self {
            Contract::Vanilla(c) => c.validate(),
            Contract::Barrier(c) => c.validate(),
            Contract::Asian(c) => c.validate(),
            Contract::Tarn(c) => c.validate(),
            Contract::Gmwb(c) => c.validate(),
        }
    }

    pub fn maturity(&self) -> f64 {
        match self {
            Contract::Vanilla(c) => c.maturity,
            Contract::Barrier(c) => c.maturity(),
            Contract::Asian(c) => c.maturity(),
            Contract::Tarn(c) => c.maturity(),
            Contract::Gmwb(c) => c.maturity(),
        }
    }
}

/// Checks a date schedule: non-empty, positive, strictly increasing.
pub(crate) fn validate_dates(dates: &[f64], what: &str) -> Result<()> {
    if dates.is_empty() {
        return Err(invalid(format!("{what}: at least one date required")));
    }
    if !(dates[0] > 0.0) || dates.iter().any(|d| !d.is_finite()) {
        return Err(invalid(format!("{what}: dates must be positive and finite")));
    }
    if dates.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(invalid(format!("{what}: dates must be strictly increasing")));
    }
    Ok(())
}

/// Uniform levels of a path statistic (running average, accrued coupon,
/// remaining guarantee).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxGrid {
    knots: UniformKnots,
}

impl AuxGrid {
    /// `intervals + 1` levels from `lo` to `hi`.
    pub fn new(lo: f64, hi: f64, intervals: usize) -> Result<Self> {
        if intervals < 3 || !(hi > lo) {
            return Err(invalid(format!(
                "aux grid needs hi > lo and at least 3 intervals (got [{lo}, {hi}], {intervals})"
            )));
        }
        Ok(Self { knots: UniformKnots::new(lo, (hi - lo) / intervals as f64, intervals)? })
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn intervals(&self) -> usize {
        self.knots.intervals
    }

    pub fn spacing(&self) -> f64 {
        self.knots.dx
    }

    pub fn lo(&self) -> f64 {
        self.knots.x0
    }

    pub fn hi(&self) -> f64 {
        self.knots.last()
    }

    pub fn level(&self, a: usize) -> f64 {
        if a == self.knots.intervals {
            self.hi()
        } else {
            self.knots.knot(a)
        }
    }

    pub fn levels(&self) -> Vec<f64> {
        (0..self.len()).map(|a| self.level(a)).collect()
    }

    /// Spline stencil across levels at `value`, clamped to the range. The
    /// flag reports whether clamping was needed.
    pub fn stencil(&self, value: f64) -> (Stencil, bool) {
        let tol = 1e-12 * self.spacing();
        let clamped = value < self.lo() - tol || value > self.hi() + tol;
        let v = value.clamp(self.lo(), self.hi());
        (self.knots.fast_stencil(v).expect("at least 3 intervals"), clamped)
    }
}

/// Values indexed by aux level, then grid node: `rows[a][m]`.
pub type ValueSurface = Vec<Vec<f64>>;

/// `sum_i w_i rows[first + i][m]`.
pub(crate) fn interp_column(rows: &[Vec<f64>], st: &Stencil, m: usize) -> f64 {
    st.weights.iter().enumerate().map(|(i, w)| w * rows[st.first + i][m]).sum()
}
