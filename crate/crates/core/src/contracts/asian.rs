use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{interp_column, validate_dates, AuxGrid, OptionKind, ValueSurface};
use crate::error::{invalid, Result};
use crate::model::SpatialGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strike_type", rename_all = "lowercase")]
pub enum AsianStrike {
    /// Payoff `max(0, sign * (S - A))`.
    Floating,
    /// Payoff `max(0, sign * (A - K))`.
    Fixed { strike: f64 },
}

/// Discretely sampled arithmetic-average option. The last fixing is the
/// maturity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsianSpec {
    pub option: OptionKind,
    pub fixing_dates: Vec<f64>,
    #[serde(flatten)]
    pub strike: AsianStrike,
}

impl AsianSpec {
    pub fn maturity(&self) -> f64 {
        self.fixing_dates.last().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        validate_dates(&self.fixing_dates, "asian fixings")?;
        if let AsianStrike::Fixed { strike } = self.strike {
            if !(strike > 0.0) {
                return Err(invalid("asian: fixed strike must be positive"));
            }
        }
        Ok(())
    }

    pub fn payoff(&self, s: f64, average: f64) -> f64 {
        match self.strike {
            AsianStrike::Floating => self.option.payoff(s, average),
            AsianStrike::Fixed { strike } => self.option.payoff(average, strike),
        }
    }

    pub fn terminal_payoff(&self, grid: &SpatialGrid, aux: &AuxGrid) -> ValueSurface {
        (0..aux.len())
            .map(|a| {
                let avg = aux.level(a);
                (0..grid.len()).map(|m| self.payoff(grid.s(m), avg)).collect()
            })
            .collect()
    }
}

/// Value just before fixing number `count` (1-based): the surface after
/// the fixing read at the updated average `A + (S - A) / count`. Returns
/// the new surface and the number of clamped reads.
pub fn asian_jump(
    surface: &ValueSurface,
    aux: &AuxGrid,
    grid: &SpatialGrid,
    count: usize,
) -> Result<(ValueSurface, usize)> {
    if count == 0 {
        return Err(invalid("asian: fixing count is 1-based"));
    }
    let k = count as f64;
    let rows: Vec<(Vec<f64>, usize)> = (0..aux.len())
        .into_par_iter()
        .map(|a| {
            let avg = aux.level(a);
            let mut clamps = 0;
            let row = (0..grid.len())
                .map(|m| {
                    let (st, c) = aux.stencil(avg + (grid.s(m) - avg) / k);
                    clamps += c as usize;
                    interp_column(surface, &st, m)
                })
                .collect();
            (row, clamps)
        })
        .collect();
    let clamps = rows.iter().map(|r| r.1).sum();
    Ok((rows.into_iter().map(|r| r.0).collect(), clamps))
}
