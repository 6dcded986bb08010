use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{interp_column, validate_dates, AuxGrid, OptionKind, ValueSurface};
use crate::error::{invalid, Result};
use crate::model::SpatialGrid;

/// What the holder receives on the date the target is breached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Knockout {
    /// The whole coupon is paid.
    FullGain,
    /// Nothing is paid on that date.
    NoGain,
    /// Only the amount that meets the target exactly is paid.
    PartGain,
}

/// Target redemption note: coupons `max(0, sign * (S - K))` on each fixing
/// until the accrued coupons reach `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TarnSpec {
    pub strike: f64,
    pub option: OptionKind,
    pub target: f64,
    pub knockout: Knockout,
    pub fixing_dates: Vec<f64>,
}

impl TarnSpec {
    pub fn maturity(&self) -> f64 {
        self.fixing_dates.last().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        validate_dates(&self.fixing_dates, "tarn fixings")?;
        if !(self.target > 0.0) || !(self.strike > 0.0) {
            return Err(invalid("tarn: target and strike must be positive"));
        }
        Ok(())
    }

    pub fn terminal_payoff(&self, grid: &SpatialGrid, aux: &AuxGrid) -> ValueSurface {
        vec![vec![0.0; grid.len()]; aux.len()]
    }

    /// Cash paid when accrued `accrued` meets coupon `coupon`, or `None`
    /// when the note survives. The top accrual level stands for the limit
    /// from below, so only a positive coupon can breach it.
    pub fn breach_cash(&self, accrued: f64, coupon: f64) -> Option<f64> {
        if coupon > 0.0 && accrued + coupon >= self.target {
            Some(match self.knockout {
                Knockout::FullGain => coupon,
                Knockout::NoGain => 0.0,
                Knockout::PartGain => (self.target - accrued).max(0.0),
            })
        } else {
            None
        }
    }
}

/// Value just before a fixing, from the surface just after it.
pub fn tarn_jump(surface: &ValueSurface, aux: &AuxGrid, grid: &SpatialGrid, spec: &TarnSpec) -> ValueSurface {
    (0..aux.len())
        .into_par_iter()
        .map(|a| {
            let accrued = aux.level(a);
            (0..grid.len())
                .map(|m| {
                    let c = spec.option.payoff(grid.s(m), spec.strike);
                    match spec.breach_cash(accrued, c) {
                        Some(cash) => cash,
                        None => {
                            let (st, _) = aux.stencil(accrued + c);
                            interp_column(surface, &st, m) + c
                        }
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(knockout: Knockout) -> TarnSpec {
        TarnSpec { strike: 1.0, option: OptionKind::Call, target: 0.3, knockout, fixing_dates: vec![1.0] }
    }

    #[test]
    fn breach_cash_by_type() {
        assert_eq!(spec(Knockout::PartGain).breach_cash(0.25, 0.1), Some(0.3 - 0.25));
        assert_eq!(spec(Knockout::FullGain).breach_cash(0.25, 0.1), Some(0.1));
        assert_eq!(spec(Knockout::NoGain).breach_cash(0.25, 0.1), Some(0.0));
        assert_eq!(spec(Knockout::NoGain).breach_cash(0.1, 0.1), None);
        assert_eq!(spec(Knockout::FullGain).breach_cash(0.3, 0.0), None);
    }

    #[test]
    fn single_fixing_pays_coupon_below_target() {
        let g = SpatialGrid::new(1.0, -0.5, 0.5, 40).unwrap();
        let aux = AuxGrid::new(0.0, 0.3, 30).unwrap();
        let s = spec(Knockout::NoGain);
        let out = tarn_jump(&s.terminal_payoff(&g, &aux), &aux, &g, &s);
        for m in 0..g.len() {
            let c = (g.s(m) - 1.0).max(0.0);
            let expected = if c >= 0.3 { 0.0 } else { c };
            assert!((out[0][m] - expected).abs() < 1e-15);
        }
    }
}
