use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{interp_column, validate_dates, AuxGrid, ValueSurface};
use crate::error::{invalid, Result};
use crate::model::SpatialGrid;
use crate::spline::Stencil;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GmwbMode {
    /// The contractual amount is withdrawn on every date.
    Static,
    /// The holder picks the withdrawal that maximises the contract value.
    Dynamic,
}

/// Guaranteed minimum withdrawal benefit. The wealth account `W` follows
/// the underlying net of the fee; the guarantee balance `A` starts at the
/// premium and falls by every withdrawal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmwbSpec {
    pub premium: f64,
    pub withdrawal_dates: Vec<f64>,
    /// Contractual withdrawal per date.
    pub amount: f64,
    /// Proportional penalty on withdrawals above the contractual amount.
    #[serde(default)]
    pub penalty: f64,
    /// Annual fee deducted from the wealth account.
    #[serde(default)]
    pub fee: f64,
    pub mode: GmwbMode,
}

impl GmwbSpec {
    pub fn maturity(&self) -> f64 {
        self.withdrawal_dates.last().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        validate_dates(&self.withdrawal_dates, "gmwb withdrawals")?;
        if !(self.premium > 0.0) || !(self.amount > 0.0) {
            return Err(invalid("gmwb: premium and withdrawal amount must be positive"));
        }
        if !(0.0..=1.0).contains(&self.penalty) {
            return Err(invalid(format!("gmwb: penalty must lie in [0, 1], got {}", self.penalty)));
        }
        if !(self.fee >= 0.0) {
            return Err(invalid("gmwb: fee must be non-negative"));
        }
        if self.mode == GmwbMode::Static {
            let total = self.amount * self.withdrawal_dates.len() as f64;
            if ((total - self.premium) / self.premium).abs() > 1e-9 {
                return Err(invalid(format!("gmwb: static withdrawals sum to {total}, premium is {}", self.premium)));
            }
        }
        Ok(())
    }

    /// Cash received for a withdrawal `gamma`, penalised above the
    /// contractual amount.
    pub fn cash(&self, gamma: f64) -> f64 {
        if gamma <= self.amount {
            gamma
        } else {
            self.amount + (1.0 - self.penalty) * (gamma - self.amount)
        }
    }

    fn final_cash(&self, balance: f64) -> f64 {
        match self.mode {
            GmwbMode::Static => balance,
            GmwbMode::Dynamic => self.cash(balance),
        }
    }

    /// Value at maturity on every `(A, W)` node.
    pub fn terminal_payoff(&self, grid: &SpatialGrid, aux: &AuxGrid) -> ValueSurface {
        (0..aux.len())
            .map(|a| {
                let c = self.final_cash(aux.level(a));
                (0..grid.len()).map(|m| grid.s(m).max(c)).collect()
            })
            .collect()
    }

    /// Value at maturity with an empty wealth account, per aux level.
    pub fn terminal_zero_account(&self, aux: &AuxGrid) -> Vec<f64> {
        (0..aux.len()).map(|a| self.final_cash(aux.level(a))).collect()
    }
}

/// Reads `row` at wealth `w`: spline in log-wealth on the grid, linear in
/// wealth between the empty account (`zero`) and the bottom node.
fn read_wealth(row: &[f64], zero: f64, grid: &SpatialGrid, w: f64) -> f64 {
    let w_min = grid.s(0);
    if w >= w_min {
        let st = grid.knots().fast_stencil((w / grid.spot()).ln()).expect("grid has >= 4 intervals");
        st.apply(row)
    } else {
        zero + (row[0] - zero) * (w / w_min)
    }
}

/// Row and zero-account value interpolated across aux levels.
fn aux_row(surface: &ValueSurface, zero: &[f64], st: &Stencil) -> (Vec<f64>, f64) {
    let n = surface[0].len();
    let row = (0..n).map(|m| interp_column(surface, st, m)).collect();
    let z = st.weights.iter().enumerate().map(|(i, w)| w * zero[st.first + i]).sum();
    (row, z)
}

/// Value just before a withdrawal date from the values just after it.
/// `zero` holds the empty-account values per aux level and is updated the
/// same way.
pub fn gmwb_jump(
    surface: &ValueSurface,
    zero: &[f64],
    aux: &AuxGrid,
    grid: &SpatialGrid,
    spec: &GmwbSpec,
) -> (ValueSurface, Vec<f64>) {
    let out: Vec<(Vec<f64>, f64)> = (0..aux.len())
        .into_par_iter()
        .map(|a| {
            let balance = aux.level(a);
            match spec.mode {
                GmwbMode::Static => {
                    let gamma = spec.amount.min(balance);
                    let (st, _) = aux.stencil(balance - gamma);
                    let (row, z) = aux_row(surface, zero, &st);
                    let values = (0..grid.len())
                        .map(|m| read_wealth(&row, z, grid, (grid.s(m) - gamma).max(0.0)) + gamma)
                        .collect();
                    (values, z + gamma)
                }
                GmwbMode::Dynamic => {
                    let mut best = vec![f64::NEG_INFINITY; grid.len()];
                    let mut best_zero = f64::NEG_INFINITY;
                    let mut consider = |row: &[f64], z: f64, gamma: f64| {
                        let c = spec.cash(gamma);
                        for (m, b) in best.iter_mut().enumerate() {
                            let v = read_wealth(row, z, grid, (grid.s(m) - gamma).max(0.0)) + c;
                            if v > *b {
                                *b = v;
                            }
                        }
                        best_zero = best_zero.max(z + c);
                    };
                    for b in 0..=a {
                        let gamma = if b == a { 0.0 } else { balance - aux.level(b) };
                        consider(&surface[b], zero[b], gamma);
                    }
                    if spec.amount < balance {
                        let (st, _) = aux.stencil(balance - spec.amount);
                        let (row, z) = aux_row(surface, zero, &st);
                        consider(&row, z, spec.amount);
                    }
                    (best, best_zero)
                }
            }
        })
        .collect();
    let zero_next = out.iter().map(|r| r.1).collect();
    (out.into_iter().map(|r| r.0).collect(), zero_next)
}
