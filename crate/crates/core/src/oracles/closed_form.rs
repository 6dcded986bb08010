use statrs::distribution::{ContinuousCDF, Normal};

use crate::contracts::OptionKind;
use crate::error::{invalid, Result};

/// Discounted expected payoff of a European option when `ln S_T` is
/// normal with mean `ln S + (drift - vol^2 / 2) T` and variance `vol^2 T`.
pub fn closed_form_european(
    spot: f64,
    strike: f64,
    option: OptionKind,
    drift: f64,
    rate: f64,
    vol: f64,
    maturity: f64,
) -> Result<f64> {
    if !(vol > 0.0) || !(maturity > 0.0) || !(spot > 0.0) || !(strike >= 0.0) {
        return Err(invalid("closed form needs spot, vol, maturity > 0 and strike >= 0"));
    }
    let n = Normal::standard();
    let forward = spot * (drift * maturity).exp();
    let df = (-rate * maturity).exp();
    if strike == 0.0 {
        return Ok(match option {
            OptionKind::Call => df * forward,
            OptionKind::Put => 0.0,
        });
    }
    let sd = vol * maturity.sqrt();
    let d1 = ((forward / strike).ln() + 0.5 * sd * sd) / sd;
    let d2 = d1 - sd;
    let phi = option.sign();
    Ok(df * phi * (forward * n.cdf(phi * d1) - strike * n.cdf(phi * d2)))
}
