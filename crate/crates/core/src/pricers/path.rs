//! Contracts that carry a path statistic on an aux grid.

use super::{date_lookup, make_stepper, readout, schedule, Diagnostics, PricingRequest, PricingResult};
use crate::contracts::{asian_jump, gmwb_jump, interp_column, tarn_jump, AsianSpec, AuxGrid, GmwbSpec, TarnSpec};
use crate::error::{invalid, Result};
use crate::model::{build_grid, transition};

const MIN_AUX_INTERVALS: usize = 20;

fn check_aux(intervals: usize) -> Result<()> {
    if intervals < MIN_AUX_INTERVALS {
        return Err(invalid(format!("aux grid needs at least {MIN_AUX_INTERVALS} intervals, got {intervals}")));
    }
    Ok(())
}

/// Row of `surface` interpolated across aux levels at `level`.
fn aux_read(surface: &[Vec<f64>], aux: &AuxGrid, level: f64) -> (Vec<f64>, bool) {
    let (st, clamped) = aux.stencil(level);
    ((0..surface[0].len()).map(|m| interp_column(surface, &st, m)).collect(), clamped)
}

/// Discretely sampled arithmetic-average option.
pub fn price_asian(spec: &AsianSpec, req: &PricingRequest) -> Result<PricingResult> {
    spec.validate()?;
    let disc = &req.discretization;
    check_aux(disc.aux_intervals)?;
    let (times, date_steps, params) = schedule(&spec.fixing_dates, disc, &req.market, 0.0)?;
    let grid = build_grid(req.spot, &params, &times, disc.space_intervals, disc.width)?;
    let aux = AuxGrid::new(grid.s(0), grid.s(grid.intervals()), disc.aux_intervals)?;
    let steps = times.steps();
    let dates = date_lookup(&date_steps, steps);
    let mut stepper = make_stepper(disc, grid, params, times, None)?;
    let mut clamps = 0;
    let mut surface = spec.terminal_payoff(&grid, &aux);
    let (s, c) = asian_jump(&surface, &aux, &grid, spec.fixing_dates.len())?;
    surface = s;
    clamps += c;
    for n in (1..=steps).rev() {
        surface = stepper.step_many(n, &surface)?;
        if let Some(k) = dates[n - 1] {
            let (s, c) = asian_jump(&surface, &aux, &grid, k + 1)?;
            surface = s;
            clamps += c;
        }
    }
    let (row, clamped) = aux_read(&surface, &aux, req.spot);
    clamps += clamped as usize;
    let (price, curve) = readout(&row, &grid, disc.spline, req.spot, &req.readout_spots)?;
    Ok(PricingResult {
        price,
        curve,
        diagnostics: Diagnostics {
            outside_points: stepper.outside_points(),
            aux_clamps: clamps,
            ..Diagnostics::default()
        },
        wall: Default::default(),
    })
}

/// Target redemption note, read at zero accrual.
pub fn price_tarn(spec: &TarnSpec, req: &PricingRequest) -> Result<PricingResult> {
    spec.validate()?;
    let disc = &req.discretization;
    check_aux(disc.aux_intervals)?;
    let (times, date_steps, params) = schedule(&spec.fixing_dates, disc, &req.market, 0.0)?;
    let grid = build_grid(req.spot, &params, &times, disc.space_intervals, disc.width)?;
    let aux = AuxGrid::new(0.0, spec.target, disc.aux_intervals)?;
    let steps = times.steps();
    let dates = date_lookup(&date_steps, steps);
    let mut stepper = make_stepper(disc, grid, params, times, None)?;
    let mut surface = tarn_jump(&spec.terminal_payoff(&grid, &aux), &aux, &grid, spec);
    for n in (1..=steps).rev() {
        surface = stepper.step_many(n, &surface)?;
        if dates[n - 1].is_some() {
            surface = tarn_jump(&surface, &aux, &grid, spec);
        }
    }
    let (price, curve) = readout(&surface[0], &grid, disc.spline, req.spot, &req.readout_spots)?;
    Ok(PricingResult {
        price,
        curve,
        diagnostics: Diagnostics { outside_points: stepper.outside_points(), ..Diagnostics::default() },
        wall: Default::default(),
    })
}

/// Guaranteed minimum withdrawal benefit, read at wealth and guarantee
/// both equal to the premium. The request spot is ignored in favour of
/// the premium; readout spots are further initial wealth levels.
pub fn price_gmwb(spec: &GmwbSpec, req: &PricingRequest) -> Result<PricingResult> {
    spec.validate()?;
    let disc = &req.discretization;
    check_aux(disc.aux_intervals)?;
    let (times, date_steps, params) = schedule(&spec.withdrawal_dates, disc, &req.market, spec.fee)?;
    let grid = build_grid(spec.premium, &params, &times, disc.space_intervals, disc.width)?;
    let aux = AuxGrid::new(0.0, spec.premium, disc.aux_intervals)?;
    let steps = times.steps();
    let dates = date_lookup(&date_steps, steps);
    let discounts: Vec<f64> =
        (1..=steps).map(|n| transition(&params, &times, n).map(|t| t.discount)).collect::<Result<_>>()?;
    let mut stepper = make_stepper(disc, grid, params, times, None)?;
    // The last withdrawal is part of the terminal payoff.
    let mut surface = spec.terminal_payoff(&grid, &aux);
    let mut zero = spec.terminal_zero_account(&aux);
    for n in (1..=steps).rev() {
        surface = stepper.step_many(n, &surface)?;
        zero.iter_mut().for_each(|z| *z *= discounts[n - 1]);
        if dates[n - 1].is_some() {
            let (s, z) = gmwb_jump(&surface, &zero, &aux, &grid, spec);
            surface = s;
            zero = z;
        }
    }
    let top = surface.last().expect("aux grid is non-empty");
    let (price, curve) = readout(top, &grid, disc.spline, spec.premium, &req.readout_spots)?;
    Ok(PricingResult {
        price,
        curve,
        diagnostics: Diagnostics { outside_points: stepper.outside_points(), ..Diagnostics::default() },
        wall: Default::default(),
    })
}
