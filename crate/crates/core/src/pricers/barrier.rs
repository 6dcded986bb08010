use std::sync::Arc;

use super::{date_lookup, make_stepper, readout, schedule, Diagnostics, PricingRequest, PricingResult};
use crate::contracts::{BarrierSpec, BarrierWeight, Monitoring};
use crate::error::{invalid, Result};
use crate::model::{boundary_domain, SpatialGrid};

/// Knock-out barrier option. Under continuous monitoring the grid is cut at
/// barriers that fall inside the far-boundary domain, so no quadrature
/// point reads across a barrier. Discretely monitored paths may leave the
/// band between dates, so the full domain is kept.
pub fn price_barrier(spec: &BarrierSpec, req: &PricingRequest) -> Result<PricingResult> {
    spec.validate()?;
    let disc = &req.discretization;
    let (lo_band, hi_band) = spec.outer_band();
    if !(req.spot > lo_band && req.spot < hi_band) {
        if spec.monitoring != Monitoring::Discrete {
            let zeros = req.readout_spots.iter().map(|&s| (s, 0.0)).collect();
            return Ok(PricingResult {
                price: 0.0,
                curve: zeros,
                diagnostics: Diagnostics::default(),
                wall: Default::default(),
            });
        }
        return Err(invalid("barrier: spot must lie inside the barrier band"));
    }
    let (times, date_steps, params) = schedule(&spec.monitoring_dates, disc, &req.market, 0.0)?;
    let (mut lo, mut hi) = boundary_domain(&params, &times, disc.width)?;
    if spec.monitoring != Monitoring::Discrete {
        if lo_band > 0.0 {
            lo = lo.max((lo_band / req.spot).ln());
        }
        if hi_band.is_finite() {
            hi = hi.min((hi_band / req.spot).ln());
        }
    }
    let grid = SpatialGrid::new(req.spot, lo, hi, disc.space_intervals)?;
    let weight = Arc::new(BarrierWeight::new(spec.clone(), &params, &times, &date_steps)?);
    let steps = times.steps();
    let dates = date_lookup(&date_steps, steps);
    let mut stepper = make_stepper(disc, grid, params, times, Some(weight.clone()))?;
    let mut v = spec.terminal_payoff(&grid);
    for n in (1..=steps).rev() {
        v = stepper.step(n, &v)?;
        if let Some(k) = dates[n - 1] {
            spec.knock_out(&mut v, &grid, k);
        }
    }
    let (price, curve) = readout(&v, &grid, disc.spline, req.spot, &req.readout_spots)?;
    Ok(PricingResult {
        price,
        curve,
        diagnostics: Diagnostics {
            outside_points: stepper.outside_points(),
            series_unconverged: weight.unconverged(),
            ..Diagnostics::default()
        },
        wall: Default::default(),
    })
}
