use super::{date_lookup, make_stepper, readout, schedule, Diagnostics, PricingRequest, PricingResult};
use crate::contracts::{ExerciseStyle, VanillaSpec};
use crate::error::Result;
use crate::model::build_grid;

/// European, Bermudan and (every-step) American options.
pub fn price_vanilla(spec: &VanillaSpec, req: &PricingRequest) -> Result<PricingResult> {
    spec.validate()?;
    let disc = &req.discretization;
    let t = spec.maturity;
    let mut dates = match &spec.exercise {
        ExerciseStyle::Bermudan { dates } => dates.clone(),
        _ => vec![t],
    };
    if *dates.last().expect("validated") < t * (1.0 - 1e-12) {
        dates.push(t);
    } else {
        *dates.last_mut().expect("validated") = t;
    }
    let (times, date_steps, params) = schedule(&dates, disc, &req.market, 0.0)?;
    let grid = build_grid(req.spot, &params, &times, disc.space_intervals, disc.width)?;
    let steps = times.steps();
    let exercisable: Vec<bool> = match &spec.exercise {
        ExerciseStyle::European => vec![false; steps + 1],
        ExerciseStyle::American => vec![true; steps + 1],
        ExerciseStyle::Bermudan { .. } => date_lookup(&date_steps, steps).iter().map(Option::is_some).collect(),
    };
    let intrinsic = spec.intrinsic(&grid);
    let mut stepper = make_stepper(disc, grid, params, times, None)?;
    let mut v = spec.terminal_payoff(&grid);
    for n in (1..=steps).rev() {
        v = stepper.step(n, &v)?;
        let idx = n - 1;
        let allowed = match spec.exercise {
            ExerciseStyle::American => true,
            _ => idx > 0,
        };
        if allowed && exercisable[idx] {
            for (x, e) in v.iter_mut().zip(&intrinsic) {
                *x = x.max(*e);
            }
        }
    }
    let (price, curve) = readout(&v, &grid, disc.spline, req.spot, &req.readout_spots)?;
    Ok(PricingResult {
        price,
        curve,
        diagnostics: Diagnostics { outside_points: stepper.outside_points(), ..Diagnostics::default() },
        wall: Default::default(),
    })
}
