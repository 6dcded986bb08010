//! Monte Carlo with exact lognormal steps.
//!
//! Samples are drawn in fixed-size batches; batch `b` uses a ChaCha8
//! stream `b` seeded from the configured seed, so results do not depend on
//! the number of threads. Normals come from the inverse normal CDF.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::contracts::{
    no_hit_double, no_hit_single, AsianSpec, BarrierSpec, Contract, ExerciseStyle, GmwbMode, GmwbSpec, Monitoring,
    TarnSpec, VanillaSpec,
};
use crate::error::{invalid, Result};
use crate::model::Market;

const BATCH: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    /// Number of simulated paths (antithetic partners included).
    pub paths: usize,
    pub seed: u64,
    pub antithetic: bool,
    /// Time steps per date interval.
    pub substeps: usize,
    /// Brownian-bridge survival weighting for continuous barriers; without
    /// it the barrier is checked at the simulated steps only.
    pub bridge: bool,
}

impl McConfig {
    pub fn new(paths: usize, seed: u64) -> Self {
        Self { paths, seed, antithetic: true, substeps: 1, bridge: true }
    }

    pub fn with_antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = substeps;
        self
    }

    pub fn with_bridge(mut self, on: bool) -> Self {
        self.bridge = on;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub price: f64,
    pub std_error: f64,
    /// Independent samples behind the estimate (antithetic pairs count once).
    pub samples: usize,
}

#[derive(Debug, Clone, Copy)]
struct Step {
    mean: f64,
    sd: f64,
    vol: f64,
    dt: f64,
    /// Discount factor from 0 to the end of the step.
    discount: f64,
    /// Date ending at this step.
    date: Option<usize>,
}

fn build_steps(dates: &[f64], substeps: usize, market: &Market, fee: f64) -> Vec<Step> {
    let mut out = Vec::with_capacity(dates.len() * substeps);
    let mut prev = 0.0;
    let mut log_df = 0.0;
    for (k, &d) in dates.iter().enumerate() {
        for j in 1..=substeps {
            let t0 = prev + (d - prev) * (j - 1) as f64 / substeps as f64;
            let t1 = if j == substeps { d } else { prev + (d - prev) * j as f64 / substeps as f64 };
            let dt = t1 - t0;
            let seg = market.at(0.5 * (t0 + t1));
            let drift = seg.drift - fee;
            log_df -= seg.rate * dt;
            out.push(Step {
                mean: (drift - 0.5 * seg.vol * seg.vol) * dt,
                sd: seg.vol * dt.sqrt(),
                vol: seg.vol,
                dt,
                discount: log_df.exp(),
                date: (j == substeps).then_some(k),
            });
        }
        prev = d;
    }
    out
}

/// Discounted payoff of one path given the step shocks.
trait PathPayoff: Sync {
    fn value(&self, spot: f64, steps: &[Step], z: &[f64]) -> f64;
}

struct European<'a>(&'a VanillaSpec);

impl PathPayoff for European<'_> {
    fn value(&self, spot: f64, steps: &[Step], z: &[f64]) -> f64 {
        let log: f64 = steps.iter().zip(z).map(|(s, z)| s.mean + s.sd * z).sum();
        let last = steps.last().expect("non-empty");
        last.discount * self.0.option.payoff(spot * log.exp(), self.0.strike)
    }
}

struct Barrier<'a> {
    spec: &'a BarrierSpec,
    bridge: bool,
}

impl PathPayoff for Barrier<'_> {
    fn value(&self, spot: f64, steps: &[Step], z: &[f64]) -> f64 {
        let spec = self.spec;
        let mut s = spot;
        let mut alive = 1.0;
        let mut period = 0;
        for (st, z) in steps.iter().zip(z) {
            let next = s * (st.mean + st.sd * z).exp();
            let (l, u) = spec.band(period);
            match spec.monitoring {
                Monitoring::Discrete => {
                    if st.date.is_some() && (next < l || next > u) {
                        return 0.0;
                    }
                }
                _ if !self.bridge => {
                    if next <= l || next >= u {
                        return 0.0;
                    }
                }
                Monitoring::ContinuousSingle => {
                    alive *= no_hit_single(s, next, if l > 0.0 { l } else { u }, st.vol, st.dt);
                }
                Monitoring::ContinuousDouble => {
                    alive *= no_hit_double(s, next, l, u, st.vol, st.dt, crate::contracts::barrier::SERIES_TOL).prob;
                }
            }
            if alive == 0.0 {
                return 0.0;
            }
            s = next;
            if st.date.is_some() {
                period += 1;
            }
        }
        let last = steps.last().expect("non-empty");
        alive * last.discount * spec.option.payoff(s, spec.strike)
    }
}

struct Asian<'a>(&'a AsianSpec);

impl PathPayoff for Asian<'_> {
    fn value(&self, spot: f64, steps: &[Step], z: &[f64]) -> f64 {
        let mut s = spot;
        let mut sum = 0.0;
        let mut count = 0usize;
        for (st, z) in steps.iter().zip(z) {
            s *= (st.mean + st.sd * z).exp();
            if st.date.is_some() {
                sum += s;
                count += 1;
            }
        }
        let last = steps.last().expect("non-empty");
        last.discount * self.0.payoff(s, sum / count as f64)
    }
}

struct Tarn<'a>(&'a TarnSpec);

impl PathPayoff for Tarn<'_> {
    fn value(&self, spot: f64, steps: &[Step], z: &[f64]) -> f64 {
        let spec = self.0;
        let mut s = spot;
        let mut accrued = 0.0;
        let mut pv = 0.0;
        for (st, z) in steps.iter().zip(z) {
            s *= (st.mean + st.sd * z).exp();
            if st.date.is_some() {
                let c = spec.option.payoff(s, spec.strike);
                if let Some(cash) = spec.breach_cash(accrued, c) {
                    return pv + st.discount * cash;
                }
                accrued += c;
                pv += st.discount * c;
            }
        }
        pv
    }
}

struct StaticGmwb<'a>(&'a GmwbSpec);

impl PathPayoff for StaticGmwb<'_> {
    fn value(&self, _spot: f64, steps: &[Step], z: &[f64]) -> f64 {
        let spec = self.0;
        let last_date = spec.withdrawal_dates.len() - 1;
        let mut w = spec.premium;
        let mut balance = spec.premium;
        let mut pv = 0.0;
        for (st, z) in steps.iter().zip(z) {
            w *= (st.mean + st.sd * z).exp();
            match st.date {
                Some(k) if k == last_date => return pv + st.discount * w.max(balance),
                Some(_) => {
                    let gamma = spec.amount.min(balance);
                    w = (w - gamma).max(0.0);
                    balance -= gamma;
                    pv += st.discount * gamma;
                }
                None => {}
            }
        }
        pv
    }
}

fn run(payoff: &dyn PathPayoff, spot: f64, steps: &[Step], cfg: &McConfig) -> McResult {
    let per_sample = if cfg.antithetic { 2 } else { 1 };
    let samples = cfg.paths.div_ceil(per_sample).max(1);
    let batches = samples.div_ceil(BATCH);
    let normal = Normal::standard();
    let sums: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(samples - b * BATCH);
            let mut z = vec![0.0; steps.len()];
            let mut neg = vec![0.0; steps.len()];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                for v in z.iter_mut() {
                    let u: f64 = rng.sample(Open01);
                    *v = normal.inverse_cdf(u);
                }
                let mut x = payoff.value(spot, steps, &z);
                if cfg.antithetic {
                    neg.iter_mut().zip(&z).for_each(|(n, v)| *n = -v);
                    x = 0.5 * (x + payoff.value(spot, steps, &neg));
                }
                s1 += x;
                s2 += x * x;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
    let n = samples as f64;
    let mean = s1 / n;
    let var = if samples > 1 { ((s2 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    McResult { price: mean, std_error: (var / n).sqrt(), samples }
}

/// Monte Carlo price and standard error for contracts without early
/// exercise (static withdrawals only for guarantees).
pub fn mc_price(contract: &Contract, market: &Market, spot: f64, cfg: &McConfig) -> Result<McResult> {
    contract.validate()?;
    market.validate()?;
    if cfg.paths == 0 || cfg.substeps == 0 {
        return Err(invalid("monte carlo needs at least one path and one step per date"));
    }
    if !(spot > 0.0) {
        return Err(invalid("spot must be positive"));
    }
    let sub = cfg.substeps;
    Ok(match contract {
        Contract::Vanilla(v) => {
            if v.exercise != ExerciseStyle::European {
                return Err(invalid("monte carlo prices European exercise only"));
            }
            run(&European(v), spot, &build_steps(&[v.maturity], sub, market, 0.0), cfg)
        }
        Contract::Barrier(b) => {
            let steps = build_steps(&b.monitoring_dates, sub, market, 0.0);
            run(&Barrier { spec: b, bridge: cfg.bridge }, spot, &steps, cfg)
        }
        Contract::Asian(a) => run(&Asian(a), spot, &build_steps(&a.fixing_dates, sub, market, 0.0), cfg),
        Contract::Tarn(t) => run(&Tarn(t), spot, &build_steps(&t.fixing_dates, sub, market, 0.0), cfg),
        Contract::Gmwb(g) => {
            if g.mode != GmwbMode::Static {
                return Err(invalid("monte carlo prices static withdrawals only"));
            }
            run(&StaticGmwb(g), g.premium, &build_steps(&g.withdrawal_dates, sub, market, g.fee), cfg)
        }
    })
}
