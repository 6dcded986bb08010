//! Crank-Nicolson in log-price on the same far-boundary domain as the
//! quadrature scheme.
//!
//! The pricing PDE in `x = ln(S / S(0))` is
//! `V_t + vol^2/2 V_xx + nu V_x - r V = 0` with `nu = drift - vol^2/2`.
//! Boundary rows drop `V_xx` and use a one-sided `V_x`, which keeps the
//! system tridiagonal. Early exercise is an explicit pointwise maximum.

use std::collections::HashMap;

use crate::contracts::Contract;
use crate::engine::BackwardStep;
use crate::error::{Error, Result};
use crate::linalg::TridiagonalLu;
use crate::model::{Market, MarketParams, SpatialGrid, TimeGrid};
use crate::pricers::{price, Discretization, PricingRequest, PricingResult, Scheme};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub space_intervals: usize,
    pub time_steps: usize,
    pub width: f64,
}

impl FdConfig {
    pub fn new(space_intervals: usize, time_steps: usize) -> Self {
        Self { space_intervals, time_steps, width: 3.0 }
    }
}

/// Spatial operator `L` as three diagonals.
struct Operator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

fn spatial_operator(len: usize, dx: f64, drift: f64, vol: f64, rate: f64) -> Operator {
    let nu = drift - 0.5 * vol * vol;
    let diff = 0.5 * vol * vol / (dx * dx);
    let conv = nu / (2.0 * dx);
    let mut lower = vec![diff - conv; len];
    let mut diag = vec![-2.0 * diff - rate; len];
    let mut upper = vec![diff + conv; len];
    let last = len - 1;
    lower[0] = 0.0;
    diag[0] = -nu / dx - rate;
    upper[0] = nu / dx;
    lower[last] = -nu / dx;
    diag[last] = nu / dx - rate;
    upper[last] = 0.0;
    Operator { lower, diag, upper }
}

struct CnStep {
    explicit: Operator,
    implicit: TridiagonalLu,
}

/// Crank-Nicolson backward step with factorisations cached per distinct
/// step parameters.
pub struct CnStepper {
    grid: SpatialGrid,
    params: MarketParams,
    times: TimeGrid,
    cache: HashMap<(u64, u64, u64, u64), CnStep>,
}

impl CnStepper {
    pub fn new(grid: SpatialGrid, params: MarketParams, times: TimeGrid) -> Result<Self> {
        if params.steps() != times.steps() {
            return Err(Error::DimensionMismatch { expected: times.steps(), actual: params.steps() });
        }
        Ok(Self { grid, params, times, cache: HashMap::new() })
    }

    fn prepare(&mut self, n: usize) -> Result<&CnStep> {
        let (mu, r, vol, dt) = (self.params.drift(n), self.params.rate(n), self.params.vol(n), self.times.dt(n));
        let q = |v: f64| v.to_bits() & !0xFFF;
        let key = (q(mu), q(r), q(vol), q(dt));
        if !self.cache.contains_key(&key) {
            let len = self.grid.len();
            let op = spatial_operator(len, self.grid.dx(), mu, vol, r);
            let h = 0.5 * dt;
            let explicit = Operator {
                lower: op.lower.iter().map(|v| h * v).collect(),
                diag: op.diag.iter().map(|v| 1.0 + h * v).collect(),
                upper: op.upper.iter().map(|v| h * v).collect(),
            };
            let lower: Vec<f64> = op.lower.iter().map(|v| -h * v).collect();
            let diag: Vec<f64> = op.diag.iter().map(|v| 1.0 - h * v).collect();
            let upper: Vec<f64> = op.upper.iter().map(|v| -h * v).collect();
            let implicit = TridiagonalLu::new(&lower, &diag, &upper)?;
            self.cache.insert(key, CnStep { explicit, implicit });
        }
        Ok(&self.cache[&key])
    }
}

impl BackwardStep for CnStepper {
    fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    fn step(&mut self, n: usize, values: &[f64]) -> Result<Vec<f64>> {
        let len = self.grid.len();
        if values.len() != len {
            return Err(Error::DimensionMismatch { expected: len, actual: values.len() });
        }
        let st = self.prepare(n)?;
        let e = &st.explicit;
        let last = len - 1;
        let mut rhs = vec![0.0; len];
        rhs[0] = e.diag[0] * values[0] + e.upper[0] * values[1];
        for m in 1..last {
            rhs[m] = e.lower[m] * values[m - 1] + e.diag[m] * values[m] + e.upper[m] * values[m + 1];
        }
        rhs[last] = e.lower[last] * values[last - 1] + e.diag[last] * values[last];
        st.implicit.solve_in_place(&mut rhs);
        Ok(rhs)
    }
}

/// Prices a contract with Crank-Nicolson steps through the shared drivers.
pub fn cn_fd_price(contract: &Contract, market: &Market, spot: f64, config: FdConfig) -> Result<PricingResult> {
    let disc = Discretization::new(config.space_intervals, config.time_steps, 2)
        .with_width(config.width)
        .with_scheme(Scheme::CrankNicolson);
    price(&PricingRequest::new(contract.clone(), market.clone(), spot, disc))
}
