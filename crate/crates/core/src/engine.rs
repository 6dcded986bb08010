//! One backward step of the quadrature-on-spline scheme.
//!
//! For a node `X_m` the discounted conditional expectation of the value at
//! the next date is `disc * sum_j w_j Q(X_m + o_j)`, where `Q` is the spline
//! through the next date's node values and `(o_j, w_j)` are the step's
//! quadrature offsets and weights in log-space. With the central-difference
//! spline every `Q(X_m + o_j)` is a 4-point combination of node values, so
//! the whole step collapses into a sparse matrix `H` built once per set of
//! step parameters.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{transition, MarketParams, SpatialGrid, StepTransition, TimeGrid};
use crate::quadrature::{moment_matched_weights, normal_central_moments, GaussHermiteRule};
use crate::spline::{Spline, SplineMode};

/// How the quadrature weights of a step are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WeightScheme {
    /// Gauss-Hermite weights of the known normal transition density.
    #[default]
    GaussHermite,
    /// Weights solved from the central moments of the log-return.
    MomentMatched,
}

/// Log-space offsets, weights and discount of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepQuadrature {
    pub offsets: Vec<f64>,
    pub weights: Vec<f64>,
    pub discount: f64,
}

impl StepQuadrature {
    /// Offsets `nu + sqrt(2) tau xi_j`, weights `lambda_j / sqrt(pi)`.
    pub fn gauss_hermite(rule: &GaussHermiteRule, trans: &StepTransition) -> Self {
        let scale = SQRT_2 * trans.vol;
        let norm = PI.sqrt().recip();
        Self {
            offsets: rule.abscissas().iter().map(|x| trans.drift + scale * x).collect(),
            weights: rule.weights().iter().map(|w| w * norm).collect(),
            discount: trans.discount,
        }
    }

    /// Same nodes as [`Self::gauss_hermite`], weights matched to the
    /// central moments of the normal log-return.
    pub fn moment_matched(rule: &GaussHermiteRule, trans: &StepTransition) -> Result<Self> {
        let scale = SQRT_2 * trans.vol;
        let moments = normal_central_moments(trans.vol, rule.order());
        let mw = moment_matched_weights(rule, &moments, scale)?;
        Ok(Self {
            offsets: rule.abscissas().iter().map(|x| trans.drift + scale * x).collect(),
            weights: mw.weights,
            discount: trans.discount,
        })
    }

    pub fn new(scheme: WeightScheme, rule: &GaussHermiteRule, trans: &StepTransition) -> Result<Self> {
        match scheme {
            WeightScheme::GaussHermite => Ok(Self::gauss_hermite(rule, trans)),
            WeightScheme::MomentMatched => Self::moment_matched(rule, trans),
        }
    }
}

/// Discounted expectation computed directly: fit a spline through
/// `values` and sum the quadrature over it at every node.
pub fn step_direct(values: &[f64], grid: &SpatialGrid, quad: &StepQuadrature, mode: SplineMode) -> Result<Vec<f64>> {
    step_direct_weighted(values, grid, quad, mode, |_, _| 1.0)
}

/// [`step_direct`] with a multiplier `weight(m, x_dest)` on every
/// quadrature point (barrier survival probabilities).
pub fn step_direct_weighted<F>(
    values: &[f64],
    grid: &SpatialGrid,
    quad: &StepQuadrature,
    mode: SplineMode,
    weight: F,
) -> Result<Vec<f64>>
where
    F: Fn(usize, f64) -> f64,
{
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), actual: values.len() });
    }
    let spline = Spline::fit_uniform(mode, grid.knots(), values)?;
    Ok((0..grid.len())
        .map(|m| {
            let xm = grid.x(m);
            let sum: f64 = quad
                .offsets
                .iter()
                .zip(&quad.weights)
                .map(|(&o, &w)| {
                    let x = xm + o;
                    let g = weight(m, x);
                    if g == 0.0 {
                        0.0
                    } else {
                        w * g * spline.eval(x)
                    }
                })
                .sum();
            quad.discount * sum
        })
        .collect())
}

/// Sparse row-compressed step matrix, discount included.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOperator {
    size: usize,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    coefs: Vec<f64>,
    discount: f64,
    /// Quadrature points that landed outside the grid, over all rows.
    outside_points: usize,
}

impl StepOperator {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn nnz(&self) -> usize {
        self.coefs.len()
    }

    pub fn outside_points(&self) -> usize {
        self.outside_points
    }

    /// Column indices and coefficients of row `m`.
    pub fn row(&self, m: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.row_start[m], self.row_start[m + 1]);
        (&self.cols[a..b], &self.coefs[a..b])
    }

    /// `out = H values`.
    pub fn apply_into(&self, values: &[f64], out: &mut [f64]) -> Result<()> {
        if values.len() != self.size {
            return Err(Error::DimensionMismatch { expected: self.size, actual: values.len() });
        }
        if out.len() != self.size {
            return Err(Error::DimensionMismatch { expected: self.size, actual: out.len() });
        }
        for (m, o) in out.iter_mut().enumerate() {
            let (a, b) = (self.row_start[m], self.row_start[m + 1]);
            let mut acc = 0.0;
            for (&c, &h) in self.cols[a..b].iter().zip(&self.coefs[a..b]) {
                acc += h * values[c as usize];
            }
            *o = acc;
        }
        Ok(())
    }

    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.size];
        self.apply_into(values, &mut out)?;
        Ok(out)
    }
}

/// Builds `H` for the central-difference spline.
pub fn build_operator(grid: &SpatialGrid, quad: &StepQuadrature) -> Result<StepOperator> {
    build_operator_weighted(grid, quad, |_, _| 1.0)
}

/// [`build_operator`] with a per-point multiplier `weight(m, x_dest)`.
pub fn build_operator_weighted<F>(grid: &SpatialGrid, quad: &StepQuadrature, weight: F) -> Result<StepOperator>
where
    F: Fn(usize, f64) -> f64,
{
    let knots = grid.knots();
    let size = grid.len();
    let (lo, hi) = (grid.x_min(), grid.x_max());
    let mut row_start = Vec::with_capacity(size + 1);
    let mut cols = Vec::new();
    let mut coefs = Vec::new();
    let mut outside_points = 0;
    let mut entries: Vec<(u32, f64)> = Vec::with_capacity(4 * quad.offsets.len());
    row_start.push(0);
    for m in 0..size {
        entries.clear();
        let xm = grid.x(m);
        for (&o, &w) in quad.offsets.iter().zip(&quad.weights) {
            let x = xm + o;
            let g = weight(m, x);
            if g == 0.0 {
                continue;
            }
            if x < lo || x > hi {
                outside_points += 1;
            }
            let st = knots.fast_stencil(x)?;
            let f = quad.discount * w * g;
            for (i, &c) in st.weights.iter().enumerate() {
                entries.push(((st.first + i) as u32, f * c));
            }
        }
        entries.sort_unstable_by_key(|e| e.0);
        let mut last: Option<u32> = None;
        for &(c, v) in &entries {
            if last == Some(c) {
                *coefs.last_mut().expect("pushed") += v;
            } else {
                cols.push(c);
                coefs.push(v);
                last = Some(c);
            }
        }
        row_start.push(cols.len());
    }
    Ok(StepOperator { size, row_start, cols, coefs, discount: quad.discount, outside_points })
}

/// A map from node values at `t_n` to discounted expectations at `t_{n-1}`.
///
/// Pricing drivers are written against this trait so the quadrature scheme
/// and the finite-difference oracle share the same exercise and jump logic.
pub trait BackwardStep: Send {
    fn grid(&self) -> &SpatialGrid;

    /// Step `n` (`1..=N`): values at `t_n` to values at `t_{n-1}`.
    fn step(&mut self, n: usize, values: &[f64]) -> Result<Vec<f64>>;

    /// Applies step `n` to several independent value vectors.
    fn step_many(&mut self, n: usize, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.step(n, r)).collect()
    }

    /// Number of quadrature points that fell outside the grid so far.
    fn outside_points(&self) -> usize {
        0
    }
}

/// Per-step multiplier on quadrature points, e.g. barrier survival.
pub trait StepWeight: Send + Sync {
    /// Identifies steps that share the same weighting (for caching).
    fn key(&self, n: usize) -> u64;
    /// Multiplier for a move from node `s` to `s_dest` over step `n`.
    fn weight(&self, n: usize, s: f64, s_dest: f64) -> f64;
}

type CacheKey = (u64, u64, u64, u64);

/// Drops the low 12 mantissa bits so steps whose lengths differ only by
/// rounding in the time grid share one operator.
fn key_bits(v: f64) -> u64 {
    v.to_bits() & !0xFFF
}

/// Quadrature-on-spline stepper with an operator cache keyed on the step
/// transition constants.
pub struct GhqcStepper {
    grid: SpatialGrid,
    params: MarketParams,
    times: TimeGrid,
    rule: GaussHermiteRule,
    scheme: WeightScheme,
    mode: SplineMode,
    weighting: Option<Arc<dyn StepWeight>>,
    cache: HashMap<CacheKey, Arc<StepOperator>>,
    outside: usize,
}

impl GhqcStepper {
    pub fn new(
        grid: SpatialGrid,
        params: MarketParams,
        times: TimeGrid,
        rule: GaussHermiteRule,
        scheme: WeightScheme,
        mode: SplineMode,
    ) -> Result<Self> {
        if params.steps() != times.steps() {
            return Err(Error::DimensionMismatch { expected: times.steps(), actual: params.steps() });
        }
        Ok(Self { grid, params, times, rule, scheme, mode, weighting: None, cache: HashMap::new(), outside: 0 })
    }

    pub fn with_weighting(mut self, weighting: Arc<dyn StepWeight>) -> Self {
        self.weighting = Some(weighting);
        self
    }

    pub fn cached_operators(&self) -> usize {
        self.cache.len()
    }

    fn quadrature(&self, n: usize) -> Result<StepQuadrature> {
        let trans = transition(&self.params, &self.times, n)?;
        StepQuadrature::new(self.scheme, &self.rule, &trans)
    }

    fn weight_fn(&self, n: usize) -> impl Fn(usize, f64) -> f64 + '_ {
        let grid = self.grid;
        move |m, x| match &self.weighting {
            None => 1.0,
            Some(w) => w.weight(n, grid.s(m), grid.spot() * x.exp()),
        }
    }

    /// The (cached) operator of step `n`.
    pub fn operator(&mut self, n: usize) -> Result<Arc<StepOperator>> {
        let trans = transition(&self.params, &self.times, n)?;
        let wkey = self.weighting.as_ref().map_or(0, |w| w.key(n));
        let key = (key_bits(trans.drift), key_bits(trans.vol), key_bits(trans.discount), wkey);
        if let Some(op) = self.cache.get(&key) {
            return Ok(op.clone());
        }
        let quad = StepQuadrature::new(self.scheme, &self.rule, &trans)?;
        let op = Arc::new(build_operator_weighted(&self.grid, &quad, self.weight_fn(n))?);
        self.outside += op.outside_points();
        self.cache.insert(key, op.clone());
        Ok(op)
    }
}

impl BackwardStep for GhqcStepper {
    fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    fn step(&mut self, n: usize, values: &[f64]) -> Result<Vec<f64>> {
        match self.mode {
            SplineMode::FastCentral => self.operator(n)?.apply(values),
            SplineMode::Full => {
                let quad = self.quadrature(n)?;
                step_direct_weighted(values, &self.grid, &quad, SplineMode::Full, self.weight_fn(n))
            }
        }
    }

    fn step_many(&mut self, n: usize, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        match self.mode {
            SplineMode::FastCentral => {
                let op = self.operator(n)?;
                rows.par_iter().map(|r| op.apply(r)).collect()
            }
            SplineMode::Full => rows.iter().map(|r| self.step(n, r)).collect(),
        }
    }

    fn outside_points(&self) -> usize {
        self.outside
    }
}
