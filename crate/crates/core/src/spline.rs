//! Cubic-spline interpolation of grid-sampled value functions.
//!
//! Two fits are provided. [`Spline::fit_full`] is the natural spline whose
//! second derivatives come from the usual tridiagonal continuity system.
//! [`Spline::fit_fast`] replaces those second derivatives with three-point
//! central differences on a uniform grid; inside the grid this is the same
//! polynomial as 4-point Lagrange interpolation on the straddling stencil,
//! which is what lets a backward step be precomputed as a sparse matrix.
//!
//! Outside the knot range both fits continue linearly with the one-sided
//! derivative at the boundary knot.

use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplineMode {
    /// Natural spline, second derivatives from the tridiagonal solve.
    Full,
    /// Second derivatives from central differences (uniform knots only).
    #[default]
    FastCentral,
}

/// Uniform knot layout `x0 + j * dx`, `j = 0..=intervals`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformKnots {
    pub x0: f64,
    pub dx: f64,
    pub intervals: usize,
}

impl UniformKnots {
    pub fn new(x0: f64, dx: f64, intervals: usize) -> Result<Self> {
        if intervals < 1 || !(dx > 0.0) || !x0.is_finite() || !dx.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "uniform knots need dx > 0 and at least one interval (dx={dx}, M={intervals})"
            )));
        }
        Ok(Self { x0, dx, intervals })
    }

    pub fn knot(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn last(&self) -> f64 {
        self.knot(self.intervals)
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Interval index `j` with `x_j <= x <= x_{j+1}` (clamped).
    fn locate(&self, x: f64) -> usize {
        let s = ((x - self.x0) / self.dx).floor();
        if s <= 0.0 {
            0
        } else {
            (s as usize).min(self.intervals - 1)
        }
    }

    /// Interpolation weights of the fast spline at `x`: four consecutive
    /// knots starting at `first`. Outside the range the weights describe
    /// the linear continuation.
    pub fn fast_stencil(&self, x: f64) -> Result<Stencil> {
        let m = self.intervals;
        if m < 3 {
            return Err(Error::InvalidGrid(format!("fast spline needs at least 3 intervals, got {m}")));
        }
        let h = self.dx;
        if x < self.x0 {
            // value + slope * (x - x0) of the left edge cubic.
            let w = lagrange_weights(0.0);
            let d = lagrange_derivative_weights(0.0);
            let t = (x - self.x0) / h;
            return Ok(Stencil { first: 0, weights: std::array::from_fn(|i| w[i] + t * d[i]) });
        }
        if x > self.last() {
            let w = lagrange_weights(3.0);
            let d = lagrange_derivative_weights(3.0);
            let t = (x - self.last()) / h;
            return Ok(Stencil { first: m - 3, weights: std::array::from_fn(|i| w[i] + t * d[i]) });
        }
        let j = self.locate(x);
        if j == 0 {
            let s = (x - self.x0) / h;
            return Ok(Stencil { first: 0, weights: lagrange_weights(s) });
        }
        if j == m - 1 {
            let s = (x - self.knot(m - 3)) / h;
            return Ok(Stencil { first: m - 3, weights: lagrange_weights(s) });
        }
        // Interior: A Q_j + B Q_{j+1} + C Q''_j + D Q''_{j+1} with central
        // second differences, expanded onto Q_{j-1..j+2}.
        let a = (self.knot(j + 1) - x) / h;
        let b = 1.0 - a;
        let c = (a * a * a - a) / 6.0;
        let d = (b * b * b - b) / 6.0;
        Ok(Stencil { first: j - 1, weights: [c, a - 2.0 * c + d, b + c - 2.0 * d, d] })
    }
}

/// Four interpolation weights applied to `values[first..first + 4]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub first: usize,
    pub weights: [f64; 4],
}

impl Stencil {
    pub fn apply(&self, values: &[f64]) -> f64 {
        let v = &values[self.first..self.first + 4];
        self.weights[0] * v[0] + self.weights[1] * v[1] + self.weights[2] * v[2] + self.weights[3] * v[3]
    }
}

/// Lagrange basis on nodes 0, 1, 2, 3 evaluated at local coordinate `s`.
fn lagrange_weights(s: f64) -> [f64; 4] {
    let (s0, s1, s2, s3) = (s, s - 1.0, s - 2.0, s - 3.0);
    [-s1 * s2 * s3 / 6.0, s0 * s2 * s3 / 2.0, -s0 * s1 * s3 / 2.0, s0 * s1 * s2 / 6.0]
}

/// Derivative (per unit of `s`) of the Lagrange basis on nodes 0..3.
fn lagrange_derivative_weights(s: f64) -> [f64; 4] {
    let (s0, s1, s2, s3) = (s, s - 1.0, s - 2.0, s - 3.0);
    [
        -(s2 * s3 + s1 * s3 + s1 * s2) / 6.0,
        (s2 * s3 + s0 * s3 + s0 * s2) / 2.0,
        -(s1 * s3 + s0 * s3 + s0 * s1) / 2.0,
        (s1 * s2 + s0 * s2 + s0 * s1) / 6.0,
    ]
}

#[derive(Debug, Clone, PartialEq)]
enum Knots {
    Uniform(UniformKnots),
    General(Vec<f64>),
}

impl Knots {
    fn len(&self) -> usize {
        match self {
            Knots::Uniform(u) => u.len(),
            Knots::General(v) => v.len(),
        }
    }

    fn get(&self, j: usize) -> f64 {
        match self {
            Knots::Uniform(u) => u.knot(j),
            Knots::General(v) => v[j],
        }
    }

    fn locate(&self, x: f64) -> usize {
        match self {
            Knots::Uniform(u) => u.locate(x),
            Knots::General(v) => {
                let n = v.len();
                let p = v.partition_point(|&k| k <= x);
                p.clamp(1, n - 1) - 1
            }
        }
    }
}

/// A fitted cubic spline.
#[derive(Debug, Clone, PartialEq)]
pub struct Spline {
    knots: Knots,
    values: Vec<f64>,
    second: Vec<f64>,
    mode: SplineMode,
}

impl Spline {
    /// Natural cubic spline through `(knots[j], values[j])`.
    pub fn fit_full(knots: &[f64], values: &[f64]) -> Result<Self> {
        check_knots(knots, values, 2)?;
        let n = knots.len();
        let m = n - 1;
        let mut second = vec![0.0; n];
        if m >= 2 {
            let interior = m - 1;
            let mut lower = vec![0.0; interior];
            let mut diag = vec![0.0; interior];
            let mut upper = vec![0.0; interior];
            let mut rhs = vec![0.0; interior];
            for i in 0..interior {
                let j = i + 1;
                let dl = knots[j] - knots[j - 1];
                let dr = knots[j + 1] - knots[j];
                lower[i] = dl / 6.0;
                diag[i] = (knots[j + 1] - knots[j - 1]) / 3.0;
                upper[i] = dr / 6.0;
                rhs[i] = (values[j + 1] - values[j]) / dr - (values[j] - values[j - 1]) / dl;
            }
            let sol = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
            second[1..m].copy_from_slice(&sol);
        }
        Ok(Self { knots: Knots::General(knots.to_vec()), values: values.to_vec(), second, mode: SplineMode::Full })
    }

    /// Natural spline on a uniform layout.
    pub fn fit_full_uniform(knots: UniformKnots, values: &[f64]) -> Result<Self> {
        let xs: Vec<f64> = (0..knots.len()).map(|j| knots.knot(j)).collect();
        let mut s = Self::fit_full(&xs, values)?;
        s.knots = Knots::Uniform(knots);
        Ok(s)
    }

    /// Central-difference spline. Requires uniformly spaced knots.
    pub fn fit_fast(knots: &[f64], values: &[f64]) -> Result<Self> {
        check_knots(knots, values, 3)?;
        let m = knots.len() - 1;
        let dx = (knots[m] - knots[0]) / m as f64;
        let tol = 1e-9 * dx;
        if knots.iter().enumerate().any(|(j, &k)| (k - (knots[0] + j as f64 * dx)).abs() > tol) {
            return Err(Error::InvalidGrid("fast spline requires uniformly spaced knots".into()));
        }
        Self::fit_fast_uniform(UniformKnots::new(knots[0], dx, m)?, values)
    }

    pub fn fit_fast_uniform(knots: UniformKnots, values: &[f64]) -> Result<Self> {
        if values.len() != knots.len() {
            return Err(Error::DimensionMismatch { expected: knots.len(), actual: values.len() });
        }
        if knots.intervals < 3 {
            return Err(Error::InvalidGrid(format!("fast spline needs at least 3 intervals, got {}", knots.intervals)));
        }
        let h2 = knots.dx * knots.dx;
        let mut second = vec![0.0; values.len()];
        for j in 1..knots.intervals {
            second[j] = (values[j + 1] + values[j - 1] - 2.0 * values[j]) / h2;
        }
        Ok(Self { knots: Knots::Uniform(knots), values: values.to_vec(), second, mode: SplineMode::FastCentral })
    }

    /// Fits in the requested mode on a uniform layout.
    pub fn fit_uniform(mode: SplineMode, knots: UniformKnots, values: &[f64]) -> Result<Self> {
        match mode {
            SplineMode::Full => Self::fit_full_uniform(knots, values),
            SplineMode::FastCentral => Self::fit_fast_uniform(knots, values),
        }
    }

    pub fn mode(&self) -> SplineMode {
        self.mode
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn second_derivatives(&self) -> &[f64] {
        &self.second
    }

    pub fn knots(&self) -> Vec<f64> {
        (0..self.knots.len()).map(|j| self.knots.get(j)).collect()
    }

    fn first(&self) -> f64 {
        self.knots.get(0)
    }

    fn last(&self) -> f64 {
        self.knots.get(self.knots.len() - 1)
    }

    /// Evaluates the spline; linear continuation outside the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let m = self.knots.len() - 1;
        if x < self.first() {
            return self.values[0] + self.derivative_at_knot(0) * (x - self.first());
        }
        if x > self.last() {
            return self.values[m] + self.derivative_at_knot(m) * (x - self.last());
        }
        let j = self.knots.locate(x);
        let (xl, xr) = (self.knots.get(j), self.knots.get(j + 1));
        if x == xl {
            return self.values[j];
        }
        if x == xr {
            return self.values[j + 1];
        }
        match (&self.knots, self.mode) {
            (Knots::Uniform(u), SplineMode::FastCentral) if j == 0 || j == m - 1 => {
                // Edge intervals have no central stencil.
                let first = if j == 0 { 0 } else { m - 3 };
                let s = (j - first) as f64 + (x - xl) / u.dx;
                let w = lagrange_weights(s);
                (0..4).map(|i| w[i] * self.values[first + i]).sum()
            }
            _ => self.eval_in_interval(j, x),
        }
    }

    fn eval_in_interval(&self, j: usize, x: f64) -> f64 {
        let (xl, xr) = (self.knots.get(j), self.knots.get(j + 1));
        let h = xr - xl;
        let a = (xr - x) / h;
        let b = 1.0 - a;
        let c = (a * a * a - a) * h * h / 6.0;
        let d = (b * b * b - b) * h * h / 6.0;
        a * self.values[j] + b * self.values[j + 1] + c * self.second[j] + d * self.second[j + 1]
    }

    /// One-sided first derivative at a boundary knot (`0` or `M`).
    fn derivative_at_knot(&self, k: usize) -> f64 {
        let m = self.knots.len() - 1;
        match (&self.knots, self.mode) {
            (Knots::Uniform(u), SplineMode::FastCentral) => {
                let (first, s) = if k == 0 { (0, 0.0) } else { (m - 3, 3.0) };
                let d = lagrange_derivative_weights(s);
                (0..4).map(|i| d[i] * self.values[first + i]).sum::<f64>() / u.dx
            }
            _ => {
                let j = if k == 0 { 0 } else { m - 1 };
                let h = self.knots.get(j + 1) - self.knots.get(j);
                let slope = (self.values[j + 1] - self.values[j]) / h;
                if k == 0 {
                    slope - h / 3.0 * self.second[j] - h / 6.0 * self.second[j + 1]
                } else {
                    slope + h / 6.0 * self.second[j] + h / 3.0 * self.second[j + 1]
                }
            }
        }
    }
}

fn check_knots(knots: &[f64], values: &[f64], min_intervals: usize) -> Result<()> {
    if knots.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: knots.len(), actual: values.len() });
    }
    if knots.len() < min_intervals + 1 {
        return Err(Error::InvalidGrid(format!(
            "need at least {min_intervals} intervals, got {}",
            knots.len().saturating_sub(1)
        )));
    }
    if knots.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::InvalidGrid("knots must be strictly increasing".into()));
    }
    Ok(())
}

/// 4-point Lagrange interpolation on the uniform stencil `j-1..=j+2`
/// straddling `x` (`x_j < x <= x_{j+1}`).
pub fn eval_lagrange4(knots: &[f64], values: &[f64], x: f64) -> Result<f64> {
    check_knots(knots, values, 3)?;
    let m = knots.len() - 1;
    let (lo, hi) = (knots[1], knots[m - 1]);
    if !(x >= lo && x <= hi) {
        return Err(Error::OutOfRange { x, lo, hi });
    }
    let j = knots.partition_point(|&k| k < x).saturating_sub(1).clamp(1, m - 2);
    let mut acc = 0.0;
    for i in j - 1..=j + 2 {
        let mut l = 1.0;
        for p in j - 1..=j + 2 {
            if p != i {
                l *= (x - knots[p]) / (knots[i] - knots[p]);
            }
        }
        acc += l * values[i];
    }
    Ok(acc)
}
