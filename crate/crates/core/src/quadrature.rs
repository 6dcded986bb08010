//! Gauss-Hermite quadrature for the weight `exp(-x^2)` and moment-matched
//! weights for transition laws known only through their central moments.

use crate::error::{Error, Result};
use crate::linalg::DenseLu;

/// `pi^(-1/4)`, the value of the normalised Hermite function of degree 0.
const PI_M4: f64 = 0.7511255444649425;
const ROOT_TOL: f64 = 3.0e-14;
const MAX_NEWTON: usize = 10;

/// Supported orders for [`GaussHermiteRule::new`].
pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 64;
/// Largest order accepted by the moment-matching solve.
pub const MAX_MOMENT_ORDER: usize = 20;
/// Largest 1-norm condition number accepted for the moment system. The
/// residual check is the final gate on the solved weights.
pub const MAX_CONDITION: f64 = 1e16;

/// Abscissas and weights of a `q`-point Gauss-Hermite rule,
/// `int exp(-x^2) f(x) dx ~ sum_j w_j f(x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermiteRule {
    abscissas: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermiteRule {
    /// Generates the rule of order `q` by Newton iteration on the
    /// orthonormal Hermite recurrence.
    ///
    /// Initial guesses follow the classic asymptotic formulas for the
    /// largest roots, extrapolated inward for the rest. The weight of each
    /// node is `2 / h'_q(x)^2`, where `h'_q` is the orthonormal derivative
    /// `sqrt(2q) h_{q-1}` taken from the final Newton pass.
    pub fn new(q: usize) -> Result<Self> {
        if !(MIN_ORDER..=MAX_ORDER).contains(&q) {
            return Err(Error::InvalidOrder(q, "2..=64"));
        }
        let half = q.div_ceil(2);
        // Descending positive roots, as produced by the iteration.
        let mut roots = vec![0.0; half];
        let mut wts = vec![0.0; half];
        let nf = q as f64;
        let mut z = 0.0;
        for i in 0..half {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * roots[0],
                3 => 1.91 * z - 0.91 * roots[1],
                _ => 2.0 * z - roots[i - 2],
            };
            let mut converged = false;
            let mut deriv = 0.0;
            for _ in 0..MAX_NEWTON {
                let (p, pm1) = orthonormal_hermite(q, z);
                deriv = (2.0 * nf).sqrt() * pm1;
                let prev = z;
                z = prev - p / deriv;
                if (z - prev).abs() <= ROOT_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::RootNotConverged { order: q, node: i });
            }
            roots[i] = z;
            wts[i] = 2.0 / (deriv * deriv);
        }

        let mut abscissas = vec![0.0; q];
        let mut weights = vec![0.0; q];
        for i in 0..half {
            // The middle root of an odd rule is zero by symmetry.
            let x = if q % 2 == 1 && i == half - 1 { 0.0 } else { roots[i] };
            abscissas[q - 1 - i] = x;
            abscissas[i] = -x;
            weights[q - 1 - i] = wts[i];
            weights[i] = wts[i];
        }
        Ok(Self { abscissas, weights })
    }

    pub fn order(&self) -> usize {
        self.abscissas.len()
    }

    /// Roots of `H_q`, ascending.
    pub fn abscissas(&self) -> &[f64] {
        &self.abscissas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_j w_j f(x_j)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.abscissas.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Newton correction `h_q(x) / h_q'(x)` at `x`: the distance to the
    /// nearest root to first order.
    pub fn residual(&self, x: f64) -> f64 {
        let q = self.order();
        let (p1, p2) = orthonormal_hermite(q, x);
        p1 / ((2.0 * q as f64).sqrt() * p2)
    }
}

/// Orthonormal Hermite functions `(h_q(z), h_{q-1}(z))` from the
/// three-term recurrence (without the `exp(-z^2/2)` factor).
fn orthonormal_hermite(q: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI_M4;
    let mut p2 = 0.0;
    for j in 1..=q {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

/// Weights `W_j` for nodes `scale * x_j` that reproduce supplied central
/// moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentWeights {
    pub weights: Vec<f64>,
    pub node_scale: f64,
    /// 1-norm condition estimate of the (normalised) moment matrix.
    pub condition: f64,
}

impl MomentWeights {
    pub fn order(&self) -> usize {
        self.weights.len()
    }
}

/// Solves `sum_j W_j (scale x_j)^k = moments[k]` for `k = 0..q-1`.
///
/// Row `k` is divided by `scale^k` before factorising so the system stays
/// well scaled for small per-step volatilities.
pub fn moment_matched_weights(
    rule: &GaussHermiteRule,
    central_moments: &[f64],
    node_scale: f64,
) -> Result<MomentWeights> {
    let q = rule.order();
    if q > MAX_MOMENT_ORDER {
        return Err(Error::InvalidOrder(q, "2..=20 for moment matching"));
    }
    if central_moments.len() != q {
        return Err(Error::DimensionMismatch { expected: q, actual: central_moments.len() });
    }
    if (central_moments[0] - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("zeroth central moment must be 1, got {}", central_moments[0])));
    }
    if !(node_scale > 0.0 && node_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("node scale must be positive, got {node_scale}")));
    }

    let xs = rule.abscissas();
    let mut a = vec![0.0; q * q];
    for (k, row) in a.chunks_mut(q).enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = xs[j].powi(k as i32);
        }
    }
    let rhs: Vec<f64> = central_moments.iter().enumerate().map(|(k, m)| m / node_scale.powi(k as i32)).collect();

    let lu = DenseLu::factor(q, a.clone())?;
    let condition = lu.condition_1norm(&a);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let weights = lu.solve(&rhs);

    // Residual of the normalised system.
    for (k, row) in a.chunks(q).enumerate() {
        let lhs: f64 = row.iter().zip(&weights).map(|(p, w)| p * w).sum();
        let scale = rhs[k].abs().max(1.0);
        if ((lhs - rhs[k]) / scale).abs() > 1e-9 {
            return Err(Error::IllConditioned { condition });
        }
    }
    Ok(MomentWeights { weights, node_scale, condition })
}

/// Central moments `E[(X - E X)^k]`, `k = 0..count-1`, of a normal law with
/// standard deviation `sd`: zero for odd `k`, `sd^k (k-1)!!` for even `k`.
pub fn normal_central_moments(sd: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut even = 1.0;
    for k in 0..count {
        if k % 2 == 1 {
            out.push(0.0);
        } else {
            if k >= 2 {
                even *= (k - 1) as f64 * sd * sd;
            }
            out.push(even);
        }
    }
    out
}
