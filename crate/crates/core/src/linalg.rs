//! Small dense and tridiagonal solvers used by the spline fit, the
//! moment-matching system and the finite-difference oracle.

use crate::error::{Error, Result};

/// Solves a tridiagonal system with the Thomas algorithm.
///
/// `lower[i]` multiplies `x[i-1]` in row `i` (`lower[0]` is ignored),
/// `upper[i]` multiplies `x[i+1]` (`upper[n-1]` is ignored).
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: lower.len().min(upper.len()).min(rhs.len()) });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::Numerical("zero pivot in tridiagonal solve".into()));
    }
    x[0] = rhs[0] / beta;
    for i in 1..n {
        c[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i];
        if beta == 0.0 {
            return Err(Error::Numerical("zero pivot in tridiagonal solve".into()));
        }
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i + 1] * x[i + 1];
    }
    Ok(x)
}

/// Pre-factorised constant-coefficient tridiagonal matrix, reused across
/// many right-hand sides (one per time step in the Crank-Nicolson oracle).
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<f64>,
    inv_beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl TridiagonalLu {
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        if lower.len() != n || upper.len() != n || n == 0 {
            return Err(Error::DimensionMismatch { expected: n, actual: lower.len().min(upper.len()) });
        }
        let mut inv_beta = vec![0.0; n];
        let mut gamma = vec![0.0; n];
        let mut beta = diag[0];
        for i in 0..n {
            if i > 0 {
                gamma[i] = upper[i - 1] / beta;
                beta = diag[i] - lower[i] * gamma[i];
            }
            if beta == 0.0 {
                return Err(Error::Numerical("zero pivot in tridiagonal factorisation".into()));
            }
            inv_beta[i] = 1.0 / beta;
        }
        Ok(Self { lower: lower.to_vec(), inv_beta, gamma })
    }

    pub fn len(&self) -> usize {
        self.inv_beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_beta.is_empty()
    }

    /// Solves in place: `x` holds the right-hand side on entry.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.inv_beta.len();
        x[0] *= self.inv_beta[0];
        for i in 1..n {
            x[i] = (x[i] - self.lower[i] * x[i - 1]) * self.inv_beta[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.gamma[i + 1] * x[i + 1];
        }
    }
}

/// Dense LU factorisation with partial pivoting (row-major `n x n`).
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn factor(n: usize, mut a: Vec<f64>) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: a.len() });
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, a[i * n + k].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::IllConditioned { condition: f64::INFINITY });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let akk = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / akk;
                a[i * n + k] = f;
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// 1-norm condition number, computed from the explicit inverse. Only
    /// meant for the small systems (n <= 20) this crate factorises.
    pub fn condition_1norm(&self, a: &[f64]) -> f64 {
        let n = self.n;
        let norm = |m: &dyn Fn(usize, usize) -> f64| {
            (0..n).map(|j| (0..n).map(|i| m(i, j).abs()).sum::<f64>()).fold(0.0, f64::max)
        };
        let a_norm = norm(&|i, j| a[i * n + j]);
        let mut inv = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv[i * n + j] = col[i];
            }
        }
        a_norm * norm(&|i, j| inv[i * n + j])
    }
}
