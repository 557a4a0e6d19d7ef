//! Long-only minimum-variance portfolio: minimize `w' Omega w` subject to
//! `sum w = 1`, `w >= 0`.
//!
//! Primal active-set method. It starts at the single asset of lowest
//! variance, solves the equality-constrained problem on the free set with a
//! Cholesky factorization (`w_F = Omega_FF^-1 1 / 1' Omega_FF^-1 1`), steps
//! toward that solution until a weight hits zero, and frees the asset with
//! the most negative multiplier once the free-set optimum is feasible.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

const KKT_TOL: f64 = 1e-8;
const SYMMETRY_TOL: f64 = 1e-10;
const RIDGE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Portfolio {
    pub weights: Vec<f64>,
    /// `sqrt(w' Omega w)`.
    pub risk: f64,
}

/// Sample covariance (normalized by `tau - 1`) of the columns of a
/// `tau x N` return matrix.
pub fn sample_covariance(returns: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (tau, n) = returns.shape();
    if tau < 2 {
        return Err(Error::Dimension(format!("covariance needs at least 2 rows, got {tau}")));
    }
    let means: Vec<f64> = (0..n).map(|j| returns.column(j).mean()).collect();
    let centered = DMatrix::from_fn(tau, n, |t, j| returns[(t, j)] - means[j]);
    let mut cov = centered.transpose() * &centered / (tau as f64 - 1.0);
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(cov)
}

pub fn min_risk_portfolio(omega: &DMatrix<f64>) -> Result<Portfolio> {
    let n = omega.nrows();
    if n == 0 || omega.ncols() != n {
        return Err(Error::Dimension(format!(
            "covariance must be square and non-empty, got {}x{}",
            omega.nrows(),
            omega.ncols()
        )));
    }
    if let Some((i, j)) = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| !omega[(i, j)].is_finite())
    {
        return Err(Error::NonFinite(i, j));
    }
    let scale = (0..n).map(|i| omega[(i, i)].abs()).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..i {
            let gap = (omega[(i, j)] - omega[(j, i)]).abs();
            if gap > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric { i, j, gap });
            }
        }
    }
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (omega[(i, j)] + omega[(j, i)]));
    let mut work = sym.clone();
    // add the ridge only when the full matrix is not numerically positive definite
    let mut ridge = 0.0;
    while Cholesky::new(work.clone()).is_none() {
        ridge = if ridge == 0.0 { RIDGE } else { ridge * 10.0 };
        if ridge > scale {
            return Err(Error::InvalidArgument("covariance is not positive semidefinite".into()));
        }
        work = sym.clone();
        for i in 0..n {
            work[(i, i)] += ridge;
        }
    }
    if ridge > 0.0 {
        log::debug!("covariance regularized with diagonal ridge {ridge:e}");
    }

    let weights = active_set(&work, scale)?;
    let w = DVector::from_vec(weights.clone());
    let risk = (w.dot(&(&sym * &w))).max(0.0).sqrt();
    Ok(Portfolio { weights, risk })
}

fn active_set(omega: &DMatrix<f64>, scale: f64) -> Result<Vec<f64>> {
    let n = omega.nrows();
    let start = (0..n)
        .min_by(|&a, &b| omega[(a, a)].total_cmp(&omega[(b, b)]))
        .expect("non-empty");
    let mut free = vec![start];
    let mut w = vec![0.0; n];
    w[start] = 1.0;
    let tol = KKT_TOL * scale;

    for _ in 0..(50 * n + 100) {
        let target = equality_solution(omega, &free)?;
        let blocking = free
            .iter()
            .zip(&target)
            .filter(|&(_, &t)| t <= 0.0)
            .map(|(&i, &t)| (i, w[i] / (w[i] - t)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        match blocking {
            Some((leave, alpha)) => {
                let alpha = alpha.clamp(0.0, 1.0);
                for (&i, &t) in free.iter().zip(&target) {
                    w[i] += alpha * (t - w[i]);
                }
                w[leave] = 0.0;
                free.retain(|&i| i != leave);
                free.retain(|&i| w[i] > 0.0);
                renormalize(&mut w);
            }
            None => {
                for i in 0..n {
                    w[i] = 0.0;
                }
                for (&i, &t) in free.iter().zip(&target) {
                    w[i] = t;
                }
                let grad = omega * DVector::from_column_slice(&w);
                let lambda = free.iter().map(|&i| grad[i]).sum::<f64>() / free.len() as f64;
                let enter = (0..n)
                    .filter(|i| !free.contains(i))
                    .map(|i| (i, grad[i] - lambda))
                    .filter(|&(_, g)| g < -tol)
                    .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                match enter {
                    Some((i, _)) => {
                        free.push(i);
                        free.sort_unstable();
                    }
                    None => return Ok(w),
                }
            }
        }
    }
    Err(Error::NoConvergence("minimum-variance active set did not terminate".into()))
}

/// `Omega_FF^-1 1` normalized to unit sum, in the order of `free`.
fn equality_solution(omega: &DMatrix<f64>, free: &[usize]) -> Result<Vec<f64>> {
    let k = free.len();
    let sub = DMatrix::from_fn(k, k, |a, b| omega[(free[a], free[b])]);
    let chol = Cholesky::new(sub)
        .ok_or_else(|| Error::NoConvergence("free-set covariance lost positive definiteness".into()))?;
    let y = chol.solve(&DVector::from_element(k, 1.0));
    let total: f64 = y.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NoConvergence("free-set solve produced a non-positive normalizer".into()));
    }
    Ok(y.iter().map(|v| v / total).collect())
}

fn renormalize(w: &mut [f64]) {
    for v in w.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= total;
    }
}
