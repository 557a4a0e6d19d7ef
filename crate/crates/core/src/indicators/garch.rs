//! GARCH(1,1) conditional variance, Gaussian quasi-maximum likelihood fit,
//! and simulation.
//!
//! The recursion is `s2[t] = a0 + a1 x[t-1]^2 + b1 s2[t-1]`, started at the
//! sample variance of the (demeaned) series. The fit maximizes
//! `sum_t -1/2 (ln(2 pi s2[t]) + x[t]^2 / s2[t])` with Nelder-Mead over an
//! unconstrained reparametrization that enforces `a0 > 0`, `a1, b1 >= 0`
//! and `a1 + b1 <= 1 - 1e-6`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_FIT_LEN: usize = 100;
const MAX_PERSISTENCE: f64 = 1.0 - 1e-6;
const MAX_ITER: usize = 10_000;
const LOGLIK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GarchParams {
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub loglik: f64,
    /// Conditional variance per observation of the fitted series.
    #[serde(skip)]
    pub sigma2_series: Vec<f64>,
}

impl GarchParams {
    pub fn unconditional_variance(&self) -> f64 {
        self.alpha0 / (1.0 - self.alpha1 - self.beta1)
    }
}

/// Starting point for the optimizer; `alpha0` is implied by the sample
/// variance so the start matches the unconditional level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchInit {
    pub alpha1: f64,
    pub beta1: f64,
}

impl Default for GarchInit {
    fn default() -> Self {
        Self {
            alpha1: 0.05,
            beta1: 0.90,
        }
    }
}

/// Conditional variances for `x` given the parameters and `s2[0] = sigma2_start`.
pub fn garch11_filter(x: &[f64], alpha0: f64, alpha1: f64, beta1: f64, sigma2_start: f64) -> Vec<f64> {
    let mut s2 = Vec::with_capacity(x.len());
    let mut prev = sigma2_start;
    for (t, _) in x.iter().enumerate() {
        if t > 0 {
            prev = alpha0 + alpha1 * x[t - 1] * x[t - 1] + beta1 * prev;
        }
        s2.push(prev);
    }
    s2
}

/// Gaussian log-likelihood of an already demeaned series, with the
/// recursion started at its sample variance.
pub fn garch11_loglik(x: &[f64], alpha0: f64, alpha1: f64, beta1: f64) -> f64 {
    let var = sample_variance(x);
    loglik_from(x, alpha0, alpha1, beta1, var)
}

fn loglik_from(x: &[f64], alpha0: f64, alpha1: f64, beta1: f64, var: f64) -> f64 {
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    let mut prev = var;
    let mut ll = 0.0;
    for t in 0..x.len() {
        if t > 0 {
            prev = alpha0 + alpha1 * x[t - 1] * x[t - 1] + beta1 * prev;
        }
        if !(prev > 0.0) {
            return f64::NEG_INFINITY;
        }
        ll -= 0.5 * (ln_2pi + prev.ln() + x[t] * x[t] / prev);
    }
    ll
}

fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

pub fn demean(x: &[f64]) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| v - mean).collect()
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

struct Transform {
    var: f64,
}

impl Transform {
    fn to_params(&self, theta: &[f64; 3]) -> (f64, f64, f64) {
        let alpha0 = self.var * theta[0].exp();
        let persistence = MAX_PERSISTENCE * logistic(theta[1]);
        let share = logistic(theta[2]);
        (alpha0, persistence * share, persistence * (1.0 - share))
    }

    fn to_theta(&self, alpha0: f64, alpha1: f64, beta1: f64) -> [f64; 3] {
        let persistence = (alpha1 + beta1).clamp(1e-8, MAX_PERSISTENCE * (1.0 - 1e-8));
        let share = (alpha1 / (alpha1 + beta1)).clamp(1e-8, 1.0 - 1e-8);
        [
            (alpha0 / self.var).ln(),
            logit(persistence / MAX_PERSISTENCE),
            logit(share),
        ]
    }
}

/// Fits GARCH(1,1) to `x` after removing its mean.
pub fn garch11_fit(x: &[f64], init: Option<GarchInit>) -> Result<GarchParams> {
    if x.len() < MIN_FIT_LEN {
        return Err(Error::InvalidArgument(format!(
            "GARCH fit needs at least {MIN_FIT_LEN} observations, got {}",
            x.len()
        )));
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite observation {v}")));
    }
    let xd = demean(x);
    let var = sample_variance(&xd);
    if !(var > 0.0) {
        return Err(Error::DegenerateSeries("series has zero variance".into()));
    }
    let init = init.unwrap_or_default();
    if !(init.alpha1 >= 0.0 && init.beta1 >= 0.0 && init.alpha1 + init.beta1 < MAX_PERSISTENCE) {
        return Err(Error::InvalidArgument(format!("invalid GARCH initializer {init:?}")));
    }
    let tr = Transform { var };
    let objective = |theta: &[f64; 3]| {
        let (a0, a1, b1) = tr.to_params(theta);
        let ll = loglik_from(&xd, a0, a1, b1, var);
        if ll.is_finite() {
            -ll
        } else {
            f64::INFINITY
        }
    };
    let start = tr.to_theta((1.0 - init.alpha1 - init.beta1) * var, init.alpha1, init.beta1);
    let start_value = objective(&start);

    let mut best = (start, start_value);
    let mut iters_left = MAX_ITER;
    let mut converged = false;
    // restart from the incumbent until a full run no longer improves it
    while iters_left > 0 {
        let (theta, value, used, ok) = nelder_mead(&objective, best.0, 0.5, iters_left);
        iters_left -= used.min(iters_left);
        let improvement = best.1 - value;
        if value < best.1 {
            best = (theta, value);
        }
        if ok && improvement.abs() <= LOGLIK_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "GARCH(1,1) likelihood still moving after {MAX_ITER} iterations"
        )));
    }
    let (alpha0, alpha1, beta1) = tr.to_params(&best.0);
    Ok(GarchParams {
        alpha0,
        alpha1,
        beta1,
        loglik: -best.1,
        sigma2_series: garch11_filter(&xd, alpha0, alpha1, beta1, var),
    })
}

/// Conditional standard deviations of the fitted series.
pub fn garch_volatility(params: &GarchParams) -> Vec<f64> {
    params.sigma2_series.iter().map(|s| s.sqrt()).collect()
}

/// Simulates `T` observations `x_t = eta_t sigma_t` with standard normal
/// `eta_t`, starting from the unconditional variance.
pub fn simulate_garch11(alpha0: f64, alpha1: f64, beta1: f64, len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s2 = alpha0 / (1.0 - alpha1 - beta1);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let eta: f64 = StandardNormal.sample(&mut rng);
        let x = eta * s2.sqrt();
        out.push(x);
        s2 = alpha0 + (alpha1 * eta * eta + beta1) * s2;
    }
    out
}

/// Minimizes `f` from `start`; returns `(point, value, iterations, converged)`.
fn nelder_mead(
    f: &impl Fn(&[f64; 3]) -> f64,
    start: [f64; 3],
    step: f64,
    max_iter: usize,
) -> ([f64; 3], f64, usize, bool) {
    const N: usize = 3;
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for k in 0..N {
        let mut p = start;
        p[k] += step;
        simplex.push((p, f(&p)));
    }
    let lerp = |a: &[f64; 3], b: &[f64; 3], t: f64| -> [f64; 3] {
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
    };
    for iter in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[N].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if spread.abs() <= LOGLIK_TOL * 0.1 && size < 1e-7 {
            return (simplex[0].0, simplex[0].1, iter, true);
        }
        let mut centroid = [0.0; 3];
        for (p, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += p[k] / N as f64;
            }
        }
        let worst = simplex[N].0;
        let reflected = lerp(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            simplex[N] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[N].1 {
                let c = lerp(&centroid, &worst, -0.5);
                (c, f(&c))
            } else {
                let c = lerp(&centroid, &worst, 0.5);
                (c, f(&c))
            };
            if fc < simplex[N].1.min(fr) {
                simplex[N] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    let p = lerp(&best, &entry.0, 0.5);
                    *entry = (p, f(&p));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0, simplex[0].1, max_iter, false)
}
