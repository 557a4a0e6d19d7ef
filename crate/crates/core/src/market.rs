//! From price panels to correlation frames and MST-plus-threshold networks.

use log::warn;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{corr_to_dist, mst_prim, Graph};

/// `r(t) = ln P(t) - ln P(t-1)` per column; `T+1` price rows give `T` returns.
pub fn log_returns(prices: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (rows, cols) = prices.shape();
    for j in 0..cols {
        for i in 0..rows {
            let p = prices[(i, j)];
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "price {p} at row {i}, column {j} is not positive"
                )));
            }
        }
    }
    if rows < 2 {
        return Ok(DMatrix::zeros(0, cols));
    }
    Ok(DMatrix::from_fn(rows - 1, cols, |i, j| {
        prices[(i + 1, j)].ln() - prices[(i, j)].ln()
    }))
}

/// A `tau x N` block of returns ending on `end_date`.
#[derive(Debug, Clone)]
pub struct ReturnWindow {
    pub returns: DMatrix<f64>,
    pub end_date: String,
    pub tickers: Vec<String>,
}

impl ReturnWindow {
    pub fn new(returns: DMatrix<f64>, end_date: impl Into<String>, tickers: Vec<String>) -> Result<Self> {
        if returns.nrows() < 2 {
            return Err(Error::InvalidArgument(format!(
                "return window needs at least 2 rows, got {}",
                returns.nrows()
            )));
        }
        if tickers.len() != returns.ncols() {
            return Err(Error::Dimension(format!(
                "{} tickers for {} return columns",
                tickers.len(),
                returns.ncols()
            )));
        }
        if let Some(x) = returns.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite return {x}")));
        }
        Ok(Self {
            returns,
            end_date: end_date.into(),
            tickers,
        })
    }
}

/// Correlation matrix `C`, its distance transform `D = sqrt(2 (1 - C))`,
/// and the epoch it describes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationFrame {
    #[serde(skip)]
    pub corr: DMatrix<f64>,
    #[serde(skip)]
    pub dist: DMatrix<f64>,
    pub end_date: String,
    pub tickers: Vec<String>,
}

impl CorrelationFrame {
    /// Validates `corr` (square, symmetric, unit diagonal, entries in
    /// [-1, 1]) and derives the distance matrix.
    pub fn from_corr(corr: DMatrix<f64>, end_date: impl Into<String>, tickers: Vec<String>) -> Result<Self> {
        let n = corr.nrows();
        if corr.ncols() != n || tickers.len() != n {
            return Err(Error::Dimension(format!(
                "{}x{} correlation matrix with {} tickers",
                n,
                corr.ncols(),
                tickers.len()
            )));
        }
        for i in 0..n {
            if corr[(i, i)] != 1.0 {
                return Err(Error::InvalidArgument(format!("diagonal entry {i} is {}", corr[(i, i)])));
            }
            for j in 0..n {
                let c = corr[(i, j)];
                if !(-1.0..=1.0).contains(&c) {
                    return Err(Error::InvalidArgument(format!("C[{i}][{j}] = {c} outside [-1, 1]")));
                }
                if c != corr[(j, i)] {
                    return Err(Error::NotSymmetric {
                        i,
                        j,
                        gap: (c - corr[(j, i)]).abs(),
                    });
                }
            }
        }
        let dist = corr.map(corr_to_dist);
        Ok(Self {
            corr,
            dist,
            end_date: end_date.into(),
            tickers,
        })
    }

    pub fn len(&self) -> usize {
        self.corr.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Pearson correlations over the window with population moments. A column
/// with zero variance gets correlation 0 with every other column.
pub fn pearson_window(w: &ReturnWindow) -> Result<CorrelationFrame> {
    let (tau, n) = w.returns.shape();
    let t = tau as f64;
    let means: Vec<f64> = (0..n).map(|j| w.returns.column(j).sum() / t).collect();
    let centered = DMatrix::from_fn(tau, n, |i, j| w.returns[(i, j)] - means[j]);
    let cov = centered.transpose() * &centered / t;
    let sd: Vec<f64> = (0..n).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    for (j, &s) in sd.iter().enumerate() {
        if s == 0.0 {
            warn!(
                "ticker {} has zero variance in epoch ending {}; its correlations are set to 0",
                w.tickers[j], w.end_date
            );
        }
    }
    let corr = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else if sd[i] == 0.0 || sd[j] == 0.0 {
            0.0
        } else {
            (cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt()).clamp(-1.0, 1.0)
        }
    });
    // the product is symmetric up to rounding; force exact symmetry
    let corr = DMatrix::from_fn(n, n, |i, j| if i <= j { corr[(i, j)] } else { corr[(j, i)] });
    CorrelationFrame::from_corr(corr, w.end_date.clone(), w.tickers.clone())
}

/// Union of the Prim MST on `D` and every pair with `C_ij >= threshold`.
pub fn threshold_network(frame: &CorrelationFrame, threshold: f64) -> Result<Graph> {
    if !(threshold > -1.0 && threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!("threshold {threshold} outside (-1, 1]")));
    }
    let n = frame.len();
    let mut pairs = mst_prim(&frame.dist)?;
    for i in 0..n {
        for j in i + 1..n {
            if frame.corr[(i, j)] >= threshold {
                pairs.push((i, j));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(i, j)| (i, j, frame.corr[(i, j)], frame.dist[(i, j)]))
        .collect();
    Graph::new(n, &edges)?.with_labels(frame.tickers.clone())
}

/// Half-open row range `[start, end)` of one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Epoch {
    pub start: usize,
    pub end: usize,
}

/// Windows `[s, s + tau)` for `s = 0, delta, 2 delta, ...` while they fit in `t` rows.
pub fn rolling_epochs(t: usize, tau: usize, delta: usize) -> Result<Vec<Epoch>> {
    if tau < 2 {
        return Err(Error::InvalidArgument(format!("tau = {tau} must be at least 2")));
    }
    if delta < 1 {
        return Err(Error::InvalidArgument("delta must be at least 1".into()));
    }
    if t < tau {
        return Err(Error::InvalidArgument(format!("{t} rows cannot hold an epoch of {tau}")));
    }
    Ok((0..=t - tau)
        .step_by(delta)
        .map(|start| Epoch {
            start,
            end: start + tau,
        })
        .collect())
}

/// Adds i.i.d. `N(0, sigma^2)` noise to the upper triangle of `C`, mirrors
/// it, clips to [-1, 1] and recomputes `D`. The diagonal stays 1.
pub fn perturb_correlations(frame: &CorrelationFrame, sigma: f64, seed: u64) -> Result<CorrelationFrame> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("noise sigma {sigma} must be non-negative")));
    }
    if sigma == 0.0 {
        return Ok(frame.clone());
    }
    let normal = Normal::new(0.0, sigma).expect("sigma validated");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = frame.len();
    let mut corr = frame.corr.clone();
    for i in 0..n {
        for j in i + 1..n {
            let c = (corr[(i, j)] + normal.sample(&mut rng)).clamp(-1.0, 1.0);
            corr[(i, j)] = c;
            corr[(j, i)] = c;
        }
    }
    CorrelationFrame::from_corr(corr, frame.end_date.clone(), frame.tickers.clone())
}
