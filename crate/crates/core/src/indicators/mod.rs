//! Market indicators per epoch: index log-return, mean market correlation,
//! GARCH(1,1) volatility and minimum-risk portfolio deviation, plus the
//! per-epoch indicator table and its correlogram.

mod garch;
mod portfolio;

pub use garch::{
    demean, garch11_filter, garch11_fit, garch11_loglik, garch_volatility, simulate_garch11, GarchInit, GarchParams,
    MIN_FIT_LEN,
};
pub use portfolio::{min_risk_portfolio, sample_covariance, Portfolio};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::market::{CorrelationFrame, Epoch};

/// Mean of the off-diagonal correlations, each unordered pair once.
pub fn mean_market_correlation(frame: &CorrelationFrame) -> Result<f64> {
    let n = frame.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("mean correlation needs N >= 2, got {n}")));
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += frame.corr[(i, j)];
        }
    }
    Ok(sum / (n * (n - 1) / 2) as f64)
}

/// Index log-return on each epoch's last day. `index_prices` holds `T + 1`
/// prices; epochs index the `T` return rows.
pub fn index_return_series(index_prices: &[f64], epochs: &[Epoch]) -> Result<Vec<f64>> {
    if let Some((row, &p)) = index_prices.iter().enumerate().find(|(_, &p)| !(p > 0.0) || !p.is_finite()) {
        return Err(Error::NonPositivePrice {
            row,
            date: String::new(),
            ticker: "INDEX".into(),
            value: p,
        });
    }
    epochs
        .iter()
        .map(|e| {
            if e.end == 0 || e.end >= index_prices.len() {
                return Err(Error::Dimension(format!(
                    "epoch ending at return row {} outside {} index prices",
                    e.end,
                    index_prices.len()
                )));
            }
            Ok(index_prices[e.end].ln() - index_prices[e.end - 1].ln())
        })
        .collect()
}

/// One epoch of the indicator table. Curvature averages are `None` when the
/// notion is disabled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorRow {
    pub end_date: String,
    pub index_return: f64,
    pub mu: f64,
    pub volatility: f64,
    pub sigma_p: f64,
    pub network_entropy: f64,
    pub communication_efficiency: f64,
    pub ore: Option<f64>,
    pub fre: Option<f64>,
    pub mre: Option<f64>,
    pub hre: Option<f64>,
    pub edge_count: usize,
    pub edge_density: f64,
    pub avg_degree: f64,
    pub avg_weighted_degree: f64,
    pub avg_path_length: f64,
    pub diameter: f64,
    pub clustering: f64,
    pub modularity: f64,
    pub community_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IndicatorSeries {
    pub rows: Vec<IndicatorRow>,
}

impl IndicatorSeries {
    /// Numeric column names in output order (the date column excluded).
    pub const COLUMNS: [&'static str; 20] = [
        "r",
        "mu",
        "volatility",
        "sigma_p",
        "NE",
        "CE",
        "ORE",
        "FRE",
        "FRE_abs",
        "MRE",
        "HRE",
        "edge_count",
        "edge_density",
        "avg_degree",
        "avg_weighted_degree",
        "avg_path_length",
        "diameter",
        "clustering",
        "modularity",
        "community_count",
    ];

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Value of a named column in one row; `None` for unknown names or a
    /// disabled curvature.
    pub fn value(row: &IndicatorRow, name: &str) -> Option<f64> {
        Some(match name {
            "r" => row.index_return,
            "mu" => row.mu,
            "volatility" => row.volatility,
            "sigma_p" => row.sigma_p,
            "NE" => row.network_entropy,
            "CE" => row.communication_efficiency,
            "ORE" => row.ore?,
            "FRE" => row.fre?,
            "FRE_abs" => row.fre?.abs(),
            "MRE" => row.mre?,
            "HRE" => row.hre?,
            "edge_count" => row.edge_count as f64,
            "edge_density" => row.edge_density,
            "avg_degree" => row.avg_degree,
            "avg_weighted_degree" => row.avg_weighted_degree,
            "avg_path_length" => row.avg_path_length,
            "diameter" => row.diameter,
            "clustering" => row.clustering,
            "modularity" => row.modularity,
            "community_count" => row.community_count as f64,
            _ => return None,
        })
    }

    /// The full column across epochs, `None` if any row lacks it.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| Self::value(r, name)).collect()
    }
}

/// Pairwise Pearson correlations across epochs between the named columns.
pub fn indicator_correlogram(series: &IndicatorSeries, columns: &[&str]) -> Result<DMatrix<f64>> {
    if series.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "correlogram needs at least 3 epochs, got {}",
            series.len()
        )));
    }
    let data: Vec<Vec<f64>> = columns
        .iter()
        .map(|&name| {
            let col = series
                .column(name)
                .ok_or_else(|| Error::InvalidArgument(format!("column {name} is unknown or incomplete")))?;
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("column {name} has non-finite values")));
            }
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let centered: Vec<f64> = col.iter().map(|v| v - mean).collect();
            let ss: f64 = centered.iter().map(|v| v * v).sum();
            if !(ss > 0.0) {
                return Err(Error::ZeroVariance(name.to_string()));
            }
            let norm = ss.sqrt();
            Ok(centered.into_iter().map(|v| v / norm).collect())
        })
        .collect::<Result<_>>()?;
    let k = columns.len();
    let mut out = DMatrix::identity(k, k);
    for a in 0..k {
        for b in a + 1..k {
            let c: f64 = data[a].iter().zip(&data[b]).map(|(x, y)| x * y).sum();
            let c = c.clamp(-1.0, 1.0);
            out[(a, b)] = c;
            out[(b, a)] = c;
        }
    }
    Ok(out)
}
