//! Rolling-window engine: price panel in, per-epoch indicator table and
//! correlogram out.
//!
//! Epochs index the return panel (`T - 1` rows for `T` price rows). Each
//! epoch builds a correlation frame, optionally perturbs it, thresholds it
//! into a network and computes curvature averages, network measures, the
//! mean correlation and the minimum-risk portfolio deviation. Index returns
//! and GARCH(1,1) volatility come from the full index history and are
//! sampled on each epoch's last day. Epochs run in parallel; results and
//! files are always in epoch order, and the first failing epoch (in that
//! order) aborts the run.

mod output;
mod panel;

pub use output::{
    format_float, sha256_file, write_correlogram, write_indicators, write_snapshot, SnapshotEdge, CORRELOGRAM_FILE,
    INDICATORS_FILE, MANIFEST_FILE,
};
pub use panel::{ingest_prices, parse_prices, write_prices, MissingPolicy, PricePanel, INDEX_COLUMN};

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{all_edge_curvatures, CurvatureConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::indicators::{
    garch11_fit, garch_volatility, index_return_series, indicator_correlogram, mean_market_correlation,
    min_risk_portfolio, sample_covariance, IndicatorRow, IndicatorSeries, MIN_FIT_LEN,
};
use crate::market::{
    log_returns, pearson_window, perturb_correlations, rolling_epochs, threshold_network, CorrelationFrame, Epoch,
    ReturnWindow,
};
use crate::measures::{edge_weights, graph_summary, louvain_modularity, SummaryConfig};

/// Columns eligible for the correlogram, in output order.
pub const CORRELOGRAM_COLUMNS: [&str; 11] = [
    "r", "mu", "volatility", "sigma_p", "NE", "CE", "ORE", "FRE", "FRE_abs", "MRE", "HRE",
];

/// Gaussian noise added to each epoch's correlations. Epoch `k` uses seed
/// `seed + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Perturbation {
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    /// Epoch length in trading days.
    pub tau: usize,
    /// Shift between consecutive epochs.
    pub delta: usize,
    /// Correlation threshold added on top of the MST.
    pub threshold: f64,
    pub curvature: CurvatureConfig,
    pub measures: SummaryConfig,
    pub perturbation: Option<Perturbation>,
    /// Output directory; `None` computes without writing files.
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    pub log_level: String,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tau: 22,
            delta: 5,
            threshold: 0.75,
            curvature: CurvatureConfig::default(),
            measures: SummaryConfig::default(),
            perturbation: None,
            out_dir: None,
            log_level: "info".into(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau < 2 {
            return Err(Error::InvalidArgument(format!("tau = {} must be at least 2", self.tau)));
        }
        if self.delta < 1 {
            return Err(Error::InvalidArgument("delta must be at least 1".into()));
        }
        if !(self.threshold > -1.0 && self.threshold <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "threshold {} must lie in (-1, 1]",
                self.threshold
            )));
        }
        if let Some(p) = self.perturbation {
            if !(p.sigma >= 0.0) || !p.sigma.is_finite() {
                return Err(Error::InvalidArgument(format!("perturbation sigma {} must be non-negative", p.sigma)));
            }
        }
        if matches!(self.curvature.haantjes_max_len, Some(k) if k < 2) {
            return Err(Error::InvalidArgument("Haantjes path length bound must be at least 2".into()));
        }
        Ok(())
    }

    /// Columns of `indicators.csv` after `end_date`; disabled curvatures are left out.
    pub fn indicator_columns(&self) -> Vec<&'static str> {
        let c = &self.curvature;
        IndicatorSeries::COLUMNS
            .iter()
            .copied()
            .filter(|&name| match name {
                "ORE" => c.ollivier,
                "FRE" | "FRE_abs" => c.forman,
                "MRE" => c.menger,
                "HRE" => c.haantjes,
                _ => true,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub series: IndicatorSeries,
    /// Correlogram column names; columns with zero variance or missing
    /// values are dropped.
    pub correlogram_columns: Vec<String>,
    pub correlogram: Option<DMatrix<f64>>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a PipelineConfig,
    input: InputSummary,
    epochs: usize,
    outputs: Vec<(String, String)>,
}

#[derive(Serialize)]
struct InputSummary {
    rows: usize,
    tickers: usize,
    has_index: bool,
    sha256: String,
}

/// Index price path: the INDEX column when present, else an equal-weight
/// log-return proxy starting at 1.
fn index_prices(panel: &PricePanel, returns: &DMatrix<f64>) -> Vec<f64> {
    if let Some(idx) = &panel.index {
        return idx.clone();
    }
    log::warn!("no {INDEX_COLUMN} column; using the equal-weight average of log-returns as the index");
    let mut level = 0.0;
    let mut out = Vec::with_capacity(panel.rows());
    out.push(1.0);
    for t in 0..returns.nrows() {
        level += returns.row(t).mean();
        out.push(level.exp());
    }
    out
}

/// Conditional volatility per return row, or NaN when the history is too
/// short to fit.
fn index_volatility(index_returns: &[f64]) -> Result<Vec<f64>> {
    if index_returns.len() < MIN_FIT_LEN {
        log::warn!(
            "{} index returns are too few for a GARCH(1,1) fit (need {MIN_FIT_LEN}); volatility left as NaN",
            index_returns.len()
        );
        return Ok(vec![f64::NAN; index_returns.len()]);
    }
    let params = garch11_fit(index_returns, None)?;
    log::info!(
        "GARCH(1,1) fit: alpha0={:e} alpha1={:.4} beta1={:.4} loglik={:.3}",
        params.alpha0,
        params.alpha1,
        params.beta1,
        params.loglik
    );
    Ok(garch_volatility(&params))
}

fn epoch_frame(cfg: &PipelineConfig, window: &ReturnWindow, k: usize) -> Result<CorrelationFrame> {
    let frame = pearson_window(window)?;
    match cfg.perturbation {
        Some(p) => perturb_correlations(&frame, p.sigma, p.seed.wrapping_add(k as u64)),
        None => Ok(frame),
    }
}

fn epoch_window(panel: &PricePanel, returns: &DMatrix<f64>, e: &Epoch) -> Result<ReturnWindow> {
    let block = returns.rows(e.start, e.end - e.start).into_owned();
    ReturnWindow::new(block, panel.dates[e.end].clone(), panel.tickers.clone())
}

struct MarketSide<'a> {
    r: &'a [f64],
    volatility: &'a [f64],
}

fn epoch_row(
    cfg: &PipelineConfig,
    panel: &PricePanel,
    returns: &DMatrix<f64>,
    market: &MarketSide,
    k: usize,
    e: &Epoch,
) -> Result<IndicatorRow> {
    let window = epoch_window(panel, returns, e)?;
    let frame = epoch_frame(cfg, &window, k)?;
    let mu = mean_market_correlation(&frame)?;
    let graph = threshold_network(&frame, cfg.threshold)?;
    let curv = all_edge_curvatures(&graph, &cfg.curvature)?;
    let summary = graph_summary(&graph, &cfg.measures)?;
    let sigma_p = min_risk_portfolio(&sample_covariance(&window.returns)?)?.risk;
    Ok(IndicatorRow {
        end_date: window.end_date,
        index_return: market.r[k],
        mu,
        volatility: market.volatility[e.end - 1],
        sigma_p,
        network_entropy: summary.network_entropy,
        communication_efficiency: summary.communication_efficiency,
        ore: curv.averages.ore,
        fre: curv.averages.fre,
        mre: curv.averages.mre,
        hre: curv.averages.hre,
        edge_count: summary.edge_count,
        edge_density: summary.edge_density,
        avg_degree: summary.avg_degree,
        avg_weighted_degree: summary.avg_weighted_degree,
        avg_path_length: summary.avg_path_length,
        diameter: summary.diameter,
        clustering: summary.clustering,
        modularity: summary.modularity,
        community_count: summary.community_count,
    })
}

fn with_epoch<T>(date: &str, r: Result<T>) -> Result<T> {
    r.map_err(|source| Error::Epoch {
        end_date: date.to_string(),
        source: Box::new(source),
    })
}

/// Computes the indicator table and correlogram without touching the file system.
pub fn compute_indicators(cfg: &PipelineConfig, panel: &PricePanel) -> Result<PipelineOutput> {
    cfg.validate()?;
    let returns = log_returns(&panel.prices)?;
    if returns.nrows() < cfg.tau {
        return Err(Error::InvalidArgument(format!(
            "{} return rows cannot hold an epoch of {} days",
            returns.nrows(),
            cfg.tau
        )));
    }
    let epochs = rolling_epochs(returns.nrows(), cfg.tau, cfg.delta)?;
    let idx_prices = index_prices(panel, &returns);
    let r = index_return_series(&idx_prices, &epochs)?;
    let idx_returns: Vec<f64> = idx_prices.windows(2).map(|p| p[1].ln() - p[0].ln()).collect();
    let volatility = index_volatility(&idx_returns)?;
    let market = MarketSide {
        r: &r,
        volatility: &volatility,
    };
    log::info!(
        "{} epochs of {} days, shift {}, {} tickers",
        epochs.len(),
        cfg.tau,
        cfg.delta,
        panel.tickers()
    );

    let rows: Vec<Result<IndicatorRow>> = epochs
        .par_iter()
        .enumerate()
        .map(|(k, e)| with_epoch(&panel.dates[e.end], epoch_row(cfg, panel, &returns, &market, k, e)))
        .collect();
    let series = IndicatorSeries {
        rows: rows.into_iter().collect::<Result<_>>()?,
    };

    let available: Vec<&str> = CORRELOGRAM_COLUMNS
        .iter()
        .copied()
        .filter(|&name| match series.column(name) {
            Some(col) => {
                let usable = col.iter().all(|v| v.is_finite()) && col.iter().any(|&v| v != col[0]);
                if !usable {
                    log::warn!("correlogram skips {name}: constant or non-finite across epochs");
                }
                usable
            }
            None => false,
        })
        .collect();
    let correlogram = if series.len() >= 3 && !available.is_empty() {
        Some(indicator_correlogram(&series, &available)?)
    } else {
        log::warn!("correlogram needs at least 3 epochs and one varying column; not computed");
        None
    };
    Ok(PipelineOutput {
        series,
        correlogram_columns: available.iter().map(|s| s.to_string()).collect(),
        correlogram,
    })
}

/// Runs the engine and, when `cfg.out_dir` is set, writes `indicators.csv`,
/// `correlogram.csv` and `run_manifest.json` there.
pub fn run_pipeline(cfg: &PipelineConfig, panel: &PricePanel) -> Result<PipelineOutput> {
    let out = compute_indicators(cfg, panel)?;
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let indicators = dir.join(INDICATORS_FILE);
        write_indicators(&indicators, &out.series, &cfg.indicator_columns())?;
        written.push(indicators);
        if let Some(corr) = &out.correlogram {
            let path = dir.join(CORRELOGRAM_FILE);
            write_correlogram(&path, &out.correlogram_columns, corr)?;
            written.push(path);
        }
        let outputs = written
            .iter()
            .map(|p| {
                let name = p.file_name().expect("file path").to_string_lossy().into_owned();
                sha256_file(p).map(|h| (name, h))
            })
            .collect::<Result<Vec<_>>>()?;
        let manifest = Manifest {
            tool: "ricci-market",
            version: env!("CARGO_PKG_VERSION"),
            config: cfg,
            input: InputSummary {
                rows: panel.rows(),
                tickers: panel.tickers(),
                has_index: panel.index.is_some(),
                sha256: panel.content_hash(),
            },
            epochs: out.series.len(),
            outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(dir.join(MANIFEST_FILE), text)?;
        log::info!("wrote {} epochs to {}", out.series.len(), dir.display());
    }
    Ok(out)
}

/// Threshold network of the epoch ending on `end_date`, with Louvain
/// communities of its nodes.
pub fn network_snapshot(cfg: &PipelineConfig, panel: &PricePanel, end_date: &str) -> Result<Vec<SnapshotEdge>> {
    cfg.validate()?;
    let returns = log_returns(&panel.prices)?;
    let epochs = rolling_epochs(returns.nrows(), cfg.tau, cfg.delta)?;
    let (k, epoch) = epochs
        .iter()
        .enumerate()
        .find(|(_, e)| panel.dates[e.end] == end_date)
        .ok_or_else(|| Error::UnknownEndDate(end_date.to_string()))?;
    with_epoch(end_date, snapshot_edges(cfg, panel, &returns, k, epoch))
}

fn snapshot_edges(
    cfg: &PipelineConfig,
    panel: &PricePanel,
    returns: &DMatrix<f64>,
    k: usize,
    epoch: &Epoch,
) -> Result<Vec<SnapshotEdge>> {
    let window = epoch_window(panel, returns, epoch)?;
    let frame = epoch_frame(cfg, &window, k)?;
    let graph: Graph = threshold_network(&frame, cfg.threshold)?;
    let weights = edge_weights(&graph, cfg.measures.modularity_weight)?;
    let partition = louvain_modularity(&graph, &weights, &cfg.measures.louvain)?;
    Ok(graph
        .edges()
        .iter()
        .map(|e| SnapshotEdge {
            ticker_i: panel.tickers[e.u].clone(),
            ticker_j: panel.tickers[e.v].clone(),
            corr: e.corr.expect("threshold networks carry correlations"),
            dist: e.dist,
            community_i: partition.communities[e.u],
            community_j: partition.communities[e.v],
        })
        .collect())
}

/// Writes the snapshot for `end_date` to `path` and returns its edge count.
pub fn emit_network_snapshot(cfg: &PipelineConfig, panel: &PricePanel, end_date: &str, path: &Path) -> Result<usize> {
    let edges = network_snapshot(cfg, panel, end_date)?;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    write_snapshot(path, &edges)?;
    Ok(edges.len())
}
