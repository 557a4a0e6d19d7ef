//! Whole-graph measures tracked alongside the curvatures: edge density,
//! degrees, path lengths, communication efficiency, clustering, network
//! entropy and Louvain modularity.

mod louvain;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curvature::MIN_EDGE_LENGTH;
use crate::error::{Error, Result};
use crate::graph::{shortest_paths, shortest_paths_clamped, triangles_of_edge, DistanceMode, DistanceTable, Graph};

pub use louvain::{louvain_modularity, modularity, LouvainConfig, Partition};

/// Which per-edge quantity serves as `a_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    Unit,
    Corr,
    /// `max(C_ij, 0)`.
    ClampedCorr,
    Dist,
}

impl std::str::FromStr for WeightSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Self::Unit),
            "corr" => Ok(Self::Corr),
            "clamped_corr" => Ok(Self::ClampedCorr),
            "dist" => Ok(Self::Dist),
            other => Err(Error::InvalidArgument(format!("unknown weight source {other:?}"))),
        }
    }
}

pub fn edge_weights(g: &Graph, source: WeightSource) -> Result<Vec<f64>> {
    g.edges()
        .iter()
        .map(|e| {
            let corr = || e.corr.ok_or(Error::MissingCorrelation(e.u, e.v));
            Ok(match source {
                WeightSource::Unit => 1.0,
                WeightSource::Corr => corr()?,
                WeightSource::ClampedCorr => corr()?.max(0.0),
                WeightSource::Dist => e.dist,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasicStats {
    pub edge_count: usize,
    pub edge_density: f64,
    /// `m / n`.
    pub avg_degree: f64,
    /// `m_w / n` with `m_w = sum_{i,j} a_ij` over ordered pairs.
    pub avg_weighted_degree: f64,
}

pub fn basic_stats(g: &Graph, weights: &[f64]) -> Result<BasicStats> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("basic stats need n >= 2, got {n}")));
    }
    if weights.len() != g.edge_count() {
        return Err(Error::Dimension(format!(
            "{} weights for {} edges",
            weights.len(),
            g.edge_count()
        )));
    }
    let m = g.edge_count() as f64;
    let nf = n as f64;
    let m_w = 2.0 * weights.iter().sum::<f64>();
    Ok(BasicStats {
        edge_count: g.edge_count(),
        edge_density: 2.0 * m / (nf * (nf - 1.0)),
        avg_degree: m / nf,
        avg_weighted_degree: m_w / nf,
    })
}

fn measure_distances(g: &Graph, mode: DistanceMode) -> DistanceTable {
    match mode {
        DistanceMode::Hop => shortest_paths(g, DistanceMode::Hop),
        DistanceMode::Weighted => shortest_paths_clamped(g, MIN_EDGE_LENGTH),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathStats {
    pub avg_path_length: f64,
    pub diameter: f64,
}

pub fn path_stats(g: &Graph, mode: DistanceMode) -> Result<PathStats> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("path stats need n >= 2, got {n}")));
    }
    let d = measure_distances(g, mode);
    let mut sum = 0.0;
    let mut diameter = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let x = d.get(i, j);
            if !x.is_finite() {
                return Err(Error::Disconnected);
            }
            sum += x;
            diameter = diameter.max(x);
        }
    }
    Ok(PathStats {
        avg_path_length: sum / (n * (n - 1)) as f64,
        diameter,
    })
}

/// Mean of `1 / d_ij` over ordered pairs; unreachable pairs contribute 0.
pub fn communication_efficiency(g: &Graph, mode: DistanceMode) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("efficiency needs n >= 2, got {n}")));
    }
    let d = measure_distances(g, mode);
    let mut sum = 0.0;
    for i in 0..n {
        for (j, &x) in d.row(i).iter().enumerate() {
            if i != j {
                sum += 1.0 / x;
            }
        }
    }
    Ok(sum / (n * (n - 1)) as f64)
}

/// Average local clustering; nodes of degree below two contribute zero.
pub fn clustering_coefficient(g: &Graph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let mut triangles = vec![0usize; n];
    for e in g.edges() {
        // each triangle at a node is seen from both of its edges at that node
        let t = triangles_of_edge(g, e.u, e.v).expect("edge from the graph").len();
        triangles[e.u] += t;
        triangles[e.v] += t;
    }
    (0..n)
        .map(|u| {
            let k = g.degree(u);
            if k < 2 {
                0.0
            } else {
                // triangles[u] = 2 * (triangles through u)
                triangles[u] as f64 / (k * (k - 1)) as f64
            }
        })
        .sum::<f64>()
        / n as f64
}

/// Shannon entropy (nats) of the remaining-degree distribution
/// `q_k = (k + 1) p_{k+1} / <k>`.
pub fn network_entropy(g: &Graph) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::InvalidArgument("entropy of an edgeless graph".into()));
    }
    let n = g.node_count() as f64;
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for u in 0..g.node_count() {
        *hist.entry(g.degree(u)).or_insert(0) += 1;
    }
    let mean_degree = 2.0 * g.edge_count() as f64 / n;
    let mut h = 0.0;
    for (&k, &count) in &hist {
        if k == 0 {
            continue;
        }
        let q = k as f64 * (count as f64 / n) / mean_degree;
        if q > 0.0 {
            h -= q * q.ln();
        }
    }
    Ok(h.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryConfig {
    pub path_mode: DistanceMode,
    pub efficiency_mode: DistanceMode,
    pub degree_weight: WeightSource,
    pub modularity_weight: WeightSource,
    pub louvain: LouvainConfig,
}

impl Default for SummaryConfig {
    fn default() -> Self {
        Self {
            path_mode: DistanceMode::Hop,
            efficiency_mode: DistanceMode::Hop,
            degree_weight: WeightSource::Corr,
            modularity_weight: WeightSource::ClampedCorr,
            louvain: LouvainConfig::default(),
        }
    }
}

impl SummaryConfig {
    /// Unit weights for degree and modularity, hop distances.
    pub fn unweighted() -> Self {
        Self {
            degree_weight: WeightSource::Unit,
            modularity_weight: WeightSource::Unit,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSummary {
    pub edge_count: usize,
    pub edge_density: f64,
    pub avg_degree: f64,
    pub avg_weighted_degree: f64,
    pub avg_path_length: f64,
    pub diameter: f64,
    pub clustering: f64,
    pub communication_efficiency: f64,
    pub modularity: f64,
    pub community_count: usize,
    pub network_entropy: f64,
    #[serde(skip)]
    pub communities: Vec<usize>,
}

pub fn graph_summary(g: &Graph, cfg: &SummaryConfig) -> Result<GraphSummary> {
    let basic = basic_stats(g, &edge_weights(g, cfg.degree_weight)?)?;
    let paths = path_stats(g, cfg.path_mode)?;
    let ce = communication_efficiency(g, cfg.efficiency_mode)?;
    let partition = louvain_modularity(g, &edge_weights(g, cfg.modularity_weight)?, &cfg.louvain)?;
    Ok(GraphSummary {
        edge_count: basic.edge_count,
        edge_density: basic.edge_density,
        avg_degree: basic.avg_degree,
        avg_weighted_degree: basic.avg_weighted_degree,
        avg_path_length: paths.avg_path_length,
        diameter: paths.diameter,
        clustering: clustering_coefficient(g),
        communication_efficiency: ce,
        modularity: partition.modularity,
        community_count: partition.community_count,
        network_entropy: network_entropy(g)?,
        communities: partition.communities,
    })
}
