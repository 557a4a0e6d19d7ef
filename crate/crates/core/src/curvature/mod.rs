//! Edge-centric discrete Ricci curvatures: Ollivier, Forman, Menger and
//! Haantjes, per edge and averaged over a graph.

mod forman;
mod metric;
mod ollivier;
mod transport;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyBits, DistanceMode, Graph};

pub use forman::{forman_ricci_edge, forman_ricci_unweighted};
pub use metric::{haantjes_ricci_edge, menger_ricci_edge, DEFAULT_HAANTJES_MAX_LEN, UNIT_TRIANGLE_MENGER};
pub use ollivier::{neighbor_measure, ollivier_distances, ollivier_ricci_edge, ollivier_ricci_edge_with};
pub use transport::{transport_cost, wasserstein_w1, ProbabilityMeasure};

/// Floor applied to distance-weighted edge lengths and Forman edge weights.
pub const MIN_EDGE_LENGTH: f64 = 1e-9;

/// Edge weights fed to Forman curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FormanWeighting {
    /// All node and edge weights equal to one.
    Unit,
    /// Unit node weights, edge weight `max(D_ij, MIN_EDGE_LENGTH)`.
    #[default]
    Distance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureConfig {
    pub ollivier: bool,
    pub forman: bool,
    pub menger: bool,
    pub haantjes: bool,
    pub ollivier_mode: DistanceMode,
    pub forman_weighting: FormanWeighting,
    /// `None` enumerates detours of any length.
    pub haantjes_max_len: Option<usize>,
}

impl Default for CurvatureConfig {
    fn default() -> Self {
        Self {
            ollivier: true,
            forman: true,
            menger: true,
            haantjes: true,
            ollivier_mode: DistanceMode::Weighted,
            forman_weighting: FormanWeighting::Distance,
            haantjes_max_len: Some(DEFAULT_HAANTJES_MAX_LEN),
        }
    }
}

impl CurvatureConfig {
    /// Combinatorial setting: hop metric and unit weights everywhere.
    pub fn unweighted() -> Self {
        Self {
            ollivier_mode: DistanceMode::Hop,
            forman_weighting: FormanWeighting::Unit,
            ..Self::default()
        }
    }
}

/// Graph-wide mean of each enabled curvature.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CurvatureAverages {
    pub ore: Option<f64>,
    pub fre: Option<f64>,
    pub mre: Option<f64>,
    pub hre: Option<f64>,
}

/// Per-edge curvatures, indexed like `Graph::edges()`. Disabled notions
/// are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCurvatures {
    pub ollivier: Option<Vec<f64>>,
    pub forman: Option<Vec<f64>>,
    pub menger: Option<Vec<f64>>,
    pub haantjes: Option<Vec<f64>>,
    pub averages: CurvatureAverages,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn all_edge_curvatures(g: &Graph, cfg: &CurvatureConfig) -> Result<EdgeCurvatures> {
    if let Some(k) = cfg.haantjes_max_len {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("haantjes max length {k} < 2")));
        }
    }
    let edges = g.edges();

    let ollivier = if cfg.ollivier {
        let d = ollivier_distances(g, cfg.ollivier_mode);
        let values = edges
            .par_iter()
            .map(|e| ollivier_ricci_edge_with(g, e.u, e.v, &d))
            .collect::<Result<Vec<_>>>()?;
        Some(values)
    } else {
        None
    };

    let forman = if cfg.forman {
        let node_w = vec![1.0; g.node_count()];
        let edge_w: Vec<f64> = match cfg.forman_weighting {
            FormanWeighting::Unit => vec![1.0; edges.len()],
            FormanWeighting::Distance => edges.iter().map(|e| e.dist.max(MIN_EDGE_LENGTH)).collect(),
        };
        let values = edges
            .par_iter()
            .map(|e| forman_ricci_edge(g, e.u, e.v, &node_w, &edge_w))
            .collect::<Result<Vec<_>>>()?;
        Some(values)
    } else {
        None
    };

    let menger = if cfg.menger {
        let values = edges
            .par_iter()
            .map(|e| menger_ricci_edge(g, e.u, e.v))
            .collect::<Result<Vec<_>>>()?;
        Some(values)
    } else {
        None
    };

    let haantjes = if cfg.haantjes {
        let bits = AdjacencyBits::new(g);
        let values = edges
            .par_iter()
            .map(|e| metric::haantjes_from_bits(g, &bits, e.u, e.v, cfg.haantjes_max_len))
            .collect();
        Some(values)
    } else {
        None
    };

    let averages = CurvatureAverages {
        ore: ollivier.as_deref().map(mean),
        fre: forman.as_deref().map(mean),
        mre: menger.as_deref().map(mean),
        hre: haantjes.as_deref().map(mean),
    };
    Ok(EdgeCurvatures {
        ollivier,
        forman,
        menger,
        haantjes,
        averages,
    })
}
