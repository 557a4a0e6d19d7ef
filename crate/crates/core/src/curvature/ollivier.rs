//! Ollivier-Ricci curvature: `1 - W1(m_u, m_v) / d(u, v)` with measures
//! uniform over the neighbors of each endpoint (no idle mass).

use super::transport::{wasserstein_w1, ProbabilityMeasure};
use super::MIN_EDGE_LENGTH;
use crate::error::{Error, Result};
use crate::graph::{shortest_paths, shortest_paths_clamped, DistanceMode, DistanceTable, Graph, NodeId};

pub fn neighbor_measure(g: &Graph, u: NodeId) -> Result<ProbabilityMeasure> {
    if u >= g.node_count() {
        return Err(Error::NodeOutOfRange { id: u, n: g.node_count() });
    }
    if g.degree(u) == 0 {
        return Err(Error::IsolatedNode(u));
    }
    Ok(ProbabilityMeasure::uniform(g.neighbors(u).collect()))
}

/// Distance table used for Ollivier curvature in `mode`. Weighted lengths
/// are floored at [`MIN_EDGE_LENGTH`] so perfectly correlated pairs do not
/// collapse to zero distance.
pub fn ollivier_distances(g: &Graph, mode: DistanceMode) -> DistanceTable {
    match mode {
        DistanceMode::Hop => shortest_paths(g, DistanceMode::Hop),
        DistanceMode::Weighted => shortest_paths_clamped(g, MIN_EDGE_LENGTH),
    }
}

pub fn ollivier_ricci_edge(g: &Graph, u: NodeId, v: NodeId, mode: DistanceMode) -> Result<f64> {
    g.require_edge(u, v)?;
    ollivier_ricci_edge_with(g, u, v, &ollivier_distances(g, mode))
}

/// Ollivier curvature of `(u, v)` against a precomputed distance table.
pub fn ollivier_ricci_edge_with(g: &Graph, u: NodeId, v: NodeId, d: &DistanceTable) -> Result<f64> {
    g.require_edge(u, v)?;
    let duv = d.get(u, v);
    if !duv.is_finite() {
        return Err(Error::InfiniteCost(u, v));
    }
    if duv <= 0.0 {
        return Err(Error::DegenerateEdge(u, v));
    }
    let mu = neighbor_measure(g, u)?;
    let mv = neighbor_measure(g, v)?;
    Ok(1.0 - wasserstein_w1(&mu, &mv, d)? / duv)
}
