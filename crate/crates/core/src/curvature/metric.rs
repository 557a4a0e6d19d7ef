//! Menger- and Haantjes-Ricci curvature under the combinatorial metric.

use crate::error::Result;
use crate::graph::{count_simple_paths, triangles_of_edge, AdjacencyBits, Graph, NodeId};

/// Menger curvature of an equilateral unit triangle.
pub const UNIT_TRIANGLE_MENGER: f64 = 0.866_025_403_784_438_6; // sqrt(3) / 2

/// Default bound on detour length for Haantjes curvature.
pub const DEFAULT_HAANTJES_MAX_LEN: usize = 4;

/// Sum of `sqrt(3)/2` over the triangles containing the edge.
pub fn menger_ricci_edge(g: &Graph, u: NodeId, v: NodeId) -> Result<f64> {
    let t = triangles_of_edge(g, u, v)?;
    Ok(t.len() as f64 * UNIT_TRIANGLE_MENGER)
}

/// Sum of `sqrt(n - 1)` over simple detours of `n` edges (`2 <= n <= max_len`,
/// `None` for no bound) between the endpoints of the edge.
pub fn haantjes_ricci_edge(g: &Graph, u: NodeId, v: NodeId, max_len: Option<usize>) -> Result<f64> {
    g.require_edge(u, v)?;
    Ok(haantjes_from_bits(g, &AdjacencyBits::new(g), u, v, max_len))
}

pub(crate) fn haantjes_from_bits(
    g: &Graph,
    bits: &AdjacencyBits,
    u: NodeId,
    v: NodeId,
    max_len: Option<usize>,
) -> f64 {
    count_simple_paths(g, bits, u, v, max_len)
        .iter()
        .enumerate()
        .skip(2)
        .map(|(len, &count)| count as f64 * ((len - 1) as f64).sqrt())
        .sum()
}
