//! Forman-Ricci curvature of an edge with node and edge weights.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};

/// Forman curvature of edge `(v1, v2)`:
///
/// `w_e (w_v1 / w_e + w_v2 / w_e - sum_{e' ~ v1} w_v1 / sqrt(w_e w_e')
///  - sum_{e' ~ v2} w_v2 / sqrt(w_e w_e'))`
///
/// where the sums run over edges incident to each endpoint other than `e`.
/// `node_weights` is indexed by node id, `edge_weights` by edge id.
pub fn forman_ricci_edge(
    g: &Graph,
    v1: NodeId,
    v2: NodeId,
    node_weights: &[f64],
    edge_weights: &[f64],
) -> Result<f64> {
    check_len("node", node_weights.len(), g.node_count())?;
    check_len("edge", edge_weights.len(), g.edge_count())?;
    let e = g.require_edge(v1, v2)?;
    let we = positive_edge(g, e, edge_weights)?;
    let mut f = 0.0;
    for (v, other) in [(v1, v2), (v2, v1)] {
        let wv = node_weights[v];
        if !(wv > 0.0) {
            return Err(Error::InvalidWeight {
                u: v,
                v,
                reason: format!("node weight {wv} must be positive"),
            });
        }
        f += wv / we;
        for &(w, eid) in g.incident(v) {
            if w == other {
                continue;
            }
            f -= wv / (we * positive_edge(g, eid, edge_weights)?).sqrt();
        }
    }
    Ok(we * f)
}

/// Unit node and edge weights: `4 - deg(v1) - deg(v2)` up to rounding.
pub fn forman_ricci_unweighted(g: &Graph, v1: NodeId, v2: NodeId) -> Result<f64> {
    forman_ricci_edge(
        g,
        v1,
        v2,
        &vec![1.0; g.node_count()],
        &vec![1.0; g.edge_count()],
    )
}

fn positive_edge(g: &Graph, id: EdgeId, w: &[f64]) -> Result<f64> {
    let x = w[id];
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        let e = g.edge(id);
        Err(Error::InvalidWeight {
            u: e.u,
            v: e.v,
            reason: format!("edge weight {x} must be positive"),
        })
    }
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::Dimension(format!("{got} {what} weights, expected {want}")))
    }
}
