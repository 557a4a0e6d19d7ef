//! Louvain modularity maximization on non-negatively weighted graphs.
//!
//! Nodes are visited in ascending id order and each moves to the neighboring
//! community with the largest modularity gain (ties to the smallest community
//! id, staying put when nothing beats the current community). Communities are
//! then collapsed into super-nodes and the procedure repeats until a level
//! makes no move. An optional seed adds randomized-order restarts; the best
//! partition over all runs wins.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct LouvainConfig {
    /// Seed for randomized restarts; `None` runs only the ordered pass.
    pub seed: Option<u64>,
    /// Number of shuffled-order restarts when a seed is given.
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub modularity: f64,
    /// Community id per node, numbered by first appearance in node order.
    pub communities: Vec<usize>,
    pub community_count: usize,
}

/// Modularity of a node partition, counting self-pairs in the null model:
/// `Q = sum_c [ L_c / m_w - (d_c / 2 m_w)^2 ]`.
pub fn modularity(g: &Graph, weights: &[f64], communities: &[usize]) -> Result<f64> {
    check_weights(g, weights)?;
    if communities.len() != g.node_count() {
        return Err(Error::Dimension(format!(
            "{} community labels for {} nodes",
            communities.len(),
            g.node_count()
        )));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Ok(0.0);
    }
    let k = communities.iter().copied().max().map_or(0, |c| c + 1);
    let mut internal = vec![0.0; k];
    let mut degree = vec![0.0; k];
    for (e, &w) in g.edges().iter().zip(weights) {
        let (cu, cv) = (communities[e.u], communities[e.v]);
        if cu == cv {
            internal[cu] += w;
        }
        degree[cu] += w;
        degree[cv] += w;
    }
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(l, d)| l / total - (d / (2.0 * total)).powi(2))
        .sum())
}

pub fn louvain_modularity(g: &Graph, weights: &[f64], cfg: &LouvainConfig) -> Result<Partition> {
    check_weights(g, weights)?;
    if g.edge_count() == 0 {
        return Err(Error::InvalidArgument("modularity needs at least one edge".into()));
    }
    let n = g.node_count();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        // no weight to distribute: the trivial partition, Q = 0
        return Ok(Partition {
            modularity: 0.0,
            communities: vec![0; n],
            community_count: 1,
        });
    }

    let mut best = run(g, weights, None);
    if let Some(seed) = cfg.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..cfg.restarts {
            let candidate = run(g, weights, Some(&mut rng));
            if candidate.modularity > best.modularity + GAIN_EPS {
                best = candidate;
            }
        }
    }
    if best.modularity < 0.0 {
        best = Partition {
            modularity: 0.0,
            communities: vec![0; n],
            community_count: 1,
        };
    }
    Ok(best)
}

fn check_weights(g: &Graph, weights: &[f64]) -> Result<()> {
    if weights.len() != g.edge_count() {
        return Err(Error::Dimension(format!(
            "{} weights for {} edges",
            weights.len(),
            g.edge_count()
        )));
    }
    for (e, &w) in g.edges().iter().zip(weights) {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidWeight {
                u: e.u,
                v: e.v,
                reason: format!("modularity weight {w} must be finite and non-negative"),
            });
        }
    }
    Ok(())
}

/// Weighted graph with self-loops, used at every aggregation level.
struct Level {
    /// `(neighbor, weight)` excluding self-loops.
    adj: Vec<Vec<(usize, f64)>>,
    /// `A_ii`: twice the internal weight collapsed into the node.
    self_loop: Vec<f64>,
    degree: Vec<f64>,
}

impl Level {
    fn from_graph(g: &Graph, weights: &[f64]) -> Self {
        let n = g.node_count();
        let mut adj = vec![Vec::new(); n];
        let mut degree = vec![0.0; n];
        for (e, &w) in g.edges().iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            adj[e.u].push((e.v, w));
            adj[e.v].push((e.u, w));
            degree[e.u] += w;
            degree[e.v] += w;
        }
        Self {
            adj,
            self_loop: vec![0.0; n],
            degree,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// One local-moving phase. Returns the community of each node and
    /// whether any node moved.
    fn local_moves(&self, two_m: f64, order: &[usize]) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.degree.clone();
        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &i in order {
                let ki = self.degree[i];
                let own = comm[i];
                tot[own] -= ki;
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                let gain = |c: usize, l: f64| l - tot[c] * ki / two_m;
                let mut best_c = own;
                let mut best_gain = gain(own, link[own]);
                touched.sort_unstable();
                for &c in &touched {
                    let g = gain(c, link[c]);
                    if g > best_gain + GAIN_EPS {
                        best_gain = g;
                        best_c = c;
                    }
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
                tot[best_c] += ki;
                if best_c != own {
                    comm[i] = best_c;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }
        (comm, moved_any)
    }

    /// Collapses communities (relabelled densely) into super-nodes.
    fn aggregate(&self, comm: &[usize]) -> (Level, Vec<usize>) {
        let mut relabel = vec![usize::MAX; self.len()];
        let mut next = 0;
        let dense: Vec<usize> = comm
            .iter()
            .map(|&c| {
                if relabel[c] == usize::MAX {
                    relabel[c] = next;
                    next += 1;
                }
                relabel[c]
            })
            .collect();
        let mut self_loop = vec![0.0; next];
        let mut degree = vec![0.0; next];
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); next];
        for i in 0..self.len() {
            let ci = dense[i];
            self_loop[ci] += self.self_loop[i];
            degree[ci] += self.degree[i];
            for &(j, w) in &self.adj[i] {
                let cj = dense[j];
                if ci == cj {
                    self_loop[ci] += w;
                } else {
                    *weights[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adj = weights.into_iter().map(|m| m.into_iter().collect()).collect();
        (
            Level {
                adj,
                self_loop,
                degree,
            },
            dense,
        )
    }
}

fn run(g: &Graph, weights: &[f64], mut rng: Option<&mut ChaCha8Rng>) -> Partition {
    let n = g.node_count();
    let two_m = 2.0 * weights.iter().sum::<f64>();
    let mut level = Level::from_graph(g, weights);
    let mut membership: Vec<usize> = (0..n).collect();
    loop {
        let mut order: Vec<usize> = (0..level.len()).collect();
        if let Some(r) = rng.as_deref_mut() {
            order.shuffle(r);
        }
        let (comm, moved) = level.local_moves(two_m, &order);
        if !moved {
            break;
        }
        let (next, dense) = level.aggregate(&comm);
        for m in membership.iter_mut() {
            *m = dense[*m];
        }
        level = next;
    }
    let communities = first_appearance(&membership);
    let community_count = communities.iter().copied().max().map_or(0, |c| c + 1);
    let modularity = modularity(g, weights, &communities).expect("weights already validated");
    Partition {
        modularity,
        communities,
        community_count,
    }
}

fn first_appearance(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}
