//! Undirected weighted graphs over dense node ids, plus the primitive
//! algorithms the curvature and measure modules are built on.
//!
//! Every edge carries an optional correlation weight and a distance weight.
//! When both are present they satisfy `dist = sqrt(2 (1 - corr))`. Graphs
//! built without correlations (test fixtures, combinatorial examples) use a
//! unit distance on every edge, so the weighted metric coincides with the
//! hop metric.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

/// Tolerance on `dist = sqrt(2 (1 - corr))` when both weights are given.
pub const WEIGHT_CONSISTENCY_TOL: f64 = 1e-12;

/// Ultrametric distance of a correlation coefficient.
#[inline]
pub fn corr_to_dist(c: f64) -> f64 {
    (2.0 * (1.0 - c)).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Smaller endpoint.
    pub u: NodeId,
    /// Larger endpoint.
    pub v: NodeId,
    pub corr: Option<f64>,
    pub dist: f64,
}

impl Edge {
    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    labels: Option<Vec<String>>,
    /// Sorted by `(u, v)`.
    edges: Vec<Edge>,
    /// Per node: `(neighbor, edge id)` sorted by neighbor.
    adj: Vec<Vec<(NodeId, EdgeId)>>,
}

/// Builds a graph from `(i, j, corr, dist)` tuples.
pub fn build_graph(n: usize, edge_list: &[(NodeId, NodeId, f64, f64)]) -> Result<Graph> {
    Graph::new(n, edge_list)
}

impl Graph {
    pub fn new(n: usize, edge_list: &[(NodeId, NodeId, f64, f64)]) -> Result<Self> {
        for &(i, j, corr, dist) in edge_list {
            if !(-1.0..=1.0).contains(&corr) {
                return Err(Error::InvalidWeight {
                    u: i,
                    v: j,
                    reason: format!("correlation {corr} outside [-1, 1]"),
                });
            }
            let expected = corr_to_dist(corr);
            if (dist - expected).abs() > WEIGHT_CONSISTENCY_TOL {
                return Err(Error::InvalidWeight {
                    u: i,
                    v: j,
                    reason: format!("distance {dist} inconsistent with correlation {corr} (expected {expected})"),
                });
            }
        }
        Self::assemble(n, edge_list.iter().map(|&(i, j, c, d)| (i, j, Some(c), d)))
    }

    /// Combinatorial graph: no correlations, unit edge lengths.
    pub fn unweighted(n: usize, edge_list: &[(NodeId, NodeId)]) -> Result<Self> {
        Self::assemble(n, edge_list.iter().map(|&(i, j)| (i, j, None, 1.0)))
    }

    /// Graph with explicit edge lengths and no correlations.
    pub fn with_lengths(n: usize, edge_list: &[(NodeId, NodeId, f64)]) -> Result<Self> {
        Self::assemble(n, edge_list.iter().map(|&(i, j, d)| (i, j, None, d)))
    }

    fn assemble(
        n: usize,
        items: impl Iterator<Item = (NodeId, NodeId, Option<f64>, f64)>,
    ) -> Result<Self> {
        let mut edges = Vec::new();
        let mut seen = HashSet::new();
        for (i, j, corr, dist) in items {
            for id in [i, j] {
                if id >= n {
                    return Err(Error::NodeOutOfRange { id, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !(dist >= 0.0) || !dist.is_finite() {
                return Err(Error::InvalidWeight {
                    u: i,
                    v: j,
                    reason: format!("distance {dist} must be finite and non-negative"),
                });
            }
            let (u, v) = (i.min(j), i.max(j));
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(i, j));
            }
            edges.push(Edge { u, v, corr, dist });
        }
        edges.sort_by_key(|e| (e.u, e.v));
        let mut adj = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            labels: None,
            edges,
            adj,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Dimension(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn label(&self, u: NodeId) -> Option<&str> {
        self.labels.as_ref().map(|l| l[u].as_str())
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    /// Neighbors of `u` in ascending id order.
    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[u].iter().map(|&(w, _)| w)
    }

    /// `(neighbor, edge id)` pairs of `u`, ascending by neighbor.
    pub fn incident(&self, u: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adj[u]
    }

    pub fn edge_id(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        if u >= self.n || v >= self.n {
            return None;
        }
        self.adj[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|pos| self.adj[u][pos].1)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_id(u, v).is_some()
    }

    pub(crate) fn require_edge(&self, u: NodeId, v: NodeId) -> Result<EdgeId> {
        self.edge_id(u, v).ok_or(Error::MissingEdge(u, v))
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for w in self.neighbors(x) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// Edge count.
    #[default]
    Hop,
    /// Sum of edge distance weights.
    Weighted,
}

impl std::str::FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hop" => Ok(Self::Hop),
            "weighted" => Ok(Self::Weighted),
            other => Err(Error::InvalidArgument(format!("unknown distance mode {other:?}"))),
        }
    }
}

/// All-pairs shortest-path lengths. Unreachable pairs hold `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    mode: DistanceMode,
    n: usize,
    d: Vec<f64>,
}

impl DistanceTable {
    pub fn mode(&self) -> DistanceMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: NodeId, j: NodeId) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: NodeId) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }
}

pub fn shortest_paths(g: &Graph, mode: DistanceMode) -> DistanceTable {
    match mode {
        DistanceMode::Hop => hop_distances(g),
        DistanceMode::Weighted => weighted_distances(g, 0.0),
    }
}

/// Weighted shortest paths where each edge length is `max(dist, min_len)`.
pub fn shortest_paths_clamped(g: &Graph, min_len: f64) -> DistanceTable {
    weighted_distances(g, min_len)
}

fn hop_distances(g: &Graph) -> DistanceTable {
    let n = g.node_count();
    let mut d = vec![f64::INFINITY; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut d[s * n..(s + 1) * n];
        row[s] = 0.0;
        queue.clear();
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            let next = row[x] + 1.0;
            for w in g.neighbors(x) {
                if row[w].is_infinite() {
                    row[w] = next;
                    queue.push_back(w);
                }
            }
        }
    }
    DistanceTable {
        mode: DistanceMode::Hop,
        n,
        d,
    }
}

#[derive(PartialEq)]
struct HeapItem(f64, NodeId);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then node id
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn weighted_distances(g: &Graph, min_len: f64) -> DistanceTable {
    let n = g.node_count();
    let mut d = vec![f64::INFINITY; n * n];
    let mut heap = BinaryHeap::new();
    for s in 0..n {
        let row = &mut d[s * n..(s + 1) * n];
        row[s] = 0.0;
        heap.clear();
        heap.push(HeapItem(0.0, s));
        while let Some(HeapItem(dx, x)) = heap.pop() {
            if dx > row[x] {
                continue;
            }
            for &(w, eid) in g.incident(x) {
                let cand = dx + g.edge(eid).dist.max(min_len);
                if cand < row[w] {
                    row[w] = cand;
                    heap.push(HeapItem(cand, w));
                }
            }
        }
    }
    // sums along a path can round differently from each end; keep the
    // table exactly symmetric
    for i in 0..n {
        for j in i + 1..n {
            d[j * n + i] = d[i * n + j];
        }
    }
    DistanceTable {
        mode: DistanceMode::Weighted,
        n,
        d,
    }
}

/// Prim's minimum spanning tree on a dense symmetric distance matrix.
///
/// Edges are compared by `(distance, min id, max id)`, a strict total order,
/// so the tree is unique and ties resolve to the lexicographically smallest
/// pair. Returned pairs are `(min, max)` sorted ascending.
pub fn mst_prim(dist: &DMatrix<f64>) -> Result<Vec<(NodeId, NodeId)>> {
    let n = dist.nrows();
    if dist.ncols() != n {
        return Err(Error::Dimension(format!(
            "distance matrix is {}x{}",
            n,
            dist.ncols()
        )));
    }
    for i in 0..n {
        for j in 0..n {
            if !dist[(i, j)].is_finite() {
                return Err(Error::NonFinite(i, j));
            }
        }
    }
    if n <= 1 {
        return Ok(Vec::new());
    }

    type Key = (f64, NodeId, NodeId);
    let less = |a: &Key, b: &Key| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))) == Ordering::Less;
    let key_of = |p: NodeId, v: NodeId| -> Key { (dist[(p, v)], p.min(v), p.max(v)) };

    let mut in_tree = vec![false; n];
    let mut best: Vec<Option<Key>> = vec![None; n];
    in_tree[0] = true;
    for v in 1..n {
        best[v] = Some(key_of(0, v));
    }
    let mut tree = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let mut pick: Option<(NodeId, Key)> = None;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            if let Some(k) = best[v] {
                if pick.is_none_or(|(_, pk)| less(&k, &pk)) {
                    pick = Some((v, k));
                }
            }
        }
        let (v, key) = pick.expect("complete graph always has a crossing edge");
        in_tree[v] = true;
        tree.push((key.1, key.2));
        for w in 0..n {
            if !in_tree[w] {
                let cand = key_of(v, w);
                if best[w].is_none_or(|b| less(&cand, &b)) {
                    best[w] = Some(cand);
                }
            }
        }
    }
    tree.sort_unstable();
    Ok(tree)
}

/// Common neighbors of the endpoints of edge `(u, v)`, ascending.
pub fn triangles_of_edge(g: &Graph, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
    g.require_edge(u, v)?;
    let (a, b) = (g.incident(u), g.incident(v));
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i].0);
                i += 1;
                j += 1;
            }
        }
    }
    Ok(out)
}

/// Enumerates simple paths from `u` to `v` with 2 to `max_len` edges
/// (`None` = no bound), in lexicographic order of their vertex sequences.
///
/// A simple path of two or more edges can never traverse the edge `(u, v)`
/// itself. With `exclude_edge = false` the direct edge, when present, is
/// reported as an additional one-edge path `[u, v]`.
pub fn simple_paths_between(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    max_len: Option<usize>,
    exclude_edge: bool,
) -> Vec<Vec<NodeId>> {
    let mut out = Vec::new();
    if u == v || u >= g.node_count() || v >= g.node_count() {
        return out;
    }
    let limit = max_len.unwrap_or(usize::MAX);
    let mut on_path = vec![false; g.node_count()];
    let mut path = vec![u];
    on_path[u] = true;
    dfs_paths(g, v, limit, exclude_edge, &mut path, &mut on_path, &mut |p| {
        out.push(p.to_vec())
    });
    out
}

fn dfs_paths(
    g: &Graph,
    target: NodeId,
    limit: usize,
    exclude_edge: bool,
    path: &mut Vec<NodeId>,
    on_path: &mut [bool],
    visit: &mut dyn FnMut(&[NodeId]),
) {
    let x = *path.last().unwrap();
    let len = path.len() - 1;
    for w in g.neighbors(x) {
        if on_path[w] {
            continue;
        }
        if w == target {
            if len + 1 >= 2 || !exclude_edge {
                path.push(w);
                visit(path);
                path.pop();
            }
            continue;
        }
        // a detour through w still needs at least one more edge to reach target
        if len + 2 > limit {
            continue;
        }
        on_path[w] = true;
        path.push(w);
        dfs_paths(g, target, limit, exclude_edge, path, on_path, visit);
        path.pop();
        on_path[w] = false;
    }
}

/// Adjacency rows as bitsets, for fast neighborhood intersections.
#[derive(Debug, Clone)]
pub struct AdjacencyBits {
    words: usize,
    bits: Vec<u64>,
}

impl AdjacencyBits {
    pub fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let words = n.div_ceil(64).max(1);
        let mut bits = vec![0u64; n * words];
        for e in g.edges() {
            bits[e.u * words + e.v / 64] |= 1 << (e.v % 64);
            bits[e.v * words + e.u / 64] |= 1 << (e.u % 64);
        }
        Self { words, bits }
    }

    #[inline]
    fn row(&self, u: NodeId) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    /// `|N(a) ∩ N(b)|`.
    #[inline]
    pub fn common(&self, a: NodeId, b: NodeId) -> u64 {
        self.row(a)
            .iter()
            .zip(self.row(b))
            .map(|(x, y)| (x & y).count_ones() as u64)
            .sum()
    }

    #[inline]
    pub fn contains(&self, a: NodeId, b: NodeId) -> bool {
        self.row(a)[b / 64] >> (b % 64) & 1 == 1
    }
}

/// Number of simple paths between `u` and `v` of each length `k` in `2..=max_len`
/// (`counts[k]`; entries 0 and 1 are zero). `u` and `v` must be adjacent.
///
/// Bounds up to 4 are counted in closed form from neighborhood
/// intersections; longer or unbounded searches fall back to depth-first
/// enumeration.
pub fn count_simple_paths(
    g: &Graph,
    bits: &AdjacencyBits,
    u: NodeId,
    v: NodeId,
    max_len: Option<usize>,
) -> Vec<u64> {
    match max_len {
        Some(k) if k <= 4 => count_short_paths(g, bits, u, v, k),
        _ => {
            let mut counts = vec![0u64; 2];
            let limit = max_len.unwrap_or(usize::MAX);
            let mut on_path = vec![false; g.node_count()];
            let mut path = vec![u];
            on_path[u] = true;
            dfs_paths(g, v, limit, true, &mut path, &mut on_path, &mut |p| {
                let k = p.len() - 1;
                if counts.len() <= k {
                    counts.resize(k + 1, 0);
                }
                counts[k] += 1;
            });
            if let Some(k) = max_len {
                counts.resize(k + 1, 0);
            }
            counts
        }
    }
}

fn count_short_paths(g: &Graph, bits: &AdjacencyBits, u: NodeId, v: NodeId, max_len: usize) -> Vec<u64> {
    let mut counts = vec![0u64; max_len.max(1) + 1];
    if max_len < 2 {
        return counts;
    }
    // u - a - v
    counts[2] = bits.common(u, v);
    if max_len >= 3 {
        // u - a - b - v: b ranges over N(a) ∩ N(v) minus u (always present)
        counts[3] = g
            .neighbors(u)
            .filter(|&a| a != v)
            .map(|a| bits.common(a, v) - 1)
            .sum();
    }
    if max_len >= 4 {
        // u - a - b - c - v: b ranges over N(a) ∩ N(c) minus u and v
        let mut total = 0;
        for a in g.neighbors(u).filter(|&a| a != v) {
            let a_sees_v = bits.contains(a, v) as u64;
            for c in g.neighbors(v).filter(|&c| c != u && c != a) {
                let c_sees_u = bits.contains(c, u) as u64;
                total += bits.common(a, c) - c_sees_u - a_sees_v;
            }
        }
        counts[4] = total;
    }
    counts
}
