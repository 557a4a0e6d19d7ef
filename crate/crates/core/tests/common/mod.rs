//! Independent reference implementations shared by the integration tests.
//! None of them call into the library code they check.

#![allow(dead_code)]

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ricci_core::graph::Graph;

/// All-pairs shortest paths by Floyd-Warshall over `(u, v, length)` edges.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in edges {
        d[u][v] = d[u][v].min(w);
        d[v][u] = d[v][u].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Exact W1 between two discrete measures by linear programming.
pub fn lp_w1(mu: &[(usize, f64)], nu: &[(usize, f64)], d: &[Vec<f64>]) -> f64 {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let mut vars = vec![vec![]; mu.len()];
    for (i, &(a, _)) in mu.iter().enumerate() {
        for &(b, _) in nu {
            vars[i].push(p.add_var(d[a][b], (0.0, f64::INFINITY)));
        }
    }
    for (i, &(_, m)) in mu.iter().enumerate() {
        let row: Vec<_> = vars[i].iter().map(|&v| (v, 1.0)).collect();
        p.add_constraint(&row, ComparisonOp::Eq, m);
    }
    for (j, &(_, m)) in nu.iter().enumerate() {
        let col: Vec<_> = vars.iter().map(|r| (r[j], 1.0)).collect();
        p.add_constraint(&col, ComparisonOp::Eq, m);
    }
    p.solve().expect("transport LP is feasible").objective()
}

/// Ollivier curvature from first principles: uniform neighbor measures,
/// Floyd-Warshall distances, LP transport.
pub fn oracle_ollivier(n: usize, edges: &[(usize, usize, f64)], u: usize, v: usize) -> f64 {
    let d = floyd_warshall(n, edges);
    let nbrs = |x: usize| -> Vec<(usize, f64)> {
        let list: Vec<usize> = edges
            .iter()
            .filter_map(|&(a, b, _)| {
                if a == x {
                    Some(b)
                } else if b == x {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        let m = 1.0 / list.len() as f64;
        list.into_iter().map(|y| (y, m)).collect()
    };
    1.0 - lp_w1(&nbrs(u), &nbrs(v), &d) / d[u][v]
}

/// Random connected graph on `n` nodes: a random spanning tree plus extra
/// edges with probability `p`.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !edges.contains(&(a, b)) && rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Minimum total weight over every spanning tree (edge subsets of size n-1).
pub fn brute_force_mst_weight(d: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut best = f64::INFINITY;
    let mut chosen = Vec::new();
    fn rec(
        pairs: &[(usize, usize)],
        start: usize,
        need: usize,
        n: usize,
        d: &[Vec<f64>],
        chosen: &mut Vec<(usize, usize)>,
        best: &mut f64,
    ) {
        if chosen.len() == need {
            if spans(n, chosen) {
                let w: f64 = chosen.iter().map(|&(i, j)| d[i][j]).sum();
                *best = best.min(w);
            }
            return;
        }
        for k in start..pairs.len() {
            chosen.push(pairs[k]);
            rec(pairs, k + 1, need, n, d, chosen, best);
            chosen.pop();
        }
    }
    rec(&pairs, 0, n - 1, n, d, &mut chosen, &mut best);
    best
}

fn spans(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

/// Modularity with self-pairs, computed straight from the adjacency matrix.
pub fn modularity_from_adjacency(a: &[Vec<f64>], comm: &[usize]) -> f64 {
    let n = a.len();
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if comm[i] == comm[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Best modularity over every partition of `n` nodes (restricted growth strings).
pub fn exhaustive_best_modularity(a: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = a.len();
    let mut labels = vec![0usize; n];
    let mut best = (f64::NEG_INFINITY, labels.clone());
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, a: &[Vec<f64>], best: &mut (f64, Vec<usize>)) {
        if i == labels.len() {
            let q = modularity_from_adjacency(a, labels);
            if q > best.0 {
                *best = (q, labels.clone());
            }
            return;
        }
        for c in 0..=max + 1 {
            labels[i] = c;
            rec(i + 1, max.max(c), labels, a, best);
        }
    }
    labels[0] = 0;
    rec(1, 0, &mut labels, a, &mut best);
    best
}

pub fn adjacency(g: &Graph, weights: &[f64]) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for (e, &w) in g.edges().iter().zip(weights) {
        a[e.u][e.v] = w;
        a[e.v][e.u] = w;
    }
    a
}

/// Minimum of `w' S w` over the 3-asset simplex: a grid of step 1e-3, then
/// pattern-search refinement around the best grid point.
pub fn grid_min_variance3(s: &[[f64; 3]; 3]) -> f64 {
    let var = |a: f64, b: f64| -> f64 {
        let w = [a, b, 1.0 - a - b];
        let mut v = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                v += w[i] * s[i][j] * w[j];
            }
        }
        v
    };
    let steps = 1000;
    let h = 1.0 / steps as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=steps {
        for j in 0..=steps - i {
            let (a, b) = (i as f64 * h, j as f64 * h);
            let v = var(a, b);
            if v < best.0 {
                best = (v, a, b);
            }
        }
    }
    let mut step = h;
    let inside = |a: f64, b: f64| a >= 0.0 && b >= 0.0 && a + b <= 1.0;
    while step > 1e-12 {
        let mut improved = false;
        for (da, db) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
            let (a, b) = (best.1 + da * step, best.2 + db * step);
            let (a, b) = (a.max(0.0), b.max(0.0));
            if inside(a, b) {
                let v = var(a, b);
                if v < best.0 {
                    best = (v, a, b);
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    best.0.max(0.0).sqrt()
}

/// Edges of the Forman worked example: `v0` and `v1` have degree 3, `v7`
/// and `v9` degree 4, so edges (v0, v1) and (v7, v9) have curvature -2 and -4.
pub fn forman_example() -> (usize, Vec<(usize, usize)>) {
    (
        13,
        vec![
            (0, 1),
            (0, 2),
            (0, 3),
            (2, 3),
            (1, 4),
            (1, 5),
            (5, 7),
            (7, 6),
            (7, 8),
            (7, 9),
            (9, 10),
            (9, 11),
            (9, 12),
        ],
    )
}

/// Edges of the Menger/Haantjes worked example. Edge (v1, v2) closes one
/// triangle (through v0), one 4-edge detour (v1-v0-v7-v8-v2) and one 5-edge
/// detour (v1-v6-v5-v4-v3-v2). Pendant nodes 9..16 hang off the core.
pub fn metric_example() -> (usize, Vec<(usize, usize)>) {
    let mut e = vec![
        (0, 1),
        (0, 2),
        (1, 2),
        (0, 7),
        (7, 8),
        (2, 8),
        (1, 6),
        (5, 6),
        (4, 5),
        (3, 4),
        (2, 3),
    ];
    for (k, hub) in [0, 1, 2, 3, 4, 5, 6, 7].into_iter().enumerate() {
        e.push((hub, 9 + k));
    }
    (17, e)
}
