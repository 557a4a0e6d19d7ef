//! Exact Wasserstein-1 distance between discrete measures on graph nodes.
//!
//! The balanced transportation problem is solved with the transportation
//! simplex (northwest-corner start, MODI potentials, cycle pivots). Supports
//! are node neighborhoods, so problems stay small and exactness is cheap.

use crate::error::{Error, Result};
use crate::graph::{DistanceTable, NodeId};

const MASS_TOL: f64 = 1e-12;

/// Discrete probability measure with distinct support nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure {
    support: Vec<NodeId>,
    mass: Vec<f64>,
}

impl ProbabilityMeasure {
    pub fn new(support: Vec<NodeId>, mass: Vec<f64>) -> Result<Self> {
        if support.len() != mass.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} support points but {} masses",
                support.len(),
                mass.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        if let Some(m) = mass.iter().find(|m| !(**m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidMeasure(format!("mass {m} is negative or not finite")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("masses sum to {total}")));
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMeasure("support ids are not distinct".into()));
        }
        Ok(Self { support, mass })
    }

    /// Unit mass on a single node.
    pub fn dirac(node: NodeId) -> Self {
        Self {
            support: vec![node],
            mass: vec![1.0],
        }
    }

    /// Equal mass on each of `nodes` (assumed distinct and non-empty).
    pub(crate) fn uniform(nodes: Vec<NodeId>) -> Self {
        let m = 1.0 / nodes.len() as f64;
        let mass = vec![m; nodes.len()];
        Self {
            support: nodes,
            mass,
        }
    }

    pub fn support(&self) -> &[NodeId] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }
}

/// Minimal cost of moving `mu` onto `nu` with ground costs from `d`.
pub fn wasserstein_w1(
    mu: &ProbabilityMeasure,
    nu: &ProbabilityMeasure,
    d: &DistanceTable,
) -> Result<f64> {
    let rows: Vec<usize> = (0..mu.support.len()).filter(|&i| mu.mass[i] > 0.0).collect();
    let cols: Vec<usize> = (0..nu.support.len()).filter(|&j| nu.mass[j] > 0.0).collect();
    let mut cost = Vec::with_capacity(rows.len() * cols.len());
    for &i in &rows {
        for &j in &cols {
            let (a, b) = (mu.support[i], nu.support[j]);
            let c = d.get(a, b);
            if !c.is_finite() {
                return Err(Error::InfiniteCost(a, b));
            }
            cost.push(c);
        }
    }
    let supply: Vec<f64> = rows.iter().map(|&i| mu.mass[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| nu.mass[j]).collect();
    let w = transport_cost(&supply, &demand, &cost)?;
    Ok(w.max(0.0))
}

/// Optimal value of the balanced transportation problem with row-major
/// `cost` (`supply.len()` x `demand.len()`).
pub fn transport_cost(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<f64> {
    let plan = TransportSimplex::solve(supply, demand, cost)?;
    Ok(plan.cost(cost))
}

#[derive(Debug)]
struct TransportSimplex {
    m: usize,
    n: usize,
    /// Basic cells `(row, col, flow)`; always `m + n - 1` of them.
    basis: Vec<(usize, usize, f64)>,
}

impl TransportSimplex {
    fn solve(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<Self> {
        let (m, n) = (supply.len(), demand.len());
        if m == 0 || n == 0 || cost.len() != m * n {
            return Err(Error::Dimension(format!(
                "transport problem {m}x{n} with {} costs",
                cost.len()
            )));
        }
        let mut t = Self::northwest_corner(supply, demand);
        if m > 1 && n > 1 {
            t.optimize(cost)?;
        }
        Ok(t)
    }

    fn northwest_corner(supply: &[f64], demand: &[f64]) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let mut s = supply.to_vec();
        let mut d = demand.to_vec();
        let mut basis = Vec::with_capacity(m + n - 1);
        let (mut i, mut j) = (0, 0);
        loop {
            let x = s[i].min(d[j]);
            basis.push((i, j, x));
            s[i] -= x;
            d[j] -= x;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if j == n - 1 || (i < m - 1 && s[i] <= d[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        // rounding can leave a negative residue of order 1e-17 on the last cell
        let (i, j, x) = basis.last_mut().unwrap();
        debug_assert!(*i == m - 1 && *j == n - 1);
        *x = x.max(0.0);
        Self { m, n, basis }
    }

    fn cost(&self, cost: &[f64]) -> f64 {
        self.basis
            .iter()
            .map(|&(i, j, x)| x * cost[i * self.n + j])
            .sum()
    }

    fn optimize(&mut self, cost: &[f64]) -> Result<()> {
        let (m, n) = (self.m, self.n);
        let scale = cost.iter().fold(0.0f64, |a, &c| a.max(c.abs())).max(1.0);
        let tol = 1e-12 * scale;
        let dantzig_cap = 50 * (m + n) * (m + n);
        let total_cap = 2 * dantzig_cap + 1000;
        let mut u = vec![0.0; m];
        let mut v = vec![0.0; n];
        let mut is_basic = vec![false; m * n];
        for &(i, j, _) in &self.basis {
            is_basic[i * n + j] = true;
        }
        for iter in 0..total_cap {
            self.potentials(cost, &mut u, &mut v);
            let bland = iter >= dantzig_cap;
            let mut entering = None;
            let mut best = -tol;
            'scan: for i in 0..m {
                for j in 0..n {
                    if is_basic[i * n + j] {
                        continue;
                    }
                    let r = cost[i * n + j] - u[i] - v[j];
                    if r < best {
                        entering = Some((i, j));
                        if bland {
                            break 'scan;
                        }
                        best = r;
                    }
                }
            }
            let Some((ei, ej)) = entering else {
                return Ok(());
            };
            let cycle = self.tree_path(ei, ej);
            // cells 0, 2, 4, ... along the path lose flow, the others gain
            let mut leave = None;
            let mut theta = f64::INFINITY;
            for &b in cycle.iter().step_by(2) {
                let (i, j, x) = self.basis[b];
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let (li, lj, _) = self.basis[l];
                        x < theta || (x == theta && (i, j) < (li, lj))
                    }
                };
                if better {
                    theta = x;
                    leave = Some(b);
                }
            }
            let leave = leave.expect("cycle has a losing cell");
            for (k, &b) in cycle.iter().enumerate() {
                if k % 2 == 0 {
                    self.basis[b].2 -= theta;
                } else {
                    self.basis[b].2 += theta;
                }
            }
            let (li, lj, _) = self.basis[leave];
            is_basic[li * n + lj] = false;
            is_basic[ei * n + ej] = true;
            self.basis[leave] = (ei, ej, theta);
            for cell in &mut self.basis {
                if cell.2 < 0.0 {
                    cell.2 = 0.0;
                }
            }
        }
        Err(Error::NoConvergence(format!(
            "transportation simplex exceeded {total_cap} pivots on a {m}x{n} problem"
        )))
    }

    /// Dual potentials with `u[0] = 0` and `u[i] + v[j] = cost` on the basis.
    fn potentials(&self, cost: &[f64], u: &mut [f64], v: &mut [f64]) {
        let (m, n) = (self.m, self.n);
        let adj = self.tree_adjacency();
        let mut seen = vec![false; m + n];
        let mut stack = vec![0usize];
        seen[0] = true;
        u[0] = 0.0;
        while let Some(node) = stack.pop() {
            for &b in &adj[node] {
                let (i, j, _) = self.basis[b];
                let c = cost[i * n + j];
                let other = if node < m {
                    v[j] = c - u[i];
                    m + j
                } else {
                    u[i] = c - v[j];
                    i
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
    }

    /// Tree nodes are rows `0..m` then columns `m..m+n`; returns, per node,
    /// the indices of incident basic cells.
    fn tree_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for (b, &(i, j, _)) in self.basis.iter().enumerate() {
            adj[i].push(b);
            adj[self.m + j].push(b);
        }
        adj
    }

    /// Basic cells on the tree path from row `i` to column `j`, in order.
    fn tree_path(&self, i: usize, j: usize) -> Vec<usize> {
        let adj = self.tree_adjacency();
        let target = self.m + j;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.m + self.n];
        let mut seen = vec![false; self.m + self.n];
        let mut stack = vec![i];
        seen[i] = true;
        while let Some(node) = stack.pop() {
            if node == target {
                break;
            }
            for &b in &adj[node] {
                let (bi, bj, _) = self.basis[b];
                let other = if node < self.m { self.m + bj } else { bi };
                if !seen[other] {
                    seen[other] = true;
                    parent[other] = Some((node, b));
                    stack.push(other);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = target;
        while node != i {
            let (prev, b) = parent[node].expect("basis is a spanning tree");
            path.push(b);
            node = prev;
        }
        path.reverse();
        path
    }
}
