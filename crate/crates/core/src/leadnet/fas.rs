//! Minimum-weight feedback arc set.
//!
//! Up to [`EXACT_FAS_MAX_NODES`] vertices the problem is solved exactly as a
//! minimum linear arrangement: `best[S]` is the cheapest ordering of vertex
//! set `S` placed first, and appending `v` costs the weight of `v`'s edges
//! back into `S`. Larger graphs use a greedy ordering with insertion-based
//! local search.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{Edge, LeadershipGraph};

pub const EXACT_FAS_MAX_NODES: usize = 20;

/// Weighted digraph on vertices `0..n`. Parallel edges and self-loops are
/// allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl Digraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Self {
        assert!(edges.iter().all(|&(u, v, _)| u < n && v < n), "edge endpoint out of range");
        Self { n, edges }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    fn weight_matrix(&self) -> Vec<Vec<f64>> {
        let mut w = vec![vec![0.0; self.n]; self.n];
        for &(u, v, x) in &self.edges {
            if u != v {
                w[u][v] += x;
            }
        }
        w
    }

    /// True if the edges not listed in `removed` form a DAG (Kahn's
    /// algorithm).
    pub fn is_acyclic_without(&self, removed: &[usize]) -> bool {
        let mut dropped = vec![false; self.edges.len()];
        for &i in removed {
            dropped[i] = true;
        }
        let mut indeg = vec![0usize; self.n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for (i, &(u, v, _)) in self.edges.iter().enumerate() {
            if !dropped[i] {
                out[u].push(v);
                indeg[v] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for &v in &out[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        seen == self.n
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FasSolution {
    /// Vertex order; kept edges all point forward in it.
    pub order: Vec<usize>,
    /// Indices into [`Digraph::edges`] of the removed edges.
    pub removed: Vec<usize>,
    pub weight: f64,
    pub exact: bool,
}

/// Minimum-weight feedback arc set; exact up to [`EXACT_FAS_MAX_NODES`]
/// vertices.
pub fn solve_fas(graph: &Digraph) -> FasSolution {
    let exact = graph.n <= EXACT_FAS_MAX_NODES;
    let order = if exact {
        exact_order(graph)
    } else {
        heuristic_order(graph)
    };
    let mut pos = vec![0usize; graph.n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let removed: Vec<usize> = graph
        .edges
        .iter()
        .enumerate()
        .filter(|(_, &(u, v, _))| pos[u] >= pos[v])
        .map(|(i, _)| i)
        .collect();
    let weight = removed.iter().fold(0.0, |acc, &i| acc + graph.edges[i].2);
    FasSolution {
        order,
        removed,
        weight,
        exact,
    }
}

fn exact_order(graph: &Digraph) -> Vec<usize> {
    let n = graph.n;
    if n == 0 {
        return Vec::new();
    }
    let w = graph.weight_matrix();
    // cost(v, S) = sum over u in S of w[v][u], split into low and high halves
    // of the bitmask so each lookup is O(1).
    let lo_bits = n / 2;
    let hi_bits = n - lo_bits;
    let mut lo = vec![vec![0.0f64; 1 << lo_bits]; n];
    let mut hi = vec![vec![0.0f64; 1 << hi_bits]; n];
    for v in 0..n {
        for m in 1usize..(1 << lo_bits) {
            let b = m.trailing_zeros() as usize;
            lo[v][m] = lo[v][m & (m - 1)] + w[v][b];
        }
        for m in 1usize..(1 << hi_bits) {
            let b = m.trailing_zeros() as usize;
            hi[v][m] = hi[v][m & (m - 1)] + w[v][lo_bits + b];
        }
    }
    let lo_mask = (1usize << lo_bits) - 1;
    let full = (1usize << n) - 1;
    let mut best = vec![f64::INFINITY; 1 << n];
    let mut last = vec![u8::MAX; 1 << n];
    best[0] = 0.0;
    for s in 0..full {
        let base = best[s];
        if base == f64::INFINITY {
            continue;
        }
        let mut rest = full & !s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let cost = base + lo[v][s & lo_mask] + hi[v][s >> lo_bits];
            let t = s | (1 << v);
            if cost < best[t] {
                best[t] = cost;
                last[t] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    order
}

/// Greedy sink/source ordering followed by best-insertion local search.
fn heuristic_order(graph: &Digraph) -> Vec<usize> {
    let n = graph.n;
    let w = graph.weight_matrix();
    let mut alive = vec![true; n];
    let mut out_w: Vec<f64> = (0..n).map(|v| w[v].iter().sum()).collect();
    let mut in_w: Vec<f64> = (0..n).map(|v| (0..n).map(|u| w[u][v]).sum()).collect();
    let mut front = Vec::with_capacity(n);
    let mut back = Vec::with_capacity(n);
    let remove = |v: usize, alive: &mut Vec<bool>, out_w: &mut Vec<f64>, in_w: &mut Vec<f64>| {
        alive[v] = false;
        for u in 0..n {
            out_w[u] -= w[u][v];
            in_w[u] -= w[v][u];
        }
    };
    let mut remaining = n;
    while remaining > 0 {
        let mut progressed = false;
        // Clear sinks to the back and sources to the front.
        for v in 0..n {
            if alive[v] && out_w[v] <= 0.0 {
                back.push(v);
                remove(v, &mut alive, &mut out_w, &mut in_w);
                remaining -= 1;
                progressed = true;
            }
        }
        for v in 0..n {
            if alive[v] && in_w[v] <= 0.0 {
                front.push(v);
                remove(v, &mut alive, &mut out_w, &mut in_w);
                remaining -= 1;
                progressed = true;
            }
        }
        if !progressed && remaining > 0 {
            let v = (0..n)
                .filter(|&v| alive[v])
                .max_by(|&a, &b| (out_w[a] - in_w[a]).total_cmp(&(out_w[b] - in_w[b])).then(b.cmp(&a)))
                .expect("some vertex alive");
            front.push(v);
            remove(v, &mut alive, &mut out_w, &mut in_w);
            remaining -= 1;
        }
    }
    back.reverse();
    front.extend(back);
    improve_by_insertion(front, &w)
}

fn improve_by_insertion(mut order: Vec<usize>, w: &[Vec<f64>]) -> Vec<usize> {
    const MAX_PASSES: usize = 100;
    let n = order.len();
    for _ in 0..MAX_PASSES {
        let mut improved = false;
        for i in 0..n {
            let v = order[i];
            let mut others = order.clone();
            others.remove(i);
            // Cost of placing v at slot k: edges v -> u for u before k plus
            // edges u -> v for u at or after k.
            let mut cost: f64 = others.iter().map(|&u| w[u][v]).sum();
            let current = {
                let before: f64 = others[..i].iter().map(|&u| w[v][u]).sum();
                let after: f64 = others[i..].iter().map(|&u| w[u][v]).sum();
                before + after
            };
            let (mut best_k, mut best_cost) = (0, cost);
            for (k, &u) in others.iter().enumerate() {
                cost += w[v][u] - w[u][v];
                if cost < best_cost {
                    best_cost = cost;
                    best_k = k + 1;
                }
            }
            if best_cost + 1e-12 * current.abs().max(1.0) < current {
                others.insert(best_k, v);
                order = others;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    order
}

/// Feedback arc set summary for a leadership graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcyclicityReport {
    pub total_weight: f64,
    pub fas_weight: f64,
    pub percent_removed: f64,
    pub removed_edges: Vec<Edge>,
    /// False when the heuristic was used.
    pub exact: bool,
}

/// Removes a minimum-weight edge set and verifies the rest is acyclic.
pub fn feedback_arc_set(graph: &LeadershipGraph) -> AcyclicityReport {
    let digraph = graph.to_digraph();
    let solution = solve_fas(&digraph);
    assert!(
        digraph.is_acyclic_without(&solution.removed),
        "feedback arc set left a cycle"
    );
    let total_weight = graph.total_weight();
    let percent_removed = if total_weight > 0.0 {
        100.0 * solution.weight / total_weight
    } else {
        0.0
    };
    AcyclicityReport {
        total_weight,
        fas_weight: solution.weight,
        percent_removed,
        removed_edges: solution.removed.iter().map(|&i| graph.edges()[i].clone()).collect(),
        exact: solution.exact,
    }
}
