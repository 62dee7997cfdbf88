use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{Digraph, LeadershipGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankConfig {
    pub damping: f64,
    /// Stop when successive iterates differ by less than this in L1.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tolerance: 1e-12,
            max_iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Centrality {
    pub pagerank: f64,
    pub weighted_in_degree: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityReport {
    pub cities: BTreeMap<String, Centrality>,
    pub iterations: usize,
    pub converged: bool,
}

impl CentralityReport {
    pub fn get(&self, city: &str) -> Option<&Centrality> {
        self.cities.get(city)
    }
}

/// Sum of incoming edge weights per node, in node order.
pub fn weighted_in_degree(graph: &LeadershipGraph) -> Vec<f64> {
    let mut deg = vec![0.0; graph.nodes().len()];
    for e in graph.edges() {
        deg[graph.node_index(&e.leader).expect("validated")] += e.weight;
    }
    deg
}

/// Power-iteration result over node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    pub ranks: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Weighted PageRank by power iteration on an index graph. Each node passes
/// rank along its outgoing edges in proportion to weight; nodes without
/// outgoing edges spread their rank uniformly.
pub fn pagerank_digraph(graph: &Digraph, config: &PageRankConfig) -> RankVector {
    assert!(
        config.damping > 0.0 && config.damping < 1.0,
        "damping must lie in (0, 1)"
    );
    let n = graph.node_count();
    if n == 0 {
        return RankVector {
            ranks: Vec::new(),
            iterations: 0,
            converged: true,
        };
    }
    let mut out_weight = vec![0.0; n];
    for &(u, _, w) in graph.edges() {
        out_weight[u] += w;
    }
    let d = config.damping;
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        iterations += 1;
        let dangling: f64 = (0..n).filter(|&v| out_weight[v] == 0.0).map(|v| rank[v]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.iter_mut().for_each(|x| *x = base);
        for &(u, v, w) in graph.edges() {
            next[v] += d * rank[u] * w / out_weight[u];
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let delta: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        core::mem::swap(&mut rank, &mut next);
        if delta < config.tolerance {
            converged = true;
            break;
        }
    }
    RankVector {
        ranks: rank,
        iterations,
        converged,
    }
}

/// PageRank and weighted in-degree for every city. Followers pass rank to
/// their leaders.
pub fn pagerank(graph: &LeadershipGraph, config: &PageRankConfig) -> CentralityReport {
    let in_degree = weighted_in_degree(graph);
    let result = pagerank_digraph(&graph.to_digraph(), config);
    let cities = graph
        .nodes()
        .iter()
        .zip(result.ranks.iter().zip(in_degree))
        .map(|(c, (&pagerank, weighted_in_degree))| {
            (
                c.clone(),
                Centrality {
                    pagerank,
                    weighted_in_degree,
                },
            )
        })
        .collect();
    CentralityReport {
        cities,
        iterations: result.iterations,
        converged: result.converged,
    }
}
