//! Leader-follower graph assembly and analysis.
//!
//! Edges point from follower to leader and carry the accepted lagged
//! correlation as weight.

mod fas;
mod pagerank;
mod size;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::lagcorr::{DyadResult, DyadTable};
use crate::stats::{one_sample_ttest, paired_ttest};
use crate::{Error, Result};

pub use fas::{feedback_arc_set, solve_fas, AcyclicityReport, Digraph, FasSolution, EXACT_FAS_MAX_NODES};
pub use pagerank::{pagerank, pagerank_digraph, weighted_in_degree, RankVector, Centrality, CentralityReport, PageRankConfig};
pub use size::{size_leadership, SizeLeadershipReport};

pub const DEFAULT_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub follower: String,
    pub leader: String,
    pub weight: f64,
    pub lag: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LeadershipGraph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
}

impl LeadershipGraph {
    /// Checks that weights are positive, endpoints are known, there are no
    /// self-loops and at most one edge per unordered pair.
    pub fn new(nodes: impl IntoIterator<Item = String>, mut edges: Vec<Edge>) -> Result<Self> {
        let nodes: BTreeSet<String> = nodes.into_iter().collect();
        let mut pairs = BTreeSet::new();
        for e in &edges {
            if !(e.weight > 0.0) || !e.weight.is_finite() {
                return Err(Error::Validation(format!(
                    "edge {} -> {} has non-positive weight {}",
                    e.follower, e.leader, e.weight
                )));
            }
            if e.follower == e.leader {
                return Err(Error::Validation(format!("self-loop on {}", e.follower)));
            }
            for end in [&e.follower, &e.leader] {
                if !nodes.contains(end) {
                    return Err(Error::UnknownCity(end.clone()));
                }
            }
            let key = if e.follower < e.leader {
                (e.follower.as_str(), e.leader.as_str())
            } else {
                (e.leader.as_str(), e.follower.as_str())
            };
            if !pairs.insert(key) {
                return Err(Error::Validation(format!(
                    "more than one edge between {} and {}",
                    key.0, key.1
                )));
            }
        }
        edges.sort_by(|a, b| (&a.follower, &a.leader).cmp(&(&b.follower, &b.leader)));
        Ok(Self {
            nodes: nodes.into_iter().collect(),
            edges,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_index(&self, city: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(city)).ok()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().fold(0.0, |acc, e| acc + e.weight)
    }

    /// Index-based view for the graph algorithms.
    pub fn to_digraph(&self) -> Digraph {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                (
                    self.node_index(&e.follower).expect("validated"),
                    self.node_index(&e.leader).expect("validated"),
                    e.weight,
                )
            })
            .collect();
        Digraph::new(self.nodes.len(), edges)
    }
}

/// Outcome of the two-step test for one unordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeDecision {
    /// Keep the edge described by the forward dyad.
    Forward,
    /// Keep the edge described by the backward dyad.
    Backward,
    None,
}

impl EdgeDecision {
    pub fn flipped(self) -> Self {
        match self {
            EdgeDecision::Forward => EdgeDecision::Backward,
            EdgeDecision::Backward => EdgeDecision::Forward,
            EdgeDecision::None => EdgeDecision::None,
        }
    }
}

/// Step one: the best-lag samples have a mean significantly different from
/// zero, and it is positive.
fn passes_step_one(dyad: &DyadResult, alpha: f64) -> Result<bool> {
    let t = one_sample_ttest(&dyad.best_values(), 0.0)?;
    Ok(t.rejects_at(alpha) && dyad.correlation > 0.0)
}

/// Both best-lag sample streams keyed by follower week, restricted to the
/// weeks they share.
pub fn paired_streams(forward: &DyadResult, backward: &DyadResult) -> (Vec<f64>, Vec<f64>) {
    let back: BTreeMap<u32, f64> = backward
        .best_samples()
        .iter()
        .map(|s| (s.follower_week, s.value))
        .collect();
    forward
        .best_samples()
        .iter()
        .filter_map(|s| back.get(&s.follower_week).map(|&b| (s.value, b)))
        .unzip()
}

fn decide(forward: &DyadResult, backward: &DyadResult, alpha: f64) -> Result<EdgeDecision> {
    let fwd = passes_step_one(forward, alpha)?;
    let bwd = passes_step_one(backward, alpha)?;
    Ok(match (fwd, bwd) {
        (false, false) => EdgeDecision::None,
        (true, false) => EdgeDecision::Forward,
        (false, true) => EdgeDecision::Backward,
        (true, true) => {
            let (f, b) = paired_streams(forward, backward);
            if !paired_ttest(&f, &b)?.rejects_at(alpha) {
                EdgeDecision::None
            } else if forward.correlation > backward.correlation {
                EdgeDecision::Forward
            } else if backward.correlation > forward.correlation {
                EdgeDecision::Backward
            } else {
                EdgeDecision::None
            }
        }
    })
}

/// Two-step acceptance for the dyads of one unordered pair. Any degenerate
/// or under-sized test yields no edge.
pub fn accept_edge(forward: &DyadResult, backward: &DyadResult, alpha: f64) -> EdgeDecision {
    decide(forward, backward, alpha).unwrap_or(EdgeDecision::None)
}

/// Acceptance when only one direction had enough samples.
fn accept_single(dyad: &DyadResult, alpha: f64) -> bool {
    passes_step_one(dyad, alpha).unwrap_or(false)
}

fn edge_of(dyad: &DyadResult) -> Edge {
    Edge {
        follower: dyad.follower.clone(),
        leader: dyad.leader.clone(),
        weight: dyad.correlation,
        lag: dyad.best_lag,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Acceptance {
    pub alpha: f64,
    /// Divide alpha by the number of ordered dyads.
    pub bonferroni: bool,
}

impl Default for Acceptance {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            bonferroni: false,
        }
    }
}

impl Acceptance {
    pub fn effective_alpha(&self, n_cities: usize) -> f64 {
        let dyads = n_cities * n_cities.saturating_sub(1);
        if self.bonferroni && dyads > 0 {
            self.alpha / dyads as f64
        } else {
            self.alpha
        }
    }
}

/// Applies [`accept_edge`] to every unordered pair of `table.cities`.
pub fn build_graph(table: &DyadTable, acceptance: Acceptance) -> Result<LeadershipGraph> {
    if !(acceptance.alpha > 0.0 && acceptance.alpha < 1.0) {
        return Err(Error::Domain(format!("alpha {} outside (0, 1)", acceptance.alpha)));
    }
    let alpha = acceptance.effective_alpha(table.cities.len());
    let mut edges = Vec::new();
    for (i, a) in table.cities.iter().enumerate() {
        for b in &table.cities[i + 1..] {
            // forward: b follows a; backward: a follows b.
            let forward = table.get(a, b);
            let backward = table.get(b, a);
            let edge = match (forward, backward) {
                (Some(f), Some(r)) => match accept_edge(f, r, alpha) {
                    EdgeDecision::Forward => Some(edge_of(f)),
                    EdgeDecision::Backward => Some(edge_of(r)),
                    EdgeDecision::None => None,
                },
                (Some(d), None) | (None, Some(d)) => accept_single(d, alpha).then(|| edge_of(d)),
                (None, None) => None,
            };
            edges.extend(edge);
        }
    }
    LeadershipGraph::new(table.cities.iter().cloned(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagcorr::{LagSample, LagScan};
    use alloc::vec;

    fn dyad(leader: &str, follower: &str, values: &[f64], lag: u32) -> DyadResult {
        let samples: Vec<LagSample> = values
            .iter()
            .enumerate()
            .map(|(i, &value)| LagSample {
                follower_week: 10 + i as u32,
                lag,
                value,
            })
            .collect();
        let correlation = values.iter().sum::<f64>() / values.len() as f64;
        DyadResult {
            leader: leader.into(),
            follower: follower.into(),
            per_lag_samples: [(lag, samples)].into_iter().collect(),
            best_lag: lag,
            correlation,
        }
    }

    fn wobble(center: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| center + 0.01 * (((i * 7) % 5) as f64 - 2.0)).collect()
    }

    #[test]
    fn single_survivor_wins() {
        let f = dyad("a", "b", &wobble(0.05, 30), 1);
        let r = dyad("b", "a", &wobble(-0.05, 30), 1);
        assert_eq!(accept_edge(&f, &r, 0.01), EdgeDecision::Forward);
        assert_eq!(accept_edge(&r, &f, 0.01), EdgeDecision::Backward);
    }

    #[test]
    fn near_zero_means_no_edge() {
        let f = dyad("a", "b", &wobble(0.0, 30), 1);
        let r = dyad("b", "a", &wobble(0.001, 30), 1);
        assert_eq!(accept_edge(&f, &r, 0.01), EdgeDecision::None);
    }

    #[test]
    fn both_survive_and_differ() {
        let f = dyad("a", "b", &wobble(0.08, 30), 1);
        let mut back = wobble(0.04, 30);
        back.rotate_left(2);
        let r = dyad("b", "a", &back, 2);
        assert_eq!(accept_edge(&f, &r, 0.01), EdgeDecision::Forward);
        assert_eq!(accept_edge(&r, &f, 0.01), EdgeDecision::Backward);
    }

    #[test]
    fn both_survive_equal_means_moving_together() {
        let f = dyad("a", "b", &wobble(0.05, 30), 1);
        let mut vals = wobble(0.05, 30);
        vals.rotate_left(1);
        let r = dyad("b", "a", &vals, 1);
        assert_eq!(accept_edge(&f, &r, 0.01), EdgeDecision::None);
    }

    #[test]
    fn degenerate_samples_give_no_edge() {
        let f = dyad("a", "b", &[0.0; 30], 1);
        let r = dyad("b", "a", &wobble(0.05, 30), 1);
        assert_eq!(accept_edge(&f, &r, 0.01), EdgeDecision::None);
    }

    #[test]
    fn graph_from_table() {
        let table = DyadTable::new(
            vec!["a".into(), "b".into(), "c".into()],
            LagScan::default(),
            vec![
                dyad("a", "b", &wobble(0.05, 30), 2),
                dyad("b", "a", &wobble(-0.05, 30), 1),
                dyad("c", "a", &wobble(0.05, 30), 3),
            ],
        );
        let g = build_graph(&table, Acceptance::default()).unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!((g.edges()[0].follower.as_str(), g.edges()[0].leader.as_str()), ("a", "c"));
        assert_eq!(g.edges()[0].lag, 3);
        assert_eq!((g.edges()[1].follower.as_str(), g.edges()[1].leader.as_str()), ("b", "a"));

        let one = DyadTable::new(vec!["a".into()], LagScan::default(), vec![]);
        assert!(build_graph(&one, Acceptance::default()).unwrap().edges().is_empty());
        let bad = Acceptance { alpha: 1.5, bonferroni: false };
        assert!(build_graph(&table, bad).is_err());
    }

    #[test]
    fn bonferroni_divides_by_ordered_dyads() {
        let acc = Acceptance { alpha: 0.01, bonferroni: true };
        assert!((acc.effective_alpha(10) - 0.01 / 90.0).abs() < 1e-18);
        assert_eq!(Acceptance::default().effective_alpha(10), 0.01);
    }

    #[test]
    fn graph_invariants_enforced() {
        let e = |f: &str, l: &str, w| Edge { follower: f.into(), leader: l.into(), weight: w, lag: 1 };
        let nodes = || vec![String::from("a"), String::from("b")];
        assert!(LeadershipGraph::new(nodes(), vec![e("a", "b", 0.0)]).is_err());
        assert!(LeadershipGraph::new(nodes(), vec![e("a", "a", 1.0)]).is_err());
        assert!(LeadershipGraph::new(nodes(), vec![e("a", "b", 1.0), e("b", "a", 1.0)]).is_err());
        assert!(LeadershipGraph::new(nodes(), vec![e("a", "z", 1.0)]).is_err());
        assert!(LeadershipGraph::new(nodes(), vec![e("a", "b", 1.0)]).is_ok());
    }
}
