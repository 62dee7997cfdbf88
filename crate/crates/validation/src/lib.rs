//! Synthetic scenarios used by the acceptance suite: planted chains and
//! their shuffled nulls, run through detection and scored.

use std::time::{Duration, Instant};

use geoflow_core::charts::{ChartSet, MissingWeekSet, WeeklyChart};
use geoflow_core::lagcorr::LagScan;
use geoflow_core::leadnet::{feedback_arc_set, Acceptance, AcyclicityReport, LeadershipGraph};
use geoflow_core::pipeline::detect;
use geoflow_core::synth::{generate, shuffle_null, PlantedHierarchy, SynthConfig};

/// Fourteen weeks spread over the 153-week period, in runs of two to four.
pub const MISSING_WEEKS: [u32; 14] = [20, 21, 22, 45, 46, 70, 71, 72, 73, 100, 101, 128, 129, 130];

pub const CHAIN_CITIES: usize = 10;
pub const CHAIN_LAG: u32 = 1;
pub const NOISE_SIGMA: f64 = 0.05;

pub fn missing_weeks() -> MissingWeekSet {
    MISSING_WEEKS.into_iter().collect()
}

pub fn chain(coupling: f64) -> PlantedHierarchy {
    PlantedHierarchy::chain(CHAIN_CITIES, CHAIN_LAG, coupling)
}

pub fn synth_config(seed: u64) -> SynthConfig {
    SynthConfig {
        n_weeks: 153,
        noise_sigma: NOISE_SIGMA,
        seed,
        missing_weeks: missing_weeks(),
        ..SynthConfig::default()
    }
}

pub fn planted_charts(seed: u64, coupling: f64) -> Vec<WeeklyChart> {
    generate(&chain(coupling), &synth_config(seed)).expect("chain hierarchy is valid")
}

pub fn detect_graph(charts: Vec<WeeklyChart>) -> LeadershipGraph {
    let set = ChartSet::new(charts, missing_weeks()).expect("generated charts validate");
    detect(&set, None, None, LagScan::default(), Acceptance::default())
        .expect("detection on generated charts")
        .graph
}

/// How a detected graph compares with the planted hierarchy.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub planted: usize,
    /// Planted edges found with the right direction and lag.
    pub recovered: usize,
    /// Accepted edges pointing against the planted influence order.
    pub reversed: usize,
    pub edges: usize,
    pub acyclicity: AcyclicityReport,
    pub acyclic_after_removal: bool,
    pub elapsed: Duration,
}

pub fn score(hierarchy: &PlantedHierarchy, graph: &LeadershipGraph) -> (usize, usize) {
    let recovered = hierarchy
        .edges
        .iter()
        .filter(|p| {
            graph
                .edges()
                .iter()
                .any(|e| e.follower == p.follower && e.leader == p.leader && e.lag == p.lag)
        })
        .count();
    let reversed = graph
        .edges()
        .iter()
        .filter(|e| hierarchy.influences(&e.follower, &e.leader))
        .count();
    (recovered, reversed)
}

/// Topological-sort check, independent of the solver's own verification.
pub fn acyclic_without(graph: &LeadershipGraph, removed: &AcyclicityReport) -> bool {
    let kept: Vec<_> = graph
        .edges()
        .iter()
        .filter(|e| !removed.removed_edges.contains(e))
        .collect();
    let n = graph.nodes().len();
    let idx = |c: &str| graph.node_index(c).expect("known node");
    let mut indeg = vec![0usize; n];
    for e in &kept {
        indeg[idx(&e.leader)] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut visited = 0;
    while let Some(v) = ready.pop() {
        visited += 1;
        for e in kept.iter().filter(|e| idx(&e.follower) == v) {
            let w = idx(&e.leader);
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(w);
            }
        }
    }
    visited == n
}

/// Generates, detects and scores one planted chain.
pub fn planted_recovery(seed: u64, coupling: f64) -> Recovery {
    let start = Instant::now();
    let hierarchy = chain(coupling);
    let graph = detect_graph(planted_charts(seed, coupling));
    let acyclicity = feedback_arc_set(&graph);
    let elapsed = start.elapsed();
    let (recovered, reversed) = score(&hierarchy, &graph);
    Recovery {
        planted: hierarchy.edges.len(),
        recovered,
        reversed,
        edges: graph.edges().len(),
        acyclic_after_removal: acyclic_without(&graph, &acyclicity),
        acyclicity,
        elapsed,
    }
}

/// Share of unordered city pairs that receive an edge after shuffling the
/// planted data of `seed`.
pub fn shuffled_edge_fraction(seed: u64) -> f64 {
    let charts = shuffle_null(&planted_charts(seed, 0.9), &missing_weeks(), seed);
    let graph = detect_graph(charts);
    let pairs = CHAIN_CITIES * (CHAIN_CITIES - 1) / 2;
    graph.edges().len() as f64 / pairs as f64
}
