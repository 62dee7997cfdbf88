use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{CentralityReport, LeadershipGraph};
use crate::stats::spearman;
use crate::{Error, Result};

/// Relationship between city population and leadership.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeLeadershipReport {
    pub spearman_pagerank: f64,
    pub spearman_indegree: f64,
    /// Share of edge weight on edges whose leader is strictly larger, in
    /// percent. `None` when no edge has both populations known.
    pub percent_weight_larger_leads: Option<f64>,
    pub cities_used: usize,
    /// Cities left out for lack of a population figure.
    pub excluded: Vec<String>,
}

pub fn size_leadership(
    graph: &LeadershipGraph,
    centrality: &CentralityReport,
    populations: &BTreeMap<String, u64>,
) -> Result<SizeLeadershipReport> {
    let mut excluded = Vec::new();
    let (mut pops, mut ranks, mut degrees) = (Vec::new(), Vec::new(), Vec::new());
    for city in graph.nodes() {
        let (Some(&pop), Some(c)) = (populations.get(city), centrality.get(city)) else {
            excluded.push(city.clone());
            continue;
        };
        pops.push(pop as f64);
        ranks.push(c.pagerank);
        degrees.push(c.weighted_in_degree);
    }
    if pops.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: pops.len() });
    }
    let spearman_pagerank = spearman(&pops, &ranks)?.rho;
    let spearman_indegree = spearman(&pops, &degrees)?.rho;

    let (mut larger, mut total) = (0.0, 0.0);
    for e in graph.edges() {
        if let (Some(&pf), Some(&pl)) = (populations.get(&e.follower), populations.get(&e.leader)) {
            total += e.weight;
            if pl > pf {
                larger += e.weight;
            }
        }
    }
    Ok(SizeLeadershipReport {
        spearman_pagerank,
        spearman_indegree,
        percent_weight_larger_leads: (total > 0.0).then(|| 100.0 * larger / total),
        cities_used: pops.len(),
        excluded,
    })
}
