//! Summed distance matrices and average-linkage (UPGMA) clustering.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::charts::WindowSeries;
use crate::{Error, Result};

/// Symmetric distances with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    cities: Vec<String>,
    d: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn new(cities: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self> {
        let n = cities.len();
        if d.len() != n || d.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!("distance matrix must be {n}x{n}")));
        }
        for i in 0..n {
            if d[i][i] != 0.0 {
                return Err(Error::Validation(format!("non-zero diagonal at {}", cities[i])));
            }
            for j in 0..i {
                if d[i][j] != d[j][i] {
                    return Err(Error::Validation(format!(
                        "asymmetric distance between {} and {}",
                        cities[i], cities[j]
                    )));
                }
                if !(d[i][j] >= 0.0) || !d[i][j].is_finite() {
                    return Err(Error::Validation(format!(
                        "invalid distance {} between {} and {}",
                        d[i][j], cities[i], cities[j]
                    )));
                }
            }
        }
        Ok(Self { cities, d })
    }

    pub fn cities(&self) -> &[String] {
        &self.cities
    }

    pub fn len(&self) -> usize {
        self.cities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cities.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.d
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceMode {
    /// Plain sum over the windows where both cities are active.
    #[default]
    Sum,
    /// Sum divided by the number of shared windows.
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub matrix: DistanceMatrix,
    /// Windows in which both cities were active.
    pub coverage: Vec<Vec<u32>>,
    /// Requested cities that were never active.
    pub excluded: Vec<String>,
}

/// Accumulates per-window Euclidean distances between normalized rows.
pub fn summed_distances(windows: &WindowSeries, cities: &[String], mode: DistanceMode) -> DistanceReport {
    let (kept, excluded): (Vec<String>, Vec<String>) = cities
        .iter()
        .cloned()
        .partition(|c| windows.iter().any(|w| w.is_active(c)));
    let n = kept.len();
    let mut d = vec![vec![0.0; n]; n];
    let mut coverage = vec![vec![0u32; n]; n];
    for w in windows.iter() {
        let rows: Vec<_> = kept.iter().map(|c| w.active_row(c)).collect();
        for i in 0..n {
            let Some(ri) = rows[i] else { continue };
            for j in 0..i {
                let Some(rj) = rows[j] else { continue };
                d[i][j] += ri.distance(rj);
                coverage[i][j] += 1;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            if mode == DistanceMode::Mean && coverage[i][j] > 0 {
                d[i][j] /= coverage[i][j] as f64;
            }
            d[j][i] = d[i][j];
            coverage[j][i] = coverage[i][j];
        }
    }
    DistanceReport {
        matrix: DistanceMatrix { cities: kept, d },
        coverage,
        excluded,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Node {
    Leaf(usize),
    /// Index into [`ClusterTree::merges`].
    Merge(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: Node,
    pub right: Node,
    pub height: f64,
    pub size: usize,
}

/// Binary merge tree with `leaves.len() - 1` merges in merge order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterTree {
    pub leaves: Vec<String>,
    pub merges: Vec<Merge>,
}

impl ClusterTree {
    pub fn root(&self) -> Option<Node> {
        match (self.leaves.len(), self.merges.len()) {
            (0, _) => None,
            (_, 0) => Some(Node::Leaf(0)),
            (_, m) => Some(Node::Merge(m - 1)),
        }
    }

    pub fn height(&self, node: Node) -> f64 {
        match node {
            Node::Leaf(_) => 0.0,
            Node::Merge(k) => self.merges[k].height,
        }
    }

    /// Leaf names under `node`, sorted.
    pub fn members(&self, node: Node) -> Vec<&str> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            match n {
                Node::Leaf(i) => out.push(self.leaves[i].as_str()),
                Node::Merge(k) => {
                    stack.push(self.merges[k].left);
                    stack.push(self.merges[k].right);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// `(sorted members, height)` per merge, in merge order.
    pub fn merge_sets(&self) -> Vec<(Vec<&str>, f64)> {
        (0..self.merges.len())
            .map(|k| (self.members(Node::Merge(k)), self.merges[k].height))
            .collect()
    }

    pub fn heights_monotone(&self) -> bool {
        self.merges.windows(2).all(|w| w[0].height <= w[1].height)
            && self.merges.iter().all(|m| {
                m.height >= self.height(m.left) && m.height >= self.height(m.right)
            })
    }
}

/// UPGMA: repeatedly merges the two clusters with the smallest mean
/// inter-point distance. Ties go to the pair whose smallest member names sort
/// first.
pub fn average_linkage(dist: &DistanceMatrix) -> ClusterTree {
    let n = dist.len();
    let mut d = dist.d.clone();
    let mut active: Vec<bool> = vec![true; n];
    let mut size = vec![1usize; n];
    let mut node: Vec<Node> = (0..n).map(Node::Leaf).collect();
    // Smallest member name per cluster slot.
    let mut key: Vec<&str> = dist.cities.iter().map(String::as_str).collect();
    let mut merges: Vec<Merge> = Vec::with_capacity(n.saturating_sub(1));

    for _ in 1..n {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if !active[j] {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => {
                        let (x, y) = (d[i][j], d[bi][bj]);
                        x < y || (x == y && pair_key(&key, i, j) < pair_key(&key, bi, bj))
                    }
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.expect("at least two active clusters");
        let prev = merges.last().map_or(0.0, |m| m.height);
        // Rounding in the average update can dip an ulp below the last merge.
        let height = d[i][j].max(prev);
        let (left, right) = if key[i] <= key[j] { (node[i], node[j]) } else { (node[j], node[i]) };
        merges.push(Merge {
            left,
            right,
            height,
            size: size[i] + size[j],
        });
        let (si, sj) = (size[i] as f64, size[j] as f64);
        for k in 0..n {
            if active[k] && k != i && k != j {
                let v = (si * d[i][k] + sj * d[j][k]) / (si + sj);
                d[i][k] = v;
                d[k][i] = v;
            }
        }
        active[j] = false;
        size[i] += size[j];
        node[i] = Node::Merge(merges.len() - 1);
        key[i] = key[i].min(key[j]);
    }
    ClusterTree {
        leaves: dist.cities.clone(),
        merges,
    }
}

fn pair_key<'a>(key: &[&'a str], i: usize, j: usize) -> (&'a str, &'a str) {
    let (a, b) = (key[i], key[j]);
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Clusters are the maximal subtrees whose merge heights are all below
/// `height`. Each cluster is sorted and clusters are ordered by first member.
pub fn flat_cut(tree: &ClusterTree, height: f64) -> Vec<Vec<String>> {
    let n = tree.leaves.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    // Representative leaf of each merge.
    let mut rep = Vec::with_capacity(tree.merges.len());
    let leaf_of = |node: Node, rep: &[usize]| match node {
        Node::Leaf(i) => i,
        Node::Merge(k) => rep[k],
    };
    for m in &tree.merges {
        let (a, b) = (leaf_of(m.left, &rep), leaf_of(m.right, &rep));
        if m.height < height {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[rb] = ra;
        }
        rep.push(a);
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(tree.leaves[i].clone());
    }
    let mut out: Vec<Vec<String>> = groups
        .into_values()
        .map(|mut g| {
            g.sort();
            g
        })
        .collect();
    out.sort();
    out
}

/// `city -> cluster index` for a partition from [`flat_cut`].
pub fn partition_map(partition: &[Vec<String>]) -> BTreeMap<String, usize> {
    partition
        .iter()
        .enumerate()
        .flat_map(|(k, g)| g.iter().map(move |c| (c.clone(), k)))
        .collect()
}
