use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Sparse real vector over artist columns, sorted by column with no explicit
/// zeros stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    entries: Vec<(u32, f64)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from unsorted `(column, value)` pairs. Duplicate columns are
    /// summed and zeros dropped.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Self {
        pairs.sort_by_key(|&(c, _)| c);
        let mut entries: Vec<(u32, f64)> = Vec::with_capacity(pairs.len());
        for (c, v) in pairs {
            match entries.last_mut() {
                Some((last, acc)) if *last == c => *acc += v,
                _ => entries.push((c, v)),
            }
        }
        entries.retain(|&(_, v)| v != 0.0);
        Self { entries }
    }

    /// Builds from a dense slice, skipping zeros.
    pub fn from_dense(values: &[f64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, &v)| (i as u32, v))
            .collect();
        Self { entries }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, column: u32) -> f64 {
        self.entries
            .binary_search_by_key(&column, |&(c, _)| c)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = alloc::vec![0.0; len];
        for &(c, v) in &self.entries {
            out[c as usize] = v;
        }
        out
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        // Scale by the largest magnitude so huge counts cannot overflow.
        let scale = self.entries.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let sum: f64 = self
            .entries
            .iter()
            .map(|&(_, v)| {
                let r = v / scale;
                r * r
            })
            .sum();
        scale * libm::sqrt(sum)
    }

    pub fn scaled(&self, factor: f64) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|&(c, v)| (c, v * factor)).collect(),
        }
    }

    pub fn divided(&self, divisor: f64) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|&(c, v)| (c, v / divisor)).collect(),
        }
    }

    /// `self - other`, dropping exact zeros.
    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push(a[i]);
                i += 1;
            } else if take_b {
                out.push((b[j].0, -b[j].1));
                j += 1;
            } else {
                let d = a[i].1 - b[j].1;
                if d != 0.0 {
                    out.push((a[i].0, d));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }

    /// Euclidean distance between two sparse vectors.
    pub fn distance(&self, other: &SparseVec) -> f64 {
        self.sub(other).norm()
    }

    /// Keeps only the columns for which `keep` returns true.
    pub fn retain_columns(&self, mut keep: impl FnMut(u32) -> bool) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().copied().filter(|&(c, _)| keep(c)).collect(),
        }
    }
}
