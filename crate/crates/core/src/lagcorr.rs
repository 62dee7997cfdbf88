//! Velocities and lagged dot-product correlations between cities.
//!
//! A velocity keyed by week `t` is `row(t + 4) - row(t)` over normalized
//! windows, so it spans the eight weeks `t..t + 8`. A sample for lag `l` pairs
//! the follower's velocity at `t` with the leader's at `t - l`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::RangeInclusive;
use serde::{Deserialize, Serialize};

use crate::charts::WindowSeries;
use crate::{Error, Result, SparseVec, VELOCITY_STEP_WEEKS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocitySeries {
    pub city: String,
    pub velocities: BTreeMap<u32, SparseVec>,
}

impl VelocitySeries {
    pub fn get(&self, week: u32) -> Option<&SparseVec> {
        self.velocities.get(&week)
    }

    pub fn len(&self) -> usize {
        self.velocities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.velocities.is_empty()
    }
}

/// One lagged dot product `v_follower(t) . v_leader(t - lag)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagSample {
    pub follower_week: u32,
    pub lag: u32,
    pub value: f64,
}

/// Lag scan result for `follower` possibly following `leader`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadResult {
    pub leader: String,
    pub follower: String,
    pub per_lag_samples: BTreeMap<u32, Vec<LagSample>>,
    pub best_lag: u32,
    /// Mean sample value at `best_lag`.
    pub correlation: f64,
}

impl DyadResult {
    pub fn best_samples(&self) -> &[LagSample] {
        self.per_lag_samples
            .get(&self.best_lag)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn best_values(&self) -> Vec<f64> {
        self.best_samples().iter().map(|s| s.value).collect()
    }

    /// Mean sample value per lag, for lags that have samples.
    pub fn lag_means(&self) -> BTreeMap<u32, f64> {
        self.per_lag_samples
            .iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(&lag, s)| (lag, s.iter().map(|x| x.value).sum::<f64>() / s.len() as f64))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagScan {
    pub lags: RangeInclusive<u32>,
    /// Lags with fewer samples are ineligible.
    pub min_samples: usize,
}

impl Default for LagScan {
    fn default() -> Self {
        Self {
            lags: 1..=5,
            min_samples: 20,
        }
    }
}

/// Velocities for `city`; weeks lost to missing data or inactivity are
/// absent.
pub fn compute_velocities(windows: &WindowSeries, city: &str) -> Result<VelocitySeries> {
    if !windows.cities().contains(city) {
        return Err(Error::UnknownCity(city.into()));
    }
    let mut velocities = BTreeMap::new();
    for start in windows.starts() {
        let Some(later_start) = start.checked_add(VELOCITY_STEP_WEEKS) else {
            continue;
        };
        let (Some(now), Some(later)) = (windows.get(start), windows.get(later_start)) else {
            continue;
        };
        if let (Some(a), Some(b)) = (now.active_row(city), later.active_row(city)) {
            velocities.insert(start, b.sub(a));
        }
    }
    Ok(VelocitySeries {
        city: city.into(),
        velocities,
    })
}

/// One sample per week where both velocities exist.
pub fn lagged_samples(follower: &VelocitySeries, leader: &VelocitySeries, lag: u32) -> Vec<LagSample> {
    follower
        .velocities
        .iter()
        .filter_map(|(&t, vf)| {
            let vl = leader.get(t.checked_sub(lag)?)?;
            Some(LagSample {
                follower_week: t,
                lag,
                value: vf.dot(vl),
            })
        })
        .collect()
}

/// Scans `scan.lags` and keeps the lag with the largest mean sample value,
/// smallest lag on ties.
pub fn best_dyad(follower: &VelocitySeries, leader: &VelocitySeries, scan: &LagScan) -> Result<DyadResult> {
    if scan.min_samples < 2 {
        return Err(Error::Domain("min_samples must be at least 2".into()));
    }
    let mut per_lag_samples = BTreeMap::new();
    let mut best: Option<(u32, f64)> = None;
    for lag in scan.lags.clone() {
        let samples = lagged_samples(follower, leader, lag);
        if samples.len() >= scan.min_samples {
            let m = samples.iter().map(|s| s.value).sum::<f64>() / samples.len() as f64;
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((lag, m));
            }
        }
        per_lag_samples.insert(lag, samples);
    }
    let (best_lag, correlation) = best.ok_or_else(|| Error::DyadUnavailable {
        leader: leader.city.clone(),
        follower: follower.city.clone(),
    })?;
    Ok(DyadResult {
        leader: leader.city.clone(),
        follower: follower.city.clone(),
        per_lag_samples,
        best_lag,
        correlation,
    })
}

/// All ordered `(leader, follower)` index pairs in deterministic order.
pub fn ordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |l| (0..n).filter(move |&f| f != l).map(move |f| (l, f)))
}

/// Dyad results for a city set, sorted by `(leader, follower)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadTable {
    pub cities: Vec<String>,
    pub scan: LagScan,
    pub dyads: Vec<DyadResult>,
}

impl DyadTable {
    /// Builds from already computed results. Unavailable dyads are simply
    /// absent.
    pub fn new(mut cities: Vec<String>, scan: LagScan, mut dyads: Vec<DyadResult>) -> Self {
        cities.sort();
        cities.dedup();
        dyads.sort_by(|a, b| (&a.leader, &a.follower).cmp(&(&b.leader, &b.follower)));
        Self { cities, scan, dyads }
    }

    pub fn get(&self, leader: &str, follower: &str) -> Option<&DyadResult> {
        self.dyads
            .binary_search_by(|d| (d.leader.as_str(), d.follower.as_str()).cmp(&(leader, follower)))
            .ok()
            .map(|i| &self.dyads[i])
    }

    /// Sequential scan over every ordered pair of `series`.
    pub fn scan(series: &[VelocitySeries], scan: LagScan) -> Self {
        let dyads = ordered_pairs(series.len())
            .filter_map(|(l, f)| best_dyad(&series[f], &series[l], &scan).ok())
            .collect();
        Self::new(series.iter().map(|s| s.city.clone()).collect(), scan, dyads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::ListenMatrix;
    use alloc::string::ToString;
    use alloc::vec;

    fn series(city: &str, vs: &[(u32, &[f64])]) -> VelocitySeries {
        VelocitySeries {
            city: city.into(),
            velocities: vs.iter().map(|(t, v)| (*t, SparseVec::from_dense(v))).collect(),
        }
    }

    fn window(start: u32, rows: &[(&str, &[f64])]) -> ListenMatrix {
        ListenMatrix {
            window_start: start,
            width_weeks: 4,
            genre: None,
            normalized: true,
            rows: rows
                .iter()
                .map(|(c, r)| (c.to_string(), SparseVec::from_dense(r)))
                .collect(),
        }
    }

    #[test]
    fn velocity_is_difference_one_month_apart() {
        let ws = WindowSeries::from_matrices([
            window(0, &[("a", &[1.0, 0.0]), ("b", &[1.0, 0.0])]),
            window(4, &[("a", &[0.0, 1.0]), ("b", &[1.0, 0.0])]),
            window(5, &[("a", &[0.0, 1.0]), ("b", &[])]),
        ]);
        let a = compute_velocities(&ws, "a").unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.get(0).unwrap().to_dense(2), vec![-1.0, 1.0]);
        let b = compute_velocities(&ws, "b").unwrap();
        assert!(b.get(0).unwrap().is_empty());
        assert_eq!(compute_velocities(&ws, "zz"), Err(Error::UnknownCity("zz".into())));
    }

    #[test]
    fn copy_gives_squared_norm() {
        let leader = series("l", &[(0, &[0.1, -0.2]), (1, &[0.3, 0.0]), (2, &[0.0, 0.05])]);
        let follower = series("f", &[(2, &[0.1, -0.2]), (3, &[0.3, 0.0]), (4, &[0.0, 0.05])]);
        let s = lagged_samples(&follower, &leader, 2);
        assert_eq!(s.len(), 3);
        for (sample, v) in s.iter().zip(leader.velocities.values()) {
            assert_eq!(sample.value, v.dot(v));
            assert!(sample.value > 0.0);
        }
        let ortho = series("o", &[(2, &[0.0, 0.0, 1.0]), (3, &[0.0, 0.0, 2.0])]);
        assert!(lagged_samples(&ortho, &leader, 2).iter().all(|s| s.value == 0.0));
    }

    #[test]
    fn all_zero_velocities_tie_at_lag_one() {
        let z = |c| VelocitySeries {
            city: String::from(c),
            velocities: (0..40).map(|t| (t, SparseVec::new())).collect(),
        };
        let d = best_dyad(&z("f"), &z("l"), &LagScan::default()).unwrap();
        assert_eq!(d.best_lag, 1);
        assert_eq!(d.correlation, 0.0);
    }

    #[test]
    fn argmax_over_lag_means() {
        // Leader velocity at week 100 is e0; follower at 100 + lag is
        // means[lag] * e0, for 25 repetitions spaced far apart.
        let means = [0.01, 0.03, 0.02, 0.0, 0.0];
        let mut lv = BTreeMap::new();
        let mut fv = BTreeMap::new();
        for k in 0..25u32 {
            let base = 100 + 20 * k;
            lv.insert(base, SparseVec::from_dense(&[1.0]));
            for lag in 1..=5u32 {
                fv.insert(base + lag, SparseVec::from_dense(&[means[lag as usize - 1]]));
            }
        }
        let leader = VelocitySeries { city: "l".into(), velocities: lv };
        let follower = VelocitySeries { city: "f".into(), velocities: fv };
        let d = best_dyad(&follower, &leader, &LagScan::default()).unwrap();
        assert_eq!(d.best_lag, 2);
        assert!((d.correlation - 0.03).abs() < 1e-15);
    }

    #[test]
    fn too_few_samples_is_unavailable() {
        let a = series("a", &[(0, &[1.0]), (1, &[1.0])]);
        let b = series("b", &[(1, &[1.0]), (2, &[1.0])]);
        assert!(matches!(
            best_dyad(&b, &a, &LagScan::default()),
            Err(Error::DyadUnavailable { .. })
        ));
        let scan = LagScan { lags: 1..=5, min_samples: 1 };
        assert!(matches!(best_dyad(&b, &a, &scan), Err(Error::Domain(_))));
    }

    #[test]
    fn table_lookup() {
        let a = series("a", &(0..30).map(|t| (t, &[1.0][..])).collect::<Vec<_>>());
        let b = series("b", &(0..30).map(|t| (t, &[0.5][..])).collect::<Vec<_>>());
        let t = DyadTable::scan(&[b, a], LagScan::default());
        assert_eq!(t.cities, vec!["a".to_string(), "b".to_string()]);
        assert_eq!(t.dyads.len(), 2);
        assert_eq!(t.get("a", "b").unwrap().leader, "a");
        assert!(t.get("a", "a").is_none());
    }
}
