#![allow(dead_code)]

use geoflow_core::charts::{ChartSet, MissingWeekSet, WeeklyChart};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn city(i: usize) -> String {
    format!("c{i}")
}

pub fn artist(i: usize) -> String {
    format!("a{i}")
}

/// Random charts: every (week, city) lists artist 0 plus a random subset of
/// the rest, with counts in 1..=1000.
pub fn random_charts(seed: u64, cities: usize, weeks: u32, artists: usize) -> Vec<WeeklyChart> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut charts = Vec::new();
    for week in 0..weeks {
        for c in 0..cities {
            let entries = (0..artists)
                .filter_map(|a| (a == 0 || rng.random_bool(0.7)).then(|| (artist(a), rng.random_range(1..=1000))))
                .collect();
            charts.push(WeeklyChart {
                week,
                city: city(c),
                entries,
            });
        }
    }
    charts
}

pub fn chart_set(charts: Vec<WeeklyChart>, missing: &[u32]) -> ChartSet {
    ChartSet::new(charts, missing.iter().copied().collect::<MissingWeekSet>()).unwrap()
}
