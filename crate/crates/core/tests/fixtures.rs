//! Small hand-checkable fixtures and generator examples.

mod common;

use std::collections::BTreeMap;

use geoflow_core::charts::{filter_genre, ChartSet, GenreCatalog, MissingWeekSet, WeeklyChart};
use geoflow_core::cluster::{summed_distances, DistanceMode};
use geoflow_core::lagcorr::{best_dyad, compute_velocities, lagged_samples, LagScan};
use geoflow_core::leadnet::{build_graph, Acceptance};
use geoflow_core::pipeline::{detect, velocity_series};
use geoflow_core::synth::{generate, shuffle_null, PlantedEdge, PlantedHierarchy, SynthCity, SynthConfig};

use common::{chart_set, random_charts};

/// Raw counts per (week, city, artist) from the charts, by direct lookup.
fn counts(charts: &[WeeklyChart]) -> BTreeMap<(u32, String, String), f64> {
    charts
        .iter()
        .flat_map(|c| c.entries.iter().map(move |(a, l)| ((c.week, c.city.clone(), a.clone()), *l as f64)))
        .collect()
}

fn hand_window(counts: &BTreeMap<(u32, String, String), f64>, start: u32, city: &str, artists: &[String]) -> Vec<f64> {
    artists
        .iter()
        .map(|a| (start..start + 4).map(|w| counts.get(&(w, city.into(), a.clone())).copied().unwrap_or(0.0)).sum())
        .collect()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| if n > 0.0 { x / n } else { 0.0 }).collect()
}

#[test]
fn windows_match_hand_sums() {
    let charts = random_charts(7, 3, 16, 5);
    let table = counts(&charts);
    let set = chart_set(charts, &[6]);
    let artists = set.universe().artists().to_vec();
    assert_eq!(artists.len(), 5);
    for start in 0..=12u32 {
        let touches_missing = (start..start + 4).contains(&6);
        let built = set.build_window(start);
        assert_eq!(built.is_err(), touches_missing, "window {start}");
        let Ok(m) = built else { continue };
        for city in set.cities() {
            assert_eq!(m.row(city).unwrap().to_dense(artists.len()), hand_window(&table, start, city, &artists));
        }
    }
}

#[test]
fn velocities_match_hand_differences() {
    let charts = random_charts(11, 2, 20, 4);
    let table = counts(&charts);
    let set = chart_set(charts, &[]);
    let artists = set.universe().artists().to_vec();
    let windows = set.windows(None);
    for city in set.cities() {
        let v = compute_velocities(&windows, city).unwrap();
        assert_eq!(v.len(), 20 - 3 - 4);
        for (&t, vel) in &v.velocities {
            let now = unit(&hand_window(&table, t, city, &artists));
            let later = unit(&hand_window(&table, t + 4, city, &artists));
            for (got, (b, a)) in vel.to_dense(artists.len()).iter().zip(later.iter().zip(&now)) {
                assert!((got - (b - a)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn ingest_universe_counts_distinct_artists() {
    let chart = |week, city: &str, artists: &[&str]| WeeklyChart {
        week,
        city: city.into(),
        entries: artists.iter().map(|a| (a.to_string(), 3)).collect(),
    };
    let set = ChartSet::new(
        vec![chart(0, "x", &["r", "s"]), chart(0, "y", &["s", "t"]), chart(1, "x", &["t"])],
        MissingWeekSet::new(),
    )
    .unwrap();
    assert_eq!(set.universe().artists(), ["r", "s", "t"]);
    assert_eq!(set.study_weeks(), 2);
}

#[test]
fn genre_filter_commutes_with_column_selection() {
    let charts = random_charts(3, 2, 8, 5);
    let set = chart_set(charts, &[]);
    let mut catalog = GenreCatalog::new();
    catalog.insert("g", vec!["a1".into(), "a3".into(), "not-charted".into()]).unwrap();
    for start in set.candidate_starts() {
        let raw = set.build_window(start).unwrap();
        let filtered = filter_genre(raw.clone(), &catalog, "g", set.universe()).unwrap().normalize_rows();
        for city in set.cities() {
            let dense = raw.row(city).unwrap().to_dense(5);
            let keep: Vec<f64> = dense
                .iter()
                .enumerate()
                .map(|(i, x)| if i == 1 || i == 3 { *x } else { 0.0 })
                .collect();
            let want = unit(&keep);
            let got = filtered.row(city).unwrap().to_dense(5);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-15);
            }
            let nonzero = got.iter().filter(|x| **x != 0.0).count();
            assert!(nonzero <= 2);
        }
    }
}

#[test]
fn distances_match_per_window_sum() {
    let charts = random_charts(5, 3, 8, 4);
    let set = chart_set(charts, &[]);
    let windows = set.windows(None);
    assert_eq!(windows.len(), 5);
    let cities = set.cities().to_vec();
    let report = summed_distances(&windows, &cities, DistanceMode::Sum);
    for i in 0..3 {
        for j in 0..3 {
            let want: f64 = windows
                .iter()
                .map(|w| {
                    let a = w.row(&cities[i]).unwrap().to_dense(4);
                    let b = w.row(&cities[j]).unwrap().to_dense(4);
                    a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
                })
                .sum();
            assert!((report.matrix.get(i, j) - want).abs() < 1e-12);
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                assert_eq!(report.coverage[i][j], 5);
            }
        }
    }
}

fn two_city(coupling: f64, lag: u32) -> PlantedHierarchy {
    PlantedHierarchy {
        cities: ["leader", "follower"]
            .map(|name| SynthCity { name: name.into(), population: 1000, activity: 20_000.0 })
            .to_vec(),
        edges: vec![PlantedEdge { leader: "leader".into(), follower: "follower".into(), lag, coupling }],
    }
}

#[test]
fn static_cities_give_no_edges() {
    let config = SynthConfig { walk_step: 0.0, noise_sigma: 0.0, n_weeks: 60, seed: 4, ..SynthConfig::default() };
    let charts = generate(&PlantedHierarchy::chain(4, 1, 0.0), &config).unwrap();
    let set = ChartSet::new(charts, MissingWeekSet::new()).unwrap();
    let d = detect(&set, None, None, LagScan::default(), Acceptance::default()).unwrap();
    assert!(d.graph.edges().is_empty());
}

#[test]
fn exact_copy_is_detected_at_its_lag() {
    let config = SynthConfig { noise_sigma: 0.0, n_weeks: 80, seed: 9, ..SynthConfig::default() };
    let charts = generate(&two_city(1.0, 1), &config).unwrap();
    let set = ChartSet::new(charts, MissingWeekSet::new()).unwrap();
    let d = detect(&set, None, None, LagScan::default(), Acceptance::default()).unwrap();
    assert_eq!(d.graph.edges().len(), 1);
    let e = &d.graph.edges()[0];
    assert_eq!((e.follower.as_str(), e.leader.as_str(), e.lag), ("follower", "leader", 1));
}

#[test]
fn planted_lag_two_has_the_largest_mean() {
    let config = SynthConfig { seed: 21, ..SynthConfig::default() };
    let charts = generate(&two_city(0.9, 2), &config).unwrap();
    let windows = ChartSet::new(charts, MissingWeekSet::new()).unwrap().windows(None);
    let series = velocity_series(&windows, None).unwrap();
    let (follower, leader) = (&series[0], &series[1]);
    assert_eq!((follower.city.as_str(), leader.city.as_str()), ("follower", "leader"));
    let mean = |lag| {
        let s = lagged_samples(follower, leader, lag);
        s.iter().map(|x| x.value).sum::<f64>() / s.len() as f64
    };
    for lag in [1, 3, 4, 5] {
        assert!(mean(2) > mean(lag), "lag {lag}");
    }
    assert_eq!(best_dyad(follower, leader, &LagScan::default()).unwrap().best_lag, 2);
}

#[test]
fn shuffling_constant_data_keeps_zero_velocities() {
    let chart = |week| WeeklyChart { week, city: "x".into(), entries: vec![("a".into(), 5), ("b".into(), 2)] };
    let charts: Vec<WeeklyChart> = (0..20).map(chart).collect();
    let missing = MissingWeekSet::new();
    let shuffled = shuffle_null(&charts, &missing, 17);
    let windows = ChartSet::new(shuffled, missing).unwrap().windows(None);
    let v = compute_velocities(&windows, "x").unwrap();
    assert!(!v.is_empty());
    assert!(v.velocities.values().all(|x| x.is_empty()));
}

#[test]
fn single_city_builds_empty_graph() {
    let set = chart_set(random_charts(2, 1, 30, 3), &[]);
    let d = detect(&set, None, None, LagScan::default(), Acceptance::default()).unwrap();
    assert!(d.graph.edges().is_empty());
    assert!(build_graph(&d.dyads, Acceptance::default()).unwrap().edges().is_empty());
}
