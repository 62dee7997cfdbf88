//! Property tests for the documented invariants.

mod common;

use std::collections::BTreeMap;

use geoflow_core::charts::{ListenMatrix, WeeklyChart};
use geoflow_core::cluster::{average_linkage, flat_cut, DistanceMatrix};
use geoflow_core::lagcorr::{lagged_samples, DyadResult, DyadTable, LagSample, LagScan};
use geoflow_core::leadnet::{accept_edge, pagerank, size_leadership, Edge, LeadershipGraph, PageRankConfig};
use geoflow_core::pipeline::velocity_series;
use geoflow_core::stats::{one_sample_ttest, paired_ttest, spearman};
use geoflow_core::SparseVec;
use proptest::prelude::*;

use common::{chart_set, random_charts};

fn sparse_row() -> impl Strategy<Value = Vec<(u32, f64)>> {
    prop::collection::vec((0u32..2000, 1u32..5_000_000), 1..60)
        .prop_map(|v| v.into_iter().map(|(c, x)| (c, x as f64)).collect())
}

proptest! {
    #[test]
    fn normalized_rows_have_unit_norm(rows in prop::collection::vec(sparse_row(), 1..8)) {
        let matrix = ListenMatrix {
            window_start: 0,
            width_weeks: 4,
            genre: None,
            normalized: false,
            rows: rows
                .into_iter()
                .enumerate()
                .map(|(i, r)| (format!("c{i}"), SparseVec::from_pairs(r)))
                .collect(),
        }
        .normalize_rows();
        for row in matrix.rows.values() {
            prop_assert!((row.norm() - 1.0).abs() <= 1e-12);
        }
        let again = matrix.clone().normalize_rows();
        prop_assert_eq!(again, matrix);
    }

    #[test]
    fn window_count_matches_missing_weeks(
        weeks in 4u32..40,
        missing in prop::collection::btree_set(0u32..40, 0..6),
    ) {
        let missing: Vec<u32> = missing.into_iter().filter(|&w| w < weeks).collect();
        let set = chart_set(random_charts(1, 2, weeks, 3), &missing);
        let blocked = (0..=weeks - 4)
            .filter(|s| missing.iter().any(|m| (*s..*s + 4).contains(m)))
            .count();
        prop_assert_eq!(set.windows(None).len(), (weeks - 3) as usize - blocked);
    }

    #[test]
    fn rescaling_counts_leaves_dyads_unchanged(seed in any::<u64>(), factor in 2u32..50) {
        let charts = random_charts(seed, 3, 24, 5);
        let scaled: Vec<WeeklyChart> = charts
            .iter()
            .map(|c| WeeklyChart {
                entries: c.entries.iter().map(|(a, l)| (a.clone(), l * factor)).collect(),
                ..c.clone()
            })
            .collect();
        let scan = LagScan { lags: 1..=5, min_samples: 2 };
        let table = |charts: Vec<WeeklyChart>| {
            let windows = chart_set(charts, &[9]).windows(None);
            DyadTable::scan(&velocity_series(&windows, None).unwrap(), scan.clone())
        };
        let (a, b) = (table(charts), table(scaled));
        prop_assert_eq!(a.dyads.len(), b.dyads.len());
        for (x, y) in a.dyads.iter().zip(&b.dyads) {
            prop_assert_eq!(x.best_lag, y.best_lag);
            prop_assert!((x.correlation - y.correlation).abs() <= 1e-12);
            for (sx, sy) in x.per_lag_samples.values().flatten().zip(y.per_lag_samples.values().flatten()) {
                prop_assert!((sx.value - sy.value).abs() <= 1e-12);
                prop_assert!(sx.value.abs() <= 4.0);
            }
        }
    }

    #[test]
    fn time_reversal_swaps_roles(seed in any::<u64>(), lag in 1u32..=5) {
        let weeks = 30;
        let charts = random_charts(seed, 2, weeks, 4);
        let reversed: Vec<WeeklyChart> = charts
            .iter()
            .map(|c| WeeklyChart { week: weeks - 1 - c.week, ..c.clone() })
            .collect();
        let fwd = velocity_series(&chart_set(charts, &[]).windows(None), None).unwrap();
        let rev = velocity_series(&chart_set(reversed, &[]).windows(None), None).unwrap();
        let on_reversed = lagged_samples(&rev[0], &rev[1], lag);
        let original: BTreeMap<u32, f64> = lagged_samples(&fwd[1], &fwd[0], lag)
            .into_iter()
            .map(|s| (s.follower_week, s.value))
            .collect();
        prop_assert_eq!(on_reversed.len(), original.len());
        for s in on_reversed {
            // v'(t) = -v(T - 8 - t), so week t maps to T - 8 - t + lag
            let u = weeks - 8 - s.follower_week + lag;
            prop_assert_eq!(original[&u], s.value);
        }
    }

    #[test]
    fn ttest_affine_invariance(
        xs in prop::collection::vec(-100.0f64..100.0, 3..40),
        a in 0.1f64..10.0,
        b in -50.0f64..50.0,
        null in -5.0f64..5.0,
    ) {
        let Ok(base) = one_sample_ttest(&xs, null) else { return Ok(()) };
        let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let moved = one_sample_ttest(&ys, a * null + b).unwrap();
        prop_assert!((base.statistic - moved.statistic).abs() <= 1e-12 * base.statistic.abs().max(1.0));
        prop_assert!((base.p_value - moved.p_value).abs() <= 1e-12);
    }

    #[test]
    fn paired_statistic_is_antisymmetric(pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..40)) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        match (paired_ttest(&xs, &ys), paired_ttest(&ys, &xs)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.statistic, -b.statistic);
                prop_assert_eq!(a.p_value, b.p_value);
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            _ => prop_assert!(false, "only one direction degenerate"),
        }
    }

    #[test]
    fn spearman_ignores_monotone_maps(pairs in prop::collection::vec((-1000i32..1000, -1000i32..1000), 2..40)) {
        let xs: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        let Ok(base) = spearman(&xs, &ys) else { return Ok(()) };
        let fx: Vec<f64> = xs.iter().map(|x| x * x * x + 3.0 * x).collect();
        let fy: Vec<f64> = ys.iter().map(|y| (y / 400.0).exp()).collect();
        let moved = spearman(&fx, &fy).unwrap();
        prop_assert!((base.rho - moved.rho).abs() <= 1e-12);
    }
}

fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..9).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let m = pairs.len();
        (
            Just(n),
            prop::collection::vec((any::<bool>(), any::<bool>(), 0.001f64..1.0), m).prop_map(move |choices| {
                pairs
                    .iter()
                    .zip(choices)
                    .filter(|(_, (keep, _, _))| *keep)
                    .map(|(&(i, j), (_, flip, w))| if flip { (j, i, w) } else { (i, j, w) })
                    .collect()
            }),
        )
    })
}

fn leadership(n: usize, edges: &[(usize, usize, f64)], order: &[usize]) -> LeadershipGraph {
    let name = |i: usize| format!("n{i}");
    let graph = LeadershipGraph::new(
        order.iter().map(|&i| name(i)),
        edges
            .iter()
            .rev()
            .map(|&(u, v, w)| Edge { follower: name(u), leader: name(v), weight: w, lag: 1 })
            .collect(),
    )
    .unwrap();
    assert_eq!(graph.nodes().len(), n);
    graph
}

proptest! {
    #[test]
    fn pagerank_is_a_distribution_independent_of_order((n, edges) in random_graph(), seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..n).collect();
        let forward = pagerank(&leadership(n, &edges, &order), &PageRankConfig::default());
        order.rotate_left(seed as usize % n);
        order.reverse();
        let shuffled = pagerank(&leadership(n, &edges, &order), &PageRankConfig::default());
        let total: f64 = forward.cities.values().map(|c| c.pagerank).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        for (city, c) in &forward.cities {
            prop_assert!(c.pagerank >= 0.0);
            prop_assert!((c.pagerank - shuffled.cities[city].pagerank).abs() <= 1e-10);
            prop_assert!((c.weighted_in_degree - shuffled.cities[city].weighted_in_degree).abs() <= 1e-12);
        }
    }

    #[test]
    fn population_relabeling_keeps_size_report((n, edges) in random_graph(), pops in prop::collection::vec(1u64..1_000_000, 9)) {
        let order: Vec<usize> = (0..n).collect();
        let graph = leadership(n, &edges, &order);
        let centrality = pagerank(&graph, &PageRankConfig::default());
        let populations: BTreeMap<String, u64> = (0..n).map(|i| (format!("n{i}"), pops[i])).collect();
        let relabeled: BTreeMap<String, u64> = populations.iter().map(|(k, &p)| (k.clone(), 3 * p * p + 7)).collect();
        let a = size_leadership(&graph, &centrality, &populations);
        let b = size_leadership(&graph, &centrality, &relabeled);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn accept_edge_is_antisymmetric(
        fwd in prop::collection::vec(-0.2f64..0.5, 5..40),
        bwd in prop::collection::vec(-0.2f64..0.5, 5..40),
        lags in (1u32..=5, 1u32..=5),
        alpha in prop::sample::select(vec![0.001, 0.01, 0.05, 0.2]),
    ) {
        let dyad = |leader: &str, follower: &str, values: &[f64], lag: u32| {
            let samples: Vec<LagSample> = values
                .iter()
                .enumerate()
                .map(|(i, &value)| LagSample { follower_week: i as u32 + lag, lag, value })
                .collect();
            let correlation = values.iter().sum::<f64>() / values.len() as f64;
            DyadResult {
                leader: leader.into(),
                follower: follower.into(),
                per_lag_samples: [(lag, samples)].into_iter().collect(),
                best_lag: lag,
                correlation,
            }
        };
        let f = dyad("a", "b", &fwd, lags.0);
        let b = dyad("b", "a", &bwd, lags.1);
        prop_assert_eq!(accept_edge(&f, &b, alpha), accept_edge(&b, &f, alpha).flipped());
    }

    #[test]
    fn flat_cuts_are_nested(points in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..10), h1 in 0.0f64..1.5, h2 in 0.0f64..1.5) {
        let (lo, hi) = if h1 <= h2 { (h1, h2) } else { (h2, h1) };
        let names: Vec<String> = (0..points.len()).map(|i| format!("p{i}")).collect();
        let d = points
            .iter()
            .map(|p| points.iter().map(|q| ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()).collect())
            .collect();
        let tree = average_linkage(&DistanceMatrix::new(names, d).unwrap());
        prop_assert!(tree.heights_monotone());
        let fine = flat_cut(&tree, lo);
        let coarse = flat_cut(&tree, hi);
        for cluster in &fine {
            prop_assert!(coarse.iter().any(|c| cluster.iter().all(|x| c.contains(x))));
        }
    }

    #[test]
    fn city_order_does_not_change_the_tree(points in prop::collection::vec(0u8..6, 2..9), rot in 0usize..9) {
        // coarse integer positions force distance ties
        let n = points.len();
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let matrix = |order: &[usize]| {
            let d = order
                .iter()
                .map(|&i| order.iter().map(|&j| (points[i] as f64 - points[j] as f64).abs()).collect())
                .collect();
            DistanceMatrix::new(order.iter().map(|&i| names[i].clone()).collect(), d).unwrap()
        };
        let mut order: Vec<usize> = (0..n).collect();
        let a = average_linkage(&matrix(&order));
        order.rotate_left(rot % n);
        order.reverse();
        let b = average_linkage(&matrix(&order));
        let sets = |t: &geoflow_core::cluster::ClusterTree| -> Vec<(Vec<String>, f64)> {
            t.merge_sets()
                .into_iter()
                .map(|(m, h)| {
                    let mut m: Vec<String> = m.into_iter().map(String::from).collect();
                    m.sort();
                    (m, h)
                })
                .collect()
        };
        let (sa, sb) = (sets(&a), sets(&b));
        prop_assert_eq!(sa.len(), sb.len());
        for ((ma, ha), (mb, hb)) in sa.iter().zip(&sb) {
            prop_assert_eq!(ma, mb);
            prop_assert!((ha - hb).abs() <= 1e-12);
        }
    }
}
