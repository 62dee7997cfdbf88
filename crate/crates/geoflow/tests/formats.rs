//! Every export parses back to what was written.

use std::collections::BTreeMap;
use std::path::Path;

use geoflow::formats::graph::{edges_to_csv, parse_dot, parse_edges, parse_graphml, to_dot, to_graphml, AnnotatedGraph, NodeAttrs};
use geoflow::formats::inputs::{charts_to_csv, missing_to_text, parse_charts, parse_missing, parse_populations, populations_to_csv};
use geoflow::formats::json::{from_json, to_json};
use geoflow::formats::newick::{parse_newick, to_newick, tree_to_newick};
use geoflow_core::charts::{MissingWeekSet, WeeklyChart};
use geoflow_core::cluster::{average_linkage, DistanceMatrix};
use geoflow_core::lagcorr::{DyadTable, LagScan};
use geoflow_core::leadnet::{feedback_arc_set, pagerank, Edge, LeadershipGraph, PageRankConfig};
use geoflow_core::pipeline::velocity_series;
use geoflow_core::synth::{generate, PlantedHierarchy, SynthConfig};
use geoflow_core::charts::ChartSet;
use proptest::prelude::*;

fn name() -> impl Strategy<Value = String> {
    // no leading or trailing blanks: CSV fields are trimmed on input
    "[A-Za-zÀ-ÿ0-9][A-Za-zÀ-ÿ0-9 ,;:'\"<>&()\\[\\]\\\\-]{0,10}[A-Za-zÀ-ÿ0-9]"
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![1e-300f64..1e300, 1e-6f64..1.0, Just(f64::MIN_POSITIVE), Just(0.1 + 0.2)]
}

fn annotated() -> impl Strategy<Value = AnnotatedGraph> {
    prop::collection::btree_set(name(), 1..8).prop_flat_map(|names| {
        let names: Vec<String> = names.into_iter().collect();
        let n = names.len();
        let attrs = prop::collection::vec(
            (prop::option::of(finite()), prop::option::of(finite()), prop::option::of(1u64..u64::MAX)),
            n,
        );
        let edges = prop::collection::vec((0..n, 0..n, finite(), 1u32..=5), 0..12);
        (Just(names), attrs, edges).prop_map(|(names, attrs, edges)| AnnotatedGraph {
            nodes: names
                .iter()
                .cloned()
                .zip(attrs.into_iter().map(|(pagerank, weighted_in_degree, population)| NodeAttrs {
                    pagerank,
                    weighted_in_degree,
                    population,
                }))
                .collect(),
            edges: edges
                .into_iter()
                .map(|(f, l, weight, lag)| Edge { follower: names[f].clone(), leader: names[l].clone(), weight, lag })
                .collect(),
        })
    })
}

proptest! {
    #[test]
    fn dot_roundtrip(g in annotated()) {
        prop_assert_eq!(parse_dot(&to_dot(&g), Path::new("g.dot")).unwrap(), g);
    }

    #[test]
    fn graphml_roundtrip(g in annotated()) {
        prop_assert_eq!(parse_graphml(&to_graphml(&g), Path::new("g.graphml")).unwrap(), g);
    }

    #[test]
    fn edge_csv_roundtrip(g in annotated()) {
        prop_assert_eq!(parse_edges(edges_to_csv(&g.edges).as_bytes(), Path::new("e.csv")).unwrap(), g.edges);
    }

    #[test]
    fn chart_csv_roundtrip(rows in prop::collection::btree_map((0u32..20, name(), name()), 1u32..u32::MAX, 0..40)) {
        let mut charts: BTreeMap<(u32, String), Vec<(String, u32)>> = BTreeMap::new();
        for ((week, city, artist), n) in rows {
            charts.entry((week, city)).or_default().push((artist, n));
        }
        let charts: Vec<WeeklyChart> = charts
            .into_iter()
            .map(|((week, city), entries)| WeeklyChart { week, city, entries })
            .collect();
        let text = charts_to_csv(&charts);
        prop_assert_eq!(parse_charts(text.as_bytes(), Path::new("c.csv")).unwrap(), charts);
    }

    #[test]
    fn missing_weeks_roundtrip(weeks in prop::collection::btree_set(any::<u32>(), 0..30)) {
        let set: MissingWeekSet = weeks.into_iter().collect();
        prop_assert_eq!(parse_missing(&missing_to_text(&set), Path::new("m.txt")).unwrap(), set);
    }

    #[test]
    fn populations_roundtrip(pops in prop::collection::btree_map(name(), 1u64..u64::MAX, 0..20)) {
        let text = populations_to_csv(&pops);
        prop_assert_eq!(parse_populations(text.as_bytes(), Path::new("p.csv")).unwrap(), pops);
    }

    #[test]
    fn newick_roundtrip(points in prop::collection::vec(0.0f64..100.0, 1..12), names in prop::collection::btree_set(name(), 12)) {
        let names: Vec<String> = names.into_iter().take(points.len()).collect();
        let d = points.iter().map(|a| points.iter().map(|b| (a - b).abs()).collect()).collect();
        let tree = average_linkage(&DistanceMatrix::new(names, d).unwrap());
        let text = to_newick(&tree);
        let parsed = parse_newick(&text, Path::new("t.nwk")).unwrap();
        prop_assert_eq!(parsed.clone(), tree_to_newick(&tree));
        let parsed = parsed.unwrap();
        let mut leaves: Vec<&str> = parsed.leaf_names();
        leaves.sort();
        let mut want: Vec<&str> = tree.leaves.iter().map(String::as_str).collect();
        want.sort();
        prop_assert_eq!(leaves, want);
        let root_height = tree.merges.last().map_or(0.0, |m| m.height);
        prop_assert!((parsed.internal_heights().first().copied().unwrap_or(0.0) - root_height).abs() <= 1e-9 * root_height.max(1.0));
    }
}

#[test]
fn analysis_json_roundtrips() {
    let charts = generate(&PlantedHierarchy::chain(4, 1, 0.9), &SynthConfig { n_weeks: 60, seed: 2, ..SynthConfig::default() }).unwrap();
    let windows = ChartSet::new(charts, MissingWeekSet::new()).unwrap().windows(None);
    let table = DyadTable::scan(&velocity_series(&windows, None).unwrap(), LagScan::default());
    let back: DyadTable = from_json(&to_json(&table), Path::new("d.json")).unwrap();
    assert_eq!(back, table);

    let graph = geoflow_core::leadnet::build_graph(&table, Default::default()).unwrap();
    let centrality = pagerank(&graph, &PageRankConfig::default());
    let acyclicity = feedback_arc_set(&graph);
    assert_eq!(from_json::<geoflow_core::leadnet::CentralityReport>(&to_json(&centrality), Path::new("c")).unwrap(), centrality);
    assert_eq!(from_json::<geoflow_core::leadnet::AcyclicityReport>(&to_json(&acyclicity), Path::new("a")).unwrap(), acyclicity);
    let back: LeadershipGraph = from_json(&to_json(&graph), Path::new("g")).unwrap();
    assert_eq!(back, graph);
}

#[test]
fn malformed_inputs_name_file_and_line() {
    let err = parse_dot("digraph leadership {\n  \"a\" -> \"b\" [weight=x, lag_weeks=1];\n}\n", Path::new("g.dot")).unwrap_err();
    assert_eq!(err.to_string(), "g.dot:2: edge needs a numeric weight");
    let err = parse_edges("follower,leader,weight,lag_weeks\na,b,0.5,one\n".as_bytes(), Path::new("e.csv")).unwrap_err();
    assert_eq!(err.to_string(), "e.csv:2: cannot parse lag_weeks");
    assert!(parse_graphml("<graphml><graph><edge source=\"a\" target=\"b\"></edge></graph></graphml>", Path::new("g.graphml")).is_err());
}
