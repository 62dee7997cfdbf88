//! Leadership graph exports: edge-list CSV, DOT and GraphML.
//!
//! Floats are written with Rust's shortest round-trip formatting, so each
//! export parses back to identical values.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use geoflow_core::leadnet::{CentralityReport, Edge, LeadershipGraph};
use quick_xml::events::Event;
use serde::{Deserialize, Serialize};

use crate::error::{GeoflowError, Result};

pub const EDGE_HEADER: [&str; 4] = ["follower", "leader", "weight", "lag_weeks"];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeAttrs {
    pub pagerank: Option<f64>,
    pub weighted_in_degree: Option<f64>,
    pub population: Option<u64>,
}

/// Graph plus per-node attributes, the unit every export carries.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedGraph {
    pub nodes: BTreeMap<String, NodeAttrs>,
    pub edges: Vec<Edge>,
}

impl AnnotatedGraph {
    pub fn new(
        graph: &LeadershipGraph,
        centrality: Option<&CentralityReport>,
        populations: Option<&BTreeMap<String, u64>>,
    ) -> Self {
        let nodes = graph
            .nodes()
            .iter()
            .map(|n| {
                let c = centrality.and_then(|c| c.get(n));
                let attrs = NodeAttrs {
                    pagerank: c.map(|c| c.pagerank),
                    weighted_in_degree: c.map(|c| c.weighted_in_degree),
                    population: populations.and_then(|p| p.get(n).copied()),
                };
                (n.clone(), attrs)
            })
            .collect();
        Self {
            nodes,
            edges: graph.edges().to_vec(),
        }
    }

    pub fn to_graph(&self) -> Result<LeadershipGraph> {
        Ok(LeadershipGraph::new(self.nodes.keys().cloned(), self.edges.clone())?)
    }
}

pub fn edges_to_csv(edges: &[Edge]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(EDGE_HEADER).expect("in-memory write");
    for e in edges {
        w.write_record([&e.follower, &e.leader, &e.weight.to_string(), &e.lag.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn parse_edges<R: Read>(input: R, path: &Path) -> Result<Vec<Edge>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| GeoflowError::parse(path, 1, e.to_string()))?;
    if header.iter().ne(EDGE_HEADER.iter().copied()) {
        return Err(GeoflowError::parse(path, 1, format!("expected header `{}`", EDGE_HEADER.join(","))));
    }
    let mut edges = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            GeoflowError::parse(path, e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |what: &str| GeoflowError::parse(path, line, format!("cannot parse {what}"));
        if record.len() != 4 {
            return Err(GeoflowError::parse(path, line, "expected 4 fields"));
        }
        edges.push(Edge {
            follower: record[0].to_string(),
            leader: record[1].to_string(),
            weight: record[2].parse().map_err(|_| bad("weight"))?,
            lag: record[3].parse().map_err(|_| bad("lag_weeks"))?,
        });
    }
    Ok(edges)
}

/// Graph whose nodes are the edge endpoints.
pub fn graph_from_edges(edges: Vec<Edge>) -> Result<LeadershipGraph> {
    let nodes: Vec<String> = edges
        .iter()
        .flat_map(|e| [e.follower.clone(), e.leader.clone()])
        .collect();
    Ok(LeadershipGraph::new(nodes, edges)?)
}

/// Reads a graph from an edge-list CSV or a GraphML file, by extension.
pub fn read_graph(path: &Path) -> Result<AnnotatedGraph> {
    let text = super::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("graphml")) {
        parse_graphml(&text, path)
    } else {
        let edges = parse_edges(text.as_bytes(), path)?;
        let graph = graph_from_edges(edges)?;
        Ok(AnnotatedGraph::new(&graph, None, None))
    }
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' | '\\' => {
                out.push('\\');
                out.push(ch);
            }
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn to_dot(graph: &AnnotatedGraph) -> String {
    let mut out = String::from("digraph leadership {\n");
    for (name, a) in &graph.nodes {
        let mut attrs = Vec::new();
        if let Some(v) = a.pagerank {
            attrs.push(format!("pagerank={v}"));
        }
        if let Some(v) = a.weighted_in_degree {
            attrs.push(format!("weighted_in_degree={v}"));
        }
        if let Some(v) = a.population {
            attrs.push(format!("population={v}"));
        }
        if attrs.is_empty() {
            out.push_str(&format!("  {};\n", dot_quote(name)));
        } else {
            out.push_str(&format!("  {} [{}];\n", dot_quote(name), attrs.join(", ")));
        }
    }
    for e in &graph.edges {
        out.push_str(&format!(
            "  {} -> {} [weight={}, lag_weeks={}];\n",
            dot_quote(&e.follower),
            dot_quote(&e.leader),
            e.weight,
            e.lag
        ));
    }
    out.push_str("}\n");
    out
}

/// Reads a quoted DOT identifier from the start of `s`, returning it and the
/// rest of the line.
fn take_quoted(s: &str) -> Option<(String, &str)> {
    let s = s.trim_start().strip_prefix('"')?;
    let mut out = String::new();
    let mut chars = s.char_indices();
    while let Some((i, ch)) = chars.next() {
        match ch {
            '\\' => out.push(match chars.next()?.1 {
                'n' => '\n',
                'r' => '\r',
                c => c,
            }),
            '"' => return Some((out, &s[i + 1..])),
            c => out.push(c),
        }
    }
    None
}

fn dot_attrs(s: &str) -> Option<BTreeMap<String, String>> {
    let s = s.trim().trim_end_matches(';').trim();
    if s.is_empty() {
        return Some(BTreeMap::new());
    }
    let inner = s.strip_prefix('[')?.strip_suffix(']')?;
    inner
        .split(',')
        .map(|kv| {
            let (k, v) = kv.split_once('=')?;
            Some((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

/// Parses DOT as written by [`to_dot`].
pub fn parse_dot(text: &str, path: &Path) -> Result<AnnotatedGraph> {
    let mut graph = AnnotatedGraph::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i as u64 + 1;
        let err = |m: &str| GeoflowError::parse(path, line_no, m.to_string());
        let line = raw.trim();
        if line.is_empty() || line.starts_with("digraph") || line == "}" {
            continue;
        }
        let (first, rest) = take_quoted(line).ok_or_else(|| err("expected quoted node id"))?;
        if let Some(rest) = rest.trim_start().strip_prefix("->") {
            let (second, rest) = take_quoted(rest).ok_or_else(|| err("expected quoted edge target"))?;
            let attrs = dot_attrs(rest).ok_or_else(|| err("bad attribute list"))?;
            let weight = attrs
                .get("weight")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err("edge needs a numeric weight"))?;
            let lag = attrs
                .get("lag_weeks")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err("edge needs integer lag_weeks"))?;
            graph.edges.push(Edge {
                follower: first,
                leader: second,
                weight,
                lag,
            });
        } else {
            let attrs = dot_attrs(rest).ok_or_else(|| err("bad attribute list"))?;
            let num = |k: &str| -> Result<Option<f64>> {
                attrs
                    .get(k)
                    .map(|v| v.parse().map_err(|_| err(&format!("bad {k}"))))
                    .transpose()
            };
            let population = attrs
                .get("population")
                .map(|v| v.parse().map_err(|_| err("bad population")))
                .transpose()?;
            graph.nodes.insert(
                first,
                NodeAttrs {
                    pagerank: num("pagerank")?,
                    weighted_in_degree: num("weighted_in_degree")?,
                    population,
                },
            );
        }
    }
    Ok(graph)
}

fn xml_escape(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

pub fn to_graphml(graph: &AnnotatedGraph) -> String {
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n\
         \x20 <key id=\"pagerank\" for=\"node\" attr.name=\"pagerank\" attr.type=\"double\"/>\n\
         \x20 <key id=\"weighted_in_degree\" for=\"node\" attr.name=\"weighted_in_degree\" attr.type=\"double\"/>\n\
         \x20 <key id=\"population\" for=\"node\" attr.name=\"population\" attr.type=\"long\"/>\n\
         \x20 <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n\
         \x20 <key id=\"lag_weeks\" for=\"edge\" attr.name=\"lag_weeks\" attr.type=\"int\"/>\n\
         \x20 <graph id=\"leadership\" edgedefault=\"directed\">\n",
    );
    for (name, a) in &graph.nodes {
        out.push_str(&format!("    <node id=\"{}\">", xml_escape(name)));
        if let Some(v) = a.pagerank {
            out.push_str(&format!("<data key=\"pagerank\">{v}</data>"));
        }
        if let Some(v) = a.weighted_in_degree {
            out.push_str(&format!("<data key=\"weighted_in_degree\">{v}</data>"));
        }
        if let Some(v) = a.population {
            out.push_str(&format!("<data key=\"population\">{v}</data>"));
        }
        out.push_str("</node>\n");
    }
    for e in &graph.edges {
        out.push_str(&format!(
            "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data><data key=\"lag_weeks\">{}</data></edge>\n",
            xml_escape(&e.follower),
            xml_escape(&e.leader),
            e.weight,
            e.lag
        ));
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

enum Open {
    Node(String, NodeAttrs),
    Edge(String, String, Option<f64>, Option<u32>),
}

/// Parses GraphML as written by [`to_graphml`].
pub fn parse_graphml(text: &str, path: &Path) -> Result<AnnotatedGraph> {
    let mut reader = quick_xml::Reader::from_str(text);
    let mut graph = AnnotatedGraph::default();
    let mut open: Option<Open> = None;
    let mut data_key: Option<String> = None;
    let err = |pos: u64, m: String| GeoflowError::parse(path, pos, m);
    let attr = |e: &quick_xml::events::BytesStart, name: &str, pos: u64| -> Result<String> {
        for a in e.attributes() {
            let a = a.map_err(|x| err(pos, x.to_string()))?;
            if a.key.as_ref() == name.as_bytes() {
                return Ok(a.unescape_value().map_err(|x| err(pos, x.to_string()))?.into_owned());
            }
        }
        Err(err(pos, format!("missing attribute `{name}`")))
    };
    loop {
        let pos = reader.buffer_position();
        let event = reader.read_event().map_err(|e| err(pos, e.to_string()))?;
        match event {
            Event::Start(e) if e.name().as_ref() == b"node" => {
                open = Some(Open::Node(attr(&e, "id", pos)?, NodeAttrs::default()));
            }
            Event::Empty(e) if e.name().as_ref() == b"node" => {
                graph.nodes.insert(attr(&e, "id", pos)?, NodeAttrs::default());
            }
            Event::Start(e) if e.name().as_ref() == b"edge" => {
                open = Some(Open::Edge(attr(&e, "source", pos)?, attr(&e, "target", pos)?, None, None));
            }
            Event::Start(e) if e.name().as_ref() == b"data" => {
                data_key = Some(attr(&e, "key", pos)?);
            }
            Event::Text(t) => {
                let (Some(key), Some(o)) = (data_key.as_deref(), open.as_mut()) else {
                    continue;
                };
                let value = t.unescape().map_err(|x| err(pos, x.to_string()))?;
                let value = value.trim();
                let bad = || err(pos, format!("cannot parse {key} value `{value}`"));
                match (o, key) {
                    (Open::Node(_, a), "pagerank") => a.pagerank = Some(value.parse().map_err(|_| bad())?),
                    (Open::Node(_, a), "weighted_in_degree") => {
                        a.weighted_in_degree = Some(value.parse().map_err(|_| bad())?)
                    }
                    (Open::Node(_, a), "population") => a.population = Some(value.parse().map_err(|_| bad())?),
                    (Open::Edge(_, _, w, _), "weight") => *w = Some(value.parse().map_err(|_| bad())?),
                    (Open::Edge(_, _, _, l), "lag_weeks") => *l = Some(value.parse().map_err(|_| bad())?),
                    _ => {}
                }
            }
            Event::End(e) if e.name().as_ref() == b"data" => data_key = None,
            Event::End(e) if matches!(e.name().as_ref(), b"node" | b"edge") => match open.take() {
                Some(Open::Node(id, a)) => {
                    graph.nodes.insert(id, a);
                }
                Some(Open::Edge(follower, leader, Some(weight), Some(lag))) => graph.edges.push(Edge {
                    follower,
                    leader,
                    weight,
                    lag,
                }),
                _ => return Err(err(pos, "edge without weight or lag_weeks".into())),
            },
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(graph)
}
