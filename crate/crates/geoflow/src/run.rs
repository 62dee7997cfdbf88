//! End-to-end runs: load inputs, detect, analyze, export.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use geoflow_core::charts::{ChartSet, GenreCatalog, MissingWeekSet, WindowSeries};
use geoflow_core::cluster::{average_linkage, flat_cut, partition_map, summed_distances, DistanceMode};
use geoflow_core::lagcorr::{DyadTable, LagScan};
use geoflow_core::leadnet::{
    build_graph, feedback_arc_set, pagerank, size_leadership, Acceptance, AcyclicityReport, CentralityReport,
    LeadershipGraph, PageRankConfig, SizeLeadershipReport,
};
use geoflow_core::pipeline::velocity_series;
use serde::{Deserialize, Serialize};

use crate::error::{GeoflowError, Result};
use crate::formats::graph::{edges_to_csv, to_dot, to_graphml, AnnotatedGraph};
use crate::formats::{inputs, json, newick, write_file};
use crate::manifest::{FileDigest, Manifest, MANIFEST_FILE};
use crate::scan::parallel_scan;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputPaths {
    pub charts: PathBuf,
    pub missing_weeks: Option<PathBuf>,
    pub genres: Option<PathBuf>,
    pub populations: Option<PathBuf>,
}

impl InputPaths {
    pub fn charts(path: impl Into<PathBuf>) -> Self {
        Self {
            charts: path.into(),
            missing_weeks: None,
            genres: None,
            populations: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CitySelection {
    #[default]
    All,
    List(Vec<String>),
    /// The n cities with the most total listeners.
    MostActive(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportFormats {
    pub edges_csv: bool,
    pub dot: bool,
    pub graphml: bool,
}

impl Default for ExportFormats {
    fn default() -> Self {
        Self {
            edges_csv: true,
            dot: true,
            graphml: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub inputs: InputPaths,
    pub cities: CitySelection,
    pub genre: Option<String>,
    pub alpha: f64,
    pub bonferroni: bool,
    pub min_samples: usize,
    pub lags: RangeInclusive<u32>,
    pub damping: f64,
    /// Fail unless a populations file is given.
    pub size_analysis: bool,
    pub distance_mode: DistanceMode,
    /// Dendrogram height for the flat partition; no partition when `None`.
    pub cut_height: Option<f64>,
    pub formats: ExportFormats,
    /// Reuse a dyad table written by an earlier run or by `geoflow dyads`.
    pub dyad_cache: Option<PathBuf>,
    pub workers: Option<usize>,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn new(inputs: InputPaths, output_dir: impl Into<PathBuf>) -> Self {
        let scan = LagScan::default();
        let acceptance = Acceptance::default();
        Self {
            inputs,
            cities: CitySelection::All,
            genre: None,
            alpha: acceptance.alpha,
            bonferroni: acceptance.bonferroni,
            min_samples: scan.min_samples,
            lags: scan.lags,
            damping: PageRankConfig::default().damping,
            size_analysis: false,
            distance_mode: DistanceMode::Sum,
            cut_height: None,
            formats: ExportFormats::default(),
            dyad_cache: None,
            workers: None,
            output_dir: output_dir.into(),
        }
    }

    pub fn scan(&self) -> LagScan {
        LagScan {
            lags: self.lags.clone(),
            min_samples: self.min_samples,
        }
    }

    pub fn acceptance(&self) -> Acceptance {
        Acceptance {
            alpha: self.alpha,
            bonferroni: self.bonferroni,
        }
    }

    pub fn pagerank(&self) -> PageRankConfig {
        PageRankConfig {
            damping: self.damping,
            ..PageRankConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GeoflowError::Validation(m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.min_samples < 2 {
            return bad(format!("min-samples must be at least 2, got {}", self.min_samples));
        }
        if self.lags.is_empty() || *self.lags.start() == 0 {
            return bad(format!("lag range {:?} must be non-empty and start at 1 or later", self.lags));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return bad(format!("damping must lie in (0, 1), got {}", self.damping));
        }
        if self.cut_height.is_some_and(|h| !h.is_finite() || h < 0.0) {
            return bad("cut height must be a non-negative number".into());
        }
        if self.workers == Some(0) {
            return bad("worker count must be at least 1".into());
        }
        if self.size_analysis && self.inputs.populations.is_none() {
            return bad("size analysis requested but no populations file given (use --populations)".into());
        }
        if let CitySelection::MostActive(0) = self.cities {
            return bad("--top-active must be at least 1".into());
        }
        Ok(())
    }
}

/// Parsed inputs plus the digests of the files they came from.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub charts: ChartSet,
    pub catalog: Option<GenreCatalog>,
    pub populations: Option<BTreeMap<String, u64>>,
    pub digests: Vec<FileDigest>,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| GeoflowError::io(path, e))
}

pub fn load_inputs(paths: &InputPaths) -> Result<Inputs> {
    let mut digests = Vec::new();
    let missing = match &paths.missing_weeks {
        Some(p) => {
            let bytes = read_bytes(p)?;
            digests.push(FileDigest::of("missing_weeks", p, &bytes));
            let text = String::from_utf8(bytes).map_err(|_| GeoflowError::parse(p, 0, "not valid UTF-8"))?;
            inputs::parse_missing(&text, p)?
        }
        None => MissingWeekSet::new(),
    };
    let bytes = read_bytes(&paths.charts)?;
    digests.push(FileDigest::of("charts", &paths.charts, &bytes));
    let charts = inputs::parse_charts(bytes.as_slice(), &paths.charts)?;
    let charts = ChartSet::new(charts, missing)
        .map_err(|e| GeoflowError::Validation(format!("{}: {e}", paths.charts.display())))?;
    let catalog = match &paths.genres {
        Some(p) => {
            let bytes = read_bytes(p)?;
            digests.push(FileDigest::of("genres", p, &bytes));
            Some(inputs::parse_genres(bytes.as_slice(), p)?)
        }
        None => None,
    };
    let populations = match &paths.populations {
        Some(p) => {
            let bytes = read_bytes(p)?;
            digests.push(FileDigest::of("populations", p, &bytes));
            Some(inputs::parse_populations(bytes.as_slice(), p)?)
        }
        None => None,
    };
    Ok(Inputs {
        charts,
        catalog,
        populations,
        digests,
    })
}

/// Normalized windows, genre-filtered when `genre` is set.
pub fn genre_windows(inputs: &Inputs, genre: Option<&str>) -> Result<WindowSeries> {
    match genre {
        None => Ok(inputs.charts.windows(None)),
        Some(g) => {
            let catalog = inputs
                .catalog
                .as_ref()
                .ok_or_else(|| GeoflowError::Validation(format!("genre `{g}` requested but no genre catalog given")))?;
            let mask = catalog.column_mask(g, inputs.charts.universe())?;
            Ok(inputs.charts.windows(Some(&mask)))
        }
    }
}

/// Cities ranked by total listeners, ties by name.
pub fn most_active(charts: &ChartSet, n: usize) -> Vec<String> {
    let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
    for c in charts.charts() {
        *totals.entry(c.city.as_str()).or_default() += c.entries.iter().map(|(_, l)| u64::from(*l)).sum::<u64>();
    }
    let mut ranked: Vec<(&str, u64)> = totals.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let mut out: Vec<String> = ranked.into_iter().take(n).map(|(c, _)| c.to_string()).collect();
    out.sort();
    out
}

pub fn select_cities(charts: &ChartSet, selection: &CitySelection) -> Result<Vec<String>> {
    let mut cities = match selection {
        CitySelection::All => charts.cities().to_vec(),
        CitySelection::List(list) => {
            for c in list {
                if !charts.cities().contains(c) {
                    return Err(geoflow_core::Error::UnknownCity(c.clone()).into());
                }
            }
            list.clone()
        }
        CitySelection::MostActive(n) => most_active(charts, *n),
    };
    cities.sort();
    cities.dedup();
    Ok(cities)
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub cities: Vec<String>,
    pub windows: WindowSeries,
    pub dyads: DyadTable,
    pub graph: LeadershipGraph,
    pub centrality: CentralityReport,
    pub acyclicity: AcyclicityReport,
    pub size: Option<SizeLeadershipReport>,
}

/// Detection and graph analyses for one genre (or all artists).
pub fn analyze(inputs: &Inputs, config: &RunConfig, genre: Option<&str>) -> Result<Analysis> {
    config.validate()?;
    let cities = select_cities(&inputs.charts, &config.cities)?;
    let windows = genre_windows(inputs, genre)?;
    let scan = config.scan();
    let dyads = match &config.dyad_cache {
        Some(path) => {
            let table: DyadTable = json::read_json(path)?;
            if table.scan != scan || table.cities != cities {
                return Err(GeoflowError::Validation(format!(
                    "{}: dyad cache was computed for different cities or scan parameters",
                    path.display()
                )));
            }
            table
        }
        None => {
            let series = velocity_series(&windows, Some(&cities))?;
            parallel_scan(&series, scan, config.workers)?
        }
    };
    let graph = build_graph(&dyads, config.acceptance())?;
    log::info!("{} cities, {} edges", graph.nodes().len(), graph.edges().len());
    let centrality = pagerank(&graph, &config.pagerank());
    let acyclicity = feedback_arc_set(&graph);
    let size = inputs
        .populations
        .as_ref()
        .map(|pops| size_leadership(&graph, &centrality, pops))
        .transpose()?;
    Ok(Analysis {
        cities,
        windows,
        dyads,
        graph,
        centrality,
        acyclicity,
        size,
    })
}

pub const EDGES_FILE: &str = "edges.csv";
pub const DOT_FILE: &str = "graph.dot";
pub const GRAPHML_FILE: &str = "graph.graphml";
pub const DYADS_FILE: &str = "dyads.json";
pub const CENTRALITY_FILE: &str = "centrality.json";
pub const ACYCLICITY_FILE: &str = "acyclicity.json";
pub const SIZE_FILE: &str = "size.json";
pub const DISTANCES_FILE: &str = "distances.json";
pub const DENDROGRAM_FILE: &str = "dendrogram.nwk";
pub const PARTITION_FILE: &str = "partition.json";

/// Clustering exports: distance matrix with pairwise window coverage,
/// Newick dendrogram, optional flat partition.
pub fn cluster_files(
    windows: &WindowSeries,
    cities: &[String],
    mode: DistanceMode,
    cut_height: Option<f64>,
) -> Vec<(&'static str, Vec<u8>)> {
    let report = summed_distances(windows, cities, mode);
    let tree = average_linkage(&report.matrix);
    let mut files = vec![
        (DISTANCES_FILE, json::to_json(&report).into_bytes()),
        (DENDROGRAM_FILE, newick::to_newick(&tree).into_bytes()),
    ];
    if let Some(h) = cut_height {
        let partition = partition_map(&flat_cut(&tree, h));
        files.push((PARTITION_FILE, json::to_json(&partition).into_bytes()));
    }
    files
}

/// Graph exports selected by `formats`.
pub fn graph_files(
    graph: &LeadershipGraph,
    centrality: &CentralityReport,
    populations: Option<&BTreeMap<String, u64>>,
    formats: ExportFormats,
) -> Vec<(&'static str, Vec<u8>)> {
    let annotated = AnnotatedGraph::new(graph, Some(centrality), populations);
    let mut files = Vec::new();
    if formats.edges_csv {
        files.push((EDGES_FILE, edges_to_csv(graph.edges()).into_bytes()));
    }
    if formats.dot {
        files.push((DOT_FILE, to_dot(&annotated).into_bytes()));
    }
    if formats.graphml {
        files.push((GRAPHML_FILE, to_graphml(&annotated).into_bytes()));
    }
    files
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub analysis: Analysis,
    pub manifest: Manifest,
    pub files: Vec<PathBuf>,
}

/// Runs the whole pipeline and writes every artifact plus `manifest.json`
/// into `config.output_dir`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let inputs = load_inputs(&config.inputs)?;
    let mut input_digests = inputs.digests.clone();
    if let Some(p) = &config.dyad_cache {
        input_digests.push(FileDigest::of("dyad_cache", p, &read_bytes(p)?));
    }
    let analysis = analyze(&inputs, config, config.genre.as_deref())?;

    let mut files = graph_files(
        &analysis.graph,
        &analysis.centrality,
        inputs.populations.as_ref(),
        config.formats,
    );
    files.push((DYADS_FILE, json::to_json(&analysis.dyads).into_bytes()));
    files.push((CENTRALITY_FILE, json::to_json(&analysis.centrality).into_bytes()));
    files.push((ACYCLICITY_FILE, json::to_json(&analysis.acyclicity).into_bytes()));
    if let Some(size) = &analysis.size {
        files.push((SIZE_FILE, json::to_json(size).into_bytes()));
    }
    files.extend(cluster_files(
        &analysis.windows,
        &analysis.cities,
        config.distance_mode,
        config.cut_height,
    ));

    let mut written = Vec::with_capacity(files.len() + 1);
    let mut output_digests = Vec::with_capacity(files.len());
    for (name, bytes) in &files {
        let path = config.output_dir.join(name);
        write_file(&path, bytes)?;
        output_digests.push(FileDigest::of("output", Path::new(name), bytes));
        written.push(path);
    }
    let manifest = Manifest::new(config.clone(), input_digests, output_digests);
    let path = config.output_dir.join(MANIFEST_FILE);
    json::write_json(&path, &manifest)?;
    written.push(path);
    Ok(RunSummary {
        analysis,
        manifest,
        files: written,
    })
}
