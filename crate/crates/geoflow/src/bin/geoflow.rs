use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geoflow_core::charts::MissingWeekSet;
use geoflow_core::cluster::DistanceMode;
use geoflow_core::leadnet::{build_graph, feedback_arc_set, pagerank, PageRankConfig};
use geoflow_core::synth::{generate, shuffle_null, PlantedHierarchy, SynthConfig};
use geoflow::error::{GeoflowError, Result};
use geoflow::formats::graph::{read_graph, AnnotatedGraph};
use geoflow::formats::{inputs, json, write_file};
use geoflow::report::{full_report, percent, ReportRow};
use geoflow::run::{
    analyze, cluster_files, genre_windows, graph_files, load_inputs, select_cities, CitySelection, ExportFormats,
    InputPaths, RunConfig,
};
use geoflow::scan::parallel_scan;
use geoflow_core::pipeline::velocity_series;

const OUT_DIR_ENV: &str = "GEOFLOW_OUT_DIR";

/// Geographic leader-follower analysis of weekly preference charts.
#[derive(Debug, Parser)]
#[command(name = "geoflow", version)]
struct Cli {
    /// More log output (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate inputs and print a summary.
    Ingest(InputArgs),
    /// Compute lagged correlations for every ordered city pair and cache them as JSON.
    Dyads {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(short, long, default_value = "dyads.json")]
        out: PathBuf,
    },
    /// Build the leadership graph from a dyad cache and export it.
    Graph {
        #[arg(long)]
        dyads: PathBuf,
        #[command(flatten)]
        accept: AcceptArgs,
        #[arg(long)]
        populations: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values = ["csv", "dot", "graphml"])]
        formats: Vec<Format>,
        #[arg(long, env = OUT_DIR_ENV, default_value = "geoflow-out")]
        out_dir: PathBuf,
    },
    /// Minimum feedback arc set of a graph (edge CSV or GraphML).
    Fas {
        graph: PathBuf,
        /// Also write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// PageRank and weighted in-degree of a graph (edge CSV or GraphML).
    Pagerank {
        graph: PathBuf,
        #[arg(long, default_value_t = 0.85)]
        damping: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Summed distance matrix, average-linkage dendrogram and flat partition.
    Cluster {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Mode::Sum)]
        mode: Mode,
        /// Merge height at which to cut the dendrogram.
        #[arg(long)]
        cut: Option<f64>,
        #[arg(long, env = OUT_DIR_ENV, default_value = "geoflow-out")]
        out_dir: PathBuf,
    },
    /// Generate synthetic charts with a planted leadership hierarchy.
    Synth(SynthArgs),
    /// Permute each city's week labels to destroy temporal alignment.
    Shuffle {
        #[arg(long)]
        charts: PathBuf,
        #[arg(long)]
        missing_weeks: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Print acyclicity and size-leadership tables.
    Report {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        accept: AcceptArgs,
        /// Region label for the acyclicity table.
        #[arg(long, default_value = "All")]
        region: String,
        /// Genres to report, one row each; all artists when omitted.
        #[arg(long = "report-genre", value_delimiter = ',')]
        report_genres: Vec<String>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Full pipeline: every export plus a run manifest.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    charts: PathBuf,
    #[arg(long)]
    missing_weeks: Option<PathBuf>,
    #[arg(long)]
    genres: Option<PathBuf>,
    #[arg(long)]
    populations: Option<PathBuf>,
    /// Restrict to a genre from the catalog.
    #[arg(long)]
    genre: Option<String>,
    /// Comma-separated city subset.
    #[arg(long, value_delimiter = ',', conflicts_with = "top_active")]
    cities: Option<Vec<String>>,
    /// Use the n cities with the most listeners.
    #[arg(long)]
    top_active: Option<usize>,
}

impl InputArgs {
    fn paths(&self) -> InputPaths {
        InputPaths {
            charts: self.charts.clone(),
            missing_weeks: self.missing_weeks.clone(),
            genres: self.genres.clone(),
            populations: self.populations.clone(),
        }
    }

    fn selection(&self) -> CitySelection {
        match (&self.cities, self.top_active) {
            (Some(list), _) => CitySelection::List(list.clone()),
            (None, Some(n)) => CitySelection::MostActive(n),
            (None, None) => CitySelection::All,
        }
    }
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 1)]
    lag_min: u32,
    #[arg(long, default_value_t = 5)]
    lag_max: u32,
    #[arg(long, default_value_t = 20)]
    min_samples: usize,
}

#[derive(Debug, Args)]
struct AcceptArgs {
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Divide alpha by the number of ordered city pairs.
    #[arg(long)]
    bonferroni: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Dot,
    Graphml,
}

fn export_formats(list: &[Format]) -> ExportFormats {
    ExportFormats {
        edges_csv: list.contains(&Format::Csv),
        dot: list.contains(&Format::Dot),
        graphml: list.contains(&Format::Graphml),
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Sum,
    Mean,
}

impl From<Mode> for DistanceMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Sum => DistanceMode::Sum,
            Mode::Mean => DistanceMode::Mean,
        }
    }
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Planted hierarchy as JSON; a chain of --n-cities otherwise.
    #[arg(long)]
    hierarchy: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    n_cities: usize,
    #[arg(long, default_value_t = 1)]
    lag: u32,
    #[arg(long, default_value_t = 0.9)]
    coupling: f64,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 0.05)]
    walk_step: f64,
    #[arg(long, default_value_t = 153)]
    n_weeks: u32,
    #[arg(long, default_value_t = 300)]
    n_artists: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weeks to mark as missing, one per line.
    #[arg(long)]
    missing_weeks: Option<PathBuf>,
    #[arg(long, env = OUT_DIR_ENV, default_value = "geoflow-out")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scan: ScanArgs,
    #[command(flatten)]
    accept: AcceptArgs,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    /// Require a populations file and write size.json.
    #[arg(long)]
    size_analysis: bool,
    #[arg(long, value_enum, default_value_t = Mode::Sum)]
    mode: Mode,
    #[arg(long)]
    cut: Option<f64>,
    #[arg(long, value_delimiter = ',', default_values = ["csv", "dot", "graphml"])]
    formats: Vec<Format>,
    /// Reuse a dyad cache instead of scanning.
    #[arg(long)]
    dyad_cache: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, env = OUT_DIR_ENV, default_value = "geoflow-out")]
    out_dir: PathBuf,
}

fn base_config(input: &InputArgs, scan: &ScanArgs, accept: Option<&AcceptArgs>, out_dir: &Path) -> RunConfig {
    let mut config = RunConfig::new(input.paths(), out_dir);
    config.cities = input.selection();
    config.genre = input.genre.clone();
    config.lags = scan.lag_min..=scan.lag_max;
    config.min_samples = scan.min_samples;
    if let Some(a) = accept {
        config.alpha = a.alpha;
        config.bonferroni = a.bonferroni;
    }
    config
}

fn write_outputs(dir: &Path, files: &[(&str, Vec<u8>)]) -> Result<()> {
    for (name, bytes) in files {
        let path = dir.join(name);
        write_file(&path, bytes)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn ingest(args: &InputArgs) -> Result<()> {
    let inputs = load_inputs(&args.paths())?;
    let charts = &inputs.charts;
    let windows = genre_windows(&inputs, args.genre.as_deref())?;
    let cities = select_cities(charts, &args.selection())?;
    match charts.period() {
        Some((first, last)) => println!("weeks {first}..={last} ({} in study period)", charts.study_weeks()),
        None => println!("no charts"),
    }
    println!("missing weeks: {}", charts.missing().len());
    println!("cities: {} ({} selected)", charts.cities().len(), cities.len());
    println!("artists: {}", charts.universe().len());
    println!("windows: {}", windows.len());
    if let Some(catalog) = &inputs.catalog {
        println!("genres: {}", catalog.genres().collect::<Vec<_>>().join(", "));
    }
    if let Some(p) = &inputs.populations {
        println!("populations: {}", p.len());
    }
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<()> {
    let hierarchy = match &args.hierarchy {
        Some(p) => json::read_json::<PlantedHierarchy>(p)?,
        None => PlantedHierarchy::chain(args.n_cities, args.lag, args.coupling),
    };
    let missing_weeks = match &args.missing_weeks {
        Some(p) => inputs::read_missing(p)?,
        None => MissingWeekSet::new(),
    };
    let config = SynthConfig {
        n_artists: args.n_artists,
        n_weeks: args.n_weeks,
        walk_step: args.walk_step,
        noise_sigma: args.noise,
        seed: args.seed,
        missing_weeks,
        ..SynthConfig::default()
    };
    let charts = generate(&hierarchy, &config)?;
    let populations: BTreeMap<String, u64> = hierarchy.cities.iter().map(|c| (c.name.clone(), c.population)).collect();
    write_outputs(
        &args.out_dir,
        &[
            ("charts.csv", inputs::charts_to_csv(&charts).into_bytes()),
            ("missing_weeks.txt", inputs::missing_to_text(&config.missing_weeks).into_bytes()),
            ("populations.csv", inputs::populations_to_csv(&populations).into_bytes()),
            ("hierarchy.json", json::to_json(&hierarchy).into_bytes()),
            ("synth_config.json", json::to_json(&config).into_bytes()),
        ],
    )
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(args) => ingest(&args),
        Command::Dyads {
            input,
            scan,
            workers,
            out,
        } => {
            let config = base_config(&input, &scan, None, Path::new("."));
            config.validate()?;
            let inputs = load_inputs(&config.inputs)?;
            let windows = genre_windows(&inputs, config.genre.as_deref())?;
            let cities = select_cities(&inputs.charts, &config.cities)?;
            let series = velocity_series(&windows, Some(&cities))?;
            let table = parallel_scan(&series, config.scan(), workers)?;
            json::write_json(&out, &table)?;
            println!("{} dyads over {} cities -> {}", table.dyads.len(), cities.len(), out.display());
            Ok(())
        }
        Command::Graph {
            dyads,
            accept,
            populations,
            formats,
            out_dir,
        } => {
            let table = json::read_json(&dyads)?;
            let graph = build_graph(
                &table,
                geoflow_core::leadnet::Acceptance {
                    alpha: accept.alpha,
                    bonferroni: accept.bonferroni,
                },
            )?;
            let pops = populations.as_deref().map(inputs::read_populations).transpose()?;
            let centrality = pagerank(&graph, &PageRankConfig::default());
            println!("{} nodes, {} edges", graph.nodes().len(), graph.edges().len());
            write_outputs(
                &out_dir,
                &graph_files(&graph, &centrality, pops.as_ref(), export_formats(&formats)),
            )
        }
        Command::Fas { graph, json: out } => {
            let graph = read_graph(&graph)?.to_graph()?;
            let report = feedback_arc_set(&graph);
            println!("{}", percent(report.percent_removed));
            if let Some(out) = out {
                json::write_json(&out, &report)?;
            }
            Ok(())
        }
        Command::Pagerank { graph, damping, json: out } => {
            if !(damping > 0.0 && damping < 1.0) {
                return Err(GeoflowError::Validation(format!("damping must lie in (0, 1), got {damping}")));
            }
            let annotated: AnnotatedGraph = read_graph(&graph)?;
            let graph = annotated.to_graph()?;
            let report = pagerank(
                &graph,
                &PageRankConfig {
                    damping,
                    ..PageRankConfig::default()
                },
            );
            let mut rows: Vec<_> = report.cities.iter().collect();
            rows.sort_by(|a, b| b.1.pagerank.total_cmp(&a.1.pagerank).then(a.0.cmp(b.0)));
            println!("city\tpagerank\tweighted_in_degree");
            for (city, c) in rows {
                println!("{city}\t{:.6}\t{:.6}", c.pagerank, c.weighted_in_degree);
            }
            if let Some(out) = out {
                json::write_json(&out, &report)?;
            }
            Ok(())
        }
        Command::Cluster {
            input,
            mode,
            cut,
            out_dir,
        } => {
            if cut.is_some_and(|h| !h.is_finite() || h < 0.0) {
                return Err(GeoflowError::Validation("cut height must be a non-negative number".into()));
            }
            let inputs = load_inputs(&input.paths())?;
            let windows = genre_windows(&inputs, input.genre.as_deref())?;
            let cities = select_cities(&inputs.charts, &input.selection())?;
            write_outputs(&out_dir, &cluster_files(&windows, &cities, mode.into(), cut))
        }
        Command::Synth(args) => synth(&args),
        Command::Shuffle {
            charts,
            missing_weeks,
            seed,
            out,
        } => {
            let missing = missing_weeks.as_deref().map(inputs::read_missing).transpose()?.unwrap_or_default();
            let set = inputs::read_charts(&charts, missing.clone())?;
            let shuffled = shuffle_null(set.charts(), &missing, seed);
            write_file(&out, inputs::charts_to_csv(&shuffled).as_bytes())?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Report {
            input,
            scan,
            accept,
            region,
            report_genres,
            workers,
        } => {
            let mut config = base_config(&input, &scan, Some(&accept), Path::new("."));
            config.workers = workers;
            config.validate()?;
            let inputs = load_inputs(&config.inputs)?;
            let genres: Vec<Option<String>> = if report_genres.is_empty() {
                vec![input.genre.clone()]
            } else {
                report_genres.into_iter().map(Some).collect()
            };
            let mut rows = Vec::new();
            for genre in genres {
                let analysis = analyze(&inputs, &config, genre.as_deref())?;
                rows.push(ReportRow {
                    region: region.clone(),
                    genre: genre.unwrap_or_else(|| "All".into()),
                    acyclicity: analysis.acyclicity,
                    size: analysis.size,
                });
            }
            print!("{}", full_report(&rows));
            Ok(())
        }
        Command::Run(args) => {
            let mut config = base_config(&args.input, &args.scan, Some(&args.accept), &args.out_dir);
            config.damping = args.damping;
            config.size_analysis = args.size_analysis;
            config.distance_mode = args.mode.into();
            config.cut_height = args.cut;
            config.formats = export_formats(&args.formats);
            config.dyad_cache = args.dyad_cache;
            config.workers = args.workers;
            let summary = geoflow::run_pipeline(&config)?;
            let a = &summary.analysis;
            println!(
                "{} cities, {} edges, {} removed to make acyclic",
                a.graph.nodes().len(),
                a.graph.edges().len(),
                percent(a.acyclicity.percent_removed)
            );
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
