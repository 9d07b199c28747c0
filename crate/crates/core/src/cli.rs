//! Pipeline stages behind the `gridtopo` command line.
//!
//! Output layout under `--out`:
//!
//! ```text
//! metrics.csv | metrics.json          one row per network
//! metrics/<NET>.json                  full metric report
//! distances/<NET>.csv                 hop-distance PDF
//! gamma.csv | gamma.json              decay constants of the four variants
//! degree/<NET>_<variant>.csv          degree PDFs
//! percolation/<NET>/<scenario>/       records.csv, summary.json, hist_<metric>.csv
//! scores/                             z_table.csv, composites.csv|json, scatter.csv
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::degree::{degree_pdf, gamma_suite, GammaSuite};
use crate::error::{GridError, Result};
use crate::graph::{derive_variant, parse_edge_list, GridGraph, Variant};
use crate::metrics::compute_metrics;
use crate::percolation::{
    run_scenario_with, RemovalEngine, RemovalKind, RemovalScenario, ScenarioId, CANONICAL_FRACTIONS,
    DEFAULT_RUNS,
};
use crate::report::{self, write_atomic, NetworkRow, ScenarioSummaryFile};
use crate::scoring::{composite, PerformanceTable, RawTable};

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "GRIDTOPO_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "gridtopo",
    version,
    about = "High-voltage grid topology and fragility analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Topological metric table, distance distributions and decay constants.
    Metrics(CommonArgs),
    /// Exponential degree-distribution fits for the four graph variants.
    DegreeFit(CommonArgs),
    /// Monte Carlo node and edge removal scenarios.
    Percolate(CommonArgs),
    /// Standardised performance, composites and groups from percolation output.
    Score(CommonArgs),
    /// Run every stage.
    Report(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Directory of edge-list CSV files, one per network.
    #[arg(long)]
    pub input_dir: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Master seed for every randomised stage.
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo runs per scenario.
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    pub runs: usize,
    /// Comma-separated removal fractions, applied to nodes and edges.
    #[arg(long, value_delimiter = ',', default_values_t = CANONICAL_FRACTIONS.to_vec())]
    pub fractions: Vec<f64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Format of the summary tables.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// `(network code, path)`, sorted by code.
    pub inputs: Vec<(String, PathBuf)>,
    pub out_dir: PathBuf,
    pub master_seed: u64,
    pub runs: usize,
    pub scenarios: Vec<ScenarioId>,
    pub workers: Option<usize>,
    pub format: OutputFormat,
}

/// Network code from a file name: the stem, upper-cased.
pub fn network_code(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().to_uppercase())
        .unwrap_or_default()
}

/// True for two-letter country-style codes.
pub fn is_dataset_code(code: &str) -> bool {
    code.len() == 2 && code.bytes().all(|b| b.is_ascii_uppercase())
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self> {
        let inputs = list_inputs(&args.input_dir)?;
        if args.runs == 0 {
            return Err(GridError::validation("--runs must be at least 1"));
        }
        if args.workers == Some(0) {
            return Err(GridError::validation("--workers must be at least 1"));
        }
        if args.fractions.is_empty() {
            return Err(GridError::validation("--fractions must not be empty"));
        }
        let mut scenarios = Vec::new();
        for kind in [RemovalKind::Node, RemovalKind::Edge] {
            for &f in &args.fractions {
                scenarios.push(ScenarioId::new(kind, f)?);
            }
        }
        scenarios.dedup();
        Ok(RunConfig {
            inputs,
            out_dir: args.out.clone(),
            master_seed: args.seed,
            runs: args.runs,
            scenarios,
            workers: args.workers,
            format: args.format,
        })
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = self.workers {
            b = b.num_threads(w);
        }
        b.build()
            .map_err(|e| GridError::validation(format!("worker pool: {e}")))
    }

    fn out(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.out_dir.join(rel)
    }
}

fn list_inputs(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|e| GridError::io(dir, e))?;
    let mut inputs = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| GridError::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            inputs.push((network_code(&path), path));
        }
    }
    if inputs.is_empty() {
        return Err(GridError::validation(format!(
            "no .csv inputs in {}",
            dir.display()
        )));
    }
    inputs.sort();
    Ok(inputs)
}

/// Networks that failed a stage, with the reason.
#[derive(Debug, Default)]
pub struct StageReport {
    pub succeeded: Vec<String>,
    pub failed: Vec<(String, GridError)>,
}

impl StageReport {
    pub fn ok(&self) -> bool {
        self.failed.is_empty()
    }

    fn merge(&mut self, other: StageReport) {
        self.succeeded.extend(other.succeeded);
        self.failed.extend(other.failed);
    }
}

pub fn load_graph(path: &Path) -> Result<GridGraph> {
    let f = fs::File::open(path).map_err(|e| GridError::io(path, e))?;
    parse_edge_list(std::io::BufReader::new(f)).map_err(|e| e.labeled(path.display().to_string()))
}

fn load_all(config: &RunConfig) -> (Vec<(String, GridGraph)>, StageReport) {
    let mut report = StageReport::default();
    let mut graphs = Vec::new();
    for (code, path) in &config.inputs {
        match load_graph(path) {
            Ok(g) => graphs.push((code.clone(), g)),
            Err(e) => report.failed.push((code.clone(), e)),
        }
    }
    (graphs, report)
}

fn partition<T>(results: Vec<(String, Result<T>)>, report: &mut StageReport) -> Vec<(String, T)> {
    let mut ok = Vec::new();
    for (code, r) in results {
        match r {
            Ok(v) => {
                report.succeeded.push(code.clone());
                ok.push((code, v));
            }
            Err(e) => report.failed.push((code, e)),
        }
    }
    ok
}

/// Metric table, per-network JSON and distance distributions.
pub fn cmd_metrics(config: &RunConfig) -> Result<StageReport> {
    let (graphs, mut report) = load_all(config);
    let results: Vec<(String, Result<NetworkRow>)> = config.pool()?.install(|| {
        graphs
            .par_iter()
            .map(|(code, g)| (code.clone(), metrics_row(config, code, g)))
            .collect()
    });
    let rows: Vec<NetworkRow> = partition(results, &mut report)
        .into_iter()
        .map(|(_, r)| r)
        .collect();
    match config.format {
        OutputFormat::Csv => write_atomic(
            &config.out("metrics.csv"),
            report::metrics_table_csv(&rows)?.as_bytes(),
        )?,
        OutputFormat::Json => write_atomic(&config.out("metrics.json"), report::to_json(&rows)?.as_bytes())?,
    }
    Ok(report)
}

fn metrics_row(config: &RunConfig, code: &str, g: &GridGraph) -> Result<NetworkRow> {
    let (metrics, dist) = compute_metrics(g).map_err(|e| e.labeled(code))?;
    let gammas = Variant::ALL
        .iter()
        .filter_map(|&v| {
            derive_variant(g, v.spec())
                .and_then(|gv| crate::degree::fit_exponential(&degree_pdf(&gv)))
                .ok()
                .map(|f| (v, f.gamma))
        })
        .collect();
    let row = NetworkRow {
        network: code.to_string(),
        metrics,
        gammas,
    };
    write_atomic(
        &config.out(format!("metrics/{code}.json")),
        report::to_json(&row)?.as_bytes(),
    )?;
    write_atomic(
        &config.out(format!("distances/{code}.csv")),
        report::distance_csv(&dist)?.as_bytes(),
    )?;
    Ok(row)
}

/// Decay-constant table and degree PDFs of every variant.
pub fn cmd_degree_fit(config: &RunConfig) -> Result<StageReport> {
    let (graphs, mut report) = load_all(config);
    let results: Vec<(String, Result<GammaSuite>)> = config.pool()?.install(|| {
        graphs
            .par_iter()
            .map(|(code, g)| (code.clone(), degree_outputs(config, code, g)))
            .collect()
    });
    let suites = partition(results, &mut report);
    match config.format {
        OutputFormat::Csv => write_atomic(
            &config.out("gamma.csv"),
            report::gamma_table_csv(&suites)?.as_bytes(),
        )?,
        OutputFormat::Json => {
            let map: BTreeMap<&str, &GammaSuite> = suites.iter().map(|(c, s)| (c.as_str(), s)).collect();
            write_atomic(&config.out("gamma.json"), report::to_json(&map)?.as_bytes())?
        }
    }
    Ok(report)
}

fn degree_outputs(config: &RunConfig, code: &str, g: &GridGraph) -> Result<GammaSuite> {
    for v in Variant::ALL {
        if let Ok(gv) = derive_variant(g, v.spec()) {
            write_atomic(
                &config.out(format!("degree/{code}_{v}.csv")),
                report::degree_pdf_csv(&degree_pdf(&gv))?.as_bytes(),
            )?;
        }
    }
    gamma_suite(g).map_err(|e| e.labeled(code))
}

fn scenario_dir(config: &RunConfig, code: &str, id: ScenarioId) -> PathBuf {
    config.out(format!("percolation/{code}/{}", id.name()))
}

/// Every configured scenario for every network.
pub fn cmd_percolate(config: &RunConfig) -> Result<StageReport> {
    let (graphs, mut report) = load_all(config);
    let pool = config.pool()?;
    for (code, g) in &graphs {
        match pool.install(|| percolate_network(config, code, g)) {
            Ok(()) => report.succeeded.push(code.clone()),
            Err(e) => report.failed.push((code.clone(), e)),
        }
    }
    Ok(report)
}

fn percolate_network(config: &RunConfig, code: &str, g: &GridGraph) -> Result<()> {
    let engines = [
        RemovalEngine::new(g, RemovalKind::Node)?,
        RemovalEngine::new(g, RemovalKind::Edge)?,
    ];
    for &id in &config.scenarios {
        let scenario = RemovalScenario {
            id,
            runs: config.runs,
            master_seed: config.master_seed,
        };
        let engine = &engines[(id.kind == RemovalKind::Edge) as usize];
        let result = run_scenario_with(engine, &scenario).map_err(|e| e.labeled(id.name()))?;
        let dir = scenario_dir(config, code, id);
        write_atomic(&dir.join("records.csv"), report::records_csv(&result)?.as_bytes())?;
        let summary = ScenarioSummaryFile::new(code, &result);
        write_atomic(&dir.join("summary.json"), report::to_json(&summary)?.as_bytes())?;
        for (metric, h) in result.histograms() {
            write_atomic(
                &dir.join(format!("hist_{metric}.csv")),
                report::histogram_csv(&h)?.as_bytes(),
            )?;
        }
    }
    Ok(())
}

/// Assemble the raw table from percolation summaries on disk.
pub fn load_raw_table(config: &RunConfig) -> Result<RawTable> {
    let mut raw = RawTable::default();
    for (code, _) in &config.inputs {
        for &id in &config.scenarios {
            let path = scenario_dir(config, code, id).join("summary.json");
            let text = fs::read_to_string(&path).map_err(|e| {
                GridError::validation(format!(
                    "missing percolation output for network {code}, scenario {id} ({}: {e})",
                    path.display()
                ))
            })?;
            let summary: ScenarioSummaryFile = serde_json::from_str(&text)?;
            summary.add_to(&mut raw);
        }
    }
    Ok(raw)
}

/// z-table, composites, groups and scatter data.
pub fn cmd_score(config: &RunConfig) -> Result<PerformanceTable> {
    let raw = load_raw_table(config)?;
    let table = composite(&raw)?;
    write_atomic(
        &config.out("scores/z_table.csv"),
        report::z_table_csv(&table)?.as_bytes(),
    )?;
    match config.format {
        OutputFormat::Csv => write_atomic(
            &config.out("scores/composites.csv"),
            report::composite_csv(&table)?.as_bytes(),
        )?,
        OutputFormat::Json => write_atomic(
            &config.out("scores/composites.json"),
            report::to_json(&report::composite_rows(&table))?.as_bytes(),
        )?,
    }
    write_atomic(
        &config.out("scores/scatter.csv"),
        report::scatter_csv(&table)?.as_bytes(),
    )?;
    Ok(table)
}

/// All stages in order. Scoring runs only when percolation succeeded for
/// every network.
pub fn cmd_report(config: &RunConfig) -> Result<StageReport> {
    let mut report = cmd_metrics(config)?;
    report.merge(cmd_degree_fit(config)?);
    let perc = cmd_percolate(config)?;
    let perc_ok = perc.ok();
    report.merge(perc);
    if perc_ok {
        cmd_score(config)?;
    }
    Ok(report)
}

/// Dispatch a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let (args, stage): (&CommonArgs, fn(&RunConfig) -> Result<StageReport>) = match &cli.command {
        Command::Metrics(a) => (a, cmd_metrics),
        Command::DegreeFit(a) => (a, cmd_degree_fit),
        Command::Percolate(a) => (a, cmd_percolate),
        Command::Score(a) => (a, |c| cmd_score(c).map(|_| StageReport::default())),
        Command::Report(a) => (a, cmd_report),
    };
    let config = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match stage(&config) {
        Ok(report) => {
            for (code, e) in &report.failed {
                eprintln!("error: {code}: {e}");
            }
            if report.ok() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
