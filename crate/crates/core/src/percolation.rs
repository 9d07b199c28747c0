//! Random node/edge removal experiments.
//!
//! Each scenario removes a fixed share of nodes or circuits, chosen uniformly
//! without replacement, and records four performance metrics per run:
//!
//! * share of circuits lost, `1 − E_LCC/E₀` (circuits outside the post-removal
//!   largest component count as lost, along with removed ones),
//! * size of the largest connected component,
//! * relative efficiency drop `(eff₀ − eff₁)/eff₀`, with `eff₁` normalised by
//!   the original node count so removed nodes contribute zero,
//! * relative clustering drop `(C₀ − C₁)/C₀`, averaged over surviving nodes.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csr::{component_labels, inverse_distance_sum, BfsScratch, Csr};
use crate::error::{GridError, Result};
use crate::graph::{Edge, GridGraph};
use crate::histogram::{Histogram, Summary, DEFAULT_BINS};
use crate::metrics::{clustering, clustering_sum, efficiency};
use crate::seed::run_seed;

pub const CANONICAL_FRACTIONS: [f64; 5] = [0.01, 0.02, 0.05, 0.10, 0.20];
pub const DEFAULT_RUNS: usize = 10_000;
const PPM: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalKind {
    Node,
    Edge,
}

impl RemovalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RemovalKind::Node => "node",
            RemovalKind::Edge => "edge",
        }
    }
}

impl fmt::Display for RemovalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scenario identity independent of run count and seed. The fraction is held
/// in parts per million so it can key ordered maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ScenarioId {
    pub kind: RemovalKind,
    pub fraction_ppm: u32,
}

impl ScenarioId {
    pub fn new(kind: RemovalKind, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(GridError::validation(format!(
                "removal fraction must lie in (0, 1), got {fraction}"
            )));
        }
        Ok(ScenarioId {
            kind,
            fraction_ppm: (fraction * PPM as f64).round() as u32,
        })
    }

    pub fn fraction(self) -> f64 {
        self.fraction_ppm as f64 / PPM as f64
    }

    /// The ten canonical scenarios: node removals first, then edge removals.
    pub fn canonical() -> Vec<ScenarioId> {
        [RemovalKind::Node, RemovalKind::Edge]
            .into_iter()
            .flat_map(|k| CANONICAL_FRACTIONS.map(|f| ScenarioId::new(k, f).unwrap()))
            .collect()
    }

    pub fn is_canonical(self) -> bool {
        CANONICAL_FRACTIONS
            .iter()
            .any(|&f| (f * PPM as f64).round() as u32 == self.fraction_ppm)
    }

    /// Stable key mixed into per-run seeds.
    pub fn seed_key(self) -> u64 {
        let kind = match self.kind {
            RemovalKind::Node => 1u64,
            RemovalKind::Edge => 2u64,
        };
        (kind << 32) | self.fraction_ppm as u64
    }

    /// File-system friendly name, e.g. `node_0.05`.
    pub fn name(self) -> String {
        format!("{}_{}", self.kind, self.fraction())
    }

    pub fn parse_name(s: &str) -> Option<ScenarioId> {
        let (kind, frac) = s.split_once('_')?;
        let kind = match kind {
            "node" => RemovalKind::Node,
            "edge" => RemovalKind::Edge,
            _ => return None,
        };
        ScenarioId::new(kind, frac.parse().ok()?).ok()
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovalScenario {
    pub id: ScenarioId,
    pub runs: usize,
    pub master_seed: u64,
}

impl RemovalScenario {
    pub fn new(kind: RemovalKind, fraction: f64, runs: usize, master_seed: u64) -> Result<Self> {
        if runs == 0 {
            return Err(GridError::validation("a scenario needs at least one run"));
        }
        Ok(RemovalScenario {
            id: ScenarioId::new(kind, fraction)?,
            runs,
            master_seed,
        })
    }

    pub fn kind(&self) -> RemovalKind {
        self.id.kind
    }

    pub fn fraction(&self) -> f64 {
        self.id.fraction()
    }
}

/// Number of elements to remove: `total × fraction` rounded half up, clamped
/// to `[1, total − 1]`.
pub fn removal_count(total: usize, fraction: f64) -> Result<usize> {
    let ppm = ScenarioId::new(RemovalKind::Node, fraction)?.fraction_ppm as u64;
    removal_count_ppm(total, ppm)
}

fn removal_count_ppm(total: usize, ppm: u64) -> Result<usize> {
    if total < 2 {
        return Err(GridError::validation(format!(
            "cannot remove a strict subset of {total} element(s)"
        )));
    }
    let rounded = ((total as u64 * ppm + PPM / 2) / PPM) as usize;
    Ok(rounded.clamp(1, total - 1))
}

/// One Monte Carlo realisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub edges_lost_share: f64,
    pub lcc_size: usize,
    pub eff_drop: f64,
    /// `None` when the baseline clustering is zero.
    pub clustering_drop: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    EdgesLostShare,
    LccSize,
    EffDrop,
    ClusteringDrop,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::EdgesLostShare,
        Metric::LccSize,
        Metric::EffDrop,
        Metric::ClusteringDrop,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::EdgesLostShare => "edges_lost_share",
            Metric::LccSize => "lcc_size",
            Metric::EffDrop => "eff_drop",
            Metric::ClusteringDrop => "clustering_drop",
        }
    }

    pub fn value(self, r: &RunRecord) -> Option<f64> {
        match self {
            Metric::EdgesLostShare => Some(r.edges_lost_share),
            Metric::LccSize => Some(r.lcc_size as f64),
            Metric::EffDrop => Some(r.eff_drop),
            Metric::ClusteringDrop => r.clustering_drop,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Reference values of the intact graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub efficiency: f64,
    pub clustering: f64,
}

pub fn baseline(g: &GridGraph) -> Result<Baseline> {
    let efficiency = efficiency(g)?;
    if g.edge_count() == 0 || !(efficiency > 0.0) {
        return Err(GridError::validation("baseline graph needs at least one circuit"));
    }
    Ok(Baseline {
        n_nodes: g.node_count(),
        n_edges: g.edge_count(),
        efficiency,
        clustering: clustering(g)?,
    })
}

/// Remove nodes (with their circuits) or circuits. Victims are node indices or
/// positions in [`GridGraph::edges`]. Surviving nodes stay even if isolated.
pub fn apply_removal(g: &GridGraph, kind: RemovalKind, victims: &[usize]) -> Result<GridGraph> {
    match kind {
        RemovalKind::Node => {
            let mut dead = vec![false; g.node_count()];
            for &v in victims {
                *dead
                    .get_mut(v)
                    .ok_or_else(|| GridError::validation(format!("node index {v} is not in the graph")))? =
                    true;
            }
            let mut remap = vec![usize::MAX; g.node_count()];
            let mut nodes = Vec::new();
            for (i, name) in g.nodes().iter().enumerate() {
                if !dead[i] {
                    remap[i] = nodes.len();
                    nodes.push(name.clone());
                }
            }
            let edges = g
                .edges()
                .iter()
                .filter(|e| !dead[e.a] && !dead[e.b])
                .map(|e| Edge {
                    a: remap[e.a],
                    b: remap[e.b],
                    ..e.clone()
                })
                .collect();
            Ok(GridGraph::from_parts(nodes, edges, g.is_simple()))
        }
        RemovalKind::Edge => {
            let mut dead = vec![false; g.edge_count()];
            for &e in victims {
                *dead
                    .get_mut(e)
                    .ok_or_else(|| GridError::validation(format!("edge index {e} is not in the graph")))? =
                    true;
            }
            let edges = g
                .edges()
                .iter()
                .zip(&dead)
                .filter(|(_, &d)| !d)
                .map(|(e, _)| e.clone())
                .collect();
            Ok(GridGraph::from_parts(g.nodes().to_vec(), edges, g.is_simple()))
        }
    }
}

/// Metrics of a damaged graph `g1` against the intact `g0`.
pub fn run_metrics(g0: &GridGraph, g1: &GridGraph, base: &Baseline) -> Result<RunRecord> {
    if !(base.efficiency > 0.0) || base.n_edges == 0 {
        return Err(GridError::validation(
            "baseline efficiency and circuit count must be positive",
        ));
    }
    debug_assert_eq!(g0.node_count(), base.n_nodes);
    let (labels, sizes) = g1.component_labels();
    let lcc_size = sizes.first().copied().unwrap_or(0);
    let in_lcc = g1
        .edges()
        .iter()
        .filter(|e| labels[e.a] == 0 && labels[e.b] == 0)
        .count();
    let csr = g1.simple_csr();
    let counts = BfsScratch::default().distance_counts(&csr, None);
    let n0 = base.n_nodes as f64;
    let eff1 = inverse_distance_sum(&counts) / (n0 * (n0 - 1.0));
    let c1 = if g1.node_count() == 0 {
        0.0
    } else {
        clustering(g1)?
    };
    Ok(make_record(base, in_lcc, lcc_size, eff1, c1))
}

fn make_record(base: &Baseline, in_lcc: usize, lcc_size: usize, eff1: f64, c1: f64) -> RunRecord {
    RunRecord {
        edges_lost_share: 1.0 - in_lcc as f64 / base.n_edges as f64,
        lcc_size,
        eff_drop: (base.efficiency - eff1) / base.efficiency,
        clustering_drop: (base.clustering > 0.0).then(|| (base.clustering - c1) / base.clustering),
    }
}

/// Fast evaluator of removals on one fixed graph, working on masks instead of
/// rebuilding a [`GridGraph`] per run.
pub struct RemovalEngine {
    n: usize,
    circuits: Vec<(usize, usize)>,
    kind: RemovalKind,
    base: Baseline,
}

/// Per-worker buffers.
#[derive(Default)]
pub struct EngineScratch {
    node_alive: Vec<bool>,
    edge_alive: Vec<bool>,
    mark: Vec<bool>,
    pool: Vec<usize>,
    bfs: BfsScratch,
}

impl RemovalEngine {
    pub fn new(g: &GridGraph, kind: RemovalKind) -> Result<Self> {
        Ok(RemovalEngine {
            n: g.node_count(),
            circuits: g.edges().iter().map(|e| (e.a, e.b)).collect(),
            kind,
            base: baseline(g)?,
        })
    }

    pub fn baseline(&self) -> &Baseline {
        &self.base
    }

    pub fn kind(&self) -> RemovalKind {
        self.kind
    }

    /// Number of removable elements (nodes or circuits).
    pub fn population(&self) -> usize {
        match self.kind {
            RemovalKind::Node => self.n,
            RemovalKind::Edge => self.circuits.len(),
        }
    }

    /// Evaluate one removal. Victim indices must be in range; duplicates are
    /// harmless.
    pub fn evaluate(&self, victims: &[usize], s: &mut EngineScratch) -> RunRecord {
        s.node_alive.clear();
        s.node_alive.resize(self.n, true);
        s.edge_alive.clear();
        s.edge_alive.resize(self.circuits.len(), true);
        s.mark.clear();
        s.mark.resize(self.n, false);
        match self.kind {
            RemovalKind::Node => victims.iter().for_each(|&v| s.node_alive[v] = false),
            RemovalKind::Edge => victims.iter().for_each(|&e| s.edge_alive[e] = false),
        }
        let node_alive = &s.node_alive;
        let live = |i: usize| {
            let (a, b) = self.circuits[i];
            s.edge_alive[i] && node_alive[a] && node_alive[b]
        };
        let csr = Csr::from_edges(
            self.n,
            (0..self.circuits.len())
                .filter(|&i| live(i))
                .map(|i| self.circuits[i]),
        );
        let (labels, sizes) = component_labels(&csr, Some(node_alive));
        let lcc_size = sizes.first().copied().unwrap_or(0);
        let in_lcc = (0..self.circuits.len())
            .filter(|&i| live(i) && labels[self.circuits[i].0] == 0)
            .count();
        let counts = s.bfs.distance_counts(&csr, None);
        let n0 = self.n as f64;
        let eff1 = inverse_distance_sum(&counts) / (n0 * (n0 - 1.0));
        let (sum, alive) = clustering_sum(&csr, Some(node_alive), &mut s.mark);
        let c1 = if alive == 0 { 0.0 } else { sum / alive as f64 };
        make_record(&self.base, in_lcc, lcc_size, eff1, c1)
    }

    /// Victims of one run: `count` distinct indices drawn uniformly from the
    /// population with a stream keyed by the run seed.
    pub fn sample_victims(&self, count: usize, seed: u64, s: &mut EngineScratch) -> Vec<usize> {
        let total = self.population();
        s.pool.clear();
        s.pool.extend(0..total);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..count {
            let j = rng.gen_range(i..total);
            s.pool.swap(i, j);
        }
        s.pool[..count].to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: RemovalScenario,
    pub removal_count: usize,
    pub baseline: Baseline,
    /// Indexed by run.
    pub records: Vec<RunRecord>,
}

impl ScenarioResult {
    pub fn values(&self, metric: Metric) -> Vec<f64> {
        self.records.iter().filter_map(|r| metric.value(r)).collect()
    }

    pub fn summary(&self, metric: Metric) -> Option<Summary> {
        Summary::from_values(&self.values(metric))
    }

    pub fn summaries(&self) -> BTreeMap<Metric, Option<Summary>> {
        Metric::ALL.iter().map(|&m| (m, self.summary(m))).collect()
    }

    /// Histograms of every metric with data, at the default bin count.
    pub fn histograms(&self) -> BTreeMap<Metric, Histogram> {
        Metric::ALL
            .iter()
            .filter_map(|&m| aggregate_pdf(&self.records, m, DEFAULT_BINS).ok().map(|h| (m, h)))
            .collect()
    }
}

/// Binned PDF of one metric over a set of runs.
pub fn aggregate_pdf(records: &[RunRecord], metric: Metric, bins: usize) -> Result<Histogram> {
    let values: Vec<f64> = records.iter().filter_map(|r| metric.value(r)).collect();
    if values.is_empty() {
        return Err(GridError::validation(format!("no defined values for {metric}")));
    }
    Histogram::from_values(&values, bins)
}

/// Run one scenario on the current rayon pool. Records are stored by run
/// index, so output is identical for any worker count.
pub fn run_scenario(g: &GridGraph, scenario: &RemovalScenario) -> Result<ScenarioResult> {
    let engine = RemovalEngine::new(g, scenario.kind())?;
    run_scenario_with(&engine, scenario)
}

pub fn run_scenario_with(engine: &RemovalEngine, scenario: &RemovalScenario) -> Result<ScenarioResult> {
    if engine.kind() != scenario.kind() {
        return Err(GridError::validation(format!(
            "engine removes {}s, scenario removes {}s",
            engine.kind(),
            scenario.kind()
        )));
    }
    let count = removal_count_ppm(engine.population(), scenario.id.fraction_ppm as u64)?;
    let key = scenario.id.seed_key();
    let records: Vec<RunRecord> = (0..scenario.runs)
        .into_par_iter()
        .map_init(EngineScratch::default, |s, r| {
            let seed = run_seed(scenario.master_seed, key, r as u64);
            let victims = engine.sample_victims(count, seed, s);
            engine.evaluate(&victims, s)
        })
        .collect();
    Ok(ScenarioResult {
        scenario: *scenario,
        removal_count: count,
        baseline: *engine.baseline(),
        records,
    })
}

/// Every single-element removal, in index order.
pub fn enumerate_single_removals(g: &GridGraph, kind: RemovalKind) -> Result<Vec<RunRecord>> {
    let engine = RemovalEngine::new(g, kind)?;
    let mut s = EngineScratch::default();
    Ok((0..engine.population())
        .map(|v| engine.evaluate(&[v], &mut s))
        .collect())
}
