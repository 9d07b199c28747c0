//! Plot- and table-ready serialisation of every pipeline product.
//!
//! CSV output uses `.` as decimal separator, LF line endings and a fixed
//! column order. Floats use Rust's shortest round-trip formatting, so the
//! same values always produce the same bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::degree::{DegreePdf, GammaSuite};
use crate::error::{GridError, Result};
use crate::graph::Variant;
use crate::histogram::{Histogram, Summary};
use crate::metrics::{DistanceDistribution, MetricsReport};
use crate::percolation::{Baseline, Metric, RemovalScenario, ScenarioId, ScenarioResult};
use crate::scoring::{reduce_result, PerformanceTable, RawTable};

/// Build a CSV document from a header and rows.
pub fn csv_string<I, R, S>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let err = |e: csv::Error| GridError::validation(format!("csv write: {e}"));
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| GridError::validation(format!("csv write: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Write via a temporary sibling file and rename it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| GridError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| GridError::io(&tmp, e))?;
    f.write_all(contents).map_err(|e| GridError::io(&tmp, e))?;
    f.sync_all().map_err(|e| GridError::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| GridError::io(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Per-network metric row including the four decay constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkRow {
    pub network: String,
    pub metrics: MetricsReport,
    /// Missing variants (empty after filtering, or not fittable) are absent.
    pub gammas: BTreeMap<Variant, f64>,
}

pub const GAMMA_COLUMNS: [&str; 4] = ["gamma_hv", "gamma_hv_simple", "gamma_tx", "gamma_tx_simple"];

pub fn gamma_values(suite: &GammaSuite) -> BTreeMap<Variant, f64> {
    suite.iter().map(|(&v, f)| (v, f.gamma)).collect()
}

fn gamma_cells(gammas: &BTreeMap<Variant, f64>) -> Vec<String> {
    Variant::ALL
        .iter()
        .map(|v| gammas.get(v).map(|g| g.to_string()).unwrap_or_default())
        .collect()
}

/// One row per network; columns follow the metric table order.
pub fn metrics_table_csv(rows: &[NetworkRow]) -> Result<String> {
    let mut header = vec!["network"];
    header.extend(MetricsReport::COLUMNS);
    header.extend(GAMMA_COLUMNS);
    csv_string(
        &header,
        rows.iter().map(|r| {
            let mut cells = vec![r.network.clone()];
            cells.extend(r.metrics.row());
            cells.extend(gamma_cells(&r.gammas));
            cells
        }),
    )
}

pub fn gamma_table_csv(rows: &[(String, GammaSuite)]) -> Result<String> {
    let mut header = vec!["network"];
    header.extend(GAMMA_COLUMNS);
    header.extend(["r2_hv", "r2_hv_simple", "r2_tx", "r2_tx_simple"]);
    csv_string(
        &header,
        rows.iter().map(|(net, suite)| {
            let mut cells = vec![net.clone()];
            cells.extend(gamma_cells(&gamma_values(suite)));
            cells.extend(
                Variant::ALL
                    .iter()
                    .map(|v| suite.get(v).map(|f| f.r_squared.to_string()).unwrap_or_default()),
            );
            cells
        }),
    )
}

pub fn distance_csv(dist: &DistanceDistribution) -> Result<String> {
    csv_string(
        &["distance", "probability"],
        dist.pdf()
            .into_iter()
            .map(|(d, p)| [d.to_string(), p.to_string()]),
    )
}

pub fn degree_pdf_csv(pdf: &DegreePdf) -> Result<String> {
    csv_string(
        &["degree", "probability"],
        pdf.pdf().into_iter().map(|(k, p)| [k.to_string(), p.to_string()]),
    )
}

pub fn histogram_csv(h: &Histogram) -> Result<String> {
    let w = h.bin_width();
    csv_string(
        &["bin_lo", "bin_hi", "center", "mass"],
        h.masses.iter().enumerate().map(|(i, m)| {
            let lo = h.lo + i as f64 * w;
            [
                lo.to_string(),
                (lo + w).to_string(),
                (lo + 0.5 * w).to_string(),
                m.to_string(),
            ]
        }),
    )
}

pub fn records_csv(result: &ScenarioResult) -> Result<String> {
    let mut header = vec!["run_index"];
    header.extend(Metric::ALL.map(Metric::as_str));
    csv_string(
        &header,
        result.records.iter().enumerate().map(|(i, r)| {
            [
                i.to_string(),
                r.edges_lost_share.to_string(),
                r.lcc_size.to_string(),
                r.eff_drop.to_string(),
                r.clustering_drop.map(|c| c.to_string()).unwrap_or_default(),
            ]
        }),
    )
}

/// Scenario summary file; the scoring stage reads `reduced` from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummaryFile {
    pub network: String,
    pub scenario: ScenarioId,
    pub scenario_name: String,
    pub canonical: bool,
    pub runs: usize,
    pub master_seed: u64,
    pub removal_count: usize,
    pub baseline: Baseline,
    pub summaries: BTreeMap<Metric, Option<Summary>>,
    /// Values entered into the standardisation table.
    pub reduced: BTreeMap<Metric, Option<f64>>,
}

impl ScenarioSummaryFile {
    pub fn new(network: &str, result: &ScenarioResult) -> Self {
        let RemovalScenario {
            id,
            runs,
            master_seed,
        } = result.scenario;
        ScenarioSummaryFile {
            network: network.to_string(),
            scenario: id,
            scenario_name: id.name(),
            canonical: id.is_canonical(),
            runs,
            master_seed,
            removal_count: result.removal_count,
            baseline: result.baseline,
            summaries: result.summaries(),
            reduced: reduce_result(result),
        }
    }

    pub fn add_to(&self, raw: &mut RawTable) {
        for (&m, &v) in &self.reduced {
            raw.insert(&self.network, self.scenario, m, v);
        }
    }
}

pub fn z_table_csv(table: &PerformanceTable) -> Result<String> {
    csv_string(
        &["network", "scenario", "metric", "raw", "z"],
        table.raw.cells.iter().map(|(key, raw)| {
            let (net, s, m) = key;
            [
                net.clone(),
                s.name(),
                m.as_str().to_string(),
                raw.map(|v| v.to_string()).unwrap_or_default(),
                table.z.get(key).map(|v| v.to_string()).unwrap_or_default(),
            ]
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeRow {
    pub network: String,
    pub node_composite: f64,
    pub edge_composite: f64,
    pub composite: f64,
    pub group: Option<String>,
}

pub fn composite_rows(table: &PerformanceTable) -> Vec<CompositeRow> {
    table
        .composite
        .iter()
        .map(|(net, &c)| CompositeRow {
            network: net.clone(),
            node_composite: table.node_composite[net],
            edge_composite: table.edge_composite[net],
            composite: c,
            group: table
                .groups
                .as_ref()
                .and_then(|g| g.labels.get(net))
                .map(|g| g.to_string()),
        })
        .collect()
}

pub fn composite_csv(table: &PerformanceTable) -> Result<String> {
    csv_string(
        &[
            "network",
            "node_composite",
            "edge_composite",
            "composite",
            "group",
        ],
        composite_rows(table).into_iter().map(|r| {
            [
                r.network,
                r.node_composite.to_string(),
                r.edge_composite.to_string(),
                r.composite.to_string(),
                r.group.unwrap_or_default(),
            ]
        }),
    )
}

/// Scatter data for the node/edge performance plane.
pub fn scatter_csv(table: &PerformanceTable) -> Result<String> {
    csv_string(
        &["network", "x_node", "y_edge", "group"],
        composite_rows(table).into_iter().map(|r| {
            [
                r.network,
                r.node_composite.to_string(),
                r.edge_composite.to_string(),
                r.group.unwrap_or_default(),
            ]
        }),
    )
}
