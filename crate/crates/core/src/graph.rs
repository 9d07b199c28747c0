//! Grid multigraph model, CSV ingestion and variant derivation.
//!
//! Nodes are substations identified by opaque strings; edges are circuits
//! carrying a voltage in kV. Parallel circuits are kept as separate edges
//! until a simplified variant is derived.
//!
//! Node identifiers are stored sorted, so a node's index order is the same
//! as its identifier order. Edges are stored in canonical order
//! (endpoints, then voltage, then circuit id), which makes two graphs with the
//! same edge multiset compare equal regardless of input row order.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::csr::Csr;
use crate::error::{GridError, Result};

/// Lower bound of the transmission layer, in kV.
pub const TRANSMISSION_KV: f64 = 220.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// Index of the lower endpoint in [`GridGraph::nodes`].
    pub a: usize,
    /// Index of the upper endpoint (`a <= b`).
    pub b: usize,
    pub voltage_kv: f64,
    pub circuit_id: String,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    fn sort_key(&self) -> (usize, usize, f64, &str) {
        (self.a, self.b, self.voltage_kv, &self.circuit_id)
    }
}

/// Undirected multigraph of substations and circuits.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGraph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    simple: bool,
}

/// A circuit given by endpoint names, before node indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedEdge {
    pub from: String,
    pub to: String,
    pub voltage_kv: f64,
    pub circuit_id: String,
}

impl GridGraph {
    /// Build a graph from named circuits. The node set is the union of all
    /// endpoints plus `extra_nodes` (which may be isolated).
    pub fn from_named_edges<I, S>(edges: Vec<NamedEdge>, extra_nodes: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: BTreeSet<String> = extra_nodes.into_iter().map(Into::into).collect();
        for e in &edges {
            if !(e.voltage_kv.is_finite() && e.voltage_kv > 0.0) {
                return Err(GridError::validation(format!(
                    "circuit {} ({}-{}) has non-positive voltage {}",
                    e.circuit_id, e.from, e.to, e.voltage_kv
                )));
            }
            names.insert(e.from.clone());
            names.insert(e.to.clone());
        }
        let nodes: Vec<String> = names.into_iter().collect();
        let index = |name: &str| nodes.binary_search_by(|n| n.as_str().cmp(name)).unwrap();
        let indexed = edges
            .into_iter()
            .map(|e| {
                let (x, y) = (index(&e.from), index(&e.to));
                Edge {
                    a: x.min(y),
                    b: x.max(y),
                    voltage_kv: e.voltage_kv,
                    circuit_id: e.circuit_id,
                }
            })
            .collect();
        Ok(Self::from_parts(nodes, indexed, false))
    }

    /// Assemble from already-indexed parts; edges are put in canonical order.
    pub(crate) fn from_parts(nodes: Vec<String>, mut edges: Vec<Edge>, simple: bool) -> Self {
        edges.sort_by(|x, y| {
            let (ka, kb) = (x.sort_key(), y.sort_key());
            ka.0.cmp(&kb.0)
                .then(ka.1.cmp(&kb.1))
                .then(ka.2.total_cmp(&kb.2))
                .then(ka.3.cmp(kb.3))
        });
        GridGraph { nodes, edges, simple }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// True once parallel circuits and self-loops have been collapsed.
    pub fn is_simple(&self) -> bool {
        self.simple
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    /// Multigraph degree of every node. Parallel circuits each count, and a
    /// self-loop adds two.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.nodes.len()];
        for e in &self.edges {
            deg[e.a] += 1;
            deg[e.b] += 1;
        }
        deg
    }

    /// Sorted, deduplicated neighbour lists with self-loops dropped.
    pub fn simple_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in self.edges.iter().filter(|e| !e.is_loop()) {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    pub(crate) fn simple_csr(&self) -> Csr {
        Csr::from_edges(
            self.nodes.len(),
            self.edges.iter().filter(|e| !e.is_loop()).map(|e| (e.a, e.b)),
        )
    }

    /// Component label per node; labels are dense and ordered the same way
    /// as [`connected_components`].
    pub fn component_labels(&self) -> (Vec<usize>, Vec<usize>) {
        crate::csr::component_labels(&self.simple_csr(), None)
    }
}

/// Selector for one of the graph representations used in the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantSpec {
    /// Circuits below this voltage are dropped; 0 keeps everything.
    pub min_voltage_kv: f64,
    /// Collapse parallel circuits and drop self-loops.
    pub simplify: bool,
}

/// The four canonical representations fitted for the degree-decay rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Every voltage level, parallel circuits kept.
    CompleteHv,
    /// Every voltage level, simplified.
    SimplifiedHv,
    /// 220 kV and above, parallel circuits kept.
    Transmission,
    /// 220 kV and above, simplified.
    TransmissionSimplified,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::CompleteHv,
        Variant::SimplifiedHv,
        Variant::Transmission,
        Variant::TransmissionSimplified,
    ];

    pub fn spec(self) -> VariantSpec {
        let (min_voltage_kv, simplify) = match self {
            Variant::CompleteHv => (0.0, false),
            Variant::SimplifiedHv => (0.0, true),
            Variant::Transmission => (TRANSMISSION_KV, false),
            Variant::TransmissionSimplified => (TRANSMISSION_KV, true),
        };
        VariantSpec {
            min_voltage_kv,
            simplify,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::CompleteHv => "hv",
            Variant::SimplifiedHv => "hv_simple",
            Variant::Transmission => "tx",
            Variant::TransmissionSimplified => "tx_simple",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parse the canonical edge list `from,to,voltage_kv[,circuit_id]`.
///
/// The header row is optional. Rows without a circuit id get their zero-based
/// data-row index as id.
pub fn parse_edge_list<R: Read>(input: R) -> Result<GridGraph> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);

    let mut edges = Vec::new();
    let mut first = true;
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            GridError::Parse {
                line,
                message: e.to_string(),
            }
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if std::mem::take(&mut first) && row.get(0) == Some("from") && row.get(1) == Some("to") {
            continue;
        }
        if row.len() == 1 && row.get(0) == Some("") {
            continue;
        }
        if row.len() != 3 && row.len() != 4 {
            return Err(GridError::Parse {
                line,
                message: format!("expected 3 or 4 columns, found {}", row.len()),
            });
        }
        let (from, to, kv) = (&row[0], &row[1], &row[2]);
        if from.is_empty() || to.is_empty() {
            return Err(GridError::Parse {
                line,
                message: "empty node identifier".into(),
            });
        }
        let voltage_kv: f64 = kv
            .parse()
            .map_err(|_| GridError::validation(format!("line {line}: voltage {kv:?} is not a number")))?;
        if !(voltage_kv.is_finite() && voltage_kv > 0.0) {
            return Err(GridError::validation(format!(
                "line {line}: voltage must be positive, got {kv}"
            )));
        }
        let circuit_id = match row.get(3) {
            Some(id) if !id.is_empty() => id.to_string(),
            _ => edges.len().to_string(),
        };
        edges.push(NamedEdge {
            from: from.to_string(),
            to: to.to_string(),
            voltage_kv,
            circuit_id,
        });
    }
    if edges.is_empty() {
        return Err(GridError::validation("edge list contains no circuits"));
    }
    GridGraph::from_named_edges(edges, std::iter::empty::<String>())
}

/// Write the graph in canonical CSV, rows sorted by endpoints then voltage.
pub fn write_edge_list<W: Write>(g: &GridGraph, out: W) -> Result<()> {
    let mut rows: Vec<(&str, &str, f64, &str)> = g
        .edges
        .iter()
        .map(|e| {
            (
                g.nodes[e.a].as_str(),
                g.nodes[e.b].as_str(),
                e.voltage_kv,
                e.circuit_id.as_str(),
            )
        })
        .collect();
    rows.sort_by(|x, y| {
        x.0.cmp(y.0)
            .then(x.1.cmp(y.1))
            .then(x.2.total_cmp(&y.2))
            .then(x.3.cmp(y.3))
    });
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| GridError::validation(format!("csv write: {e}"));
    w.write_record(["from", "to", "voltage_kv", "circuit_id"])
        .map_err(io)?;
    for (a, b, kv, id) in rows {
        w.write_record([a, b, &kv.to_string(), id]).map_err(io)?;
    }
    w.flush()
        .map_err(|e| GridError::validation(format!("csv write: {e}")))?;
    Ok(())
}

/// Derive a filtered and/or simplified representation.
///
/// Circuits below `min_voltage_kv` are dropped. With `simplify`, each bundle
/// of parallel circuits becomes one edge carrying the bundle's maximum
/// voltage, and self-loops are deleted. Nodes left without any incident edge
/// are removed.
pub fn derive_variant(g: &GridGraph, spec: VariantSpec) -> Result<GridGraph> {
    let label = || {
        format!(
            "min_voltage_kv={}, simplify={}",
            spec.min_voltage_kv, spec.simplify
        )
    };
    if !(spec.min_voltage_kv >= 0.0) {
        return Err(GridError::validation(format!(
            "minimum voltage must be non-negative ({})",
            label()
        )));
    }
    let mut kept: Vec<Edge> = g
        .edges
        .iter()
        .filter(|e| e.voltage_kv >= spec.min_voltage_kv)
        .cloned()
        .collect();

    if spec.simplify {
        // `kept` inherits canonical order, so bundles are contiguous.
        kept.retain(|e| !e.is_loop());
        let mut collapsed: Vec<Edge> = Vec::with_capacity(kept.len());
        for e in kept {
            match collapsed.last_mut() {
                Some(last) if last.a == e.a && last.b == e.b => {
                    if e.voltage_kv > last.voltage_kv {
                        *last = e;
                    }
                }
                _ => collapsed.push(e),
            }
        }
        kept = collapsed;
    }

    if kept.is_empty() {
        return Err(GridError::EmptyVariant { variant: label() });
    }

    let mut used = vec![false; g.nodes.len()];
    for e in &kept {
        used[e.a] = true;
        used[e.b] = true;
    }
    let mut remap = vec![usize::MAX; g.nodes.len()];
    let mut nodes = Vec::new();
    for (i, name) in g.nodes.iter().enumerate() {
        if used[i] {
            remap[i] = nodes.len();
            nodes.push(name.clone());
        }
    }
    for e in &mut kept {
        e.a = remap[e.a];
        e.b = remap[e.b];
    }
    Ok(GridGraph::from_parts(nodes, kept, spec.simplify || g.simple))
}

/// Partition the nodes by reachability, largest component first; ties go to
/// the component containing the smallest node identifier.
pub fn connected_components(g: &GridGraph) -> Vec<Vec<&str>> {
    let (labels, sizes) = g.component_labels();
    let mut out: Vec<Vec<&str>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    for (i, &l) in labels.iter().enumerate() {
        out[l].push(g.nodes[i].as_str());
    }
    out
}
