//! Topological metric suite for undirected, unweighted grid graphs.
//!
//! Counting metrics (density, mean degree) use every circuit. Distance-based
//! metrics and clustering use the simple projection, since parallel circuits
//! change neither hop distances nor which neighbours are linked.

mod clustering;
mod distance;
mod modularity;
mod smallworld;
mod voltage;

use serde::{Deserialize, Serialize};

pub use clustering::clustering;
pub(crate) use clustering::clustering_sum;
pub use distance::{distance_stats, efficiency, DistanceDistribution, DistanceStats};
pub use modularity::{evaluate_partition, modularity, Modularity};
pub use smallworld::{
    lattice_reference, omega, omega_from, random_clustering, random_path_length, sigma, sigma_from,
    Coefficient, EULER_GAMMA,
};
pub use voltage::{
    voltage_shares, VoltageShares, EXTRA_HIGH_BAND, MID_TRANSMISSION_BAND, SUB_TRANSMISSION_BAND,
};

use crate::error::{GridError, Result};
use crate::graph::GridGraph;

/// `D = 2E / (N(N−1))`, counting every circuit.
pub fn density(g: &GridGraph) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(GridError::undefined(
            "density",
            format!("needs at least 2 nodes, graph has {n}"),
        ));
    }
    Ok(2.0 * g.edge_count() as f64 / (n * (n - 1)) as f64)
}

/// `⟨k⟩ = 2E / N`, counting every circuit.
pub fn mean_degree(g: &GridGraph) -> Result<f64> {
    let n = g.node_count();
    if n == 0 {
        return Err(GridError::undefined("mean degree", "graph has no nodes"));
    }
    Ok(2.0 * g.edge_count() as f64 / n as f64)
}

/// One row of the per-network metric table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub density: f64,
    pub mean_degree: f64,
    pub diameter: u32,
    pub avg_path_length: f64,
    pub clustering: f64,
    pub modularity: f64,
    pub sigma: f64,
    pub sigma_degenerate: bool,
    /// `None` when the lattice reference is degenerate or has no triangles.
    pub omega: Option<f64>,
    pub lattice_clustering: f64,
    pub efficiency: f64,
    pub voltage_shares: VoltageShares,
}

impl MetricsReport {
    /// Column names in table order.
    pub const COLUMNS: [&'static str; 14] = [
        "N",
        "E",
        "D",
        "mean_degree",
        "d",
        "L",
        "C",
        "Q",
        "sigma",
        "omega",
        "eff",
        "share_110_150kV",
        "share_220_275kV",
        "share_330_400kV",
    ];

    /// Values matching [`MetricsReport::COLUMNS`]; an undefined ω is empty.
    pub fn row(&self) -> Vec<String> {
        vec![
            self.n_nodes.to_string(),
            self.n_edges.to_string(),
            self.density.to_string(),
            self.mean_degree.to_string(),
            self.diameter.to_string(),
            self.avg_path_length.to_string(),
            self.clustering.to_string(),
            self.modularity.to_string(),
            self.sigma.to_string(),
            self.omega.map(|w| w.to_string()).unwrap_or_default(),
            self.efficiency.to_string(),
            self.voltage_shares.kv_110_150.to_string(),
            self.voltage_shares.kv_220_275.to_string(),
            self.voltage_shares.kv_330_400.to_string(),
        ]
    }
}

/// Full metric suite plus the distance distribution it was derived from.
pub fn compute_metrics(g: &GridGraph) -> Result<(MetricsReport, DistanceDistribution)> {
    let n = g.node_count();
    let density = density(g)?;
    let k = mean_degree(g)?;
    let stats = distance_stats(g)?;
    let c = clustering(g)?;
    let q = modularity(g)?.q;
    let sigma = sigma_from(n, k, c, stats.avg_path_length)?;
    let lattice = lattice_reference(g)?;
    let omega = if lattice.degenerate || lattice.value <= 0.0 {
        None
    } else {
        Some(omega_from(n, k, c, stats.avg_path_length, lattice.value)?)
    };
    let report = MetricsReport {
        n_nodes: n,
        n_edges: g.edge_count(),
        density,
        mean_degree: k,
        diameter: stats.diameter,
        avg_path_length: stats.avg_path_length,
        clustering: c,
        modularity: q,
        sigma: sigma.value,
        sigma_degenerate: sigma.degenerate,
        omega,
        lattice_clustering: lattice.value,
        efficiency: stats.efficiency,
        voltage_shares: voltage_shares(g)?,
    };
    Ok((report, stats.distribution))
}
