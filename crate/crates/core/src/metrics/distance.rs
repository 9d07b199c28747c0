use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::csr::{inverse_distance_sum, BfsScratch};
use crate::error::{GridError, Result};
use crate::graph::GridGraph;

/// Hop-distance distribution over unordered reachable node pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceDistribution {
    /// distance -> number of unordered pairs at that distance
    pub counts: BTreeMap<u32, u64>,
}

impl DistanceDistribution {
    pub(crate) fn from_ordered_counts(ordered: &[u64]) -> Self {
        let counts = ordered
            .iter()
            .enumerate()
            .filter(|&(d, &c)| d > 0 && c > 0)
            .map(|(d, &c)| (d as u32, c / 2))
            .collect();
        DistanceDistribution { counts }
    }

    pub fn total_pairs(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn pdf(&self) -> BTreeMap<u32, f64> {
        let total = self.total_pairs() as f64;
        self.counts.iter().map(|(&d, &c)| (d, c as f64 / total)).collect()
    }

    /// Dense PDF indexed by distance, from 1 up to the diameter.
    pub fn dense_pdf(&self) -> Vec<f64> {
        let max = self.counts.keys().next_back().copied().unwrap_or(0) as usize;
        let total = self.total_pairs() as f64;
        (1..=max)
            .map(|d| self.counts.get(&(d as u32)).copied().unwrap_or(0) as f64 / total)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    pub distribution: DistanceDistribution,
    pub diameter: u32,
    /// Mean hop distance over reachable pairs.
    pub avg_path_length: f64,
    /// Mean inverse distance over all ordered pairs, unreachable pairs as 0.
    pub efficiency: f64,
}

pub(crate) fn ordered_distance_counts(g: &GridGraph) -> Vec<u64> {
    BfsScratch::default().distance_counts(&g.simple_csr(), None)
}

/// All-pairs BFS summary. Parallel circuits do not change hop distances.
pub fn distance_stats(g: &GridGraph) -> Result<DistanceStats> {
    let n = g.node_count();
    if n < 2 {
        return Err(GridError::undefined(
            "average path length",
            format!("needs at least 2 nodes, graph has {n}"),
        ));
    }
    let counts = ordered_distance_counts(g);
    let pairs: u64 = counts.iter().sum();
    if pairs == 0 {
        return Err(GridError::undefined(
            "average path length",
            "no pair of nodes is connected",
        ));
    }
    let hop_total: u64 = counts.iter().enumerate().map(|(d, &c)| d as u64 * c).sum();
    let ordered = (n * (n - 1)) as f64;
    Ok(DistanceStats {
        diameter: (counts.len() - 1) as u32,
        avg_path_length: hop_total as f64 / pairs as f64,
        efficiency: inverse_distance_sum(&counts) / ordered,
        distribution: DistanceDistribution::from_ordered_counts(&counts),
    })
}

/// Global efficiency `1/(N(N-1)) Σ_{i≠j} 1/d(i,j)`.
pub fn efficiency(g: &GridGraph) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(GridError::undefined(
            "efficiency",
            format!("needs at least 2 nodes, graph has {n}"),
        ));
    }
    let counts = ordered_distance_counts(g);
    Ok(inverse_distance_sum(&counts) / (n * (n - 1)) as f64)
}
