//! Small-world coefficients against random and lattice references.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::clustering::{clustering, local_clustering};
use super::distance::distance_stats;
use super::mean_degree;
use crate::error::{GridError, Result};
use crate::graph::GridGraph;

/// Euler–Mascheroni constant, truncated as it appears in the random-graph
/// path length formula.
pub const EULER_GAMMA: f64 = 0.5772;

const LATTICE_SEED: u64 = 0x6c61_7474_6963_6521;
const LATTICE_SWEEPS: usize = 20;

/// A coefficient that may be degenerate (reported as 0 and flagged).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub value: f64,
    pub degenerate: bool,
}

impl Coefficient {
    fn regular(value: f64) -> Self {
        Coefficient {
            value,
            degenerate: false,
        }
    }

    fn degenerate() -> Self {
        Coefficient {
            value: 0.0,
            degenerate: true,
        }
    }
}

/// Clustering of an equivalent random graph, `⟨k⟩/N`.
pub fn random_clustering(n: usize, mean_degree: f64) -> f64 {
    mean_degree / n as f64
}

/// Path length of an equivalent random graph,
/// `(ln N − 0.5772)/ln⟨k⟩ + 1/2`.
pub fn random_path_length(n: usize, mean_degree: f64) -> f64 {
    ((n as f64).ln() - EULER_GAMMA) / mean_degree.ln() + 0.5
}

/// `σ = (C/C_r)/(L/L_r)` from precomputed inputs.
pub fn sigma_from(n: usize, mean_degree: f64, clustering: f64, path_length: f64) -> Result<Coefficient> {
    if !(mean_degree > 1.0) {
        return Err(GridError::undefined(
            "sigma",
            format!("mean degree {mean_degree} must exceed 1"),
        ));
    }
    if clustering == 0.0 {
        return Ok(Coefficient::degenerate());
    }
    let c_r = random_clustering(n, mean_degree);
    let l_r = random_path_length(n, mean_degree);
    Ok(Coefficient::regular((clustering / c_r) / (path_length / l_r)))
}

pub fn sigma(g: &GridGraph) -> Result<Coefficient> {
    let k = mean_degree(g)?;
    if !(k > 1.0) {
        return Err(GridError::undefined(
            "sigma",
            format!("mean degree {k} must exceed 1"),
        ));
    }
    let c = clustering(g)?;
    let l = distance_stats(g)?.avg_path_length;
    sigma_from(g.node_count(), k, c, l)
}

/// `ω = L_r/L − C/C_lattice` from precomputed inputs.
pub fn omega_from(
    n: usize,
    mean_degree: f64,
    clustering: f64,
    path_length: f64,
    lattice_clustering: f64,
) -> Result<f64> {
    if !(lattice_clustering > 0.0) {
        return Err(GridError::undefined(
            "omega",
            format!("lattice clustering {lattice_clustering} must be positive"),
        ));
    }
    if !(path_length > 0.0) {
        return Err(GridError::undefined("omega", "path length must be positive"));
    }
    let l_r = random_path_length(n, mean_degree);
    Ok(l_r / path_length - clustering / lattice_clustering)
}

pub fn omega(g: &GridGraph, lattice_clustering: f64) -> Result<f64> {
    if !(lattice_clustering > 0.0) {
        return Err(GridError::undefined(
            "omega",
            format!("lattice clustering {lattice_clustering} must be positive"),
        ));
    }
    let k = mean_degree(g)?;
    let c = clustering(g)?;
    let l = distance_stats(g)?.avg_path_length;
    omega_from(g.node_count(), k, c, l, lattice_clustering)
}

/// Clustering of a latticized surrogate of the simple projection.
///
/// Degree-preserving double-edge swaps are proposed at random (fixed seed)
/// and kept only when they raise the average clustering. One sweep proposes
/// as many swaps as there are edges; the procedure stops after 20 sweeps or
/// after a sweep with no accepted swap.
pub fn lattice_reference(g: &GridGraph) -> Result<Coefficient> {
    let n = g.node_count();
    if n < 3 {
        return Err(GridError::undefined(
            "lattice reference",
            format!("needs at least 3 nodes, graph has {n}"),
        ));
    }
    let mut adj: Vec<BTreeSet<usize>> = g
        .simple_neighbors()
        .into_iter()
        .map(|v| v.into_iter().collect())
        .collect();
    let mut edges: Vec<(usize, usize)> = adj
        .iter()
        .enumerate()
        .flat_map(|(a, nb)| nb.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
        .collect();
    let simple_mean_degree = 2.0 * edges.len() as f64 / n as f64;
    if simple_mean_degree < 2.0 {
        return Ok(Coefficient::degenerate());
    }

    let mut lists: Vec<Vec<usize>> = adj.iter().map(|s| s.iter().copied().collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(LATTICE_SEED);
    let m = edges.len();
    let mut affected: BTreeSet<usize> = BTreeSet::new();

    for _ in 0..LATTICE_SWEEPS {
        let mut accepted = 0usize;
        for _ in 0..m {
            let i = rng.gen_range(0..m);
            let j = rng.gen_range(0..m);
            if i == j {
                continue;
            }
            let (a, b) = edges[i];
            let (c, d) = if rng.gen_bool(0.5) {
                edges[j]
            } else {
                (edges[j].1, edges[j].0)
            };
            // (a,b),(c,d) -> (a,d),(c,b)
            if a == d || c == b || a == c || b == d {
                continue;
            }
            if adj[a].contains(&d) || adj[c].contains(&b) {
                continue;
            }

            affected.clear();
            affected.extend([a, b, c, d]);
            // endpoints plus common neighbours of every removed or added pair;
            // post-swap common neighbours are a subset of the pre-swap ones
            affected.extend(adj[a].intersection(&adj[b]).copied());
            affected.extend(adj[c].intersection(&adj[d]).copied());
            affected.extend(adj[a].intersection(&adj[d]).copied());
            affected.extend(adj[c].intersection(&adj[b]).copied());
            let before: f64 = affected.iter().map(|&v| local_clustering(&lists, v)).sum();

            swap_edge(&mut adj, &mut lists, (a, b), (a, d));
            swap_edge(&mut adj, &mut lists, (c, d), (c, b));
            let after: f64 = affected.iter().map(|&v| local_clustering(&lists, v)).sum();

            if after > before + 1e-12 {
                edges[i] = (a.min(d), a.max(d));
                edges[j] = (c.min(b), c.max(b));
                accepted += 1;
            } else {
                swap_edge(&mut adj, &mut lists, (a, d), (a, b));
                swap_edge(&mut adj, &mut lists, (c, b), (c, d));
            }
        }
        if accepted == 0 {
            break;
        }
    }

    let total: f64 = (0..n).map(|v| local_clustering(&lists, v)).sum();
    Ok(Coefficient::regular(total / n as f64))
}

fn swap_edge(
    adj: &mut [BTreeSet<usize>],
    lists: &mut [Vec<usize>],
    old: (usize, usize),
    new: (usize, usize),
) {
    for (x, y) in [old, (old.1, old.0)] {
        adj[x].remove(&y);
        let pos = lists[x].binary_search(&y).unwrap();
        lists[x].remove(pos);
    }
    for (x, y) in [new, (new.1, new.0)] {
        adj[x].insert(y);
        let pos = lists[x].binary_search(&y).unwrap_err();
        lists[x].insert(pos, y);
    }
}
