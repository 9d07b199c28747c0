//! Modularity evaluation and a deterministic Louvain optimizer.
//!
//! Parallel circuits are treated as edge multiplicity: `A_ij` counts the
//! circuits between `i` and `j`, `k_i` is the multigraph degree and `2E` the
//! total degree. A self-loop contributes 2 to `A_ii`. The resolution is fixed
//! at 1.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GridError, Result};
use crate::graph::GridGraph;

const LOUVAIN_SEED: u64 = 0x4c6f_7576_6169_6e31;
const LOUVAIN_RESTARTS: u64 = 32;
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Modularity {
    pub q: f64,
    /// Community id per node index, numbered densely in order of first
    /// appearance.
    pub partition: Vec<usize>,
}

impl Modularity {
    pub fn community_count(&self) -> usize {
        self.partition.iter().max().map_or(0, |m| m + 1)
    }
}

/// Evaluate `Q = Σ_c [ L_c/E − (D_c/2E)² ]` for a given partition, where
/// `L_c` counts circuits inside community `c` and `D_c` is its total degree.
pub fn evaluate_partition(g: &GridGraph, partition: &[usize]) -> Result<f64> {
    let m = g.edge_count();
    if m == 0 {
        return Err(GridError::undefined("modularity", "graph has no edges"));
    }
    if partition.len() != g.node_count() {
        return Err(GridError::validation(format!(
            "partition covers {} nodes, graph has {}",
            partition.len(),
            g.node_count()
        )));
    }
    let mut inside: BTreeMap<usize, u64> = BTreeMap::new();
    let mut degree: BTreeMap<usize, u64> = BTreeMap::new();
    for e in g.edges() {
        let (ca, cb) = (partition[e.a], partition[e.b]);
        *degree.entry(ca).or_default() += 1;
        *degree.entry(cb).or_default() += 1;
        if ca == cb {
            *inside.entry(ca).or_default() += 1;
        }
    }
    let m = m as f64;
    let q = degree
        .iter()
        .map(|(c, &d)| {
            let l = inside.get(c).copied().unwrap_or(0) as f64;
            let share = d as f64 / (2.0 * m);
            l / m - share * share
        })
        .sum();
    Ok(q)
}

/// Weighted graph used across Louvain levels.
struct Level {
    /// neighbour lists without self entries: (node, weight)
    adj: Vec<Vec<(usize, f64)>>,
    /// self-loop weight counted as A_ii (twice the loop count at level 0)
    self_weight: Vec<f64>,
    degree: Vec<f64>,
}

impl Level {
    fn from_graph(g: &GridGraph) -> Self {
        let n = g.node_count();
        let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        let mut self_weight = vec![0.0; n];
        for e in g.edges() {
            if e.is_loop() {
                self_weight[e.a] += 2.0;
            } else {
                *maps[e.a].entry(e.b).or_default() += 1.0;
                *maps[e.b].entry(e.a).or_default() += 1.0;
            }
        }
        Self::from_maps(maps, self_weight)
    }

    fn from_maps(maps: Vec<BTreeMap<usize, f64>>, self_weight: Vec<f64>) -> Self {
        let adj: Vec<Vec<(usize, f64)>> = maps.into_iter().map(|m| m.into_iter().collect()).collect();
        let degree = adj
            .iter()
            .zip(&self_weight)
            .map(|(nbrs, s)| nbrs.iter().map(|(_, w)| w).sum::<f64>() + s)
            .collect();
        Level {
            adj,
            self_weight,
            degree,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Local moving phase from the starting assignment `comm` (community ids
    /// below `len()`). Returns the final assignment and whether any node
    /// changed community.
    fn local_moves(&self, mut comm: Vec<usize>, two_m: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut total = vec![0.0; n];
        for (v, &c) in comm.iter().enumerate() {
            total[c] += self.degree[v];
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut link_to: Vec<f64> = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &v in &order {
                let kv = self.degree[v];
                let own = comm[v];
                for &(u, w) in &self.adj[v] {
                    let c = comm[u];
                    if link_to[c] == 0.0 {
                        touched.push(c);
                    }
                    link_to[c] += w;
                }
                total[own] -= kv;
                let gain = |c: usize, links: f64| links - total[c] * kv / two_m;
                let mut best = own;
                let mut best_gain = gain(own, link_to[own]);
                // candidates are visited in ascending community id
                touched.sort_unstable();
                for &c in &touched {
                    let g = gain(c, link_to[c]);
                    if g > best_gain + MIN_GAIN {
                        best = c;
                        best_gain = g;
                    }
                }
                total[best] += kv;
                if best != own {
                    comm[v] = best;
                    moved = true;
                    moved_any = true;
                }
                for &c in &touched {
                    link_to[c] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
        }
        (comm, moved_any)
    }

    fn aggregate(&self, comm: &[usize]) -> (Level, Vec<usize>) {
        let dense = renumber(comm);
        let k = dense.iter().max().map_or(0, |m| m + 1);
        let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
        let mut self_weight = vec![0.0; k];
        for v in 0..self.len() {
            let cv = dense[v];
            self_weight[cv] += self.self_weight[v];
            for &(u, w) in &self.adj[v] {
                let cu = dense[u];
                if cu == cv {
                    self_weight[cv] += w;
                } else {
                    *maps[cv].entry(cu).or_default() += w;
                }
            }
        }
        (Level::from_maps(maps, self_weight), dense)
    }
}

fn renumber(comm: &[usize]) -> Vec<usize> {
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    comm.iter()
        .map(|&c| {
            let next = ids.len();
            *ids.entry(c).or_insert(next)
        })
        .collect()
}

/// Greedy multi-level modularity maximisation (Louvain). A fixed set of
/// seeded visiting orders is tried and the best partition kept; ties go to
/// the earliest seed.
pub fn modularity(g: &GridGraph) -> Result<Modularity> {
    let m = g.edge_count();
    if m == 0 {
        return Err(GridError::undefined("modularity", "graph has no edges"));
    }
    let base = Level::from_graph(g);
    let mut best: Option<Modularity> = None;
    for restart in 0..LOUVAIN_RESTARTS {
        let partition = louvain(&base, 2.0 * m as f64, LOUVAIN_SEED.wrapping_add(restart));
        let q = evaluate_partition(g, &partition)?;
        if best.as_ref().is_none_or(|b| q > b.q) {
            best = Some(Modularity { q, partition });
        }
    }
    Ok(best.expect("at least one restart"))
}

fn louvain(base: &Level, two_m: f64, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<usize> = (0..base.len()).collect();
    let mut owned;
    let mut level = base;
    loop {
        let singletons = (0..level.len()).collect();
        let (comm, moved) = level.local_moves(singletons, two_m, &mut rng);
        if !moved {
            break;
        }
        let (next, dense) = level.aggregate(&comm);
        for c in membership.iter_mut() {
            *c = dense[*c];
        }
        if next.len() == level.len() {
            break;
        }
        owned = next;
        level = &owned;
    }
    // nodes can still improve once their community is fixed at coarse levels
    let (refined, _) = base.local_moves(renumber(&membership), two_m, &mut rng);
    renumber(&refined)
}
