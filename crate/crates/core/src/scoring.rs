//! Cross-network standardisation, composite performance and grouping.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GridError, Result};
use crate::percolation::{Metric, RemovalKind, ScenarioId, ScenarioResult};

const KMEANS_SEED: u64 = 0x6b6d_6561_6e73_2b2b;
const KMEANS_RESTARTS: u64 = 100;
const KMEANS_MAX_ITER: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    HigherBetter,
    LowerBetter,
}

impl Metric {
    pub fn orientation(self) -> Orientation {
        match self {
            Metric::LccSize => Orientation::HigherBetter,
            Metric::EdgesLostShare | Metric::EffDrop | Metric::ClusteringDrop => Orientation::LowerBetter,
        }
    }
}

/// z-scores with sample standard deviation, negated for lower-is-better
/// metrics. Zero variance gives all zeros.
pub fn standardize(
    values: &BTreeMap<String, f64>,
    orientation: Orientation,
) -> Result<BTreeMap<String, f64>> {
    if values.len() < 2 {
        return Err(GridError::validation(format!(
            "standardisation needs at least 2 networks, got {}",
            values.len()
        )));
    }
    if let Some((k, v)) = values.iter().find(|(_, v)| !v.is_finite()) {
        return Err(GridError::validation(format!(
            "value for {k} is not finite ({v})"
        )));
    }
    let first = *values.values().next().unwrap();
    if values.values().all(|&v| v == first) {
        // the rounded mean of equal values can miss them by an ulp
        return Ok(values.keys().map(|k| (k.clone(), 0.0)).collect());
    }
    let n = values.len() as f64;
    let mean = values.values().sum::<f64>() / n;
    let var = values.values().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let std = var.sqrt();
    let sign = match orientation {
        Orientation::HigherBetter => 1.0,
        Orientation::LowerBetter => -1.0,
    };
    Ok(values
        .iter()
        .map(|(k, &v)| {
            let z = if std > 0.0 { sign * (v - mean) / std } else { 0.0 };
            (k.clone(), z)
        })
        .collect())
}

pub type CellKey = (String, ScenarioId, Metric);

/// One reduced value per (network, scenario, metric). `None` marks a value
/// that is undefined for that network (zero baseline clustering); such cells
/// are left out of their column's standardisation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawTable {
    pub cells: BTreeMap<CellKey, Option<f64>>,
}

impl RawTable {
    pub fn insert(&mut self, network: &str, scenario: ScenarioId, metric: Metric, value: Option<f64>) {
        self.cells.insert((network.to_string(), scenario, metric), value);
    }

    /// Add the scenario means of one Monte Carlo result. The LCC is taken
    /// relative to the intact node count so networks of different size are
    /// comparable.
    pub fn insert_result(&mut self, network: &str, result: &ScenarioResult) {
        for (metric, value) in reduce_result(result) {
            self.insert(network, result.scenario.id, metric, value);
        }
    }

    pub fn networks(&self) -> BTreeSet<&str> {
        self.cells.keys().map(|(n, _, _)| n.as_str()).collect()
    }

    pub fn scenarios(&self) -> BTreeSet<ScenarioId> {
        self.cells.keys().map(|(_, s, _)| *s).collect()
    }
}

/// Scenario means used for scoring, LCC as a share of the intact node count.
pub fn reduce_result(result: &ScenarioResult) -> BTreeMap<Metric, Option<f64>> {
    let n0 = result.baseline.n_nodes as f64;
    Metric::ALL
        .iter()
        .map(|&m| {
            let mean = result.summary(m).map(|s| s.mean);
            let value = match m {
                Metric::LccSize => mean.map(|v| v / n0),
                _ => mean,
            };
            (m, value)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    I,
    II,
    III,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::I => "I",
            Group::II => "II",
            Group::III => "III",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grouping {
    pub labels: BTreeMap<String, Group>,
    /// Fewer than three distinct points were available.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceTable {
    pub raw: RawTable,
    pub z: BTreeMap<CellKey, f64>,
    pub node_composite: BTreeMap<String, f64>,
    pub edge_composite: BTreeMap<String, f64>,
    pub composite: BTreeMap<String, f64>,
    pub groups: Option<Grouping>,
}

/// Standardise every (scenario, metric) column and sum z-values per network.
/// Groups are assigned when at least three networks are present.
pub fn composite(raw: &RawTable) -> Result<PerformanceTable> {
    let networks: Vec<String> = raw.networks().into_iter().map(String::from).collect();
    let scenarios = raw.scenarios();
    for net in &networks {
        for &s in &scenarios {
            for m in Metric::ALL {
                if !raw.cells.contains_key(&(net.clone(), s, m)) {
                    return Err(GridError::validation(format!(
                        "missing cell: network {net}, scenario {s}, metric {m}"
                    )));
                }
            }
        }
    }

    let mut z = BTreeMap::new();
    for &s in &scenarios {
        for m in Metric::ALL {
            let column: BTreeMap<String, f64> = networks
                .iter()
                .filter_map(|net| raw.cells[&(net.clone(), s, m)].map(|v| (net.clone(), v)))
                .collect();
            if column.len() < 2 {
                continue;
            }
            let scores = standardize(&column, m.orientation())
                .map_err(|e| e.labeled(format!("scenario {s}, metric {m}")))?;
            for (net, v) in scores {
                z.insert((net, s, m), v);
            }
        }
    }

    let mut node_composite: BTreeMap<String, f64> = networks.iter().map(|n| (n.clone(), 0.0)).collect();
    let mut edge_composite = node_composite.clone();
    for ((net, s, _), v) in &z {
        let target = match s.kind {
            RemovalKind::Node => &mut node_composite,
            RemovalKind::Edge => &mut edge_composite,
        };
        *target.get_mut(net).unwrap() += v;
    }
    let composite = networks
        .iter()
        .map(|n| (n.clone(), node_composite[n] + edge_composite[n]))
        .collect();
    let groups = if networks.len() >= 3 {
        Some(group_assign(&node_composite, &edge_composite)?)
    } else {
        None
    };
    Ok(PerformanceTable {
        raw: raw.clone(),
        z,
        node_composite,
        edge_composite,
        composite,
        groups,
    })
}

/// k-means (k = 3) on the standardised (node, edge) composite plane.
///
/// Seeding is k-means++ with a fixed seed and 100 restarts; the lowest inertia
/// wins. Points are clustered in coordinate order, so labels do not depend on
/// network names. Groups are numbered I, II, III by ascending mean of
/// node + edge composite.
pub fn group_assign(
    node_composite: &BTreeMap<String, f64>,
    edge_composite: &BTreeMap<String, f64>,
) -> Result<Grouping> {
    if node_composite.len() < 3 {
        return Err(GridError::validation(format!(
            "grouping needs at least 3 networks, got {}",
            node_composite.len()
        )));
    }
    if node_composite.keys().ne(edge_composite.keys()) {
        return Err(GridError::validation(
            "node and edge composites cover different networks",
        ));
    }
    let zx = standardize(node_composite, Orientation::HigherBetter)?;
    let zy = standardize(edge_composite, Orientation::HigherBetter)?;
    let mut items: Vec<(&String, [f64; 2])> = zx.iter().map(|(k, &x)| (k, [x, zy[k]])).collect();
    items.sort_by(|a, b| a.1[0].total_cmp(&b.1[0]).then(a.1[1].total_cmp(&b.1[1])));
    let points: Vec<[f64; 2]> = items.iter().map(|(_, p)| *p).collect();

    let mut distinct = points.clone();
    distinct.dedup();
    let (assignment, degenerate) = if distinct.len() < 3 {
        let idx = points
            .iter()
            .map(|p| distinct.iter().position(|d| d == p).unwrap())
            .collect();
        (idx, true)
    } else {
        (kmeans(&points, 3), false)
    };

    let k = assignment.iter().max().map_or(0, |m| m + 1);
    let mut sums = vec![(0.0, 0usize); k];
    for ((name, _), &c) in items.iter().zip(&assignment) {
        sums[c].0 += node_composite[*name] + edge_composite[*name];
        sums[c].1 += 1;
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        let ma = sums[a].0 / sums[a].1 as f64;
        let mb = sums[b].0 / sums[b].1 as f64;
        ma.total_cmp(&mb)
    });
    let groups = [Group::I, Group::II, Group::III];
    let mut label_of = vec![Group::I; k];
    for (rank, &c) in order.iter().enumerate() {
        label_of[c] = groups[rank.min(2)];
    }
    let labels = items
        .iter()
        .zip(&assignment)
        .map(|((name, _), &c)| ((*name).clone(), label_of[c]))
        .collect();
    Ok(Grouping { labels, degenerate })
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn kmeans(points: &[[f64; 2]], k: usize) -> Vec<usize> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..KMEANS_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(KMEANS_SEED ^ restart);
        let mut centers = kmeans_pp(points, k, &mut rng);
        let mut assign = vec![usize::MAX; points.len()];
        for _ in 0..KMEANS_MAX_ITER {
            let mut changed = false;
            for (i, p) in points.iter().enumerate() {
                let c = (0..k)
                    .min_by(|&a, &b| dist2(*p, centers[a]).total_cmp(&dist2(*p, centers[b])))
                    .unwrap();
                if assign[i] != c {
                    assign[i] = c;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            for (c, center) in centers.iter_mut().enumerate() {
                let members: Vec<&[f64; 2]> = points
                    .iter()
                    .zip(&assign)
                    .filter(|(_, &a)| a == c)
                    .map(|(p, _)| p)
                    .collect();
                if !members.is_empty() {
                    let n = members.len() as f64;
                    *center = [
                        members.iter().map(|p| p[0]).sum::<f64>() / n,
                        members.iter().map(|p| p[1]).sum::<f64>() / n,
                    ];
                }
            }
        }
        let inertia: f64 = points
            .iter()
            .zip(&assign)
            .map(|(p, &c)| dist2(*p, centers[c]))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, assign));
        }
    }
    let assign = best.unwrap().1;
    // renumber clusters by first appearance
    let mut ids = BTreeMap::new();
    assign
        .iter()
        .map(|&c| {
            let next = ids.len();
            *ids.entry(c).or_insert(next)
        })
        .collect()
}

fn kmeans_pp(points: &[[f64; 2]], k: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let mut centers = vec![points[rng.gen_range(0..points.len())]];
    while centers.len() < k {
        let weights: Vec<f64> = points
            .iter()
            .map(|p| {
                centers
                    .iter()
                    .map(|c| dist2(*p, *c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = points.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            rng.gen_range(0..points.len())
        };
        centers.push(points[next]);
    }
    centers
}
