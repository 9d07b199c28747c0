#![allow(dead_code)]

use gridtopo::graph::{GridGraph, NamedEdge};
use gridtopo::percolation::{RemovalKind, RunRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn edge(a: impl ToString, b: impl ToString, kv: f64, id: usize) -> NamedEdge {
    NamedEdge {
        from: a.to_string(),
        to: b.to_string(),
        voltage_kv: kv,
        circuit_id: id.to_string(),
    }
}

pub fn from_pairs(pairs: &[(usize, usize)]) -> GridGraph {
    let edges = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| edge(format!("n{a:04}"), format!("n{b:04}"), 110.0, i))
        .collect();
    GridGraph::from_named_edges(edges, std::iter::empty::<String>()).unwrap()
}

pub fn path(n: usize) -> GridGraph {
    from_pairs(&(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>())
}

pub fn complete(n: usize) -> GridGraph {
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((a, b));
        }
    }
    from_pairs(&pairs)
}

/// Ring where each node links to its `k/2` nearest neighbours on each side.
pub fn ring_lattice(n: usize, k: usize) -> GridGraph {
    let mut pairs = Vec::new();
    for a in 0..n {
        for j in 1..=k / 2 {
            pairs.push((a, (a + j) % n));
        }
    }
    from_pairs(&pairs)
}

/// Uniform random graph with `m` distinct edges, possibly disconnected.
pub fn gnm(n: usize, m: usize, seed: u64) -> GridGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = std::collections::BTreeSet::new();
    while set.len() < m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            set.insert((a.min(b), a.max(b)));
        }
    }
    from_pairs(&set.into_iter().collect::<Vec<_>>())
}

/// Connected, sparse, planar-ish graph resembling a transmission grid:
/// a geometric spanning tree, extra short-range links, and a share of
/// duplicated circuits. Voltages are drawn from typical levels.
pub fn grid_like(n: usize, target_edges: usize, parallel_share: f64, seed: u64) -> GridGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    let d2 = |a: usize, b: usize| (pos[a].0 - pos[b].0).powi(2) + (pos[a].1 - pos[b].1).powi(2);
    let mut pairs = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = (0..v).min_by(|&a, &b| d2(a, v).total_cmp(&d2(b, v))).unwrap();
        pairs.insert((u.min(v), u.max(v)));
    }
    let simple_target = ((target_edges as f64) * (1.0 - parallel_share)) as usize;
    while pairs.len() < simple_target.max(n - 1) {
        let a = rng.gen_range(0..n);
        let mut near: Vec<usize> = (0..n).filter(|&b| b != a).collect();
        near.sort_by(|&x, &y| d2(a, x).total_cmp(&d2(a, y)));
        let b = near[rng.gen_range(0..4.min(near.len()))];
        pairs.insert((a.min(b), a.max(b)));
    }
    let mut list: Vec<(usize, usize)> = pairs.into_iter().collect();
    while list.len() < target_edges {
        let i = rng.gen_range(0..list.len());
        list.push(list[i]);
    }
    let levels = [110.0, 132.0, 150.0, 220.0, 275.0, 400.0];
    let edges = list
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let kv = levels[rng.gen_range(0..levels.len())];
            edge(format!("n{a:04}"), format!("n{b:04}"), kv, i)
        })
        .collect();
    GridGraph::from_named_edges(edges, std::iter::empty::<String>()).unwrap()
}

struct Survivors {
    efficiency: f64,
    clustering: f64,
    lcc_size: usize,
    lcc_circuits: usize,
}

/// Brute-force state after removing `victims`: union-find components,
/// Floyd-Warshall efficiency over the intact node count, and clustering
/// from explicit neighbour pairs averaged over surviving nodes.
fn survivors(g: &GridGraph, kind: RemovalKind, victims: &[usize]) -> Survivors {
    let n = g.node_count();
    let mut alive_node = vec![true; n];
    let mut alive_edge = vec![true; g.edge_count()];
    for &v in victims {
        match kind {
            RemovalKind::Node => alive_node[v] = false,
            RemovalKind::Edge => alive_edge[v] = false,
        }
    }
    let live: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, e)| alive_edge[i] && alive_node[e.a] && alive_node[e.b])
        .map(|(_, e)| (e.a, e.b))
        .collect();

    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b) in &live {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let mut size = vec![0usize; n];
    let mut circuits = vec![0usize; n];
    for v in (0..n).filter(|&v| alive_node[v]) {
        let r = find(&mut parent, v);
        size[r] += 1;
    }
    for &(a, _) in &live {
        let r = find(&mut parent, a);
        circuits[r] += 1;
    }
    let lcc_size = size.iter().copied().max().unwrap_or(0);
    // ties for largest go to the component holding the smallest node index
    let lcc_circuits = (0..n)
        .filter(|&v| alive_node[v])
        .map(|v| find(&mut parent, v))
        .find(|&r| size[r] == lcc_size)
        .map_or(0, |r| circuits[r]);

    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in live.iter().filter(|(a, b)| a != b) {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if adj[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let mut inv = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j && d[i][j] < inf {
                inv += 1.0 / d[i][j] as f64;
            }
        }
    }

    let (mut total, mut count) = (0.0, 0);
    for v in (0..n).filter(|&v| alive_node[v]) {
        count += 1;
        let nb: Vec<usize> = (0..n).filter(|&u| adj[v][u]).collect();
        if nb.len() < 2 {
            continue;
        }
        let mut closed = 0;
        for x in 0..nb.len() {
            for y in x + 1..nb.len() {
                closed += adj[nb[x]][nb[y]] as usize;
            }
        }
        total += 2.0 * closed as f64 / (nb.len() * (nb.len() - 1)) as f64;
    }
    Survivors {
        efficiency: inv / (n * (n - 1)) as f64,
        clustering: if count > 0 { total / count as f64 } else { 0.0 },
        lcc_size,
        lcc_circuits,
    }
}

/// Run record recomputed from scratch, baseline included.
pub fn removal_oracle(g: &GridGraph, kind: RemovalKind, victims: &[usize]) -> RunRecord {
    let base = survivors(g, kind, &[]);
    let after = survivors(g, kind, victims);
    RunRecord {
        edges_lost_share: 1.0 - after.lcc_circuits as f64 / g.edge_count() as f64,
        lcc_size: after.lcc_size,
        eff_drop: (base.efficiency - after.efficiency) / base.efficiency,
        clustering_drop: (base.clustering > 0.0)
            .then(|| (base.clustering - after.clustering) / base.clustering),
    }
}
