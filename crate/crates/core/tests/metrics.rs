mod common;

use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use gridtopo::graph::GridGraph;
use gridtopo::metrics::*;
use gridtopo::{derive_variant, parse_edge_list, GridError, Variant};
use proptest::prelude::*;

fn graph(text: &str) -> GridGraph {
    parse_edge_list(text.as_bytes()).unwrap()
}

/// Floyd-Warshall on the simple projection; `None` marks unreachable pairs.
fn apsp(g: &GridGraph) -> Vec<Vec<Option<u32>>> {
    let n = g.node_count();
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for e in g.edges().iter().filter(|e| !e.is_loop()) {
        d[e.a][e.b] = Some(1);
        d[e.b][e.a] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| x + y < c) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

struct PairOracle {
    efficiency: f64,
    avg_path_length: f64,
    diameter: u32,
    unordered: BTreeMap<u32, u64>,
}

fn pair_oracle(g: &GridGraph) -> PairOracle {
    let d = apsp(g);
    let n = g.node_count();
    let (mut inv, mut hops, mut pairs, mut diameter) = (0.0, 0u64, 0u64, 0);
    let mut unordered = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if let (true, Some(x)) = (i != j, d[i][j]) {
                inv += 1.0 / x as f64;
                hops += x as u64;
                pairs += 1;
                diameter = diameter.max(x);
                if i < j {
                    *unordered.entry(x).or_insert(0) += 1;
                }
            }
        }
    }
    PairOracle {
        efficiency: inv / (n * (n - 1)) as f64,
        avg_path_length: hops as f64 / pairs as f64,
        diameter,
        unordered,
    }
}

fn adjacency(g: &GridGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for e in g.edges().iter().filter(|e| !e.is_loop()) {
        a[e.a][e.b] = true;
        a[e.b][e.a] = true;
    }
    a
}

/// Mean over nodes of closed-triangle share, counting neighbour pairs
/// explicitly.
fn clustering_oracle(g: &GridGraph) -> f64 {
    let a = adjacency(g);
    let n = a.len();
    let mut total = 0.0;
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&u| a[v][u]).collect();
        if nb.len() < 2 {
            continue;
        }
        let (mut closed, mut possible) = (0, 0);
        for x in 0..nb.len() {
            for y in x + 1..nb.len() {
                possible += 1;
                if a[nb[x]][nb[y]] {
                    closed += 1;
                }
            }
        }
        total += closed as f64 / possible as f64;
    }
    total / n as f64
}

/// `Q = 1/2m Σ_ij (A_ij − k_i k_j / 2m) δ(c_i, c_j)` on the multigraph
/// adjacency matrix.
fn modularity_oracle(g: &GridGraph, part: &[usize]) -> f64 {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for e in g.edges() {
        if e.is_loop() {
            a[e.a][e.a] += 2.0;
        } else {
            a[e.a][e.b] += 1.0;
            a[e.b][e.a] += 1.0;
        }
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if part[i] == part[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// All set partitions of `n` items as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for c in 0..=next {
            prefix.push(c);
            rec(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}

fn connected_graph() -> impl Strategy<Value = GridGraph> {
    (3usize..14)
        .prop_flat_map(|n| {
            let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|v| (0..v).boxed()).collect();
            (Just(n), parents, prop::collection::vec((0..n, 0..n), 0..12))
        })
        .prop_map(|(_, parents, extra)| {
            let mut pairs: Vec<(usize, usize)> =
                parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
            pairs.extend(extra.into_iter().filter(|(a, b)| a != b));
            common::from_pairs(&pairs)
        })
}

fn any_graph() -> impl Strategy<Value = GridGraph> {
    (2usize..12)
        .prop_flat_map(|n| prop::collection::vec((0..n, 0..n), 1..25))
        .prop_map(|pairs| common::from_pairs(&pairs))
}

#[test]
fn counting_examples() {
    let k4 = common::complete(4);
    assert_eq!(density(&k4).unwrap(), 1.0);
    assert_eq!(mean_degree(&graph("a,b,110")).unwrap(), 1.0);
    let lone = graph("a,a,110");
    assert!(matches!(density(&lone), Err(GridError::UndefinedMetric { .. })));
    assert!(matches!(
        efficiency(&lone),
        Err(GridError::UndefinedMetric { .. })
    ));
    assert!(matches!(
        distance_stats(&lone),
        Err(GridError::UndefinedMetric { .. })
    ));
}

#[test]
fn parallel_circuits_count_in_density() {
    let g = graph("a,b,400\na,b,400\nb,c,110");
    assert_abs_diff_eq!(density(&g).unwrap(), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(mean_degree(&g).unwrap(), 2.0, epsilon = 1e-15);
}

#[test]
fn path_p3_examples() {
    let p3 = common::path(3);
    let s = distance_stats(&p3).unwrap();
    assert_abs_diff_eq!(s.avg_path_length, 4.0 / 3.0, epsilon = 1e-15);
    assert_eq!(s.diameter, 2);
    assert_abs_diff_eq!(efficiency(&p3).unwrap(), 2.5 / 3.0, epsilon = 1e-15);
    assert_eq!(s.distribution.counts, BTreeMap::from([(1, 2), (2, 1)]));
}

#[test]
fn complete_graph_efficiency_is_exactly_one() {
    for n in 2..=8 {
        assert_eq!(efficiency(&common::complete(n)).unwrap(), 1.0, "K{n}");
    }
}

#[test]
fn clustering_examples() {
    assert_eq!(clustering(&graph("a,b,110\nb,c,110\nc,a,110")).unwrap(), 1.0);
    assert_eq!(clustering(&graph("h,a,110\nh,b,110\nh,c,110")).unwrap(), 0.0);
    // doubled circuits must not change anything
    let doubled = graph("a,b,110\na,b,220\nb,c,110\nc,a,110\nc,d,110");
    let single = graph("a,b,110\nb,c,110\nc,a,110\nc,d,110");
    assert_eq!(clustering(&doubled).unwrap(), clustering(&single).unwrap());
}

#[test]
fn single_community_is_exactly_zero() {
    for g in [
        common::complete(5),
        common::path(7),
        graph("a,b,400\na,b,400\nb,c,110\nc,c,110"),
        common::grid_like(80, 150, 0.2, 9),
    ] {
        assert_eq!(evaluate_partition(&g, &vec![0; g.node_count()]).unwrap(), 0.0);
    }
}

#[test]
fn louvain_finds_two_triangles() {
    let g = graph("a,b,1\nb,c,1\nc,a,1\nx,y,1\ny,z,1\nz,x,1");
    let best = set_partitions(6)
        .iter()
        .map(|p| modularity_oracle(&g, p))
        .fold(f64::NEG_INFINITY, f64::max);
    assert_abs_diff_eq!(best, 0.5, epsilon = 1e-12);
    let m = modularity(&g).unwrap();
    assert_abs_diff_eq!(m.q, 0.5, epsilon = 1e-12);
    assert_eq!(m.partition, vec![0, 0, 0, 1, 1, 1]);
}

fn exhaustive_best(g: &GridGraph, parts: &[Vec<Vec<usize>>]) -> f64 {
    parts[g.node_count()]
        .iter()
        .map(|p| modularity_oracle(g, p))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn louvain_is_near_exhaustive_optimum_on_small_graphs() {
    let parts: Vec<Vec<Vec<usize>>> = (0..=9).map(set_partitions).collect();
    for seed in 0..60u64 {
        for (n, m) in [(7, 8), (8, 11), (9, 12), (9, 16)] {
            let g = common::gnm(n, m, seed * 31 + n as u64);
            let best = exhaustive_best(&g, &parts);
            let found = modularity(&g).unwrap();
            assert_abs_diff_eq!(found.q, modularity_oracle(&g, &found.partition), epsilon = 1e-12);
            assert!(found.q <= best + 1e-12);
            assert!(found.q >= best - 0.05, "seed {seed}: {} vs {best}", found.q);
        }
    }
}

#[test]
fn modularity_needs_edges() {
    let g = GridGraph::from_named_edges(Vec::new(), ["a", "b"]).unwrap();
    assert!(matches!(modularity(&g), Err(GridError::UndefinedMetric { .. })));
}

#[test]
fn sigma_of_k4() {
    // C = 1, L = 1, N = 4, <k> = 3, evaluated by hand
    let l_r = (4f64.ln() - 0.5772) / 3f64.ln() + 0.5;
    let oracle = 1.0 / (3.0 / 4.0) * l_r;
    let s = sigma(&common::complete(4)).unwrap();
    assert!(!s.degenerate);
    assert_abs_diff_eq!(s.value, oracle, epsilon = 1e-12);
    assert_abs_diff_eq!(s.value, 1.6487, epsilon = 1e-4);
}

#[test]
fn sigma_edge_cases() {
    assert!(matches!(
        sigma(&common::path(2)),
        Err(GridError::UndefinedMetric { .. })
    ));
    let star = graph("h,a,1\nh,b,1\nh,c,1\nh,d,1\na,b,1");
    assert!(!sigma(&star).unwrap().degenerate);
    let c4 = common::ring_lattice(4, 2);
    let s = sigma(&c4).unwrap();
    assert!(s.degenerate);
    assert_eq!(s.value, 0.0);
}

#[test]
fn omega_reference_points() {
    let (n, k) = (50, 4.0);
    let l_r = random_path_length(n, k);
    assert_abs_diff_eq!(omega_from(n, k, 0.3, l_r, 0.3).unwrap(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(omega_from(n, k, 0.0, l_r, 0.3).unwrap(), 1.0, epsilon = 1e-15);
    assert!(matches!(
        omega(&common::complete(4), 0.0),
        Err(GridError::UndefinedMetric { .. })
    ));
}

#[test]
fn ring_lattice_is_its_own_lattice() {
    for n in [12, 20, 40] {
        let ring = common::ring_lattice(n, 4);
        let c = clustering(&ring).unwrap();
        assert_abs_diff_eq!(c, 0.5, epsilon = 1e-12);
        let lat = lattice_reference(&ring).unwrap();
        assert!(!lat.degenerate);
        assert_abs_diff_eq!(lat.value, 0.5, epsilon = 1e-12);
    }
}

#[test]
fn lattice_reference_examples() {
    let tri = graph("a,b,1\nb,c,1\nc,a,1");
    assert_eq!(lattice_reference(&tri).unwrap().value, 1.0);
    assert!(lattice_reference(&common::path(6)).unwrap().degenerate);
    assert!(lattice_reference(&common::path(2)).is_err());
    for seed in 0..5 {
        let g = common::grid_like(120, 170, 0.1, seed);
        let lat = lattice_reference(&g).unwrap();
        let c = clustering(&g).unwrap();
        assert!(lat.value > 0.0 && lat.value <= 1.0);
        assert!(lat.value >= c - 1e-12, "{} < {c}", lat.value);
        assert_eq!(lat, lattice_reference(&g).unwrap());
    }
}

#[test]
fn voltage_share_examples() {
    let all_400 = graph("a,b,400\nb,c,400\nc,a,400");
    let s = voltage_shares(&all_400).unwrap();
    assert_eq!(
        (s.kv_110_150, s.kv_220_275, s.kv_330_400, s.other),
        (0.0, 0.0, 1.0, 0.0)
    );
    let mixed = graph("a,b,110\nb,c,150\nc,d,220\nd,e,275\ne,f,330\nf,g,500\ng,h,60\nh,i,400");
    let s = voltage_shares(&mixed).unwrap();
    assert_eq!(s.kv_110_150, 0.25);
    assert_eq!(s.kv_220_275, 0.25);
    assert_eq!(s.kv_330_400, 0.25);
    assert_eq!(s.other, 0.25);
}

#[test]
fn report_row_matches_columns() {
    let g = common::grid_like(60, 90, 0.1, 1);
    let (r, dist) = compute_metrics(&g).unwrap();
    assert_eq!(r.row().len(), MetricsReport::COLUMNS.len());
    assert_eq!(r.diameter, *dist.counts.keys().next_back().unwrap());
    assert_abs_diff_eq!(r.mean_degree, r.density * 59.0, epsilon = 1e-9);
    let back: MetricsReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}

proptest! {
    #[test]
    fn distances_match_floyd_warshall(g in any_graph()) {
        prop_assume!(g.node_count() >= 2);
        let o = pair_oracle(&g);
        prop_assert!((efficiency(&g).unwrap() - o.efficiency).abs() < 1e-12);
        if let Ok(s) = distance_stats(&g) {
            prop_assert_eq!(s.diameter, o.diameter);
            prop_assert!((s.avg_path_length - o.avg_path_length).abs() < 1e-12);
            prop_assert_eq!(&s.distribution.counts, &o.unordered);
            let total: f64 = s.distribution.pdf().values().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        } else {
            prop_assert!(o.unordered.is_empty());
        }
    }

    #[test]
    fn clustering_matches_triangle_count(g in any_graph()) {
        prop_assert!((clustering(&g).unwrap() - clustering_oracle(&g)).abs() < 1e-12);
    }

    #[test]
    fn partition_evaluation_matches_matrix_form(
        g in any_graph(),
        labels in prop::collection::vec(0usize..4, 12),
    ) {
        let part = &labels[..g.node_count()];
        let q = evaluate_partition(&g, part).unwrap();
        prop_assert!((q - modularity_oracle(&g, part)).abs() < 1e-12);
    }

    #[test]
    fn bounded_metrics(g in connected_graph()) {
        let (r, _) = compute_metrics(&g).unwrap();
        for v in [r.clustering, r.efficiency] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        // parallel circuits can push a tiny multigraph past the complete count
        let simple = derive_variant(&g, Variant::SimplifiedHv.spec()).unwrap();
        prop_assert!((0.0..=1.0).contains(&density(&simple).unwrap()));
        prop_assert!(r.modularity >= -1e-12);
        if !r.sigma_degenerate {
            prop_assert!(r.sigma > 0.0);
        }
        let shares = r.voltage_shares;
        let sum = shares.kv_110_150 + shares.kv_220_275 + shares.kv_330_400 + shares.other;
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adding_an_edge_never_lengthens_paths(g in connected_graph(), a in 0usize..14, b in 0usize..14) {
        let n = g.node_count();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let mut pairs: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|e| (g.nodes()[e.a][1..].parse().unwrap(), g.nodes()[e.b][1..].parse().unwrap()))
            .collect();
        pairs.push((a, b));
        let h = common::from_pairs(&pairs);
        let (d0, d1) = (apsp(&g), apsp(&h));
        for i in 0..n {
            for j in 0..n {
                prop_assert!(d1[i][j].unwrap() <= d0[i][j].unwrap());
            }
        }
        prop_assert!(efficiency(&h).unwrap() >= efficiency(&g).unwrap());
        let (l0, l1) = (
            distance_stats(&g).unwrap().avg_path_length,
            distance_stats(&h).unwrap().avg_path_length,
        );
        prop_assert!(l1 <= l0);
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn relabeling_preserves_metrics(g in connected_graph(), shift in 1usize..50) {
        // reversing and shifting names changes the internal node order
        let n = g.node_count();
        let rename = |name: &str| {
            let i: usize = name[1..].parse().unwrap();
            format!("m{:04}", (n - 1 - i) * 7 + shift)
        };
        let edges = g
            .edges()
            .iter()
            .map(|e| common::edge(rename(&g.nodes()[e.a]), rename(&g.nodes()[e.b]), e.voltage_kv, 0))
            .collect();
        let h = GridGraph::from_named_edges(edges, std::iter::empty::<String>()).unwrap();
        let (r0, d0) = compute_metrics(&g).unwrap();
        let (r1, d1) = compute_metrics(&h).unwrap();
        prop_assert_eq!(d0, d1);
        prop_assert_eq!(
            (r0.n_nodes, r0.n_edges, r0.density, r0.mean_degree, r0.diameter),
            (r1.n_nodes, r1.n_edges, r1.density, r1.mean_degree, r1.diameter)
        );
        prop_assert_eq!(
            (r0.avg_path_length, r0.clustering, r0.efficiency, r0.sigma),
            (r1.avg_path_length, r1.clustering, r1.efficiency, r1.sigma)
        );
        prop_assert_eq!(r0.voltage_shares, r1.voltage_shares);
        // the partition found on one labelling scores the same on the other
        let q0 = modularity(&g).unwrap();
        let moved: Vec<usize> = h
            .nodes()
            .iter()
            .map(|name| {
                let orig = g.nodes().iter().position(|o| rename(o) == *name).unwrap();
                q0.partition[orig]
            })
            .collect();
        prop_assert!((evaluate_partition(&h, &moved).unwrap() - q0.q).abs() < 1e-12);
        // the optimizer's visiting order follows node numbering, so each
        // labelling is held to the exhaustive optimum instead
        if n <= 9 {
            let parts: Vec<Vec<Vec<usize>>> = (0..=n).map(set_partitions).collect();
            let best = exhaustive_best(&g, &parts);
            prop_assert!(r0.modularity >= best - 0.05 && r0.modularity <= best + 1e-12);
            prop_assert!(r1.modularity >= best - 0.05 && r1.modularity <= best + 1e-12);
        }
    }
}
