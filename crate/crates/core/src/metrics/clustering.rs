use crate::csr::Csr;
use crate::error::{GridError, Result};
use crate::graph::GridGraph;

/// Local clustering of one node over sorted simple neighbour lists.
pub(crate) fn local_clustering(adj: &[Vec<usize>], v: usize) -> f64 {
    let nbrs = &adj[v];
    let k = nbrs.len();
    if k < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &u) in nbrs.iter().enumerate() {
        for &w in &nbrs[i + 1..] {
            if adj[u].binary_search(&w).is_ok() {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (k * (k - 1)) as f64
}

/// Sum of local clustering over alive nodes, and the number of alive nodes.
/// `mark` must be all-false on entry and is left all-false. Terms are added in
/// sorted order, so the sum does not depend on node numbering.
pub(crate) fn clustering_sum(csr: &Csr, alive: Option<&[bool]>, mark: &mut [bool]) -> (f64, usize) {
    let n = csr.node_count();
    let mut terms = Vec::new();
    let mut count = 0;
    for v in 0..n {
        if alive.is_some_and(|a| !a[v]) {
            continue;
        }
        count += 1;
        let nbrs = csr.neighbors(v);
        let alive_nbrs = nbrs.iter().filter(|&&u| alive.is_none_or(|a| a[u as usize]));
        let mut k = 0usize;
        for &u in alive_nbrs.clone() {
            mark[u as usize] = true;
            k += 1;
        }
        if k >= 2 {
            let mut twice_links = 0usize;
            for &u in alive_nbrs.clone() {
                twice_links += csr
                    .neighbors(u as usize)
                    .iter()
                    .filter(|&&w| mark[w as usize])
                    .count();
            }
            terms.push(twice_links as f64 / (k * (k - 1)) as f64);
        }
        for &u in nbrs {
            mark[u as usize] = false;
        }
    }
    terms.sort_unstable_by(f64::total_cmp);
    (terms.iter().sum(), count)
}

/// Average local clustering over all nodes, on the simple projection.
/// Nodes of degree below 2 contribute zero.
pub fn clustering(g: &GridGraph) -> Result<f64> {
    let n = g.node_count();
    if n == 0 {
        return Err(GridError::undefined("clustering", "graph has no nodes"));
    }
    let mut mark = vec![false; n];
    let (sum, count) = clustering_sum(&g.simple_csr(), None, &mut mark);
    Ok(sum / count as f64)
}
