//! Compressed adjacency of the simple projection, plus the BFS kernels shared
//! by the metric suite and the removal engine.

/// Symmetric, deduplicated, loop-free adjacency in CSR layout.
#[derive(Debug, Clone, Default)]
pub(crate) struct Csr {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Csr {
    pub(crate) fn from_edges(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a != b {
                pairs.push((a as u32, b as u32));
                pairs.push((b as u32, a as u32));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0u32; n + 1];
        for &(a, _) in &pairs {
            offsets[a as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Csr {
            offsets,
            targets: pairs.into_iter().map(|(_, b)| b).collect(),
        }
    }

    pub(crate) fn node_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    #[inline]
    pub(crate) fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }
}

/// Label every alive node with its component. Components are numbered by
/// size descending, ties broken by smallest member index. Dead nodes get
/// `usize::MAX`. Returns `(labels, sizes)`.
pub(crate) fn component_labels(csr: &Csr, alive: Option<&[bool]>) -> (Vec<usize>, Vec<usize>) {
    let n = csr.node_count();
    let is_alive = |v: usize| alive.is_none_or(|a| a[v]);
    let mut raw = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if raw[s] != usize::MAX || !is_alive(s) {
            continue;
        }
        let id = sizes.len();
        raw[s] = id;
        stack.push(s);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in csr.neighbors(v) {
                let w = w as usize;
                if raw[w] == usize::MAX && is_alive(w) {
                    raw[w] = id;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    // discovery order already follows smallest member index
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&x, &y| sizes[y].cmp(&sizes[x]));
    let mut rank = vec![0; sizes.len()];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    let labels = raw
        .into_iter()
        .map(|l| if l == usize::MAX { l } else { rank[l] })
        .collect();
    let sorted_sizes = order.iter().map(|&c| sizes[c]).collect();
    (labels, sorted_sizes)
}

const WORDS: usize = 4;
const BATCH: usize = 64 * WORDS;
type Bits = [u64; WORDS];

/// Reusable buffers for repeated all-pairs BFS.
///
/// Sources are processed in batches of 256, one bit per source, so a level
/// expansion of the whole batch costs a single pass over the adjacency.
#[derive(Debug, Default)]
pub(crate) struct BfsScratch {
    visited: Vec<Bits>,
    frontier: Vec<Bits>,
    next: Vec<Bits>,
    sources: Vec<usize>,
}

impl BfsScratch {
    /// Histogram of hop distances over ordered reachable pairs `(i, j)`,
    /// `i != j`, among alive nodes. `counts[d]` is the number of pairs at
    /// distance `d`; `counts[0]` stays zero.
    pub(crate) fn distance_counts(&mut self, csr: &Csr, alive: Option<&[bool]>) -> Vec<u64> {
        let n = csr.node_count();
        let is_alive = |v: usize| alive.is_none_or(|a| a[v]);
        let mut counts = vec![0u64; 1];
        self.sources.clear();
        self.sources
            .extend((0..n).filter(|&s| is_alive(s) && !csr.neighbors(s).is_empty()));
        for b in 0..self.sources.len().div_ceil(BATCH) {
            let lo = b * BATCH;
            let hi = (lo + BATCH).min(self.sources.len());
            self.visited.clear();
            self.visited.resize(n, [0; WORDS]);
            self.frontier.clear();
            self.frontier.resize(n, [0; WORDS]);
            self.next.clear();
            self.next.resize(n, [0; WORDS]);
            for (bit, &s) in self.sources[lo..hi].iter().enumerate() {
                self.visited[s][bit / 64] |= 1 << (bit % 64);
                self.frontier[s][bit / 64] |= 1 << (bit % 64);
            }
            let mut d = 0;
            loop {
                d += 1;
                let mut found = 0u64;
                for v in 0..n {
                    let mut acc = [0u64; WORDS];
                    if is_alive(v) {
                        for &w in csr.neighbors(v) {
                            let f = &self.frontier[w as usize];
                            for k in 0..WORDS {
                                acc[k] |= f[k];
                            }
                        }
                        let seen = &mut self.visited[v];
                        for k in 0..WORDS {
                            acc[k] &= !seen[k];
                            seen[k] |= acc[k];
                            found += u64::from(acc[k].count_ones());
                        }
                    }
                    self.next[v] = acc;
                }
                if found == 0 {
                    break;
                }
                if counts.len() <= d {
                    counts.resize(d + 1, 0);
                }
                counts[d] += found;
                std::mem::swap(&mut self.frontier, &mut self.next);
            }
        }
        counts
    }
}

/// `Σ count_d / d` over a distance histogram, reduced in distance order.
pub(crate) fn inverse_distance_sum(counts: &[u64]) -> f64 {
    counts
        .iter()
        .enumerate()
        .skip(1)
        .map(|(d, &c)| c as f64 / d as f64)
        .sum()
}
