//! Undirected contact networks with Poisson-converging degree laws.

use rand::Rng;

use crate::error::ModelError;
use crate::model::poisson_pmf;
use crate::rng::{self, RunRng};

/// Simple undirected graph stored as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    adjacency: Vec<Vec<u32>>,
}

impl SocialGraph {
    /// Builds a graph from an edge list. Self-loops and duplicate edges are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, ModelError> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(ModelError::field(
                    "edges",
                    format!("edge ({u}, {v}) out of range for n={n}"),
                ));
            }
            if u == v {
                return Err(ModelError::field("edges", format!("self-loop at {u}")));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(ModelError::field("edges", "duplicate edge"));
            }
        }
        Ok(SocialGraph { adjacency })
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.n() as f64
    }

    /// `histogram[k]` is the number of vertices of degree `k`.
    pub fn degree_histogram(&self) -> Vec<u64> {
        let max = self.adjacency.iter().map(Vec::len).max().unwrap_or(0);
        let mut histogram = vec![0u64; max + 1];
        for list in &self.adjacency {
            histogram[list.len()] += 1;
        }
        histogram
    }

    /// Checks symmetry, sortedness and the absence of loops and duplicates.
    pub fn is_consistent(&self) -> bool {
        self.adjacency.iter().enumerate().all(|(v, list)| {
            list.windows(2).all(|w| w[0] < w[1])
                && list.iter().all(|&u| {
                    (u as usize) < self.n()
                        && u as usize != v
                        && self.adjacency[u as usize].binary_search(&(v as u32)).is_ok()
                })
        })
    }
}

/// Erdős–Rényi `G(n, p)` with `p = k_bar / (n - 1)`.
///
/// Uses geometric skipping over the lower-triangular pair sequence
/// (Batagelj & Brandes), so the cost is linear in the number of edges.
pub fn generate_graph(n: usize, k_bar: f64, graph_seed: u64) -> Result<SocialGraph, ModelError> {
    if n < 2 {
        return Err(ModelError::field("n", format!("must be >= 2, got {n}")));
    }
    if n > u32::MAX as usize {
        return Err(ModelError::field("n", "too many vertices"));
    }
    if !(k_bar > 0.0 && k_bar <= (n - 1) as f64) {
        return Err(ModelError::field(
            "k_bar",
            format!("must lie in (0, n-1] = (0, {}], got {k_bar}", n - 1),
        ));
    }
    let p = (k_bar / (n - 1) as f64).min(1.0);
    let mut rng = rng::stream(graph_seed, rng::GRAPH_STREAM);
    let mut adjacency = vec![Vec::new(); n];
    for (v, w) in PairSampler::new(n, p, &mut rng) {
        adjacency[v].push(w as u32);
        adjacency[w].push(v as u32);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(SocialGraph { adjacency })
}

/// Yields the pairs `(v, w)`, `w < v`, selected independently with probability `p`.
struct PairSampler<'a> {
    n: usize,
    p: f64,
    log_q: f64,
    v: usize,
    w: usize,
    rng: &'a mut RunRng,
}

impl<'a> PairSampler<'a> {
    fn new(n: usize, p: f64, rng: &'a mut RunRng) -> Self {
        PairSampler {
            n,
            p,
            log_q: (1.0 - p).ln(),
            v: 1,
            w: 0,
            rng,
        }
    }

    fn skip(&mut self) -> usize {
        if self.p >= 1.0 {
            return 0;
        }
        let u: f64 = self.rng.random();
        let gap = ((1.0 - u).ln() / self.log_q).floor();
        // Saturate: a gap past the end of the pair sequence just terminates.
        if gap >= (self.n * self.n) as f64 {
            self.n * self.n
        } else {
            gap as usize
        }
    }
}

impl Iterator for PairSampler<'_> {
    type Item = (usize, usize);

    fn next(&mut self) -> Option<Self::Item> {
        if self.v >= self.n {
            return None;
        }
        let mut w = self.w + self.skip();
        while w >= self.v {
            w -= self.v;
            self.v += 1;
            if self.v >= self.n {
                return None;
            }
        }
        self.w = w + 1;
        Some((self.v, w))
    }
}

/// Total-variation distance between an empirical degree histogram and `Poisson(k_bar)`.
pub fn poisson_tv_distance(histogram: &[u64], k_bar: f64) -> Result<f64, ModelError> {
    let total: u64 = histogram.iter().sum();
    if total == 0 {
        return Err(ModelError::field("histogram", "empty"));
    }
    let mut distance = 0.0;
    let mut covered = 0.0;
    for (k, &count) in histogram.iter().enumerate() {
        let expected = poisson_pmf(k as u64, k_bar)?;
        covered += expected;
        distance += (count as f64 / total as f64 - expected).abs();
    }
    // Poisson mass beyond the largest observed degree.
    distance += (1.0 - covered).max(0.0);
    Ok(0.5 * distance)
}
