//! Seeded instance families.
//!
//! Every generator is a pure function of its parameters and seed. Random
//! pair decisions are drawn in lexicographic pair order from a ChaCha8 stream
//! split off the seed, so outputs are identical across platforms.

use rand::Rng;

use crate::graph::{Clustering, SimilarityGraph, VertexId};
use crate::rng::SeedStream;
use crate::{Error, Result};

/// Planted-partition family with one outsized cluster and symmetric noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    /// Ground-truth cluster count, at least 2.
    pub k: usize,
    /// Share of the vertices in the first cluster, in `(0, 1)`.
    pub alpha: f64,
    /// Probability of flipping a within-cluster pair to negative. Cross pairs
    /// flip to positive with probability `beta / (k - 1)`.
    pub beta: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(n: usize, k: usize, alpha: f64, beta: f64, seed: u64) -> Result<Self> {
        let spec = Self {
            n,
            k,
            alpha,
            beta,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Parameter(format!(
                "k = {} must be at least 2",
                self.k
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!(
                "alpha = {} outside (0, 1)",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Parameter(format!(
                "beta = {} outside [0, 1]",
                self.beta
            )));
        }
        let big = self.big_cluster_size();
        if big < 1 || self.n < big + self.k - 1 {
            return Err(Error::Parameter(format!(
                "n = {} cannot hold a cluster of {big} plus {} non-empty clusters",
                self.n,
                self.k - 1
            )));
        }
        Ok(())
    }

    /// `round(alpha · n)`.
    pub fn big_cluster_size(&self) -> usize {
        (self.alpha * self.n as f64).round() as usize
    }

    /// Effective ground-truth cluster sizes: `round(alpha·n)` first, then the
    /// rest split as evenly as possible over `k - 1` clusters.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let big = self.big_cluster_size();
        let rest = self.n - big;
        let others = self.k - 1;
        let mut sizes = vec![big];
        sizes.extend((0..others).map(|i| rest / others + usize::from(i < rest % others)));
        sizes
    }

    pub fn cross_flip_probability(&self) -> f64 {
        self.beta / (self.k - 1) as f64
    }
}

fn labels_for_sizes(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(label, &size)| std::iter::repeat_n(label, size))
        .collect()
}

/// Draws a graph from the noisy planted-partition family. Returns the graph
/// and its ground truth.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(SimilarityGraph, Clustering)> {
    spec.validate()?;
    let labels = labels_for_sizes(&spec.cluster_sizes());
    let cross = spec.cross_flip_probability();
    let mut rng = SeedStream::new(spec.seed).split("synthetic").rng();
    let n = spec.n;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let positive = if labels[u] == labels[v] {
                !rng.random_bool(spec.beta)
            } else {
                rng.random_bool(cross)
            };
            if positive {
                edges.push((u, v));
            }
        }
    }
    let graph = SimilarityGraph::from_edges(n, edges)?;
    Ok((graph, Clustering::new(labels)))
}

/// Hard-instance family: `A` is split into `k` cliques and every vertex of
/// `B` links to all of one uniformly chosen clique.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBoundSpec {
    pub n: usize,
    /// Approximation target `c ≥ 1`.
    pub c: u32,
    pub requested_epsilon: f64,
    /// `1 / (32·c·k)` for the `k` actually used.
    pub epsilon: f64,
    /// `1 / (4c)`.
    pub alpha: f64,
    /// `|B| = alpha·n`.
    pub b_size: usize,
    /// Number of cliques in `A`.
    pub k: usize,
    pub seed: u64,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl LowerBoundSpec {
    /// Derives `alpha = 1/(4c)` and `k = 1/(32·c·epsilon)`. `n` must be a
    /// multiple of `4c`; `k` is moved to the nearest divisor of both `|A|` and
    /// `|B|` (ties to the smaller), and `epsilon` re-derived from it.
    pub fn new(n: usize, c: u32, epsilon: f64, seed: u64) -> Result<Self> {
        if c < 1 {
            return Err(Error::Parameter("c must be at least 1".into()));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Parameter(format!(
                "epsilon = {epsilon} must be positive"
            )));
        }
        let four_c = 4 * c as usize;
        if n == 0 || !n.is_multiple_of(four_c) {
            return Err(Error::Parameter(format!(
                "n = {n} must be a positive multiple of 4c = {four_c}"
            )));
        }
        let b_size = n / four_c;
        let common = gcd(b_size, n - b_size);
        let target = 1.0 / (32.0 * f64::from(c) * epsilon);
        let k = (1..=common)
            .filter(|d| common.is_multiple_of(*d))
            .min_by(|&x, &y| {
                let dx = (x as f64 - target).abs();
                let dy = (y as f64 - target).abs();
                dx.total_cmp(&dy).then(x.cmp(&y))
            })
            .expect("1 divides everything");
        Ok(Self {
            n,
            c,
            requested_epsilon: epsilon,
            epsilon: 1.0 / (32.0 * f64::from(c) * k as f64),
            alpha: 1.0 / four_c as f64,
            b_size,
            k,
            seed,
        })
    }

    pub fn a_size(&self) -> usize {
        self.n - self.b_size
    }

    pub fn clique_size(&self) -> usize {
        self.a_size() / self.k
    }

    /// `T = epsilon·n²`.
    pub fn additive_error(&self) -> f64 {
        self.epsilon * (self.n * self.n) as f64
    }

    /// Whether `1/n < epsilon ≤ 1/(2048·c²)`, the range in which the
    /// query lower bound applies.
    pub fn within_theorem_range(&self) -> bool {
        let c = f64::from(self.c);
        self.epsilon > 1.0 / self.n as f64 && self.epsilon <= 1.0 / (2048.0 * c * c)
    }

    /// Expected cost of the natural clustering, `C(|B|, 2) / k`.
    pub fn expected_natural_cost(&self) -> f64 {
        crate::pairs(self.b_size) as f64 / self.k as f64
    }
}

/// Draws a hard instance. Vertices `0..|A|` form the cliques `C_1..C_k` in
/// contiguous blocks; vertices `|A|..n` form `B`. The returned clustering is
/// the natural one, putting each `B` vertex with the clique it links to.
pub fn generate_lower_bound_instance(
    spec: &LowerBoundSpec,
) -> Result<(SimilarityGraph, Clustering)> {
    let checked = LowerBoundSpec::new(spec.n, spec.c, spec.requested_epsilon, spec.seed)?;
    if checked != *spec {
        return Err(Error::Parameter(
            "lower-bound spec fields are inconsistent; build it with LowerBoundSpec::new".into(),
        ));
    }
    let size = spec.clique_size();
    let a = spec.a_size();
    let mut labels: Vec<usize> = (0..a).map(|v| v / size).collect();
    let mut edges = Vec::new();
    for block in 0..spec.k {
        let start = block * size;
        for u in start..start + size {
            edges.extend((u + 1..start + size).map(|v| (u, v)));
        }
    }
    let mut rng = SeedStream::new(spec.seed).split("lower-bound").rng();
    for v in a..spec.n {
        let r = rng.random_range(0..spec.k);
        labels.push(r);
        edges.extend((r * size..(r + 1) * size).map(|u| (u, v)));
    }
    let graph = SimilarityGraph::from_edges(spec.n, edges)?;
    Ok((graph, Clustering::new(labels)))
}

/// Disjoint cliques of the given sizes, with the cliques as clustering.
pub fn generate_cluster_graph(sizes: &[usize]) -> Result<(SimilarityGraph, Clustering)> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::Parameter(
            "cluster sizes must be a non-empty list of positive integers".into(),
        ));
    }
    let labels = labels_for_sizes(sizes);
    let n = labels.len();
    let mut edges = Vec::new();
    let mut start = 0;
    for &size in sizes {
        for u in start..start + size {
            edges.extend((u + 1..start + size).map(|v| (u, v)));
        }
        start += size;
    }
    let graph = SimilarityGraph::from_edges(n, edges)?;
    Ok((graph, Clustering::new(labels)))
}

/// Erdős–Rényi `G(n, p)` on the positive edges.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<SimilarityGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("p = {p} outside [0, 1]")));
    }
    let mut rng = SeedStream::new(seed).split("gnp").rng();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    SimilarityGraph::from_edges(n, edges)
}
