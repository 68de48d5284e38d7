//! Clustering quality: disagreement cost, positive-edge precision and recall,
//! and an exhaustive optimum for small instances.

use crate::graph::{check_len, Clustering, SimilarityGraph};
use crate::{pairs, Error, Result};

/// Largest instance [`brute_force_opt`] accepts (Bell(12) ≈ 4.2M partitions).
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Pair counts from which cost, precision and recall are derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairCounts {
    /// Pairs of vertices sharing a cluster.
    pub together: u64,
    /// Positive edges inside clusters.
    pub positive_together: u64,
    /// All positive edges.
    pub positive: u64,
}

impl PairCounts {
    pub fn compute(g: &SimilarityGraph, c: &Clustering) -> Result<Self> {
        check_len(g, c)?;
        let together = c.sizes().into_iter().map(pairs).sum();
        let labels = c.labels();
        let positive_together = g.edges().filter(|&(u, v)| labels[u] == labels[v]).count() as u64;
        Ok(Self {
            together,
            positive_together,
            positive: g.m() as u64,
        })
    }

    /// Negative pairs inside clusters plus positive pairs across clusters.
    pub fn cost(&self) -> u64 {
        (self.together - self.positive_together) + (self.positive - self.positive_together)
    }

    /// `positive_together / together`, or 1 when nothing is clustered together.
    pub fn precision(&self) -> f64 {
        if self.together == 0 {
            1.0
        } else {
            self.positive_together as f64 / self.together as f64
        }
    }

    /// `positive_together / positive`, or 1 when the graph has no positive edge.
    pub fn recall(&self) -> f64 {
        if self.positive == 0 {
            1.0
        } else {
            self.positive_together as f64 / self.positive as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QualityReport {
    pub cost: u64,
    pub precision: f64,
    pub recall: f64,
    pub num_clusters: usize,
    pub num_nonsingleton_clusters: usize,
    pub counts: PairCounts,
}

impl QualityReport {
    pub fn evaluate(g: &SimilarityGraph, c: &Clustering) -> Result<Self> {
        let counts = PairCounts::compute(g, c)?;
        let sizes = c.sizes();
        Ok(Self {
            cost: counts.cost(),
            precision: counts.precision(),
            recall: counts.recall(),
            num_clusters: sizes.len(),
            num_nonsingleton_clusters: sizes.iter().filter(|&&s| s > 1).count(),
            counts,
        })
    }
}

/// Number of disagreements of `c` on `g`, in O(n + m).
pub fn cost(g: &SimilarityGraph, c: &Clustering) -> Result<u64> {
    Ok(PairCounts::compute(g, c)?.cost())
}

pub fn precision_recall(g: &SimilarityGraph, c: &Clustering) -> Result<(f64, f64)> {
    let counts = PairCounts::compute(g, c)?;
    Ok((counts.precision(), counts.recall()))
}

/// Exact minimum-cost clustering by depth-first enumeration of
/// restricted-growth strings in lexicographic order, pruned on the partial
/// cost. The witness is the lexicographically first optimal string.
pub fn brute_force_opt(g: &SimilarityGraph) -> Result<(u64, Clustering)> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let adjacent: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..n).map(|v| g.has_edge(u, v)).collect())
        .collect();

    struct Search<'a> {
        adjacent: &'a [Vec<bool>],
        current: Vec<usize>,
        best_cost: u64,
        best: Vec<usize>,
    }

    impl Search<'_> {
        fn descend(&mut self, depth: usize, blocks: usize, partial: u64) {
            let n = self.adjacent.len();
            if partial >= self.best_cost {
                return;
            }
            if depth == n {
                self.best_cost = partial;
                self.best.clone_from(&self.current);
                return;
            }
            for block in 0..=blocks {
                let added: u64 = (0..depth)
                    .map(|w| {
                        let same = self.current[w] == block;
                        u64::from(same != self.adjacent[depth][w])
                    })
                    .sum();
                self.current[depth] = block;
                self.descend(depth + 1, blocks.max(block + 1), partial + added);
            }
        }
    }

    let mut search = Search {
        adjacent: &adjacent,
        current: vec![0; n],
        best_cost: u64::MAX,
        best: vec![0; n],
    };
    search.descend(0, 0, 0);
    if n == 0 {
        return Ok((0, Clustering::new(Vec::new())));
    }
    Ok((search.best_cost, Clustering::new(search.best)))
}
