//! Pivot-based clustering under a query budget.
//!
//! All four procedures grow clusters around pivots: a pivot `v` still in the
//! unclustered set `R` takes every `w ∈ R` with a positive edge to it, and the
//! cluster leaves `R`. They differ in how pivots are chosen and when they stop:
//!
//! * [`qwick_cluster`]: uniform pivots until `R` is empty (needs every pair).
//! * [`qecc`]: the same loop, stopped once the budget cannot pay for another
//!   full neighbourhood scan of `|R| - 1` pairs.
//! * [`qecc_nonadaptive`]: all queries fixed up front from a random vertex
//!   sample, then the sample is walked in order.
//! * [`qecc_heur`]: pivots found by probing uniform ordered pairs of `R`, so a
//!   vertex is picked with probability proportional to its degree inside `R`.
//!
//! Whatever remains in `R` at the end becomes singleton clusters. Pivot
//! clusters are labeled `0, 1, ...` in pivot order; singletons follow in
//! ascending vertex order.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::graph::{Clustering, VertexId};
use crate::oracle::BudgetedOracle;
use crate::{pairs, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Qwick,
    Qecc,
    QeccNonAdaptive,
    QeccHeur,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Qwick,
        Algorithm::Qecc,
        Algorithm::QeccNonAdaptive,
        Algorithm::QeccHeur,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Qwick => "qwick",
            Algorithm::Qecc => "qecc",
            Algorithm::QeccNonAdaptive => "qecc-nonadaptive",
            Algorithm::QeccHeur => "qecc-heur",
        }
    }

    /// Whether the algorithm honours an arbitrary budget. QwickCluster needs
    /// one covering every pair.
    pub fn is_budgeted(self) -> bool {
        self != Algorithm::Qwick
    }

    pub fn run<R: Rng + ?Sized>(
        self,
        oracle: &mut BudgetedOracle<'_>,
        rng: &mut R,
    ) -> Result<RunResult> {
        match self {
            Algorithm::Qwick => qwick_cluster(oracle, rng),
            Algorithm::Qecc => qecc(oracle, rng),
            Algorithm::QeccNonAdaptive => qecc_nonadaptive(oracle, rng),
            Algorithm::QeccHeur => qecc_heur(oracle, rng),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub clustering: Clustering,
    /// Pivots in the order they were chosen.
    pub pivots: Vec<VertexId>,
    /// Units charged by the oracle during this run.
    pub queries_used: u64,
    /// The budget ran out while unclustered vertices remained.
    pub stopped_early: bool,
}

/// Unclustered vertex set with O(1) removal and uniform indexing.
struct Remaining {
    members: Vec<VertexId>,
    slot: Vec<usize>,
}

impl Remaining {
    const GONE: usize = usize::MAX;

    fn new(n: usize) -> Self {
        Self {
            members: (0..n).collect(),
            slot: (0..n).collect(),
        }
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn contains(&self, v: VertexId) -> bool {
        self.slot[v] != Self::GONE
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> VertexId {
        self.members[rng.random_range(0..self.members.len())]
    }

    fn remove(&mut self, v: VertexId) {
        let i = self.slot[v];
        debug_assert_ne!(i, Self::GONE);
        let last = *self.members.last().expect("non-empty");
        self.members.swap_remove(i);
        if last != v {
            self.slot[last] = i;
        }
        self.slot[v] = Self::GONE;
    }
}

fn assemble(
    n: usize,
    clusters: Vec<Vec<VertexId>>,
    pivots: Vec<VertexId>,
    queries_used: u64,
    stopped_early: bool,
) -> RunResult {
    let mut labels = vec![usize::MAX; n];
    for (label, cluster) in clusters.iter().enumerate() {
        for &v in cluster {
            labels[v] = label;
        }
    }
    let unclustered = labels.iter_mut().filter(|l| **l == usize::MAX);
    for (next, l) in (clusters.len()..).zip(unclustered) {
        *l = next;
    }
    RunResult {
        clustering: Clustering::new(labels),
        pivots,
        queries_used,
        stopped_early,
    }
}

// Uniform pivots from R. With `budgeted`, a pivot is only started while the
// remaining budget covers |R| - 1 queries.
fn pivot_loop<R: Rng + ?Sized>(
    oracle: &mut BudgetedOracle<'_>,
    rng: &mut R,
    budgeted: bool,
) -> Result<RunResult> {
    let n = oracle.n();
    let start = oracle.budget_used();
    let mut rest = Remaining::new(n);
    let mut clusters = Vec::new();
    let mut pivots = Vec::new();
    let mut scratch = Vec::new();

    while !rest.is_empty() {
        if budgeted && oracle.remaining_budget() < (rest.len() - 1) as u64 {
            break;
        }
        let pivot = rest.pick(rng);
        rest.remove(pivot);
        scratch.clear();
        scratch.extend_from_slice(&rest.members);
        let mut cluster = vec![pivot];
        for &w in &scratch {
            if oracle.query(pivot, w)?.is_positive() {
                cluster.push(w);
            }
        }
        for &w in &cluster[1..] {
            rest.remove(w);
        }
        pivots.push(pivot);
        clusters.push(cluster);
    }

    let stopped_early = !rest.is_empty();
    Ok(assemble(
        n,
        clusters,
        pivots,
        oracle.budget_used() - start,
        stopped_early,
    ))
}

/// QwickCluster: uniform random pivots until every vertex is clustered.
/// The oracle must be able to pay for every pair.
pub fn qwick_cluster<R: Rng + ?Sized>(
    oracle: &mut BudgetedOracle<'_>,
    rng: &mut R,
) -> Result<RunResult> {
    let needed = pairs(oracle.n());
    if oracle.remaining_budget() < needed {
        return Err(Error::Parameter(format!(
            "QwickCluster needs a budget of {needed}, only {} remains",
            oracle.remaining_budget()
        )));
    }
    pivot_loop(oracle, rng, false)
}

/// QwickCluster stopped when the remaining budget drops below `|R| - 1`;
/// leftover vertices become singletons.
pub fn qecc<R: Rng + ?Sized>(oracle: &mut BudgetedOracle<'_>, rng: &mut R) -> Result<RunResult> {
    pivot_loop(oracle, rng, true)
}

/// Largest `t ≤ n` with `(2n - 1 - t)·t ≤ 2Q`, i.e. the number of sampled
/// pivots whose neighbourhoods fit in the budget.
pub fn nonadaptive_sample_size(n: usize, budget: u64) -> usize {
    let n128 = n as u128;
    let cap = 2 * u128::from(budget);
    // (2n - 1 - t)·t is non-decreasing on 0..=n
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        let t = mid as u128;
        if (2 * n128 - 1 - t) * t <= cap {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Number of queries issued by [`qecc_nonadaptive`] for sample size `k`.
pub fn nonadaptive_query_count(n: usize, k: usize) -> u64 {
    let (n, k) = (n as u64, k as u64);
    if k == 0 {
        return 0;
    }
    (2 * n - 1 - k) * k / 2
}

/// Non-adaptive QECC. Samples `k` vertices without replacement and asks
/// every pair `(s_i, w)` with `w` not among `s_1..s_i`, all before any answer
/// is used; the queried pairs depend on `(n, Q, rng)` only.
pub fn qecc_nonadaptive<R: Rng + ?Sized>(
    oracle: &mut BudgetedOracle<'_>,
    rng: &mut R,
) -> Result<RunResult> {
    let n = oracle.n();
    let start = oracle.budget_used();
    let k = nonadaptive_sample_size(n, oracle.remaining_budget());

    // partial Fisher-Yates: the first k entries are a uniform ordered sample
    let mut order: Vec<VertexId> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        order.swap(i, j);
    }
    let sample = &order[..k];
    let mut rank = vec![usize::MAX; n];
    for (i, &s) in sample.iter().enumerate() {
        rank[s] = i;
    }

    // querying phase
    let mut positives: Vec<Vec<VertexId>> = vec![Vec::new(); k];
    for (i, &s) in sample.iter().enumerate() {
        for w in 0..n {
            if w == s || rank[w] < i {
                continue;
            }
            if oracle.query(s, w)?.is_positive() {
                positives[i].push(w);
                if rank[w] != usize::MAX {
                    positives[rank[w]].push(s);
                }
            }
        }
    }

    // clustering phase
    let mut unclustered = vec![true; n];
    let mut clusters = Vec::new();
    let mut pivots = Vec::new();
    for (i, &s) in sample.iter().enumerate() {
        if !unclustered[s] {
            continue;
        }
        unclustered[s] = false;
        let mut cluster = vec![s];
        for &w in &positives[i] {
            if unclustered[w] {
                unclustered[w] = false;
                cluster.push(w);
            }
        }
        pivots.push(s);
        clusters.push(cluster);
    }

    let stopped_early = unclustered.iter().any(|&u| u);
    Ok(assemble(
        n,
        clusters,
        pivots,
        oracle.budget_used() - start,
        stopped_early,
    ))
}

/// QECC-heur. Probes uniform ordered pairs `(u, v)` of `R`; the first
/// positive probe makes `v` the pivot, and its neighbourhood in `R` is
/// queried. The probe guard `Q ≥ |R| - 1` keeps a full scan affordable.
///
/// Under the default charging mode repeated probes are free, so once every
/// pair left in `R` is known to be negative the loop ends and `R` becomes
/// singletons; under `charge_duplicates` the probes run until the budget
/// no longer covers a scan.
pub fn qecc_heur<R: Rng + ?Sized>(
    oracle: &mut BudgetedOracle<'_>,
    rng: &mut R,
) -> Result<RunResult> {
    let n = oracle.n();
    let start = oracle.budget_used();
    let memoized = !oracle.charges_duplicates();
    let mut rest = Remaining::new(n);
    let mut known_negative: HashSet<(VertexId, VertexId)> = HashSet::new();
    let mut clusters = Vec::new();
    let mut pivots = Vec::new();
    let mut edgeless = false;
    let mut scratch = Vec::new();

    while rest.len() > 1 && oracle.remaining_budget() >= (rest.len() - 1) as u64 {
        if memoized && known_negative.len() as u64 == pairs(rest.len()) {
            edgeless = true;
            break;
        }
        let u = rest.pick(rng);
        let v = rest.pick(rng);
        if u == v {
            continue;
        }
        if !oracle.query(u, v)?.is_positive() {
            known_negative.insert((u.min(v), u.max(v)));
            continue;
        }

        rest.remove(u);
        rest.remove(v);
        scratch.clear();
        scratch.extend_from_slice(&rest.members);
        let mut cluster = vec![v, u];
        for &w in &scratch {
            if oracle.query(v, w)?.is_positive() {
                cluster.push(w);
            }
        }
        for &w in &cluster[2..] {
            rest.remove(w);
        }
        known_negative.retain(|&(a, b)| rest.contains(a) && rest.contains(b));
        pivots.push(v);
        clusters.push(cluster);
    }

    let stopped_early = rest.len() > 1 && !edgeless;
    Ok(assemble(
        n,
        clusters,
        pivots,
        oracle.budget_used() - start,
        stopped_early,
    ))
}
