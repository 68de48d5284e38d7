//! Property-verification suites for the approximation guarantees.
//!
//! Each suite measures one inequality on generated instances and reports the
//! measured side, the bound, and the slack (`bound - measured`, or
//! `measured - bound` for lower bounds). Monte Carlo bounds allow three
//! standard errors of the empirical mean.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::algorithms::{
    nonadaptive_query_count, nonadaptive_sample_size, qecc, qecc_nonadaptive, qwick_cluster,
    Algorithm,
};
use crate::generators::{generate_synthetic, gnp, SyntheticSpec};
use crate::graph::{SimilarityGraph, VertexId};
use crate::harness::SampleStats;
use crate::metrics::{brute_force_opt, cost};
use crate::oracle::BudgetedOracle;
use crate::rng::{mix, tag_hash, SeedStream};
use crate::{pairs, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lemma1,
    Lemma2,
    Thm1Bound,
    Thm2NonAdaptive,
    Approx3,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Lemma1,
        Suite::Lemma2,
        Suite::Thm1Bound,
        Suite::Thm2NonAdaptive,
        Suite::Approx3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Thm1Bound => "thm1-bound",
            Suite::Thm2NonAdaptive => "thm2-nonadaptive",
            Suite::Approx3 => "approx3",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_owned()))
    }
}

/// Scale knobs; `None` selects the suite's default.
#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyParams {
    pub seed: u64,
    pub trials: Option<usize>,
    pub instances: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    pub passed: bool,
}

impl Check {
    /// `measured ≤ bound`.
    pub fn at_most(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            measured,
            bound,
            slack: bound - measured,
            passed: measured <= bound,
        }
    }

    /// `measured < bound`.
    pub fn below(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            passed: measured < bound,
            ..Self::at_most(label, measured, bound)
        }
    }

    /// `measured ≥ bound`.
    pub fn at_least(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            measured,
            bound,
            slack: measured - bound,
            passed: measured >= bound,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn min_slack(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<48} measured={:.4} bound={:.4} slack={:.4}",
                if c.passed { "PASS" } else { "FAIL" },
                c.label,
                c.measured,
                c.bound,
                c.slack
            )?;
        }
        write!(
            f,
            "{}: {} ({} checks, min slack {:.4})",
            self.suite.name(),
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len(),
            self.min_slack()
        )
    }
}

/// Total over all pivots `v` of the edges incident to the closed
/// neighbourhood `{v} ∪ Γ(v)`: the edges one pivot step removes.
pub fn pivot_removed_edges_total(g: &SimilarityGraph) -> u64 {
    let n = g.n();
    let mut marked = vec![false; n];
    let mut total = 0u64;
    for v in 0..n {
        let closed: Vec<VertexId> = std::iter::once(v)
            .chain(g.neighbors(v).iter().copied())
            .collect();
        for &u in &closed {
            marked[u] = true;
        }
        let degree_sum: u64 = closed.iter().map(|&u| g.degree(u) as u64).sum();
        let inside: u64 = closed
            .iter()
            .map(|&u| {
                g.neighbors(u)
                    .iter()
                    .filter(|&&w| w > u && marked[w])
                    .count() as u64
            })
            .sum();
        total += degree_sum - inside;
        for &u in &closed {
            marked[u] = false;
        }
    }
    total
}

/// Exact check of the one-step edge-removal bound: the mean over pivots of
/// removed edges is at least `C(d+1, 2)` with `d = 2m/n`. Compared in
/// integers as `n·total ≥ m·(2m + n)`.
pub fn lemma1_check(g: &SimilarityGraph) -> Check {
    let n = g.n() as u128;
    let m = g.m() as u128;
    let total = pivot_removed_edges_total(g);
    let mean = total as f64 / n as f64;
    let d = 2.0 * m as f64 / n as f64;
    let bound = d * (d + 1.0) / 2.0;
    let mut check = Check::at_least(
        format!("n={} m={} mean removed ≥ C(d+1,2)", n, m),
        mean,
        bound,
    );
    check.passed = n * u128::from(total) >= m * (2 * m + n);
    check
}

/// Positive edges with neither endpoint in `P ∪ Γ(P)`.
pub fn uncovered_edges(g: &SimilarityGraph, pivots: &[VertexId]) -> u64 {
    let mut covered = vec![false; g.n()];
    for &p in pivots {
        covered[p] = true;
        for &w in g.neighbors(p) {
            covered[w] = true;
        }
    }
    g.edges()
        .filter(|&(u, v)| !covered[u] && !covered[v])
        .count() as u64
}

fn seeds(base: u64, suite: Suite, index: u64) -> SeedStream {
    SeedStream::new(mix(&[base, tag_hash(suite.name()), index]))
}

fn lemma1(params: &VerifyParams) -> Result<Vec<Check>> {
    let instances = params.instances.unwrap_or(100);
    let probabilities = [0.05, 0.2, 0.5];
    (0..instances)
        .map(|i| {
            let p = probabilities[i % probabilities.len()];
            let g = gnp(40, p, seeds(params.seed, Suite::Lemma1, i as u64).seed())?;
            let mut check = lemma1_check(&g);
            check.label = format!("graph {i} p={p} {}", check.label);
            Ok(check)
        })
        .collect()
}

fn lemma2(params: &VerifyParams) -> Result<Vec<Check>> {
    let instances = params.instances.unwrap_or(3);
    let trials = params.trials.unwrap_or(1000);
    let n = 100;
    let mut checks = Vec::new();
    for i in 0..instances {
        let stream = seeds(params.seed, Suite::Lemma2, i as u64);
        let g = gnp(n, 0.1, stream.seed())?;
        let runs: Vec<Vec<VertexId>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut oracle = BudgetedOracle::unlimited(&g);
                let mut rng = stream.split_index(t as u64).rng();
                qwick_cluster(&mut oracle, &mut rng).map(|r| r.pivots)
            })
            .collect::<Result<_>>()?;
        for r in [1usize, 5, 10, 20] {
            let stats = SampleStats::from_values(
                runs.iter()
                    .map(|p| uncovered_edges(&g, &p[..r.min(p.len())]) as f64),
            );
            let bound = (n * n) as f64 / (2.0 * (r + 1) as f64);
            checks.push(Check::below(
                format!("graph {i} r={r} uncovered edges (m={})", g.m()),
                stats.mean,
                bound + 3.0 * stats.std_err(),
            ));
        }
    }
    Ok(checks)
}

fn thm1_bound(params: &VerifyParams) -> Result<Vec<Check>> {
    let trials = params.trials.unwrap_or(500);
    let spec = SyntheticSpec::new(50, 5, 0.3, 0.1, params.seed)?;
    let (g, truth) = generate_synthetic(&spec)?;
    let truth_cost = cost(&g, &truth)? as f64;
    let n = g.n() as f64;
    let mut checks = Vec::new();
    for algorithm in [Algorithm::Qecc, Algorithm::QeccNonAdaptive] {
        for budget in [100u64, 250, 500, 1225] {
            let costs: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut oracle = BudgetedOracle::new(&g, budget);
                    let mut rng = seeds(params.seed, Suite::Thm1Bound, t as u64)
                        .split(algorithm.tag())
                        .split_index(budget)
                        .rng();
                    let run = algorithm.run(&mut oracle, &mut rng)?;
                    Ok(cost(&g, &run.clustering)? as f64)
                })
                .collect::<Result<_>>()?;
            let stats = SampleStats::from_values(costs);
            let bound = 3.0 * truth_cost + n.powi(3) / (2.0 * budget as f64);
            checks.push(Check::at_most(
                format!("{algorithm} Q={budget} mean cost ≤ 3·GT + n³/2Q"),
                stats.mean,
                bound + 3.0 * stats.std_err(),
            ));
        }
    }
    Ok(checks)
}

/// Queries made by non-adaptive QECC on `g` with the given budget and seed.
pub fn nonadaptive_transcript(
    g: &SimilarityGraph,
    budget: u64,
    seed: u64,
) -> Result<Vec<(VertexId, VertexId)>> {
    let mut oracle = BudgetedOracle::new(g, budget);
    qecc_nonadaptive(&mut oracle, &mut SeedStream::new(seed).rng())?;
    Ok(oracle.query_pairs_list())
}

fn thm2_nonadaptive(params: &VerifyParams) -> Result<Vec<Check>> {
    let instances = params.instances.unwrap_or(10);
    let n = 50;
    let mut checks = Vec::new();
    for i in 0..instances {
        let stream = seeds(params.seed, Suite::Thm2NonAdaptive, i as u64);
        let dense = gnp(n, 0.5, stream.split("dense").seed())?;
        let (clustered, _) = generate_synthetic(&SyntheticSpec::new(
            n,
            5,
            0.3,
            0.1,
            stream.split("synthetic").seed(),
        )?)?;
        for budget in [0u64, 49, 100, 500, 1225] {
            let seed = stream.split_index(budget).seed();
            let a = nonadaptive_transcript(&dense, budget, seed)?;
            let b = nonadaptive_transcript(&clustered, budget, seed)?;
            let mismatched =
                a.iter().zip(&b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
            checks.push(Check::at_most(
                format!("instance {i} Q={budget} transcript mismatches"),
                mismatched as f64,
                0.0,
            ));
            let expected = nonadaptive_query_count(n, nonadaptive_sample_size(n, budget));
            checks.push(Check::at_most(
                format!("instance {i} Q={budget} |query count - (2n-1-k)k/2|"),
                (a.len() as f64 - expected as f64).abs(),
                0.0,
            ));
        }
    }
    Ok(checks)
}

fn approx3(params: &VerifyParams) -> Result<Vec<Check>> {
    let instances = params.instances.unwrap_or(20);
    let trials = params.trials.unwrap_or(2000);
    let probabilities = [0.3, 0.5, 0.7];
    (0..instances)
        .map(|i| {
            let stream = seeds(params.seed, Suite::Approx3, i as u64);
            let p = probabilities[i % probabilities.len()];
            let g = gnp(8, p, stream.seed())?;
            let (opt, _) = brute_force_opt(&g)?;
            let costs: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut oracle = BudgetedOracle::new(&g, pairs(8));
                    let run = qecc(&mut oracle, &mut stream.split_index(t as u64).rng())?;
                    Ok(cost(&g, &run.clustering)? as f64)
                })
                .collect::<Result<_>>()?;
            let stats = SampleStats::from_values(costs);
            Ok(Check::at_most(
                format!("graph {i} p={p} OPT={opt} mean cost ≤ 3·OPT"),
                stats.mean,
                3.0 * opt as f64 + 3.0 * stats.std_err(),
            ))
        })
        .collect()
}

pub fn verify_suite(suite: Suite, params: &VerifyParams) -> Result<VerifyReport> {
    let checks = match suite {
        Suite::Lemma1 => lemma1(params)?,
        Suite::Lemma2 => lemma2(params)?,
        Suite::Thm1Bound => thm1_bound(params)?,
        Suite::Thm2NonAdaptive => thm2_nonadaptive(params)?,
        Suite::Approx3 => approx3(params)?,
    };
    Ok(VerifyReport { suite, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!(
            "lemma3".parse::<Suite>(),
            Err(Error::UnknownSuite(_))
        ));
    }

    #[test]
    fn removed_edges_on_small_graphs() {
        // star K1,3: center removes 3, each leaf's closed neighbourhood holds
        // the center, so it removes 3 as well
        let star = SimilarityGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(pivot_removed_edges_total(&star), 12);
        // path 0-1-2-3: pivots remove 2, 3, 3, 2
        let path = SimilarityGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(pivot_removed_edges_total(&path), 10);
        assert!(lemma1_check(&path).passed);
    }

    #[test]
    fn uncovered_edge_count() {
        let path =
            SimilarityGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert_eq!(uncovered_edges(&path, &[]), 5);
        assert_eq!(uncovered_edges(&path, &[0]), 3);
        assert_eq!(uncovered_edges(&path, &[0, 5]), 1);
    }

    #[test]
    fn small_scale_suites_pass() {
        let params = VerifyParams {
            seed: 11,
            trials: Some(60),
            instances: Some(3),
        };
        for suite in Suite::ALL {
            let report = verify_suite(suite, &params).unwrap();
            assert!(report.passed(), "{report}");
            assert!(!report.checks.is_empty());
        }
    }
}
