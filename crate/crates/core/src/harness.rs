//! Seeded experiment sweeps over query budgets.
//!
//! A sweep runs every `(algorithm, budget, trial)` cell with its own oracle
//! and random stream, evaluates the clustering against the full graph, and
//! emits one [`TrialRecord`] per cell. Cells run in parallel; the output
//! order is fixed (algorithms as configured, budgets ascending, trials
//! ascending) and every value is a function of the configuration alone.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{qwick_cluster, Algorithm, RunResult};
use crate::generators::{
    generate_cluster_graph, generate_lower_bound_instance, generate_synthetic, LowerBoundSpec,
    SyntheticSpec,
};
use crate::graph::{parse_edge_list, parse_labeled, Clustering, IngestReport, SimilarityGraph};
use crate::metrics::QualityReport;
use crate::oracle::BudgetedOracle;
use crate::rng::{trial_seed, SeedStream};
use crate::{pairs, Error, Result};

/// First line of every trial CSV.
pub const CSV_SCHEMA: &str = "# corrclust-trials v1";
/// First line of every summary CSV.
pub const SUMMARY_SCHEMA: &str = "# corrclust-summary v1";
pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_GRID_POINTS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum DatasetSource {
    File {
        edges: PathBuf,
        labels: Option<PathBuf>,
    },
    Synthetic(SyntheticSpec),
    LowerBound(LowerBoundSpec),
    ClusterGraph(Vec<usize>),
}

fn parse_kv<T: FromStr>(map: &[(String, String)], key: &str) -> Result<T> {
    let raw = map
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::Parameter(format!("missing `{key}=`")))?;
    raw.parse()
        .map_err(|_| Error::Parameter(format!("cannot parse {key} = `{raw}`")))
}

fn key_values(body: &str) -> Result<Vec<(String, String)>> {
    body.split(',')
        .filter(|s| !s.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
                .ok_or_else(|| Error::Parameter(format!("expected key=value, found `{kv}`")))
        })
        .collect()
}

impl FromStr for DatasetSource {
    type Err = Error;

    /// Accepts `synthetic:n=..,k=..,alpha=..,beta=..[,seed=..]`,
    /// `lower-bound:n=..,c=..,epsilon=..[,seed=..]`, `clusters:3,3,4`, or a
    /// path to an edge-list file.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(body) = s.strip_prefix("synthetic:") {
            let kv = key_values(body)?;
            let seed = parse_kv(&kv, "seed").unwrap_or(0);
            return Ok(DatasetSource::Synthetic(SyntheticSpec::new(
                parse_kv(&kv, "n")?,
                parse_kv(&kv, "k")?,
                parse_kv(&kv, "alpha")?,
                parse_kv(&kv, "beta")?,
                seed,
            )?));
        }
        if let Some(body) = s.strip_prefix("lower-bound:") {
            let kv = key_values(body)?;
            let seed = parse_kv(&kv, "seed").unwrap_or(0);
            return Ok(DatasetSource::LowerBound(LowerBoundSpec::new(
                parse_kv(&kv, "n")?,
                parse_kv(&kv, "c")?,
                parse_kv(&kv, "epsilon")?,
                seed,
            )?));
        }
        if let Some(body) = s.strip_prefix("clusters:") {
            let sizes = body
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Parameter(format!("bad cluster size `{t}`")))
                })
                .collect::<Result<Vec<usize>>>()?;
            return Ok(DatasetSource::ClusterGraph(sizes));
        }
        Ok(DatasetSource::File {
            edges: PathBuf::from(s),
            labels: None,
        })
    }
}

/// A loaded instance.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub id: String,
    pub graph: SimilarityGraph,
    pub ground_truth: Option<Clustering>,
    pub ingest: IngestReport,
}

impl DatasetSource {
    pub fn id(&self) -> String {
        match self {
            DatasetSource::File { edges, .. } => edges
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| edges.display().to_string()),
            DatasetSource::Synthetic(s) => {
                format!("S({},{},{},{})#{}", s.n, s.k, s.alpha, s.beta, s.seed)
            }
            DatasetSource::LowerBound(s) => {
                format!("LB({},{},{})#{}", s.n, s.c, s.epsilon, s.seed)
            }
            DatasetSource::ClusterGraph(sizes) => format!(
                "clusters({})",
                sizes
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
    }

    pub fn load(&self) -> Result<Dataset> {
        let id = self.id();
        let (graph, ground_truth, ingest) = match self {
            DatasetSource::File { edges, labels } => {
                let edge_reader = BufReader::new(File::open(edges)?);
                match labels {
                    Some(path) => {
                        let (g, c, report) =
                            parse_labeled(edge_reader, BufReader::new(File::open(path)?))?;
                        (g, Some(c), report)
                    }
                    None => {
                        let (g, report) = parse_edge_list(edge_reader)?;
                        (g, None, report)
                    }
                }
            }
            DatasetSource::Synthetic(spec) => {
                let (g, c) = generate_synthetic(spec)?;
                (g, Some(c), IngestReport::default())
            }
            DatasetSource::LowerBound(spec) => {
                let (g, c) = generate_lower_bound_instance(spec)?;
                (g, Some(c), IngestReport::default())
            }
            DatasetSource::ClusterGraph(sizes) => {
                let (g, c) = generate_cluster_graph(sizes)?;
                (g, Some(c), IngestReport::default())
            }
        };
        Ok(Dataset {
            id,
            graph,
            ground_truth,
            ingest,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Budgets {
    Explicit(Vec<u64>),
    /// Evenly spaced grid from `2n` to the mean QwickCluster query count.
    Auto {
        points: usize,
    },
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub algorithms: Vec<Algorithm>,
    pub budgets: Budgets,
    pub trials: usize,
    pub base_seed: u64,
    pub charge_duplicates: bool,
    /// Write every trial's query transcript into this directory.
    pub transcript_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetSource) -> Self {
        Self {
            dataset,
            algorithms: vec![Algorithm::Qecc, Algorithm::QeccHeur],
            budgets: Budgets::Auto {
                points: DEFAULT_GRID_POINTS,
            },
            trials: DEFAULT_TRIALS,
            base_seed: 0,
            charge_duplicates: false,
            transcript_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Parameter("no algorithm selected".into()));
        }
        match &self.budgets {
            Budgets::Explicit(b) if b.is_empty() => {
                Err(Error::Parameter("budget list is empty".into()))
            }
            Budgets::Auto { points: 0 } => Err(Error::Parameter("budget grid needs points".into())),
            _ => Ok(()),
        }
    }
}

/// One experiment row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub dataset: String,
    pub algorithm: String,
    pub budget: u64,
    pub trial: usize,
    pub seed: u64,
    pub cost: u64,
    pub precision: f64,
    pub recall: f64,
    pub num_clusters: usize,
    pub num_nonsingleton_clusters: usize,
    pub queries_used: u64,
    pub stopped_early: bool,
}

/// Runs one algorithm once on a fresh oracle.
pub fn run_trial<'g>(
    graph: &'g SimilarityGraph,
    algorithm: Algorithm,
    budget: u64,
    seed: u64,
    charge_duplicates: bool,
) -> Result<(RunResult, BudgetedOracle<'g>)> {
    let mut oracle = BudgetedOracle::new(graph, budget).charge_duplicates(charge_duplicates);
    let mut rng = SeedStream::new(seed).rng();
    let run = algorithm.run(&mut oracle, &mut rng)?;
    Ok((run, oracle))
}

/// Evenly spaced integer grid on `[min(2n, A), A]`, deduplicated ascending.
pub fn budget_grid(n: usize, mean_queries: f64, points: usize) -> Vec<u64> {
    let hi = mean_queries.round().max(0.0);
    let lo = (2.0 * n as f64).min(hi);
    let mut grid: Vec<u64> = if points <= 1 {
        vec![hi as u64]
    } else {
        (0..points)
            .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).round() as u64)
            .collect()
    };
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// Mean number of distinct queries QwickCluster makes over `trials` seeded
/// runs.
pub fn mean_qwick_queries(graph: &SimilarityGraph, trials: usize, base_seed: u64) -> Result<f64> {
    let counts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut oracle = BudgetedOracle::unlimited(graph);
            let seed = trial_seed(base_seed, "auto-budget", 0, t as u64);
            qwick_cluster(&mut oracle, &mut SeedStream::new(seed).rng())
                .map(|_| oracle.distinct_pairs() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(counts.iter().sum::<f64>() / trials.max(1) as f64)
}

/// Budget grid from `2n` up to the mean QwickCluster query count `A`.
pub fn resolve_auto_budgets(
    graph: &SimilarityGraph,
    trials: usize,
    base_seed: u64,
    points: usize,
) -> Result<Vec<u64>> {
    let mean = mean_qwick_queries(graph, trials, base_seed)?;
    Ok(budget_grid(graph.n(), mean, points))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let dataset = cfg.dataset.load()?;
    run_on(&dataset, cfg)
}

/// Runs the sweep on an already loaded dataset. QwickCluster ignores the
/// budget grid and runs its trials once with a budget of every pair.
pub fn run_on(dataset: &Dataset, cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let graph = &dataset.graph;
    let mut budgets = match &cfg.budgets {
        Budgets::Explicit(list) => list.clone(),
        Budgets::Auto { points } => {
            resolve_auto_budgets(graph, cfg.trials, cfg.base_seed, *points)?
        }
    };
    budgets.sort_unstable();
    budgets.dedup();

    let full = pairs(graph.n());
    let mut cells = Vec::new();
    for &algorithm in &cfg.algorithms {
        let grid: &[u64] = if algorithm.is_budgeted() {
            &budgets
        } else {
            std::slice::from_ref(&full)
        };
        for &budget in grid {
            for trial in 0..cfg.trials {
                cells.push((algorithm, budget, trial));
            }
        }
    }
    if let Some(dir) = &cfg.transcript_dir {
        std::fs::create_dir_all(dir)?;
    }

    cells
        .into_par_iter()
        .map(|(algorithm, budget, trial)| {
            let seed = trial_seed(cfg.base_seed, algorithm.tag(), budget, trial as u64);
            let (run, oracle) = run_trial(graph, algorithm, budget, seed, cfg.charge_duplicates)?;
            if let Some(dir) = &cfg.transcript_dir {
                let path = transcript_path(dir, algorithm, budget, trial);
                oracle.write_transcript_csv(File::create(path)?)?;
            }
            let quality = QualityReport::evaluate(graph, &run.clustering)?;
            Ok(TrialRecord {
                dataset: dataset.id.clone(),
                algorithm: algorithm.tag().to_owned(),
                budget,
                trial,
                seed,
                cost: quality.cost,
                precision: quality.precision,
                recall: quality.recall,
                num_clusters: quality.num_clusters,
                num_nonsingleton_clusters: quality.num_nonsingleton_clusters,
                queries_used: run.queries_used,
                stopped_early: run.stopped_early,
            })
        })
        .collect()
}

pub fn transcript_path(dir: &Path, algorithm: Algorithm, budget: u64, trial: usize) -> PathBuf {
    dir.join(format!("{}_Q{}_t{}.csv", algorithm.tag(), budget, trial))
}

pub fn write_csv<W: Write>(records: &[TrialRecord], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_SCHEMA}")?;
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(r)?;
    }
    if records.is_empty() {
        writer.write_record([
            "dataset",
            "algorithm",
            "budget",
            "trial",
            "seed",
            "cost",
            "precision",
            "recall",
            "num_clusters",
            "num_nonsingleton_clusters",
            "queries_used",
            "stopped_early",
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Sample mean and standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleStats {
    pub count: usize,
    pub mean: f64,
    /// Unbiased (`n - 1`) standard deviation; 0 for a single sample.
    pub std_dev: f64,
}

impl SampleStats {
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let values: Vec<f64> = values.into_iter().collect();
        let count = values.len();
        if count == 0 {
            return Self {
                count,
                mean: f64::NAN,
                std_dev: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let std_dev = if count > 1 {
            let ss: f64 = values.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self {
            count,
            mean,
            std_dev,
        }
    }

    /// Standard error of the mean.
    pub fn std_err(&self) -> f64 {
        self.std_dev / (self.count as f64).sqrt()
    }
}

/// Mean/standard-deviation aggregate of one `(algorithm, budget)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub algorithm: String,
    pub budget: u64,
    pub trials: usize,
    pub mean_cost: f64,
    pub std_cost: f64,
    pub mean_precision: f64,
    pub std_precision: f64,
    pub mean_recall: f64,
    pub std_recall: f64,
    pub mean_nonsingleton_clusters: f64,
    pub mean_queries_used: f64,
}

/// Aggregates records per `(dataset, algorithm, budget)` in first-seen order.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, &str, u64)> = Vec::new();
    for r in records {
        let key = (r.dataset.as_str(), r.algorithm.as_str(), r.budget);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(dataset, algorithm, budget)| {
            let cell: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.dataset == dataset && r.algorithm == algorithm && r.budget == budget)
                .collect();
            let stat =
                |f: fn(&TrialRecord) -> f64| SampleStats::from_values(cell.iter().map(|r| f(r)));
            let cost = stat(|r| r.cost as f64);
            let precision = stat(|r| r.precision);
            let recall = stat(|r| r.recall);
            SummaryRow {
                dataset: dataset.to_owned(),
                algorithm: algorithm.to_owned(),
                budget,
                trials: cell.len(),
                mean_cost: cost.mean,
                std_cost: cost.std_dev,
                mean_precision: precision.mean,
                std_precision: precision.std_dev,
                mean_recall: recall.mean,
                std_recall: recall.std_dev,
                mean_nonsingleton_clusters: stat(|r| r.num_nonsingleton_clusters as f64).mean,
                mean_queries_used: stat(|r| r.queries_used as f64).mean,
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], mut out: W) -> Result<()> {
    writeln!(out, "{SUMMARY_SCHEMA}")?;
    let mut writer = csv::Writer::from_writer(out);
    for r in rows {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dataset_sources() {
        let s: DatasetSource = "synthetic:n=50,k=5,alpha=0.3,beta=0.1,seed=3"
            .parse()
            .unwrap();
        assert_eq!(
            s,
            DatasetSource::Synthetic(SyntheticSpec::new(50, 5, 0.3, 0.1, 3).unwrap())
        );
        let s: DatasetSource = "lower-bound:n=64,c=1,epsilon=0.0078125".parse().unwrap();
        assert!(matches!(s, DatasetSource::LowerBound(spec) if spec.k == 4));
        let s: DatasetSource = "clusters:3,3,4".parse().unwrap();
        assert_eq!(s, DatasetSource::ClusterGraph(vec![3, 3, 4]));
        assert_eq!(s.id(), "clusters(3,3,4)");
        let s: DatasetSource = "data/cora.edges".parse().unwrap();
        assert_eq!(s.id(), "cora");
        assert!("synthetic:n=50,k=5".parse::<DatasetSource>().is_err());
        assert!("clusters:3,x".parse::<DatasetSource>().is_err());
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(budget_grid(100, 4950.0, 8).first(), Some(&200));
        assert_eq!(budget_grid(100, 4950.0, 8).last(), Some(&4950));
        assert_eq!(budget_grid(100, 4950.0, 8).len(), 8);
        assert_eq!(budget_grid(100, 99.0, 8), vec![99]);
        assert_eq!(budget_grid(10, 30.0, 3), vec![20, 25, 30]);
    }

    #[test]
    fn stats() {
        let s = SampleStats::from_values([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std_dev - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(SampleStats::from_values([7.0]).std_dev, 0.0);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new(DatasetSource::ClusterGraph(vec![2]));
        assert!(cfg.validate().is_ok());
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        cfg.budgets = Budgets::Explicit(vec![]);
        assert!(cfg.validate().is_err());
    }
}
