use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use corrclust::harness::{
    self, Budgets, Dataset, DatasetSource, ExperimentConfig, DEFAULT_GRID_POINTS, DEFAULT_TRIALS,
};
use corrclust::metrics::{brute_force_opt, QualityReport};
use corrclust::verify::{verify_suite, Suite, VerifyParams};
use corrclust::Algorithm;

mod import;

/// Query-budgeted correlation clustering experiments.
#[derive(Parser)]
#[command(name = "corrclust", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance to an edge list and a label file.
    Generate(GenerateArgs),
    /// Convert a raw dataset into an edge list and a label file.
    #[command(subcommand)]
    Import(ImportCommand),
    /// Run a budget sweep and write one CSV row per trial.
    Run(RunArgs),
    /// Run a property suite; exits nonzero if any check fails.
    Verify(VerifyArgs),
    /// Exact optimum of a small instance by exhaustive search.
    Opt(DatasetArgs),
}

#[derive(Args)]
struct DatasetArgs {
    /// Edge-list path, or `synthetic:n=..,k=..,alpha=..,beta=..[,seed=..]`,
    /// `lower-bound:n=..,c=..,epsilon=..[,seed=..]`, `clusters:3,3,4`.
    #[arg(long)]
    dataset: String,
    /// Ground-truth label file for an edge-list dataset.
    #[arg(long)]
    labels: Option<PathBuf>,
}

impl DatasetArgs {
    fn source(&self) -> Result<DatasetSource> {
        let mut source: DatasetSource = self.dataset.parse()?;
        if let Some(path) = &self.labels {
            match &mut source {
                DatasetSource::File { labels, .. } => *labels = Some(path.clone()),
                _ => bail!("--labels only applies to edge-list datasets"),
            }
        }
        Ok(source)
    }

    fn load(&self) -> Result<(DatasetSource, Dataset)> {
        let source = self.source()?;
        let dataset = source
            .load()
            .with_context(|| format!("loading dataset `{}`", self.dataset))?;
        for warning in dataset.ingest.warnings() {
            eprintln!("warning: {warning}");
        }
        Ok((source, dataset))
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// `synthetic:..`, `lower-bound:..` or `clusters:..`.
    spec: String,
    /// Edge-list output path.
    #[arg(long)]
    edges: PathBuf,
    /// Ground-truth label output path.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct ImportOutput {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    labels: PathBuf,
}

#[derive(Subcommand)]
enum ImportCommand {
    /// Tab-separated `id, cluster, text` records joined by Jaro similarity.
    Jaro {
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[command(flatten)]
        out: ImportOutput,
    },
    /// Citation network given as `.cites` and `.content` files.
    Cites {
        #[arg(long)]
        cites: PathBuf,
        #[arg(long)]
        content: PathBuf,
        #[command(flatten)]
        out: ImportOutput,
    },
    /// UCI mushroom CSV; rows differing on at most half the features are joined.
    Mushrooms {
        input: PathBuf,
        #[command(flatten)]
        out: ImportOutput,
    },
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Algorithm to run; repeat for several. Defaults to qecc and qecc-heur.
    #[arg(long = "algo")]
    algorithms: Vec<Algorithm>,
    /// Comma-separated query budgets.
    #[arg(long, value_delimiter = ',', conflicts_with = "auto_budgets")]
    budgets: Vec<u64>,
    /// Evenly spaced budgets up to QwickCluster's mean query count.
    #[arg(long, num_args = 0..=1, default_missing_value = "8", value_name = "POINTS")]
    auto_budgets: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Charge every query, including repeats of a known pair.
    #[arg(long)]
    charge_duplicates: bool,
    /// Per-trial CSV path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-(algorithm, budget) mean and spread CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Directory for one query transcript CSV per trial.
    #[arg(long)]
    transcript_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the suite's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the suite's instance count.
    #[arg(long)]
    instances: Option<usize>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let source: DatasetSource = args.spec.parse()?;
    if matches!(source, DatasetSource::File { .. }) {
        bail!("`{}` is not a generator spec", args.spec);
    }
    let dataset = source.load()?;
    let mut edges = create(&args.edges)?;
    dataset.graph.write_edge_list(&mut edges)?;
    edges.flush()?;
    if let (Some(path), Some(truth)) = (&args.labels, &dataset.ground_truth) {
        let mut labels = create(path)?;
        dataset.graph.write_labels(truth, &mut labels)?;
        labels.flush()?;
    }
    eprintln!(
        "{}: n={} m={}",
        dataset.id,
        dataset.graph.n(),
        dataset.graph.m()
    );
    Ok(())
}

fn import(cmd: &ImportCommand) -> Result<()> {
    let out = match cmd {
        ImportCommand::Jaro { out, .. }
        | ImportCommand::Cites { out, .. }
        | ImportCommand::Mushrooms { out, .. } => out,
    };
    let mut edges = create(&out.edges)?;
    let mut labels = create(&out.labels)?;
    let summary = match cmd {
        ImportCommand::Jaro {
            input, threshold, ..
        } => {
            if !(0.0..=1.0).contains(threshold) {
                bail!("--threshold must lie in [0, 1]");
            }
            import::jaro(open(input)?, *threshold, &mut edges, &mut labels)?
        }
        ImportCommand::Cites { cites, content, .. } => {
            import::cites(open(cites)?, open(content)?, &mut edges, &mut labels)?
        }
        ImportCommand::Mushrooms { input, .. } => {
            import::mushrooms(open(input)?, &mut edges, &mut labels)?
        }
    };
    edges.flush()?;
    labels.flush()?;
    eprintln!(
        "wrote {} vertices, {} edges",
        summary.vertices, summary.edges
    );
    Ok(())
}

fn run(args: &RunArgs) -> Result<()> {
    let (source, dataset) = args.dataset.load()?;
    let mut cfg = ExperimentConfig::new(source);
    if !args.algorithms.is_empty() {
        cfg.algorithms = args.algorithms.clone();
    }
    cfg.budgets = match (&args.auto_budgets, args.budgets.is_empty()) {
        (Some(points), _) => Budgets::Auto { points: *points },
        (None, false) => Budgets::Explicit(args.budgets.clone()),
        (None, true) => Budgets::Auto {
            points: DEFAULT_GRID_POINTS,
        },
    };
    cfg.trials = args.trials;
    cfg.base_seed = args.seed;
    cfg.charge_duplicates = args.charge_duplicates;
    cfg.transcript_dir = args.transcript_dir.clone();
    if let Some(dir) = &cfg.transcript_dir {
        fs::create_dir_all(dir)?;
    }

    let records = harness::run_on(&dataset, &cfg)?;
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            harness::write_csv(&records, &mut w)?;
            w.flush()?;
        }
        None => harness::write_csv(&records, io::stdout().lock())?,
    }
    if let Some(path) = &args.summary {
        let mut w = create(path)?;
        harness::write_summary_csv(&harness::summarize(&records), &mut w)?;
        w.flush()?;
    }
    if let Some(truth) = &dataset.ground_truth {
        let q = QualityReport::evaluate(&dataset.graph, truth)?;
        eprintln!(
            "{}: n={} m={} ground truth cost={} precision={:.4} recall={:.4}",
            dataset.id,
            dataset.graph.n(),
            dataset.graph.m(),
            q.cost,
            q.precision,
            q.recall
        );
    }
    eprintln!("{} trials written", records.len());
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<bool> {
    let suites = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse::<Suite>()?]
    };
    let params = VerifyParams {
        seed: args.seed,
        trials: args.trials,
        instances: args.instances,
    };
    let mut passed = true;
    for suite in suites {
        let report = verify_suite(suite, &params)?;
        println!("{report}");
        passed &= report.passed();
    }
    Ok(passed)
}

fn opt(args: &DatasetArgs) -> Result<()> {
    let (_, dataset) = args.load()?;
    let (cost, witness) = brute_force_opt(&dataset.graph)?;
    println!("OPT {cost}");
    for (i, cluster) in witness.clusters().iter().enumerate() {
        let members: Vec<_> = cluster.iter().map(|&v| dataset.graph.token(v)).collect();
        println!("cluster {i}: {}", members.join(" "));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(args) => generate(args).map(|_| true),
        Command::Import(cmd) => import(cmd).map(|_| true),
        Command::Run(args) => run(args).map(|_| true),
        Command::Verify(args) => verify(args),
        Command::Opt(args) => opt(args).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
