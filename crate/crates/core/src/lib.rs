//! Query-efficient correlation clustering.
//!
//! Clusters `n` items while observing pairwise similarities only through a
//! [`BudgetedOracle`] that allows at most `Q` distinct pair queries. The crate
//! ships the pivot-based algorithms ([`algorithms`]), seeded instance
//! generators ([`generators`]), quality measures and an exact optimum for
//! small instances ([`metrics`]), and an experiment/verification harness
//! ([`harness`], [`verify`]).
//!
//! ```
//! use corrclust::{algorithms, generators, metrics, BudgetedOracle, SeedStream};
//!
//! let (graph, truth) = generators::generate_cluster_graph(&[4, 3, 3]).unwrap();
//! let mut oracle = BudgetedOracle::new(&graph, 45);
//! let mut rng = SeedStream::new(7).rng();
//! let run = algorithms::qecc(&mut oracle, &mut rng).unwrap();
//! assert_eq!(metrics::cost(&graph, &run.clustering).unwrap(), 0);
//! assert_eq!(metrics::cost(&graph, &truth).unwrap(), 0);
//! ```

pub mod algorithms;
mod error;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod rng;
pub mod verify;

pub use algorithms::{Algorithm, RunResult};
pub use error::{Error, Result};
pub use graph::{Clustering, Sign, SimilarityGraph, VertexId};
pub use oracle::BudgetedOracle;
pub use rng::SeedStream;

/// Number of unordered pairs among `n` items.
pub fn pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}
