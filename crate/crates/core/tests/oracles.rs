//! Cross-checks against independent brute-force oracles.

use std::collections::HashMap;

use corrclust::algorithms::{qecc_heur, qwick_cluster};
use corrclust::generators::{
    generate_cluster_graph, generate_lower_bound_instance, generate_synthetic, gnp, LowerBoundSpec,
    SyntheticSpec,
};
use corrclust::graph::build_from_edge_list;
use corrclust::harness::SampleStats;
use corrclust::metrics::{brute_force_opt, cost, precision_recall};
use corrclust::{pairs, Algorithm, BudgetedOracle, Clustering, SeedStream, SimilarityGraph};
use proptest::prelude::*;
use sha2::{Digest, Sha256};

/// Disagreements by enumerating every pair.
fn naive_cost(g: &SimilarityGraph, c: &Clustering) -> u64 {
    let n = g.n();
    let mut total = 0;
    for u in 0..n {
        for v in u + 1..n {
            let together = c.label(u) == c.label(v);
            if together != g.has_edge(u, v) {
                total += 1;
            }
        }
    }
    total
}

/// Minimum cost over all n^n label functions.
fn exhaustive_opt(g: &SimilarityGraph) -> u64 {
    let n = g.n();
    let mut labels = vec![0usize; n];
    let mut best = u64::MAX;
    loop {
        best = best.min(naive_cost(g, &Clustering::new(labels.clone())));
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            labels[i] += 1;
            if labels[i] < n {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

/// Exact expected QwickCluster cost by averaging over every pivot choice at
/// every step. Each pair's disagreement is settled when its first endpoint
/// is clustered.
fn exact_qwick_expectation(g: &SimilarityGraph) -> f64 {
    fn go(g: &SimilarityGraph, rest: u32, memo: &mut HashMap<u32, f64>) -> f64 {
        if rest == 0 {
            return 0.0;
        }
        if let Some(&e) = memo.get(&rest) {
            return e;
        }
        let members: Vec<usize> = (0..32).filter(|&v| rest & (1 << v) != 0).collect();
        let mut sum = 0.0;
        for &v in &members {
            let mut cluster = 1u32 << v;
            for &w in &members {
                if g.has_edge(v, w) {
                    cluster |= 1 << w;
                }
            }
            let inside: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&w| cluster & (1 << w) != 0)
                .collect();
            let outside: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&w| cluster & (1 << w) == 0)
                .collect();
            let mut step = 0u64;
            for (i, &a) in inside.iter().enumerate() {
                for &b in &inside[i + 1..] {
                    step += u64::from(!g.has_edge(a, b));
                }
                for &b in &outside {
                    step += u64::from(g.has_edge(a, b));
                }
            }
            sum += step as f64 + go(g, rest & !cluster, memo);
        }
        let e = sum / members.len() as f64;
        memo.insert(rest, e);
        e
    }
    let full = if g.n() == 32 {
        u32::MAX
    } else {
        (1u32 << g.n()) - 1
    };
    go(g, full, &mut HashMap::new())
}

fn star(leaves: usize) -> SimilarityGraph {
    SimilarityGraph::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l))).unwrap()
}

#[test]
fn star_expected_qwick_cost() {
    let g = star(3);
    // center first (1/4): 3 negative leaf pairs; leaf first (3/4): 2 cut edges
    let exact = exact_qwick_expectation(&g);
    assert!((exact - 2.25).abs() < 1e-12);

    let costs: Vec<f64> = (0..4000)
        .map(|seed| {
            let mut o = BudgetedOracle::unlimited(&g);
            let run = qwick_cluster(&mut o, &mut SeedStream::new(seed).rng()).unwrap();
            cost(&g, &run.clustering).unwrap() as f64
        })
        .collect();
    let stats = SampleStats::from_values(costs);
    assert!(
        (stats.mean - 2.25).abs() <= 4.0 * stats.std_err(),
        "{stats:?}"
    );
}

#[test]
fn qwick_matches_exact_expectation_on_random_graphs() {
    for i in 0..6 {
        let g = gnp(8, 0.4, 100 + i).unwrap();
        let exact = exact_qwick_expectation(&g);
        let (opt, _) = brute_force_opt(&g).unwrap();
        assert!(
            exact <= 3.0 * opt as f64 + 1e-9,
            "graph {i}: {exact} vs opt {opt}"
        );
        let costs: Vec<f64> = (0..3000)
            .map(|seed| {
                let mut o = BudgetedOracle::unlimited(&g);
                let run = qwick_cluster(&mut o, &mut SeedStream::new(seed).rng()).unwrap();
                cost(&g, &run.clustering).unwrap() as f64
            })
            .collect();
        let stats = SampleStats::from_values(costs);
        assert!(
            (stats.mean - exact).abs() <= 4.0 * stats.std_err() + 1e-9,
            "graph {i}: mean {} exact {exact}",
            stats.mean
        );
    }
}

#[test]
fn brute_force_matches_exhaustive_labeling() {
    for i in 0..30 {
        let n = 3 + (i % 4) as usize;
        let g = gnp(n, 0.5, i).unwrap();
        let (opt, witness) = brute_force_opt(&g).unwrap();
        assert_eq!(opt, exhaustive_opt(&g), "graph {i}");
        assert_eq!(naive_cost(&g, &witness), opt);
    }
    // K3 minus an edge and the 5-cycle
    let wedge = SimilarityGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    assert_eq!(exhaustive_opt(&wedge), 1);
    let cycle = SimilarityGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
    assert_eq!(exhaustive_opt(&cycle), 3);
}

#[test]
fn brute_force_lower_bounds_every_algorithm() {
    for i in 0..12 {
        let n = 5 + (i % 5) as usize;
        let g = gnp(n, 0.45, 500 + i).unwrap();
        let (opt, _) = brute_force_opt(&g).unwrap();
        for algorithm in Algorithm::ALL {
            for seed in 0..20 {
                let mut o = BudgetedOracle::new(&g, pairs(n));
                let run = algorithm
                    .run(&mut o, &mut SeedStream::new(seed).rng())
                    .unwrap();
                assert!(opt <= cost(&g, &run.clustering).unwrap());
            }
        }
    }
}

#[test]
fn cluster_graph_opt_is_zero_with_cliques_as_witness() {
    let (g, truth) = generate_cluster_graph(&[3, 1, 4, 2]).unwrap();
    let (opt, witness) = brute_force_opt(&g).unwrap();
    assert_eq!(opt, 0);
    assert!(witness.same_partition(&truth));
    assert_eq!(cost(&g, &g.positive_components()).unwrap(), 0);
}

#[test]
fn heur_first_pivot_follows_degree() {
    let g = star(3);
    let trials = 10_000;
    let hits = (0..trials)
        .filter(|&seed| {
            let mut o = BudgetedOracle::new(&g, 100);
            let run = qecc_heur(&mut o, &mut SeedStream::new(seed).rng()).unwrap();
            run.pivots[0] == 0
        })
        .count();
    let freq = hits as f64 / trials as f64;
    assert!((freq - 0.5).abs() <= 0.03, "{freq}");
}

#[test]
fn synthetic_within_cluster_flips_are_binomial() {
    let spec = SyntheticSpec::new(100, 4, 0.25, 0.2, 0).unwrap();
    let within: u64 = spec.cluster_sizes().into_iter().map(pairs).sum();
    let cross = pairs(100) - within;
    let seeds = 1000;
    let mut within_flips = Vec::new();
    let mut cross_flips = Vec::new();
    for seed in 0..seeds {
        let (g, truth) = generate_synthetic(&SyntheticSpec { seed, ..spec }).unwrap();
        let positive_within = g
            .edges()
            .filter(|&(u, v)| truth.label(u) == truth.label(v))
            .count() as u64;
        within_flips.push((within - positive_within) as f64);
        cross_flips.push((g.m() as u64 - positive_within) as f64);
    }
    let check = |samples: Vec<f64>, trials: u64, p: f64| {
        let stats = SampleStats::from_values(samples);
        let expected = trials as f64 * p;
        let sd_of_mean = (trials as f64 * p * (1.0 - p) / seeds as f64).sqrt();
        assert!(
            (stats.mean - expected).abs() <= 3.0 * sd_of_mean,
            "mean {} expected {expected} sd {sd_of_mean}",
            stats.mean
        );
    };
    check(within_flips, within, 0.2);
    check(cross_flips, cross, 0.2 / 3.0);
}

#[test]
fn lower_bound_natural_cost_mean() {
    let spec = LowerBoundSpec::new(64, 1, 1.0 / 128.0, 0).unwrap();
    assert_eq!(spec.k, 4);
    let costs: Vec<f64> = (0..1000)
        .map(|seed| {
            let (g, natural) =
                generate_lower_bound_instance(&LowerBoundSpec { seed, ..spec }).unwrap();
            cost(&g, &natural).unwrap() as f64
        })
        .collect();
    let stats = SampleStats::from_values(costs);
    // C(16, 2) / 4
    assert_eq!(spec.expected_natural_cost(), 30.0);
    assert!(
        (stats.mean - 30.0).abs() <= 3.0 * stats.std_err(),
        "{stats:?}"
    );
}

fn content_hash(g: &SimilarityGraph) -> String {
    let mut buf = Vec::new();
    g.write_edge_list(&mut buf).unwrap();
    Sha256::digest(&buf)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[test]
fn generator_output_is_frozen() {
    let (g, _) = generate_synthetic(&SyntheticSpec::new(40, 3, 0.3, 0.15, 2024).unwrap()).unwrap();
    let (lb, _) =
        generate_lower_bound_instance(&LowerBoundSpec::new(64, 1, 1.0 / 128.0, 2024).unwrap())
            .unwrap();
    let er = gnp(30, 0.2, 2024).unwrap();
    let hashes = [content_hash(&g), content_hash(&lb), content_hash(&er)];
    assert_eq!(
        hashes,
        [
            "1e8566e72def1ad05afad0d6af9a142b87fc85abf3124e160f39467f97a3212f",
            "7536d2a1ac818efe71941e0449f7cbcd9507a84d3cf9d119a5e407b16d1fe8d5",
            "8f7ae94adb1d2a3f089bffb8f40eb2dacf43ebffa84512919f9222b080673982",
        ]
    );
}

#[test]
fn cora_style_precision_recall_identity() {
    // precision·together = recall·m = positive pairs together
    for i in 0..20 {
        let g = gnp(25, 0.3, 900 + i).unwrap();
        let labels: Vec<usize> = (0..25).map(|v| (v * 7 + i as usize) % 5).collect();
        let c = Clustering::new(labels);
        let (p, r) = precision_recall(&g, &c).unwrap();
        let together: u64 = c.sizes().into_iter().map(pairs).sum();
        let pos_together = g.edges().filter(|&(u, v)| c.label(u) == c.label(v)).count() as f64;
        assert!((p * together as f64 - pos_together).abs() < 1e-9);
        assert!((r * g.m() as f64 - pos_together).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sparse_cost_equals_naive_cost(
        n in 1usize..=60,
        p in 0.0f64..1.0,
        seed in any::<u64>(),
        clusters in 1usize..8,
        label_seed in any::<u64>(),
    ) {
        let g = gnp(n, p, seed).unwrap();
        let labels = (0..n)
            .map(|v| (corrclust::rng::mix(&[label_seed, v as u64]) % clusters as u64) as usize)
            .collect();
        let c = Clustering::new(labels);
        prop_assert_eq!(cost(&g, &c).unwrap(), naive_cost(&g, &c));
    }

    #[test]
    fn ingested_graphs_are_symmetric(
        edges in proptest::collection::vec((0u8..200, 0u8..200), 0..400),
    ) {
        let tokens: Vec<(String, String)> =
            edges.iter().map(|(a, b)| (format!("v{a}"), format!("v{b}"))).collect();
        let (g, report) = build_from_edge_list(tokens);
        let n = g.n();
        prop_assert!(n <= 200);
        let mut degree_sum = 0;
        for u in 0..n {
            degree_sum += g.degree(u);
            prop_assert!(!g.has_edge(u, u));
            for v in 0..n {
                prop_assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
            }
        }
        prop_assert_eq!(degree_sum, 2 * g.m());
        prop_assert_eq!(g.m() + report.duplicate_edges + report.self_loops, edges.len());
    }
}
