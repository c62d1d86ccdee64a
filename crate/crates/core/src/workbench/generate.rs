use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::model::{AminNetwork, StateDistribution};

/// Every arc `(i, j)` with `i < j`, target `{n}`, uniform state probabilities.
pub fn gen_semi_complete(n: usize) -> (AminNetwork, StateDistribution) {
    assert!(n >= 2, "semi-complete network needs at least two nodes");
    let arcs = (1..n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)));
    let network = AminNetwork::new(n, arcs, &[n]).expect("semi-complete network is representable");
    let dist = StateDistribution::uniform(&network);
    (network, dist)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomAminConfig {
    pub nodes: usize,
    pub arc_probability: f64,
    pub seed: u64,
    /// Draw each node's table from a flat Dirichlet instead of using uniform probabilities.
    pub dirichlet: bool,
}

/// Random DAG on `1..=n` with target `{n}`. Each forward arc is kept with
/// `arc_probability`; if node `n` is unreachable from node 1 a random
/// increasing chain `1 → … → n` is added.
pub fn gen_random_amin(config: &RandomAminConfig) -> (AminNetwork, StateDistribution) {
    let n = config.nodes;
    assert!(n >= 2, "random network needs at least two nodes");
    assert!(
        config.arc_probability > 0.0 && config.arc_probability <= 1.0,
        "arc probability must lie in (0, 1]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    for i in 1..n {
        for j in i + 1..=n {
            if rng.random_bool(config.arc_probability) {
                arcs.push((i, j));
            }
        }
    }

    let mut reach = vec![false; n + 1];
    reach[1] = true;
    for &(i, j) in &arcs {
        // arcs are generated in ascending order of i
        if reach[i] {
            reach[j] = true;
        }
    }
    if !reach[n] {
        let mut prev = 1;
        for mid in 2..n {
            if rng.random_bool(0.5) {
                arcs.push((prev, mid));
                prev = mid;
            }
        }
        arcs.push((prev, n));
        arcs.sort_unstable();
        arcs.dedup();
    }

    let network = AminNetwork::new(n, arcs, &[n]).expect("random network is representable");
    let dist = if config.dirichlet {
        let tables = (1..=n)
            .map(|i| {
                let draws: Vec<f64> = (0..network.state_count(i))
                    .map(|_| rng.sample::<f64, _>(Exp1))
                    .collect();
                let total: f64 = draws.iter().sum();
                draws.into_iter().map(|d| d / total).collect()
            })
            .collect();
        StateDistribution::from_tables(&network, tables).expect("table sizes match")
    } else {
        StateDistribution::uniform(&network)
    };
    (network, dist)
}
