//! Brute-force ground truth.
//!
//! Nothing here calls into [`crate::spread`], [`crate::bat`] or [`crate::ugfm`]:
//! reachability, label decoding and consistency are re-derived from the
//! adjacency lists so that a mistake in the engines cannot hide behind a shared
//! helper.

use thiserror::Error;

use crate::model::{AminNetwork, NodeSubset, StateDistribution};
use crate::sum::Accumulator;

/// Default cap on the number of enumerated assignments, `2^26`.
pub const DEFAULT_BUDGET: u128 = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("enumeration needs {needed} cases, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

fn forwarded(network: &AminNetwork, node: usize, mask: usize) -> u64 {
    network
        .out_neighbors(node)
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .fold(0u64, |acc, (_, &j)| acc | 1u64 << j)
}

/// Steps a mixed-radix counter (digit 0 fastest) whose digit `k` counts `0..radix[k]`.
fn bump(digits: &mut [usize], radix: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radix) {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

/// Sums `prod p_{i,J_i}` over every unconditional choice `J_i ⊆ V_i` of every
/// transmitting node for which the spread from node 1 covers `required`.
pub fn brute_force_reliability(
    network: &AminNetwork,
    dist: &StateDistribution,
    required: NodeSubset,
    budget: u128,
) -> Result<f64, OracleError> {
    let nodes: Vec<usize> = (1..=network.node_count())
        .filter(|&i| network.out_degree(i) > 0)
        .collect();
    let radix: Vec<usize> = nodes
        .iter()
        .map(|&i| 1usize << network.out_degree(i))
        .collect();
    let needed: u128 = radix.iter().map(|&r| r as u128).product();
    if needed > budget {
        return Err(OracleError::BudgetExceeded { needed, budget });
    }
    let want = required.bits();
    let mut choice = vec![0usize; nodes.len()];
    let mut total = Accumulator::new();
    loop {
        let mut reached = 1u64 << 1;
        for (k, &i) in nodes.iter().enumerate() {
            if reached >> i & 1 == 1 {
                reached |= forwarded(network, i, choice[k]);
            }
        }
        if want & !reached == 0 {
            let p: f64 = nodes
                .iter()
                .zip(&choice)
                .map(|(&i, &m)| dist.table(i)[m])
                .product();
            total.add(p);
        }
        if !bump(&mut choice, &radix) {
            break;
        }
    }
    Ok(total.value())
}

/// Counts label vectors (every coordinate over its full range `0..=2^Deg`,
/// node 1 included) in which exactly the reached transmitting nodes are non-Z
/// and every required node is reached.
pub fn brute_force_feasible_count(
    network: &AminNetwork,
    required: NodeSubset,
    budget: u128,
) -> Result<u64, OracleError> {
    let nodes: Vec<usize> = (1..=network.node_count())
        .filter(|&i| network.out_degree(i) > 0)
        .collect();
    let radix: Vec<usize> = nodes
        .iter()
        .map(|&i| (1usize << network.out_degree(i)) + 1)
        .collect();
    let needed: u128 = radix.iter().map(|&r| r as u128).product();
    if needed > budget {
        return Err(OracleError::BudgetExceeded { needed, budget });
    }
    let want = required.bits();
    let mut label = vec![0usize; nodes.len()];
    let mut count = 0u64;
    loop {
        let mut reached = 1u64 << 1;
        let mut ok = true;
        for (k, &i) in nodes.iter().enumerate() {
            let got = reached >> i & 1 == 1;
            if got != (label[k] > 0) {
                ok = false;
                break;
            }
            if got {
                reached |= forwarded(network, i, label[k] - 1);
            }
        }
        if ok && want & !reached == 0 {
            count += 1;
        }
        if !bump(&mut label, &radix) {
            break;
        }
    }
    Ok(count)
}
