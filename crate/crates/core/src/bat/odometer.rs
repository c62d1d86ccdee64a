use std::ops::RangeInclusive;
use std::time::Instant;

use super::BatCounters;
use crate::model::{AminNetwork, NodeSubset, StateDistribution, StateLabel};
use crate::spread::{self, SpreadResult, StateVector};
use crate::sum::Accumulator;

/// Environment variable holding the worker count for partitioned enumeration.
pub const THREADS_ENV: &str = "AMIN_REL_THREADS";

/// Labels node 1 takes during enumeration. Z and ∅ can never reach anything, so
/// the walk starts at label 2.
pub fn source_label_range(network: &AminNetwork) -> RangeInclusive<u32> {
    2..=network.state_count(1) as u32
}

/// Number of vectors the odometer visits:
/// `(2^Deg(1) - 1) * prod_{i >= 2} (2^Deg(i) + 1)` over transmitting nodes.
pub fn visited_count(network: &AminNetwork) -> u128 {
    let tx = network.transmitting();
    if tx.first() != Some(&1) {
        return 0;
    }
    let source = (network.state_count(1) as u128).saturating_sub(1);
    tx[1..]
        .iter()
        .map(|&i| network.state_count(i) as u128 + 1)
        .fold(source, |acc, r| acc * r)
}

/// Adds one to a mixed-radix counter whose digit `k` runs over `lo[k]..=hi[k]`,
/// digit 0 least significant. Returns the highest digit that changed, or `None`
/// once the counter wraps back to all-`lo`.
#[inline]
pub fn increment(digits: &mut [u32], lo: &[u32], hi: &[u32]) -> Option<usize> {
    for k in 0..digits.len() {
        if digits[k] < hi[k] {
            digits[k] += 1;
            return Some(k);
        }
        digits[k] = lo[k];
    }
    None
}

/// Walks every vector with node 1 in `source` and every other transmitting node
/// over `0..=2^Deg`. Coordinate 1 is least significant.
fn walk<F>(network: &AminNetwork, source: RangeInclusive<u32>, mut f: F) -> u64
where
    F: FnMut(&StateVector),
{
    let tx = network.transmitting();
    if tx.first() != Some(&1) || source.is_empty() {
        return 0;
    }
    let mut lo = vec![0u32; tx.len()];
    let mut hi: Vec<u32> = tx.iter().map(|&i| network.state_count(i) as u32).collect();
    lo[0] = *source.start();
    hi[0] = *source.end();

    let mut digits = lo.clone();
    let mut x = StateVector::zero(network);
    x.set(1, StateLabel(lo[0]));
    let mut visited = 0u64;
    loop {
        f(&x);
        visited += 1;
        match increment(&mut digits, &lo, &hi) {
            Some(top) => {
                for k in 0..=top {
                    x.set(tx[k], StateLabel(digits[k]));
                }
            }
            None => return visited,
        }
    }
}

/// Enumerates state vectors in odometer order, classifying each against
/// `required_targets`. The visitor sees the vector, its spread, and the verdict.
pub fn enumerate_odometer<F>(
    network: &AminNetwork,
    required_targets: NodeSubset,
    mut visitor: F,
) -> BatCounters
where
    F: FnMut(&StateVector, &SpreadResult, bool),
{
    let start = Instant::now();
    let mut feasible = 0u64;
    let visited = walk(network, source_label_range(network), |x| {
        let s = spread::propagate(network, x);
        let ok = s.consistent && required_targets.is_subset(s.reached);
        feasible += ok as u64;
        visitor(x, &s, ok);
    });
    BatCounters {
        visited,
        feasible,
        elapsed: start.elapsed(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reliability {
    pub reliability: f64,
    pub counters: BatCounters,
}

/// Two-terminal reliability from node 1 to `target`.
pub fn reliability_one_to_sink(
    network: &AminNetwork,
    dist: &StateDistribution,
    target: usize,
) -> Reliability {
    reliability_to_targets(network, dist, NodeSubset::singleton(target), 1)
}

/// Probability that every node in `required` is reached, summed over the
/// feasible vectors of the odometer walk. With `threads > 1` the node-1 label
/// range is split into contiguous partitions whose sums are reduced in order.
pub fn reliability_to_targets(
    network: &AminNetwork,
    dist: &StateDistribution,
    required: NodeSubset,
    threads: usize,
) -> Reliability {
    let start = Instant::now();
    let parts = partition(source_label_range(network), threads.max(1));
    let run = |range: RangeInclusive<u32>| {
        let mut acc = Accumulator::new();
        let mut feasible = 0u64;
        let visited = walk(network, range, |x| {
            if spread::is_feasible(network, x, required) {
                feasible += 1;
                acc.add(spread::probability(network, dist, x));
            }
        });
        (acc, visited, feasible)
    };

    let results: Vec<(Accumulator, u64, u64)> = if parts.len() <= 1 {
        parts.into_iter().map(run).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = parts
                .into_iter()
                .map(|range| scope.spawn(move || run(range)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("enumeration worker panicked"))
                .collect()
        })
    };

    let mut total = Accumulator::new();
    let (mut visited, mut feasible) = (0, 0);
    for (acc, v, f) in &results {
        total.merge(acc);
        visited += v;
        feasible += f;
    }
    Reliability {
        reliability: total.value(),
        counters: BatCounters {
            visited,
            feasible,
            elapsed: start.elapsed(),
        },
    }
}

/// Worker count from [`THREADS_ENV`], defaulting to 1.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or(1)
}

fn partition(range: RangeInclusive<u32>, parts: usize) -> Vec<RangeInclusive<u32>> {
    if range.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = (*range.start(), *range.end());
    let len = (hi - lo + 1) as usize;
    let parts = parts.min(len);
    let mut out = Vec::with_capacity(parts);
    let mut next = lo;
    for k in 0..parts {
        let size = (len / parts + usize::from(k < len % parts)) as u32;
        out.push(next..=next + size - 1);
        next += size;
    }
    out
}
