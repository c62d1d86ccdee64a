use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use super::BatCounters;
use crate::model::{AminNetwork, NodeSubset, StateDistribution, StateLabel};
use crate::spread::StateVector;
use crate::sum::Accumulator;

/// Variable-length state vector: the `(node, label)` pairs of the nodes the
/// spread actually reached, in expansion order. Unlisted nodes are at Z.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlexibleVector {
    pub path: Vec<(usize, StateLabel)>,
}

impl FlexibleVector {
    /// Fixed-length form with every unlisted node at Z.
    pub fn to_state_vector(&self, network: &AminNetwork) -> StateVector {
        let mut x = StateVector::zero(network);
        for &(node, label) in &self.path {
            x.set(node, label);
        }
        x
    }
}

impl fmt::Debug for FlexibleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, (node, label)) in self.path.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({node}, {label})")?;
        }
        f.write_str(")")
    }
}

/// A completed branch of the search.
#[derive(Clone, Copy, Debug)]
pub struct FrontierVisit<'a> {
    pub path: &'a [(usize, StateLabel)],
    pub reached: NodeSubset,
    pub reached_targets: NodeSubset,
    pub probability: f64,
    pub feasible: bool,
}

impl FrontierVisit<'_> {
    pub fn to_flexible(&self) -> FlexibleVector {
        FlexibleVector {
            path: self.path.to_vec(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Report only vectors covering the required targets; prune hopeless branches.
    Feasible,
    /// Report every consistent vector.
    All,
}

struct Search<'a, F> {
    network: &'a AminNetwork,
    dist: &'a StateDistribution,
    required: NodeSubset,
    mode: Mode,
    transmitting: NodeSubset,
    /// `descendants[i]`: nodes reachable from `i`, including `i`.
    descendants: Vec<NodeSubset>,
    path: Vec<(usize, StateLabel)>,
    visited: u64,
    feasible: u64,
    visitor: F,
}

impl<F: FnMut(&FrontierVisit<'_>)> Search<'_, F> {
    fn expand(&mut self, frontier: NodeSubset, reached: NodeSubset, prob: f64) {
        // sinks carry no coordinate; once reached they are done
        let frontier = frontier & self.transmitting;
        let Some(v) = frontier.first() else {
            self.visited += 1;
            let feasible = self.required.is_subset(reached);
            self.feasible += feasible as u64;
            if feasible || self.mode == Mode::All {
                (self.visitor)(&FrontierVisit {
                    path: &self.path,
                    reached,
                    reached_targets: reached & self.network.targets(),
                    probability: prob,
                    feasible,
                });
            }
            return;
        };
        if self.mode == Mode::Feasible {
            let reachable = frontier
                .iter()
                .fold(reached, |acc, i| acc | self.descendants[i]);
            if !self.required.is_subset(reachable) {
                return;
            }
        }
        let rest = frontier.without(v);
        for mask in 0..self.network.state_count(v) {
            let sent = self.network.subset_for_mask(v, mask);
            self.path.push((v, StateLabel::from_mask(mask)));
            self.expand(rest | sent, reached | sent, prob * self.dist.prob(v, mask));
            self.path.pop();
        }
    }
}

fn search<F>(
    network: &AminNetwork,
    dist: &StateDistribution,
    required: NodeSubset,
    mode: Mode,
    visitor: F,
) -> BatCounters
where
    F: FnMut(&FrontierVisit<'_>),
{
    let start = Instant::now();
    let n = network.node_count();
    let mut descendants = vec![NodeSubset::EMPTY; n + 1];
    for i in (1..=n).rev() {
        descendants[i] = network
            .out_neighbors(i)
            .iter()
            .fold(NodeSubset::singleton(i), |acc, &j| acc | descendants[j]);
    }
    let mut s = Search {
        network,
        dist,
        required,
        mode,
        transmitting: network.transmitting().iter().copied().collect(),
        descendants,
        path: Vec::with_capacity(n),
        visited: 0,
        feasible: 0,
        visitor,
    };
    let source = NodeSubset::singleton(1);
    s.expand(source, source, 1.0);
    BatCounters {
        visited: s.visited,
        feasible: s.feasible,
        elapsed: start.elapsed(),
    }
}

/// Depth-first search over flexible state vectors: the smallest node of the
/// current frontier is expanded through all of its labels, and branches whose
/// spread has died or can no longer reach the required targets are cut. The
/// visitor receives exactly the feasible vectors.
pub fn enumerate_frontier_dfs<F>(
    network: &AminNetwork,
    dist: &StateDistribution,
    required_targets: NodeSubset,
    visitor: F,
) -> BatCounters
where
    F: FnMut(&FrontierVisit<'_>),
{
    search(network, dist, required_targets, Mode::Feasible, visitor)
}

/// Reliability to `required` computed by the frontier search.
pub fn reliability_frontier(
    network: &AminNetwork,
    dist: &StateDistribution,
    required: NodeSubset,
) -> super::Reliability {
    let mut acc = Accumulator::new();
    let counters = enumerate_frontier_dfs(network, dist, required, |v| acc.add(v.probability));
    super::Reliability {
        reliability: acc.value(),
        counters,
    }
}

/// Probability mass of each reached-target set `τ ⊆ T`, with `∅` holding the
/// failure mass.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetSubsetReliability {
    pub buckets: BTreeMap<NodeSubset, f64>,
    pub counters: BatCounters,
}

impl TargetSubsetReliability {
    /// Probability that at least the targets in `tau` are reached.
    pub fn at_least(&self, tau: NodeSubset) -> f64 {
        crate::sum::stable_sum(
            self.buckets
                .iter()
                .filter(|(k, _)| tau.is_subset(**k))
                .map(|(_, &p)| p),
        )
    }

    pub fn total(&self) -> f64 {
        crate::sum::stable_sum(self.buckets.values().copied())
    }
}

/// Buckets every consistent vector by the set of targets it reaches.
pub fn reliability_by_target_subset(
    network: &AminNetwork,
    dist: &StateDistribution,
) -> TargetSubsetReliability {
    let mut acc: BTreeMap<NodeSubset, Accumulator> = BTreeMap::new();
    let counters = search(network, dist, NodeSubset::EMPTY, Mode::All, |v| {
        acc.entry(v.reached_targets).or_default().add(v.probability);
    });
    TargetSubsetReliability {
        buckets: acc.into_iter().map(|(k, a)| (k, a.value())).collect(),
        counters,
    }
}
