//! Universal generating function method (UGFM).
//!
//! A subnet polynomial `U(i)` is a sum of terms `c · z^J`, where `J` is the set
//! of nodes that have received information but have not been processed yet.
//! Composing with node `i` expands every term containing `i` through the states
//! of `i`, replacing `J` by `(J ∪ I) − {i}`; terms not containing `i` pass through
//! unchanged. Terms whose exponent becomes empty carry no further spread and are
//! dropped.
//!
//! Like exponents are merged numerically, but each term also remembers how many
//! distinct sub-vectors (monomials of the unmerged expansion) it stands for. That
//! count is what an implementation storing every sub-vector would hold in memory,
//! and it is what the term cap limits.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::{AminNetwork, NodeSubset, StateDistribution};
use crate::sum::Accumulator;

/// Default limit on stored sub-vectors.
pub const DEFAULT_TERM_CAP: u64 = 1_900_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UgfmError {
    #[error(
        "term cap exceeded while composing node {node}: {subvectors} stored sub-vectors > cap {cap} \
         ({generated} products generated so far)"
    )]
    TermCapExceeded {
        node: usize,
        subvectors: u64,
        cap: u64,
        generated: u64,
    },
    #[error("target {0} has outgoing arcs; the generating-function method needs sink targets")]
    NonSinkTarget(usize),
    #[error("source node 1 has no outgoing arcs")]
    SourceWithoutArcs,
}

/// The node generating function `u(i)`: one entry per state of node `i`.
/// For node 1 the empty state is left out.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeUgf {
    pub node: usize,
    pub states: Vec<(NodeSubset, f64)>,
}

pub fn node_ugf(network: &AminNetwork, dist: &StateDistribution, node: usize) -> NodeUgf {
    let first = usize::from(node == 1);
    let states = (first..network.state_count(node))
        .map(|mask| (network.subset_for_mask(node, mask), dist.prob(node, mask)))
        .collect();
    NodeUgf { node, states }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UgfTerm {
    pub exponent: NodeSubset,
    pub coefficient: f64,
    /// Number of unmerged products summed into this term.
    pub multiplicity: u64,
}

/// A subnet generating function with merged, non-empty exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct UgfPolynomial {
    terms: Vec<UgfTerm>,
    generated_count: u64,
    cap: u64,
    pruned_mass: f64,
}

#[derive(Default)]
struct Builder {
    terms: BTreeMap<NodeSubset, (Accumulator, u64)>,
}

impl Builder {
    fn add(&mut self, exponent: NodeSubset, coefficient: f64, multiplicity: u64) {
        let e = self.terms.entry(exponent).or_default();
        e.0.add(coefficient);
        e.1 = e.1.saturating_add(multiplicity);
    }

    fn finish(self) -> Vec<UgfTerm> {
        self.terms
            .into_iter()
            .map(|(exponent, (acc, multiplicity))| UgfTerm {
                exponent,
                coefficient: acc.value(),
                multiplicity,
            })
            .collect()
    }
}

impl UgfPolynomial {
    /// `U(1) = u(1)`.
    pub fn initial(
        network: &AminNetwork,
        dist: &StateDistribution,
        cap: u64,
    ) -> Result<Self, UgfmError> {
        let u = node_ugf(network, dist, 1);
        let mut b = Builder::default();
        for &(set, p) in &u.states {
            b.add(set, p, 1);
        }
        let pruned_mass = if network.state_count(1) > 0 {
            dist.prob(1, 0)
        } else {
            0.0
        };
        let poly = UgfPolynomial {
            terms: b.finish(),
            generated_count: u.states.len() as u64,
            cap,
            pruned_mass,
        };
        poly.check_cap(1)?;
        Ok(poly)
    }

    pub fn terms(&self) -> &[UgfTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, exponent: NodeSubset) -> Option<&UgfTerm> {
        self.terms.iter().find(|t| t.exponent == exponent)
    }

    /// Products created so far, counted before merging.
    pub fn generated_count(&self) -> u64 {
        self.generated_count
    }

    /// Sub-vectors currently represented.
    pub fn subvectors(&self) -> u64 {
        self.terms
            .iter()
            .fold(0u64, |acc, t| acc.saturating_add(t.multiplicity))
    }

    /// Mass of the terms dropped because their spread died.
    pub fn pruned_mass(&self) -> f64 {
        self.pruned_mass
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    fn check_cap(&self, node: usize) -> Result<(), UgfmError> {
        let subvectors = self.subvectors();
        if subvectors > self.cap {
            return Err(UgfmError::TermCapExceeded {
                node,
                subvectors,
                cap: self.cap,
                generated: self.generated_count,
            });
        }
        Ok(())
    }

    /// `U(i) = U(i-1) ⊗ u(i)`.
    pub fn compose(
        &self,
        network: &AminNetwork,
        dist: &StateDistribution,
        node: usize,
    ) -> Result<Self, UgfmError> {
        let u = node_ugf(network, dist, node);
        let mut b = Builder::default();
        let mut generated = self.generated_count;
        let mut pruned = Accumulator::new();
        pruned.add(self.pruned_mass);
        for t in &self.terms {
            if !t.exponent.contains(node) {
                b.add(t.exponent, t.coefficient, t.multiplicity);
                continue;
            }
            for &(state, p) in &u.states {
                generated += 1;
                let exponent = (t.exponent | state).without(node);
                let c = t.coefficient * p;
                if exponent.is_empty() {
                    pruned.add(c);
                } else {
                    b.add(exponent, c, t.multiplicity);
                }
            }
        }
        let poly = UgfPolynomial {
            terms: b.finish(),
            generated_count: generated,
            cap: self.cap,
            pruned_mass: pruned.value(),
        };
        poly.check_cap(node)?;
        Ok(poly)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct UgfmStats {
    pub generated_count: u64,
    /// Largest number of merged terms held at once.
    pub peak_terms: usize,
    /// Largest number of sub-vectors held at once.
    pub peak_subvectors: u64,
    /// Sub-vectors held after each step, summed over all steps.
    pub stored_subvectors_total: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UgfmOutcome {
    /// `U` after the last transmitting node; every exponent is a set of sinks.
    pub polynomial: UgfPolynomial,
    pub stats: UgfmStats,
}

impl UgfmOutcome {
    /// Probability that every node of `required` is reached.
    pub fn reliability(&self, required: NodeSubset) -> f64 {
        crate::sum::stable_sum(
            self.polynomial
                .terms()
                .iter()
                .filter(|t| required.is_subset(t.exponent))
                .map(|t| t.coefficient),
        )
    }

    /// Number of feasible sub-vectors for `required`.
    pub fn feasible_count(&self, required: NodeSubset) -> u64 {
        self.polynomial
            .terms()
            .iter()
            .filter(|t| required.is_subset(t.exponent))
            .map(|t| t.multiplicity)
            .sum()
    }

    /// Mass per reached-target set; `∅` collects dropped terms and terms
    /// that only reached non-target sinks.
    pub fn buckets(&self, targets: NodeSubset) -> BTreeMap<NodeSubset, f64> {
        let mut acc: BTreeMap<NodeSubset, Accumulator> = BTreeMap::new();
        acc.entry(NodeSubset::EMPTY)
            .or_default()
            .add(self.polynomial.pruned_mass());
        for t in self.polynomial.terms() {
            acc.entry(t.exponent & targets)
                .or_default()
                .add(t.coefficient);
        }
        acc.into_iter().map(|(k, a)| (k, a.value())).collect()
    }
}

/// Runs `U(1) = u(1)` then composes every further transmitting node in label order.
pub fn reliability_ugfm(
    network: &AminNetwork,
    dist: &StateDistribution,
    cap: u64,
) -> Result<UgfmOutcome, UgfmError> {
    let start = Instant::now();
    if let Some(t) = network
        .targets()
        .iter()
        .find(|&t| network.out_degree(t) > 0)
    {
        return Err(UgfmError::NonSinkTarget(t));
    }
    if network.out_degree(1) == 0 {
        return Err(UgfmError::SourceWithoutArcs);
    }
    let mut poly = UgfPolynomial::initial(network, dist, cap)?;
    let mut stats = UgfmStats::default();
    let record = |p: &UgfPolynomial, stats: &mut UgfmStats| {
        let sv = p.subvectors();
        stats.peak_terms = stats.peak_terms.max(p.len());
        stats.peak_subvectors = stats.peak_subvectors.max(sv);
        stats.stored_subvectors_total = stats.stored_subvectors_total.saturating_add(sv);
    };
    record(&poly, &mut stats);
    for &i in &network.transmitting()[1..] {
        poly = poly.compose(network, dist, i)?;
        record(&poly, &mut stats);
    }
    stats.generated_count = poly.generated_count();
    stats.elapsed = start.elapsed();
    Ok(UgfmOutcome {
        polynomial: poly,
        stats,
    })
}
