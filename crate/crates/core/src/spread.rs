//! Information-spread semantics shared by every engine.
//!
//! A state vector assigns a label to each transmitting node. Starting from
//! node 1, a reached node with label `j >= 1` forwards to the subset encoded by
//! `j`. Because arcs always go from lower to higher labels, one ascending sweep
//! computes the reached set.
//!
//! A vector is *consistent* when exactly the reached transmitting nodes carry
//! non-Z labels; unreached nodes must sit at Z. Consistent vectors are in
//! one-to-one correspondence with the outcome classes of the independent
//! per-node subset draws, which is why their probabilities sum to 1.

use std::fmt;

use crate::model::{AminNetwork, ModelError, NodeSubset, StateDistribution, StateLabel};

/// One label per node; non-transmitting nodes are fixed at Z and are not coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVector {
    labels: Vec<StateLabel>,
}

impl StateVector {
    /// All nodes at Z.
    pub fn zero(network: &AminNetwork) -> Self {
        StateVector {
            labels: vec![StateLabel::Z; network.node_count()],
        }
    }

    /// Builds from the coordinates of the transmitting nodes, in ascending node order.
    pub fn from_coordinates(network: &AminNetwork, coords: &[u32]) -> Result<Self, ModelError> {
        let nodes = network.transmitting();
        if coords.len() != nodes.len() {
            return Err(ModelError::NodeCount {
                expected: nodes.len(),
                found: coords.len(),
            });
        }
        let mut x = Self::zero(network);
        for (&node, &label) in nodes.iter().zip(coords) {
            let max = network.state_count(node) as u32;
            if label > max {
                return Err(ModelError::LabelOutOfRange { node, label, max });
            }
            x.labels[node - 1] = StateLabel(label);
        }
        Ok(x)
    }

    #[inline]
    pub fn get(&self, node: usize) -> StateLabel {
        self.labels[node - 1]
    }

    #[inline]
    pub fn set(&mut self, node: usize, label: StateLabel) {
        self.labels[node - 1] = label;
    }

    /// Labels of the transmitting nodes, ascending.
    pub fn coordinates(&self, network: &AminNetwork) -> Vec<u32> {
        network
            .transmitting()
            .iter()
            .map(|&i| self.labels[i - 1].0)
            .collect()
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, l) in self.labels.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", l.0)?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpreadResult {
    pub reached: NodeSubset,
    pub consistent: bool,
    pub reached_targets: NodeSubset,
}

/// Sweeps the network once in label order and reports who received the information.
#[inline]
pub fn propagate(network: &AminNetwork, x: &StateVector) -> SpreadResult {
    let mut reached = NodeSubset::singleton(1);
    let mut consistent = true;
    for &i in network.transmitting() {
        let label = x.labels[i - 1];
        match (reached.contains(i), label.mask()) {
            (true, Some(mask)) => reached |= network.subset_for_mask(i, mask),
            (false, None) => {}
            _ => consistent = false,
        }
    }
    SpreadResult {
        reached,
        consistent,
        reached_targets: reached & network.targets(),
    }
}

/// Product of the label probabilities; Z contributes a factor of 1.
#[inline]
pub fn probability(network: &AminNetwork, dist: &StateDistribution, x: &StateVector) -> f64 {
    network
        .transmitting()
        .iter()
        .filter_map(|&i| x.labels[i - 1].mask().map(|m| dist.prob(i, m)))
        .product()
}

/// Consistent and covering every required target.
#[inline]
pub fn is_feasible(network: &AminNetwork, x: &StateVector, required_targets: NodeSubset) -> bool {
    let s = propagate(network, x);
    s.consistent && required_targets.is_subset(s.reached)
}
