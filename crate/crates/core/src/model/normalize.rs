use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{AminNetwork, ModelError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormalizeError {
    #[error("graph contains a directed cycle through node {0}")]
    Cycle(u64),
    #[error("designated source {0} does not appear in the graph")]
    UnknownSource(u64),
    #[error("designated source {0} has incoming arcs")]
    SourceHasPredecessors(u64),
    #[error("nodes {0:?} besides the source have no incoming arcs")]
    AmbiguousSource(Vec<u64>),
    #[error("target {0} does not appear in the graph")]
    UnknownTarget(u64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A relabeled network and the mapping from original to new labels.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub network: AminNetwork,
    pub relabel: BTreeMap<u64, usize>,
}

/// Relabels an arbitrary DAG so that every arc goes from a lower to a higher
/// label and `source` becomes node 1.
///
/// Among ready nodes the smallest original label is taken first, so input that
/// is already topologically labeled `1..=n` maps to itself.
pub fn normalize_labels(
    arcs: &[(u64, u64)],
    source: u64,
    targets: &[u64],
) -> Result<Normalized, NormalizeError> {
    let mut succ: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut indeg: BTreeMap<u64, usize> = BTreeMap::new();
    for &(a, b) in arcs {
        succ.entry(a).or_default().push(b);
        succ.entry(b).or_default();
        indeg.entry(a).or_insert(0);
        *indeg.entry(b).or_insert(0) += 1;
    }
    if !arcs.is_empty() && !indeg.contains_key(&source) {
        return Err(NormalizeError::UnknownSource(source));
    }
    indeg.entry(source).or_insert(0);
    succ.entry(source).or_default();
    if indeg[&source] > 0 {
        return Err(NormalizeError::SourceHasPredecessors(source));
    }
    let others: Vec<u64> = indeg
        .iter()
        .filter(|&(&v, &d)| d == 0 && v != source)
        .map(|(&v, _)| v)
        .collect();
    if !others.is_empty() {
        return Err(NormalizeError::AmbiguousSource(others));
    }

    let mut relabel = BTreeMap::new();
    let mut ready = BTreeSet::from([source]);
    while let Some(v) = ready.pop_first() {
        relabel.insert(v, relabel.len() + 1);
        for &w in &succ[&v] {
            let d = indeg.get_mut(&w).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.insert(w);
            }
        }
    }
    if relabel.len() < indeg.len() {
        let stuck = indeg
            .iter()
            .find(|&(_, &d)| d > 0)
            .map(|(&v, _)| v)
            .unwrap();
        return Err(NormalizeError::Cycle(stuck));
    }

    let mapped_targets = targets
        .iter()
        .map(|t| {
            relabel
                .get(t)
                .copied()
                .ok_or(NormalizeError::UnknownTarget(*t))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let network = AminNetwork::new(
        relabel.len(),
        arcs.iter().map(|(a, b)| (relabel[a], relabel[b])),
        &mapped_targets,
    )?;
    Ok(Normalized { network, relabel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, StateDistribution};

    #[test]
    fn identity_on_topological_input() {
        let arcs = [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)];
        let out = normalize_labels(&arcs, 1, &[4]).unwrap();
        assert!(out.relabel.iter().all(|(&a, &b)| a as usize == b));
        assert_eq!(out.network.arcs().count(), 5);
    }

    #[test]
    fn chain_is_relabeled() {
        let out = normalize_labels(&[(3, 1), (1, 2)], 3, &[2]).unwrap();
        let expect: BTreeMap<u64, usize> = [(3, 1), (1, 2), (2, 3)].into_iter().collect();
        assert_eq!(out.relabel, expect);
        assert_eq!(out.network.sole_target(), Some(3));
        let dist = StateDistribution::uniform(&out.network);
        assert!(validate(&out.network, &dist).is_empty());
    }

    #[test]
    fn cycle_is_rejected() {
        let err = normalize_labels(&[(0, 1), (1, 2), (2, 1)], 0, &[2]).unwrap_err();
        assert!(matches!(err, NormalizeError::Cycle(_)));
        let err = normalize_labels(&[(1, 2), (2, 1)], 1, &[2]).unwrap_err();
        assert_eq!(err, NormalizeError::SourceHasPredecessors(1));
    }

    #[test]
    fn source_must_be_unique_root() {
        let err = normalize_labels(&[(1, 3), (2, 3)], 1, &[3]).unwrap_err();
        assert_eq!(err, NormalizeError::AmbiguousSource(vec![2]));
        let err = normalize_labels(&[(1, 2)], 1, &[9]).unwrap_err();
        assert_eq!(err, NormalizeError::UnknownTarget(9));
        let err = normalize_labels(&[(1, 2)], 7, &[2]).unwrap_err();
        assert_eq!(err, NormalizeError::UnknownSource(7));
    }
}
