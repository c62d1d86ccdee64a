//! JSON network files.
//!
//! ```json
//! {"nodes": 4, "arcs": [[1,2],[1,3],[2,3],[2,4],[3,4]], "targets": [4],
//!  "prob": {"2": {"0": 0.1, "1": 0.2, "2": 0.3, "3": 0.4}}}
//! ```
//!
//! `prob` maps a node label to `{bitmask: probability}` over its ascending
//! out-neighbors. A missing `prob`, or a node missing from it, means uniform.
//! Bitmasks missing inside a listed node have probability 0.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AminNetwork, ModelError, StateDistribution};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub nodes: usize,
    pub arcs: Vec<[usize; 2]>,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prob: Option<BTreeMap<usize, BTreeMap<usize, f64>>>,
}

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed network JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("probability given for node {node}, bitmask {mask}, which does not exist")]
    UnknownMask { node: usize, mask: usize },
}

impl NetworkFile {
    pub fn from_json(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network file serializes")
    }

    pub fn build(&self) -> Result<(AminNetwork, StateDistribution), FileError> {
        let network = AminNetwork::new(
            self.nodes,
            self.arcs.iter().map(|&[i, j]| (i, j)),
            &self.targets,
        )?;
        let mut dist = StateDistribution::uniform(&network);
        if let Some(prob) = &self.prob {
            let mut tables: Vec<Vec<f64>> = (1..=network.node_count())
                .map(|i| dist.table(i).to_vec())
                .collect();
            for (&node, entries) in prob {
                if !(1..=network.node_count()).contains(&node) {
                    return Err(ModelError::NodeOutOfRange {
                        node,
                        node_count: network.node_count(),
                    }
                    .into());
                }
                let table = &mut tables[node - 1];
                table.iter_mut().for_each(|p| *p = 0.0);
                for (&mask, &p) in entries {
                    *table
                        .get_mut(mask)
                        .ok_or(FileError::UnknownMask { node, mask })? = p;
                }
            }
            dist = StateDistribution::from_tables(&network, tables)?;
        }
        Ok((network, dist))
    }

    /// Captures a network; `dist = None` writes a file without `prob` (uniform).
    pub fn capture(network: &AminNetwork, dist: Option<&StateDistribution>) -> Self {
        let prob = dist.map(|d| {
            network
                .transmitting()
                .iter()
                .map(|&i| (i, d.table(i).iter().copied().enumerate().collect()))
                .collect()
        });
        NetworkFile {
            nodes: network.node_count(),
            arcs: network.arcs().map(|(i, j)| [i, j]).collect(),
            targets: network.targets().iter().collect(),
            prob,
        }
    }
}

pub fn read_network_file(path: &Path) -> Result<(AminNetwork, StateDistribution), FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    NetworkFile::from_json(&text)?.build()
}
