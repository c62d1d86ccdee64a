//! Node-based binary-addition tree (BAT) enumeration.
//!
//! Two engines share the same feasibility semantics from [`crate::spread`]:
//!
//! * the odometer walks the fixed-length label space, coordinate 1 fastest,
//!   and tests every vector (node 1 starts at label 2, since Z and ∅ at the
//!   source are dead on arrival);
//! * the frontier search grows variable-length vectors from node 1, always
//!   expanding the smallest node that has received but not yet forwarded.
//!
//! Both keep `O(n)` working state.

mod frontier;
mod odometer;

use std::time::Duration;

pub use frontier::{
    enumerate_frontier_dfs, reliability_by_target_subset, reliability_frontier, FlexibleVector,
    FrontierVisit, TargetSubsetReliability,
};
pub use odometer::{
    enumerate_odometer, increment, reliability_one_to_sink, reliability_to_targets,
    source_label_range, threads_from_env, visited_count, Reliability, THREADS_ENV,
};

/// Work done by an enumeration run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BatCounters {
    /// State vectors generated.
    pub visited: u64,
    /// Vectors that passed the feasibility test.
    pub feasible: u64,
    pub elapsed: Duration,
}

impl BatCounters {
    pub fn elapsed_secs(&self) -> f64 {
        self.elapsed.as_secs_f64()
    }
}
