//! Exact reliability of acyclic multistate information networks (AMIN).
//!
//! In an AMIN every node that receives a piece of information forwards it to a
//! random subset of its out-neighbors, independently of the other nodes. The
//! reliability is the probability that the information starting at node 1
//! reaches the target node(s).
//!
//! * [`model`]: networks, state labels, probability tables, validation, file format.
//! * [`spread`]: propagation, consistency, feasibility and probability of a state vector.
//! * [`bat`]: node-based binary-addition tree enumeration (odometer and frontier search).
//! * [`ugfm`]: the universal generating function method, used for cross-checking.
//! * [`oracle`]: brute-force ground truth.
//! * [`workbench`]: instance generators and the benchmark harness.

pub mod bat;
pub mod model;
pub mod oracle;
pub mod spread;
pub mod sum;
pub mod ugfm;
pub mod workbench;

pub use model::{AminNetwork, NodeSubset, StateDistribution, StateLabel};
pub use spread::StateVector;
