//! Multi-objective conflict-based search (MO-CBS) for multi-agent path
//! finding with vector edge costs, with three ways of splitting a
//! constraint-tree node: standard, cost splitting and disjoint cost
//! splitting.
//!
//! The solver is generic over an exact cost scalar ([`CostScalar`]). The
//! usual choice is `u64` fixed-point units with a per-instance scale; exact
//! rationals work as well.

pub mod bench;
pub mod constraints;
pub mod error;
pub mod high_level;
pub mod instance;
pub mod low_level;
pub mod oracle;
pub mod pareto;
pub mod scalar;

pub use error::{Error, Result};
pub use pareto::{CostVec, NdSet};
pub use scalar::CostScalar;

/// Fixed-point cost vector (integer units, scale kept on the graph).
pub type FixedCost = CostVec<u64>;
/// Exact rational cost vector.
pub type RationalCost = CostVec<num_rational::Ratio<u64>>;
pub type FixedInstance = instance::Instance<u64>;
pub type RationalInstance = instance::Instance<num_rational::Ratio<u64>>;
