//! Constraint-tree search over joint solutions.

mod conflict;
mod node;
mod solver;
mod split;
mod trace;

use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::low_level::Path;
use crate::pareto::CostVec;

pub use conflict::{detect_first_conflict, Conflict, ConflictKind};
pub use node::CtNode;
pub use solver::{dominated_by_solutions, init_roots, Roots, SearchEvent, Solver};
pub use split::{split_node, SplitOutput};
pub use trace::TraceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitStrategy {
    /// One child per Pareto-optimal path of each conflicting agent.
    Standard,
    /// One child per nondominated cost lower bound.
    Cost,
    /// Cost splitting plus upper bounds that make children disjoint.
    Disjoint,
}

impl SplitStrategy {
    pub const ALL: [SplitStrategy; 3] = [
        SplitStrategy::Standard,
        SplitStrategy::Cost,
        SplitStrategy::Disjoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SplitStrategy::Standard => "standard",
            SplitStrategy::Cost => "cost",
            SplitStrategy::Disjoint => "disjoint",
        }
    }
}

impl std::fmt::Display for SplitStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SplitStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" | "std" => Ok(SplitStrategy::Standard),
            "cost" | "c" => Ok(SplitStrategy::Cost),
            "disjoint" | "dc" => Ok(SplitStrategy::Disjoint),
            other => Err(format!(
                "unknown split strategy `{other}` (expected standard, cost or disjoint)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub strategy: SplitStrategy,
    pub time_limit: Option<Duration>,
    pub max_expansions: Option<u64>,
    pub use_heuristic: bool,
    pub use_cache: bool,
}

impl SolveOptions {
    pub fn new(strategy: SplitStrategy) -> Self {
        SolveOptions {
            strategy,
            time_limit: None,
            max_expansions: None,
            use_heuristic: true,
            use_cache: true,
        }
    }

    pub fn time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn max_expansions(mut self, n: u64) -> Self {
        self.max_expansions = Some(n);
        self
    }

    pub fn heuristic(mut self, on: bool) -> Self {
        self.use_heuristic = on;
        self
    }

    pub fn cache(mut self, on: bool) -> Self {
        self.use_cache = on;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Complete,
    Timeout,
    ExpansionLimit,
}

/// A conflict-free joint solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution<C> {
    pub paths: Vec<Arc<Path<C>>>,
    pub cost: CostVec<C>,
}

/// Counters for one run.
///
/// `expansions` counts popped nodes that survived pruning, including the
/// conflict-free ones that became solutions. `generations` counts roots
/// plus every child returned by a split, whether or not it was later
/// pruned on insertion.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub expansions: u64,
    pub generations: u64,
    pub roots: u64,
    pub splits: u64,
    pub children: u64,
    #[serde(skip)]
    pub split_children: Vec<u32>,
    pub pruned_on_pop: u64,
    pub pruned_on_insert: u64,
    pub low_level_searches: u64,
    pub cache_hits: u64,
    pub disjoint_discarded: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SearchStats {
    /// Mean number of children per split, `None` before the first split.
    pub fn branching_factor(&self) -> Option<f64> {
        (self.splits > 0).then(|| self.children as f64 / self.splits as f64)
    }

    /// Low-level requests, cached or not.
    pub fn low_level_calls(&self) -> u64 {
        self.low_level_searches + self.cache_hits
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome<C> {
    /// Sorted lexicographically by cost; costs are pairwise nondominated.
    pub solutions: Vec<Solution<C>>,
    pub stats: SearchStats,
    pub status: SolveStatus,
    /// Some agent cannot reach its goal at all.
    pub unsolvable: bool,
}

impl<C: Clone> SolveOutcome<C> {
    pub fn costs(&self) -> Vec<CostVec<C>> {
        self.solutions.iter().map(|s| s.cost.clone()).collect()
    }
}

#[cfg(test)]
mod tests;
