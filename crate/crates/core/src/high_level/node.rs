use std::sync::Arc;

use crate::constraints::{Constraint, ConstraintSet};
use crate::low_level::{Frontier, Path};
use crate::pareto::{nd_vectors, CostVec};
use crate::scalar::CostScalar;

use super::SplitStrategy;

/// A constraint-tree node.
///
/// `lb[i]` is the cost lower bound of agent `i` and `ub[i]` its set of cost
/// upper bounds. Standard splitting keeps `lb[i]` equal to the cost of the
/// stored path and every `ub[i]` empty, so any node can be handed to any
/// split function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtNode<C> {
    pub seq: u64,
    pub parent: Option<u64>,
    /// Agent and constraint added when this node was split off its parent.
    pub origin: Option<(usize, Constraint)>,
    pub constraints: ConstraintSet,
    pub paths: Vec<Arc<Path<C>>>,
    pub cost: CostVec<C>,
    pub lb: Vec<CostVec<C>>,
    pub ub: Vec<Vec<CostVec<C>>>,
}

impl<C: CostScalar> CtNode<C> {
    pub fn agent_count(&self) -> usize {
        self.paths.len()
    }

    pub(crate) fn recompute_cost(&mut self) {
        let mut cost = CostVec::zero(self.cost.len());
        for p in &self.paths {
            cost.add_assign(&p.cost);
        }
        self.cost = cost;
    }

    /// Whether a path of `agent` with cost `cost` that satisfies this
    /// node's constraints is compatible with the node. Cost splitting uses
    /// the lower bound only; disjoint cost splitting also excludes costs
    /// weakly dominated by an upper bound.
    pub fn admits_cost(&self, agent: usize, cost: &CostVec<C>, strategy: SplitStrategy) -> bool {
        if !self.lb[agent].weakly_dominates(cost) {
            return false;
        }
        strategy != SplitStrategy::Disjoint
            || self.ub[agent].iter().all(|u| !u.weakly_dominates(cost))
    }

    pub fn admits_path(&self, agent: usize, path: &Path<C>, strategy: SplitStrategy) -> bool {
        self.admits_cost(agent, &path.cost, strategy)
            && path.satisfies(agent, self.constraints.for_agent(agent))
    }

    /// A solution is compatible iff every one of its paths is.
    pub fn admits_solution(&self, paths: &[Arc<Path<C>>], strategy: SplitStrategy) -> bool {
        paths
            .iter()
            .enumerate()
            .all(|(i, p)| self.admits_path(i, p, strategy))
    }
}

/// Upper-bound seeds for the roots: for the `j`-th path of a frontier
/// sorted lexicographically by cost, `ND({comax(c_j, c_k) | k < j})`.
pub(crate) fn root_upper_bounds<C: CostScalar>(frontier: &Frontier<C>) -> Vec<Vec<CostVec<C>>> {
    let costs = frontier.costs();
    (0..costs.len())
        .map(|j| {
            let raw: Vec<CostVec<C>> = costs[..j].iter().map(|ck| costs[j].comax(ck)).collect();
            nd_vectors(&raw)
        })
        .collect()
}
