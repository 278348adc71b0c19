//! The three ways of splitting a node on a conflict.

use std::time::Instant;

use crate::low_level::{Interrupted, LowLevel};
use crate::pareto::{nd_filter, nd_vectors, CostVec};
use crate::scalar::CostScalar;

use super::conflict::Conflict;
use super::node::CtNode;
use super::SplitStrategy;

/// Children of `node` for `conflict`, agent `conflict.first` first.
///
/// Child `seq` values are left at 0 for the caller to assign.
pub fn split_node<C: CostScalar>(
    low: &mut LowLevel<'_, C>,
    strategy: SplitStrategy,
    node: &CtNode<C>,
    conflict: &Conflict,
    deadline: Option<Instant>,
) -> Result<SplitOutput<C>, Interrupted> {
    let mut out = SplitOutput {
        children: Vec::new(),
        discarded: 0,
    };
    for cons in conflict.constraints() {
        let agent = cons.agent();
        let constraints = node.constraints.add(cons);
        let frontier = low.frontier_for(agent, &constraints, deadline)?;
        let make_child = |path_idx: usize, lb: CostVec<C>, ub: Option<Vec<CostVec<C>>>| {
            let mut child = CtNode {
                seq: 0,
                parent: Some(node.seq),
                origin: Some((agent, cons)),
                constraints: constraints.clone(),
                paths: node.paths.clone(),
                cost: node.cost.clone(),
                lb: node.lb.clone(),
                ub: node.ub.clone(),
            };
            child.paths[agent] = frontier.paths[path_idx].clone();
            child.lb[agent] = lb;
            if let Some(ub) = ub {
                child.ub[agent] = ub;
            }
            child.recompute_cost();
            child
        };

        match strategy {
            SplitStrategy::Standard => {
                for (k, p) in frontier.paths.iter().enumerate() {
                    out.children.push(make_child(k, p.cost.clone(), None));
                }
            }
            SplitStrategy::Cost | SplitStrategy::Disjoint => {
                let bounds: Vec<CostVec<C>> = frontier
                    .paths
                    .iter()
                    .map(|p| node.lb[agent].comax(&p.cost))
                    .collect();
                // nd_filter keeps the earliest path for each surviving bound,
                // which is the witness stored in the child.
                let mut kept = nd_filter(&bounds);
                if strategy == SplitStrategy::Cost {
                    for k in kept {
                        out.children.push(make_child(k, bounds[k].clone(), None));
                    }
                    continue;
                }
                kept.sort_by(|&a, &b| bounds[a].cmp(&bounds[b]));
                let mut accumulated = node.ub[agent].clone();
                for k in kept {
                    let lb = &bounds[k];
                    let raw: Vec<CostVec<C>> = accumulated.iter().map(|v| lb.comax(v)).collect();
                    let ub = nd_vectors(&raw);
                    if ub.contains(lb) {
                        out.discarded += 1;
                        continue;
                    }
                    out.children.push(make_child(k, lb.clone(), Some(ub)));
                    accumulated.push(lb.clone());
                }
            }
        }
    }
    Ok(out)
}

/// Result of one split: the emitted children and, for disjoint cost
/// splitting, how many candidates were dropped because their lower bound
/// fell inside their own upper-bound set.
#[derive(Debug, Clone)]
pub struct SplitOutput<C> {
    pub children: Vec<CtNode<C>>,
    pub discarded: usize,
}
