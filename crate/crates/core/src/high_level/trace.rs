use serde::{Deserialize, Serialize};

use crate::constraints::Constraint;
use crate::pareto::CostVec;
use crate::scalar::CostScalar;

use super::conflict::Conflict;
use super::node::CtNode;
use super::solver::SearchEvent;
use super::SplitStrategy;

/// One line of the JSONL trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord<C> {
    /// root, pop, prune, split, child or solution
    pub event: String,
    pub seq: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<u64>,
    pub cost: CostVec<C>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lb: Option<Vec<CostVec<C>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ub: Option<Vec<Vec<CostVec<C>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<Constraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conflict: Option<Conflict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub on_pop: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discarded: Option<usize>,
}

impl<C: CostScalar> TraceRecord<C> {
    fn node(event: &str, n: &CtNode<C>, strategy: SplitStrategy) -> Self {
        TraceRecord {
            event: event.to_string(),
            seq: n.seq,
            parent: n.parent,
            cost: n.cost.clone(),
            lb: (strategy != SplitStrategy::Standard).then(|| n.lb.clone()),
            ub: (strategy == SplitStrategy::Disjoint).then(|| n.ub.clone()),
            constraint: n.origin.map(|(_, c)| c),
            conflict: None,
            on_pop: None,
            discarded: None,
        }
    }

    /// Records for one event. A split yields the split record followed by
    /// one `child` record per emitted child.
    pub fn from_event(event: &SearchEvent<'_, C>, strategy: SplitStrategy) -> Vec<Self> {
        match *event {
            SearchEvent::Root(n) => vec![Self::node("root", n, strategy)],
            SearchEvent::Pop(n) => vec![Self::node("pop", n, strategy)],
            SearchEvent::Pruned { node, on_pop } => {
                let mut r = Self::node("prune", node, strategy);
                r.on_pop = Some(on_pop);
                vec![r]
            }
            SearchEvent::Solution(n) => vec![Self::node("solution", n, strategy)],
            SearchEvent::Split {
                node,
                conflict,
                children,
                discarded,
            } => {
                let mut r = Self::node("split", node, strategy);
                r.conflict = Some(*conflict);
                if strategy == SplitStrategy::Disjoint {
                    r.discarded = Some(discarded);
                }
                let mut out = vec![r];
                out.extend(children.iter().map(|c| Self::node("child", c, strategy)));
                out
            }
        }
    }
}
