use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::Instant;

use crate::constraints::ConstraintSet;
use crate::instance::Instance;
use crate::low_level::{Frontier, Interrupted, LowLevel};
use crate::pareto::{CostVec, NdSet};
use crate::scalar::CostScalar;

use super::conflict::{detect_first_conflict, Conflict};
use super::node::{root_upper_bounds, CtNode};
use super::split::split_node;
use super::{SearchStats, Solution, SolveOptions, SolveOutcome, SolveStatus, SplitStrategy};

/// Something that happened during a run, in order.
#[derive(Debug, Clone, Copy)]
pub enum SearchEvent<'e, C> {
    Root(&'e CtNode<C>),
    /// Every node taken off the open list, including ones pruned right after.
    Pop(&'e CtNode<C>),
    Pruned {
        node: &'e CtNode<C>,
        on_pop: bool,
    },
    Solution(&'e CtNode<C>),
    Split {
        node: &'e CtNode<C>,
        conflict: &'e Conflict,
        children: &'e [CtNode<C>],
        discarded: usize,
    },
}

/// True iff some recorded solution cost weakly dominates `cost`.
pub fn dominated_by_solutions<C: CostScalar, P>(
    solutions: &NdSet<C, P>,
    cost: &CostVec<C>,
) -> bool {
    solutions.covers(cost)
}

#[derive(Debug, Clone)]
pub struct Roots<C> {
    pub nodes: Vec<CtNode<C>>,
    /// Some agent has no path to its goal; `nodes` is empty.
    pub unsolvable: bool,
}

/// One root per combination of unconstrained Pareto-optimal paths, with
/// the last agent's index varying fastest. Every root gets `lb[i]` equal
/// to its path cost; disjoint splitting also seeds `ub[i]` from the
/// lexicographically sorted frontier of agent `i`.
pub fn init_roots<C: CostScalar>(
    low: &mut LowLevel<'_, C>,
    strategy: SplitStrategy,
    deadline: Option<Instant>,
) -> Result<Roots<C>, Interrupted> {
    let instance = low.instance();
    let m = instance.agent_count();
    let empty = ConstraintSet::empty(m);
    let mut frontiers: Vec<Arc<Frontier<C>>> = Vec::with_capacity(m);
    for agent in 0..m {
        let f = low.frontier_for(agent, &empty, deadline)?;
        if f.is_empty() {
            return Ok(Roots {
                nodes: Vec::new(),
                unsolvable: true,
            });
        }
        frontiers.push(f);
    }
    let seeds: Vec<Vec<Vec<CostVec<C>>>> = frontiers
        .iter()
        .map(|f| {
            if strategy == SplitStrategy::Disjoint {
                root_upper_bounds(f)
            } else {
                vec![Vec::new(); f.len()]
            }
        })
        .collect();

    let mut nodes = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        if nodes.len() % 4096 == 4095 && deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Interrupted);
        }
        let paths: Vec<_> = (0..m).map(|i| frontiers[i].paths[idx[i]].clone()).collect();
        let mut node = CtNode {
            seq: nodes.len() as u64,
            parent: None,
            origin: None,
            constraints: empty.clone(),
            lb: paths.iter().map(|p| p.cost.clone()).collect(),
            ub: (0..m).map(|i| seeds[i][idx[i]].clone()).collect(),
            paths,
            cost: CostVec::zero(instance.objectives()),
        };
        node.recompute_cost();
        nodes.push(node);

        // odometer, last agent fastest
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(Roots {
                    nodes,
                    unsolvable: false,
                });
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < frontiers[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Open-list entry: smallest cost first, then earliest generated.
struct Open<C>(CtNode<C>);

impl<C: CostScalar> PartialEq for Open<C> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<C: CostScalar> Eq for Open<C> {}

impl<C: CostScalar> PartialOrd for Open<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: CostScalar> Ord for Open<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap
        (&other.0.cost, other.0.seq).cmp(&(&self.0.cost, self.0.seq))
    }
}

pub struct Solver<'a, C> {
    instance: &'a Instance<C>,
    options: SolveOptions,
}

impl<'a, C: CostScalar> Solver<'a, C> {
    pub fn new(instance: &'a Instance<C>, options: SolveOptions) -> Self {
        Solver { instance, options }
    }

    pub fn options(&self) -> &SolveOptions {
        &self.options
    }

    pub fn solve(&self) -> SolveOutcome<C> {
        self.solve_observed(|_| {})
    }

    /// Runs the search, reporting every event to `observer`.
    pub fn solve_observed(&self, mut observer: impl FnMut(SearchEvent<'_, C>)) -> SolveOutcome<C> {
        let start = Instant::now();
        let opts = &self.options;
        let deadline = opts.time_limit.and_then(|d| start.checked_add(d));
        let mut low = LowLevel::new(self.instance, opts.use_heuristic, opts.use_cache);
        let mut stats = SearchStats::default();
        let mut solutions: NdSet<C, Vec<Arc<crate::low_level::Path<C>>>> = NdSet::new();
        let mut unsolvable = false;

        let status = 'run: {
            let roots = match init_roots(&mut low, opts.strategy, deadline) {
                Ok(r) => r,
                Err(Interrupted) => break 'run SolveStatus::Timeout,
            };
            if roots.unsolvable {
                unsolvable = true;
                break 'run SolveStatus::Complete;
            }
            stats.roots = roots.nodes.len() as u64;
            stats.generations = stats.roots;
            let mut next_seq = stats.roots;
            let mut open = BinaryHeap::with_capacity(roots.nodes.len());
            for n in roots.nodes {
                observer(SearchEvent::Root(&n));
                open.push(Open(n));
            }

            loop {
                if deadline.is_some_and(|d| Instant::now() >= d) {
                    break 'run SolveStatus::Timeout;
                }
                if opts.max_expansions.is_some_and(|m| stats.expansions >= m) && !open.is_empty() {
                    break 'run SolveStatus::ExpansionLimit;
                }
                let Some(Open(node)) = open.pop() else {
                    break 'run SolveStatus::Complete;
                };
                observer(SearchEvent::Pop(&node));
                if dominated_by_solutions(&solutions, &node.cost) {
                    stats.pruned_on_pop += 1;
                    observer(SearchEvent::Pruned {
                        node: &node,
                        on_pop: true,
                    });
                    continue;
                }
                stats.expansions += 1;
                let Some(conflict) =
                    detect_first_conflict(&node.paths, self.instance.edge_conflicts)
                else {
                    observer(SearchEvent::Solution(&node));
                    solutions.insert(node.cost.clone(), node.paths.clone());
                    continue;
                };
                let out = match split_node(&mut low, opts.strategy, &node, &conflict, deadline) {
                    Ok(out) => out,
                    Err(Interrupted) => break 'run SolveStatus::Timeout,
                };
                let mut children = out.children;
                for c in &mut children {
                    c.seq = next_seq;
                    next_seq += 1;
                }
                stats.splits += 1;
                stats.children += children.len() as u64;
                stats.generations += children.len() as u64;
                stats.split_children.push(children.len() as u32);
                stats.disjoint_discarded += out.discarded as u64;
                observer(SearchEvent::Split {
                    node: &node,
                    conflict: &conflict,
                    children: &children,
                    discarded: out.discarded,
                });
                for child in children {
                    if dominated_by_solutions(&solutions, &child.cost) {
                        stats.pruned_on_insert += 1;
                        observer(SearchEvent::Pruned {
                            node: &child,
                            on_pop: false,
                        });
                    } else {
                        open.push(Open(child));
                    }
                }
            }
        };

        stats.low_level_searches = low.searches();
        stats.cache_hits = low.cache_hits();
        stats.wall_time = start.elapsed();
        let mut solutions: Vec<Solution<C>> = solutions
            .into_vec()
            .into_iter()
            .map(|(cost, paths)| Solution { paths, cost })
            .collect();
        solutions.sort_by(|a, b| a.cost.cmp(&b.cost));
        SolveOutcome {
            solutions,
            stats,
            status,
            unsolvable,
        }
    }
}
