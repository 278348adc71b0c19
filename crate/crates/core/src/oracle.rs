//! Brute-force reference solvers for small instances.
//!
//! [`joint_pareto`] searches the joint state space of all agents directly
//! and never touches the constraint tree. [`enumerate_paths`] lists every
//! single-agent path under a cost bound. Both are test fixtures: they are
//! exponential in the number of agents and the bound respectively.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::constraints::Constraint;
use crate::high_level::{CtNode, SplitStrategy};
use crate::instance::{Agent, Graph, Instance, VertexId};
use crate::low_level::{pareto_paths, HeuristicTable, Path};
use crate::pareto::{CostVec, NdSet};
use crate::scalar::CostScalar;

/// Joint solution with one path per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointSolution<C> {
    pub cost: CostVec<C>,
    pub paths: Vec<Path<C>>,
}

#[derive(Debug, Clone)]
pub struct OracleFrontier<C> {
    /// Sorted by cost; costs are pairwise nondominated.
    pub solutions: Vec<JointSolution<C>>,
    /// The bound the returned frontier was computed under.
    pub bound: CostVec<C>,
    /// Doubling the bound left the frontier unchanged.
    pub fixpoint: bool,
}

impl<C: CostScalar> OracleFrontier<C> {
    pub fn costs(&self) -> Vec<CostVec<C>> {
        self.solutions.iter().map(|s| s.cost.clone()).collect()
    }
}

struct Label<C> {
    state: usize,
    g: CostVec<C>,
    parent: Option<usize>,
    alive: bool,
}

#[derive(Clone, Copy)]
struct Choice {
    to: VertexId,
    terminate: bool,
}

/// Every cost-unique Pareto-optimal joint solution whose cost is weakly
/// dominated by `bound`.
///
/// Joint states are (positions, terminated agents). Each step, every
/// active agent either follows an edge or, at its goal, terminates for
/// free and stays there. Steps with two agents on one vertex, or with a
/// swap when the instance counts swaps as conflicts, are never generated.
pub fn joint_pareto_bounded<C: CostScalar>(
    instance: &Instance<C>,
    bound: &CostVec<C>,
) -> Vec<JointSolution<C>> {
    let graph = &instance.graph;
    let agents = &instance.agents;
    let m = agents.len();
    assert!(m <= 64, "oracle handles at most 64 agents");
    let all_done: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };

    let mut states: Vec<(Vec<VertexId>, u64)> = Vec::new();
    let mut index: HashMap<(Vec<VertexId>, u64), usize> = HashMap::new();
    let mut at_state: Vec<Vec<usize>> = Vec::new();
    let mut labels: Vec<Label<C>> = Vec::new();
    let mut open = BinaryHeap::new();
    let mut found: NdSet<C, usize> = NdSet::new();

    let start: Vec<VertexId> = agents.iter().map(|a| a.start).collect();
    states.push((start.clone(), 0));
    index.insert((start, 0), 0);
    at_state.push(vec![0]);
    labels.push(Label {
        state: 0,
        g: CostVec::zero(graph.objectives()),
        parent: None,
        alive: true,
    });
    open.push(Reverse((labels[0].g.clone(), 0usize)));

    while let Some(Reverse((g, id))) = open.pop() {
        if !labels[id].alive || found.covers(&g) {
            continue;
        }
        let (pos, mask) = states[labels[id].state].clone();
        if mask == all_done {
            found.insert(g, id);
            continue;
        }

        let options: Vec<Vec<Choice>> = (0..m)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    return vec![Choice {
                        to: pos[i],
                        terminate: false,
                    }];
                }
                let mut o: Vec<Choice> = graph
                    .edges(pos[i])
                    .iter()
                    .map(|e| Choice {
                        to: e.to,
                        terminate: false,
                    })
                    .collect();
                if pos[i] == agents[i].goal {
                    o.push(Choice {
                        to: pos[i],
                        terminate: true,
                    });
                }
                o
            })
            .collect();

        let mut pick = vec![0usize; m];
        'combos: loop {
            let next: Vec<Choice> = (0..m).map(|i| options[i][pick[i]]).collect();
            if joint_step_ok(&pos, &next, instance.edge_conflicts) {
                let mut ng = g.clone();
                let mut nmask = mask;
                for i in 0..m {
                    if mask >> i & 1 == 1 {
                        continue;
                    }
                    if next[i].terminate {
                        nmask |= 1 << i;
                    } else {
                        ng.add_assign(graph.edge_cost(pos[i], next[i].to).unwrap());
                    }
                }
                if ng.weakly_dominates(bound) && !found.covers(&ng) {
                    let key = (next.iter().map(|c| c.to).collect::<Vec<_>>(), nmask);
                    let sid = *index.entry(key.clone()).or_insert_with(|| {
                        states.push(key);
                        at_state.push(Vec::new());
                        states.len() - 1
                    });
                    let bucket = &mut at_state[sid];
                    if !bucket.iter().any(|&o| labels[o].g.weakly_dominates(&ng)) {
                        bucket.retain(|&o| {
                            let keep = !ng.dominates(&labels[o].g);
                            if !keep {
                                labels[o].alive = false;
                            }
                            keep
                        });
                        let nid = labels.len();
                        bucket.push(nid);
                        labels.push(Label {
                            state: sid,
                            g: ng.clone(),
                            parent: Some(id),
                            alive: true,
                        });
                        open.push(Reverse((ng, nid)));
                    }
                }
            }
            let mut i = m;
            loop {
                if i == 0 {
                    break 'combos;
                }
                i -= 1;
                pick[i] += 1;
                if pick[i] < options[i].len() {
                    break;
                }
                pick[i] = 0;
            }
        }
    }

    let mut out: Vec<JointSolution<C>> = found
        .into_vec()
        .into_iter()
        .map(|(cost, id)| {
            let mut chain = vec![id];
            while let Some(p) = labels[*chain.last().unwrap()].parent {
                chain.push(p);
            }
            chain.reverse();
            let paths = (0..m)
                .map(|i| {
                    let mut vertices = Vec::new();
                    for w in chain.windows(2) {
                        let (pos, mask) = &states[labels[w[0]].state];
                        if mask >> i & 1 == 1 {
                            break;
                        }
                        vertices.push(pos[i]);
                    }
                    Path::from_vertices(graph, vertices).expect("oracle paths follow edges")
                })
                .collect();
            JointSolution { cost, paths }
        })
        .collect();
    out.sort_by(|a, b| a.cost.cmp(&b.cost));
    out
}

fn joint_step_ok(pos: &[VertexId], next: &[Choice], edge_conflicts: bool) -> bool {
    for i in 0..next.len() {
        for j in i + 1..next.len() {
            if next[i].to == next[j].to {
                return false;
            }
            if edge_conflicts
                && pos[i] != next[i].to
                && next[i].to == pos[j]
                && next[j].to == pos[i]
            {
                return false;
            }
        }
    }
    true
}

/// Starting bound: the sum over agents of the componentwise maximum of
/// each agent's own frontier. `None` if some agent cannot reach its goal.
pub fn initial_bound<C: CostScalar>(instance: &Instance<C>) -> Option<CostVec<C>> {
    let graph = &instance.graph;
    let mut bound = CostVec::zero(graph.objectives());
    for a in &instance.agents {
        let h = HeuristicTable::compute(graph, a.goal);
        let f = pareto_paths(graph, a, &[], &h, None).expect("no deadline");
        let mut hi = CostVec::zero(graph.objectives());
        for p in &f.paths {
            hi = hi.comax(&p.cost);
        }
        if f.is_empty() {
            return None;
        }
        bound.add_assign(&hi);
    }
    Some(bound)
}

/// Exact frontier with automatic bound: start from [`initial_bound`] and
/// double until doubling changes nothing, at most `max_doublings` times.
pub fn joint_pareto<C: CostScalar>(
    instance: &Instance<C>,
    max_doublings: usize,
) -> OracleFrontier<C> {
    let Some(mut bound) = initial_bound(instance) else {
        return OracleFrontier {
            solutions: Vec::new(),
            bound: CostVec::zero(instance.objectives()),
            fixpoint: true,
        };
    };
    let mut current = joint_pareto_bounded(instance, &bound);
    for _ in 0..max_doublings {
        let bigger = bound.map(|x| x + x);
        let next = joint_pareto_bounded(instance, &bigger);
        let same = next
            .iter()
            .map(|s| &s.cost)
            .eq(current.iter().map(|s| &s.cost));
        bound = bigger;
        current = next;
        if same {
            return OracleFrontier {
                solutions: current,
                bound,
                fixpoint: true,
            };
        }
    }
    OracleFrontier {
        solutions: current,
        bound,
        fixpoint: false,
    }
}

/// Every path of `agent` that obeys `constraints` and whose cost is weakly
/// dominated by `bound`, in depth-first order. `max_len` caps the number of
/// vertices and is only needed when some action costs nothing at all.
pub fn enumerate_paths<C: CostScalar>(
    graph: &Graph<C>,
    agent_id: usize,
    agent: &Agent,
    constraints: &[Constraint],
    bound: &CostVec<C>,
    max_len: Option<usize>,
) -> Vec<Path<C>> {
    let mine: Vec<Constraint> = constraints
        .iter()
        .copied()
        .filter(|c| c.agent() == agent_id)
        .collect();
    let mut out = Vec::new();
    let mut stack = vec![agent.start];
    if mine
        .iter()
        .any(|c| matches!(*c, Constraint::Vertex { v, t: 0, .. } if v == agent.start))
    {
        return out;
    }
    let zero = CostVec::zero(graph.objectives());
    dfs(
        graph, agent_id, agent.goal, &mine, bound, max_len, &mut stack, zero, &mut out,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs<C: CostScalar>(
    graph: &Graph<C>,
    agent_id: usize,
    goal: VertexId,
    cons: &[Constraint],
    bound: &CostVec<C>,
    max_len: Option<usize>,
    stack: &mut Vec<VertexId>,
    g: CostVec<C>,
    out: &mut Vec<Path<C>>,
) {
    let u = *stack.last().unwrap();
    let t = stack.len() - 1;
    if u == goal {
        let p = Path {
            vertices: stack.clone(),
            cost: g.clone(),
        };
        if p.satisfies(agent_id, cons) {
            out.push(p);
        }
    }
    if max_len.is_some_and(|l| stack.len() >= l) {
        return;
    }
    for e in graph.edges(u) {
        if cons.iter().any(|c| c.forbids(agent_id, u, e.to, t)) {
            continue;
        }
        let ng = &g + &e.cost;
        if !ng.weakly_dominates(bound) {
            continue;
        }
        stack.push(e.to);
        dfs(graph, agent_id, goal, cons, bound, max_len, stack, ng, out);
        stack.pop();
    }
}

/// Per agent, every path within `bounds[i]` that is compatible with `node`
/// under the rule `strategy` uses: constraints plus lower bound, and for
/// disjoint splitting also the upper bounds.
pub fn enumerate_compatible<C: CostScalar>(
    instance: &Instance<C>,
    node: &CtNode<C>,
    strategy: SplitStrategy,
    bounds: &[CostVec<C>],
) -> Vec<Vec<Path<C>>> {
    instance
        .agents
        .iter()
        .enumerate()
        .map(|(i, a)| {
            enumerate_paths(
                &instance.graph,
                i,
                a,
                node.constraints.for_agent(i),
                &bounds[i],
                None,
            )
            .into_iter()
            .filter(|p| node.admits_cost(i, &p.cost, strategy))
            .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{load_instance_json, GraphBuilder};

    const FIG1: &str = include_str!("../data/fig1.json");

    fn cv(a: u64, b: u64) -> CostVec<u64> {
        CostVec::from_units(&[a, b])
    }

    #[test]
    fn fig1_frontier() {
        let inst = load_instance_json(FIG1).unwrap();
        let f = joint_pareto(&inst, 3);
        assert!(f.fixpoint);
        assert_eq!(f.costs(), vec![cv(13, 14), cv(16, 12)]);
        for s in &f.solutions {
            let total = s
                .paths
                .iter()
                .fold(CostVec::zero(2), |acc, p| &acc + &p.cost);
            assert_eq!(total, s.cost);
        }
    }

    #[test]
    fn fig1_with_swaps() {
        let inst = load_instance_json(FIG1).unwrap().with_edge_conflicts(true);
        let f = joint_pareto(&inst, 3);
        assert!(f.fixpoint);
        assert_eq!(f.costs(), vec![cv(13, 14)]);
    }

    #[test]
    fn single_agent_matches_low_level() {
        let mut inst = load_instance_json(FIG1).unwrap();
        inst.agents.truncate(1);
        assert_eq!(joint_pareto(&inst, 2).costs(), vec![cv(3, 6), cv(6, 4)]);
    }

    #[test]
    fn disjoint_components_add_up() {
        // two separate 2-cycles 0<->1 and 2<->3
        let mut b = GraphBuilder::new(4, 2, 1);
        b.default_wait_cost(&cv(1, 1));
        b.add_edge(0, 1, cv(1, 2))
            .add_edge(1, 0, cv(1, 2))
            .add_edge(2, 3, cv(3, 1))
            .add_edge(3, 2, cv(3, 1));
        let inst = Instance::new(b.build().unwrap(), &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(joint_pareto(&inst, 2).costs(), vec![cv(4, 3)]);
    }

    #[test]
    fn enumeration_respects_bound_and_constraints() {
        let inst = load_instance_json(FIG1).unwrap();
        let a = &inst.agents[0];
        let all = enumerate_paths(&inst.graph, 0, a, &[], &cv(8, 6), None);
        let costs: Vec<_> = all.iter().map(|p| p.cost.clone()).collect();
        assert!(
            costs.contains(&cv(3, 6)) && costs.contains(&cv(6, 4)) && costs.contains(&cv(8, 4))
        );
        assert!(costs.iter().all(|c| c.weakly_dominates(&cv(8, 6))));
        let c = [Constraint::Vertex {
            agent: 0,
            v: 3,
            t: 2,
        }];
        let constrained = enumerate_paths(&inst.graph, 0, a, &c, &cv(8, 6), None);
        assert!(constrained.iter().all(|p| p.at(2) != 3));
        assert!(constrained.len() < all.len());
    }
}
