//! Constrained multi-objective single-agent planning.
//!
//! [`pareto_paths`] returns a cost-unique Pareto-optimal frontier of paths
//! for one agent under a constraint set. Costs are found by a label-setting
//! search over `(vertex, min(t, t_cap))` states, where `t_cap` is one past
//! the latest constraint timestep: from `t_cap` on no constraint can apply,
//! so later timesteps collapse into one state. Labels are popped in
//! lexicographic order of `f = g + h` and pruned when their `g` is weakly
//! dominated at the same state or their `f` is weakly dominated by a
//! frontier cost already found. Together with Dickson's lemma on the
//! integer-valued label sets this bounds the search.
//!
//! One witness path is then rebuilt per frontier cost by a depth-first walk
//! that, at the first divergence, prefers moving over waiting and then the
//! lower target vertex id.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::constraints::{Constraint, ConstraintSet, FrontierCache};
use crate::instance::{Agent, Graph, Instance, VertexId};
use crate::pareto::{CostVec, NdSet};
use crate::scalar::CostScalar;

/// A path: the visited vertex at every timestep from 0 until the agent
/// terminates at its goal (the last entry).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path<C> {
    pub vertices: Vec<VertexId>,
    pub cost: CostVec<C>,
}

impl<C: CostScalar> Path<C> {
    /// Builds a path and sums its action costs. Returns `None` if some step
    /// is not an edge of `graph`.
    pub fn from_vertices(graph: &Graph<C>, vertices: Vec<VertexId>) -> Option<Self> {
        let mut cost = CostVec::zero(graph.objectives());
        for w in vertices.windows(2) {
            cost.add_assign(graph.edge_cost(w[0], w[1])?);
        }
        if vertices.is_empty() {
            return None;
        }
        Some(Path { vertices, cost })
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn goal(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    /// Timestep of the terminate action.
    pub fn arrival_time(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Vertex occupied at `t`; the goal forever after termination.
    #[inline]
    pub fn at(&self, t: usize) -> VertexId {
        self.vertices[t.min(self.vertices.len() - 1)]
    }

    /// Move actions `(u, v, t)`: from `u` at `t` to `v` at `t + 1`.
    pub fn actions(&self) -> impl Iterator<Item = (VertexId, VertexId, usize)> + '_ {
        self.vertices
            .windows(2)
            .enumerate()
            .map(|(t, w)| (w[0], w[1], t))
    }

    /// Whether the path obeys `constraints` for `agent`, including the rule
    /// that a terminated agent keeps occupying its goal.
    pub fn satisfies(&self, agent: usize, constraints: &[Constraint]) -> bool {
        let end = self.arrival_time();
        constraints
            .iter()
            .filter(|c| c.agent() == agent)
            .all(|c| match *c {
                Constraint::Vertex { v, t, .. } => self.at(t) != v,
                Constraint::Edge { u, v, t, .. } => {
                    t >= end || !(self.vertices[t] == u && self.vertices[t + 1] == v)
                }
            })
    }
}

/// Per-vertex lower bounds on the remaining cost to one goal, one
/// independent shortest-path distance per objective. `None` marks vertices
/// that cannot reach the goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicTable<C> {
    h: Vec<Option<CostVec<C>>>,
}

impl<C: CostScalar> HeuristicTable<C> {
    /// Exact per-objective distances to `goal` (Dijkstra on the reversed
    /// graph, once per objective).
    pub fn compute(graph: &Graph<C>, goal: VertexId) -> Self {
        let n = graph.vertex_count();
        let rev = graph.reversed();
        let mut per_obj: Vec<Vec<Option<C>>> = Vec::with_capacity(graph.objectives());
        for k in 0..graph.objectives() {
            let mut dist: Vec<Option<C>> = vec![None; n];
            let mut heap = BinaryHeap::new();
            dist[goal] = Some(C::zero());
            heap.push(Reverse((C::zero(), goal)));
            while let Some(Reverse((d, v))) = heap.pop() {
                if dist[v].is_some_and(|best| d > best) {
                    continue;
                }
                for &(u, cost) in &rev[v] {
                    let nd = d + cost.get(k);
                    if dist[u].is_none_or(|old| nd < old) {
                        dist[u] = Some(nd);
                        heap.push(Reverse((nd, u)));
                    }
                }
            }
            per_obj.push(dist);
        }
        let h = (0..n)
            .map(|v| {
                per_obj
                    .iter()
                    .map(|d| d[v])
                    .collect::<Option<Vec<C>>>()
                    .map(CostVec::new)
            })
            .collect();
        HeuristicTable { h }
    }

    /// The all-zero heuristic (every vertex treated as reachable).
    pub fn zero(graph: &Graph<C>) -> Self {
        HeuristicTable {
            h: vec![Some(CostVec::zero(graph.objectives())); graph.vertex_count()],
        }
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> Option<&CostVec<C>> {
        self.h[v].as_ref()
    }
}

/// A cost-unique Pareto-optimal set of paths, sorted lexicographically by
/// cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontier<C> {
    pub paths: Vec<Arc<Path<C>>>,
}

impl<C> Default for Frontier<C> {
    fn default() -> Self {
        Frontier { paths: Vec::new() }
    }
}

impl<C: CostScalar> Frontier<C> {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn costs(&self) -> Vec<CostVec<C>> {
        self.paths.iter().map(|p| p.cost.clone()).collect()
    }
}

/// The deadline passed before the search finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("search interrupted by deadline")]
pub struct Interrupted;

/// Constraint lookups for one agent's search.
struct ConstraintIndex {
    vertex: HashSet<(VertexId, usize)>,
    edge: HashSet<(VertexId, VertexId, usize)>,
    /// Latest timestep of a vertex constraint on the goal.
    goal_last: Option<usize>,
    t_cap: usize,
}

impl ConstraintIndex {
    fn new(agent: &Agent, constraints: &[Constraint]) -> Self {
        let mut idx = ConstraintIndex {
            vertex: HashSet::new(),
            edge: HashSet::new(),
            goal_last: None,
            t_cap: 0,
        };
        for c in constraints.iter().filter(|c| c.agent() == agent.id) {
            idx.t_cap = idx.t_cap.max(c.time() + 1);
            match *c {
                Constraint::Vertex { v, t, .. } => {
                    idx.vertex.insert((v, t));
                    if v == agent.goal {
                        idx.goal_last = Some(idx.goal_last.map_or(t, |g| g.max(t)));
                    }
                }
                Constraint::Edge { u, v, t, .. } => {
                    idx.edge.insert((u, v, t));
                }
            }
        }
        idx
    }

    /// Action `u -> v` taken at (collapsed) time `t`.
    #[inline]
    fn forbids(&self, u: VertexId, v: VertexId, t: usize) -> bool {
        t < self.t_cap && (self.vertex.contains(&(v, t + 1)) || self.edge.contains(&(u, v, t)))
    }

    #[inline]
    fn may_terminate(&self, t: usize) -> bool {
        self.goal_last.is_none_or(|last| last < t)
    }

    #[inline]
    fn collapse(&self, t: usize) -> usize {
        t.min(self.t_cap)
    }
}

struct Label<C> {
    vertex: VertexId,
    t: usize,
    g: CostVec<C>,
    alive: bool,
}

/// Exact cost-unique Pareto frontier of constraint-satisfying paths for
/// `agent`. An empty frontier means no feasible path exists.
pub fn pareto_paths<C: CostScalar>(
    graph: &Graph<C>,
    agent: &Agent,
    constraints: &[Constraint],
    h: &HeuristicTable<C>,
    deadline: Option<Instant>,
) -> Result<Frontier<C>, Interrupted> {
    let idx = ConstraintIndex::new(agent, constraints);
    if idx.vertex.contains(&(agent.start, 0)) {
        return Ok(Frontier::default());
    }
    let Some(h0) = h.get(agent.start) else {
        return Ok(Frontier::default());
    };

    let slots = idx.t_cap + 1;
    let mut at_state: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut labels: Vec<Label<C>> = Vec::new();
    let mut open = BinaryHeap::new();
    let mut found: NdSet<C> = NdSet::new();

    let g0 = CostVec::zero(graph.objectives());
    labels.push(Label {
        vertex: agent.start,
        t: 0,
        g: g0,
        alive: true,
    });
    at_state.insert(agent.start * slots, vec![0]);
    open.push(Reverse((h0.clone(), 0usize)));

    let mut pops = 0u64;
    while let Some(Reverse((f, id))) = open.pop() {
        pops += 1;
        if pops.is_multiple_of(256) && deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Interrupted);
        }
        if !labels[id].alive || found.covers(&f) {
            continue;
        }
        let (u, t) = (labels[id].vertex, labels[id].t);
        if u == agent.goal && idx.may_terminate(t) {
            found.insert(labels[id].g.clone(), ());
            continue;
        }
        for e in graph.edges(u) {
            if idx.forbids(u, e.to, t) {
                continue;
            }
            let Some(hv) = h.get(e.to) else { continue };
            let g = &labels[id].g + &e.cost;
            let f = &g + hv;
            if found.covers(&f) {
                continue;
            }
            let nt = idx.collapse(t + 1);
            let bucket = at_state.entry(e.to * slots + nt).or_default();
            if bucket.iter().any(|&o| labels[o].g.weakly_dominates(&g)) {
                continue;
            }
            bucket.retain(|&o| {
                let keep = !g.dominates(&labels[o].g);
                if !keep {
                    labels[o].alive = false;
                }
                keep
            });
            let nid = labels.len();
            bucket.push(nid);
            labels.push(Label {
                vertex: e.to,
                t: nt,
                g,
                alive: true,
            });
            open.push(Reverse((f, nid)));
        }
    }

    let mut costs: Vec<CostVec<C>> = found.into_vec().into_iter().map(|(c, _)| c).collect();
    costs.sort();
    let paths = costs
        .into_iter()
        .map(|target| {
            let vertices = witness(graph, agent, &idx, h, &target)
                .expect("a frontier cost always has a witness path");
            Arc::new(Path {
                vertices,
                cost: target,
            })
        })
        .collect();
    Ok(Frontier { paths })
}

/// Preferred path with cost exactly `target`.
fn witness<C: CostScalar>(
    graph: &Graph<C>,
    agent: &Agent,
    idx: &ConstraintIndex,
    h: &HeuristicTable<C>,
    target: &CostVec<C>,
) -> Option<Vec<VertexId>> {
    struct Walk<'a, C> {
        graph: &'a Graph<C>,
        goal: VertexId,
        idx: &'a ConstraintIndex,
        h: &'a HeuristicTable<C>,
        target: &'a CostVec<C>,
        dead: HashSet<(VertexId, usize, CostVec<C>)>,
        path: Vec<VertexId>,
    }

    impl<C: CostScalar> Walk<'_, C> {
        fn go(&mut self, u: VertexId, t: usize, g: CostVec<C>) -> bool {
            if u == self.goal && self.idx.may_terminate(t) && &g == self.target {
                return true;
            }
            let key = (u, t, g);
            if self.dead.contains(&key) {
                return false;
            }
            let g = key.2.clone();
            let edges = self.graph.edges(u);
            let order = edges
                .iter()
                .filter(|e| e.to != u)
                .chain(edges.iter().filter(|e| e.to == u));
            for e in order {
                if self.idx.forbids(u, e.to, t) {
                    continue;
                }
                let Some(hv) = self.h.get(e.to) else { continue };
                let ng = &g + &e.cost;
                if !(&ng + hv).weakly_dominates(self.target) {
                    continue;
                }
                self.path.push(e.to);
                if self.go(e.to, self.idx.collapse(t + 1), ng) {
                    return true;
                }
                self.path.pop();
            }
            self.dead.insert(key);
            false
        }
    }

    let mut walk = Walk {
        graph,
        goal: agent.goal,
        idx,
        h,
        target,
        dead: HashSet::new(),
        path: vec![agent.start],
    };
    walk.go(agent.start, 0, CostVec::zero(graph.objectives()))
        .then_some(walk.path)
}

/// Low-level planner for one instance: heuristics per agent and the
/// frontier cache.
pub struct LowLevel<'a, C> {
    instance: &'a Instance<C>,
    heuristics: Vec<HeuristicTable<C>>,
    cache: FrontierCache<Frontier<C>>,
    searches: u64,
}

impl<'a, C: CostScalar> LowLevel<'a, C> {
    pub fn new(instance: &'a Instance<C>, use_heuristic: bool, use_cache: bool) -> Self {
        let heuristics = instance
            .agents
            .iter()
            .map(|a| {
                if use_heuristic {
                    HeuristicTable::compute(&instance.graph, a.goal)
                } else {
                    HeuristicTable::zero(&instance.graph)
                }
            })
            .collect();
        LowLevel {
            instance,
            heuristics,
            cache: FrontierCache::new(use_cache),
            searches: 0,
        }
    }

    pub fn instance(&self) -> &'a Instance<C> {
        self.instance
    }

    pub fn heuristic(&self, agent: usize) -> &HeuristicTable<C> {
        &self.heuristics[agent]
    }

    /// Frontier of `agent` under `set`, served from the cache when possible.
    pub fn frontier_for(
        &mut self,
        agent: usize,
        set: &ConstraintSet,
        deadline: Option<Instant>,
    ) -> Result<Arc<Frontier<C>>, Interrupted> {
        let inst = self.instance;
        let h = &self.heuristics[agent];
        let searches = &mut self.searches;
        self.cache
            .lookup_or_compute(agent, set.for_agent(agent), || {
                *searches += 1;
                pareto_paths(
                    &inst.graph,
                    &inst.agents[agent],
                    set.for_agent(agent),
                    h,
                    deadline,
                )
            })
    }

    /// Number of searches actually run (cache misses).
    pub fn searches(&self) -> u64 {
        self.searches
    }

    pub fn cache_hits(&self) -> u64 {
        self.cache.hits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::load_instance_json;

    const FIG1: &str = include_str!("../data/fig1.json");
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    const E: usize = 4;
    const F: usize = 5;

    fn fig1() -> Instance<u64> {
        load_instance_json(FIG1).unwrap()
    }

    fn half(a: f64, b: f64) -> CostVec<u64> {
        CostVec::from_units(&[(a * 2.0) as u64, (b * 2.0) as u64])
    }

    fn plan(inst: &Instance<u64>, agent: usize, cs: &[Constraint]) -> Frontier<u64> {
        let a = &inst.agents[agent];
        let h = HeuristicTable::compute(&inst.graph, a.goal);
        pareto_paths(&inst.graph, a, cs, &h, None).unwrap()
    }

    #[test]
    fn heuristic_on_fig1() {
        let inst = fig1();
        let h = HeuristicTable::compute(&inst.graph, D);
        // obj 1 via A->C->D = 1 + 0.5, obj 2 via A->B->D = 1 + 1
        assert_eq!(h.get(A), Some(&half(1.5, 2.0)));
        assert_eq!(h.get(D), Some(&half(0.0, 0.0)));
    }

    #[test]
    fn isolated_vertex_is_unreachable() {
        let text = r#"{"objectives":2,"vertex_count":3,"wait_cost":[1,1],
            "edges":[{"from":0,"to":1,"cost":[1,1]}],"agents":[{"start":0,"goal":1}]}"#;
        let inst = load_instance_json(text).unwrap();
        let h = HeuristicTable::compute(&inst.graph, 1);
        assert!(h.get(2).is_none());
        assert!(h.get(0).is_some());
    }

    #[test]
    fn unconstrained_fig1_agent1() {
        let f = plan(&fig1(), 0, &[]);
        assert_eq!(f.costs(), vec![half(1.5, 3.0), half(3.0, 2.0)]);
        assert_eq!(f.paths[0].vertices, vec![A, C, D]);
        assert_eq!(f.paths[1].vertices, vec![A, B, D]);
    }

    #[test]
    fn constrained_fig1_agent1() {
        let f = plan(
            &fig1(),
            0,
            &[Constraint::Vertex {
                agent: 0,
                v: D,
                t: 2,
            }],
        );
        assert_eq!(f.costs(), vec![half(2.5, 3.0), half(4.0, 2.0)]);
        assert_eq!(f.paths[0].vertices, vec![A, C, C, D]);
        assert_eq!(f.paths[1].vertices, vec![A, B, B, D]);
    }

    #[test]
    fn constrained_fig1_agent2() {
        let inst = fig1();
        let f = plan(&inst, 1, &[]);
        assert_eq!(f.costs(), vec![half(4.0, 4.0)]);
        assert_eq!(f.paths[0].vertices, vec![E, F, D, B, A]);
        let f = plan(
            &inst,
            1,
            &[Constraint::Vertex {
                agent: 1,
                v: D,
                t: 2,
            }],
        );
        assert_eq!(f.paths.len(), 1);
        assert_eq!(f.paths[0].vertices, vec![E, F, F, D, B, A]);
        assert_eq!(f.paths[0].cost, half(5.0, 4.0));
    }

    #[test]
    fn goal_constraint_delays_termination() {
        let inst = fig1();
        // Agent 1 may not be on D at t=5, so it cannot terminate there before t=6.
        let f = plan(
            &inst,
            0,
            &[Constraint::Vertex {
                agent: 0,
                v: D,
                t: 5,
            }],
        );
        for p in &f.paths {
            assert!(p.arrival_time() >= 6);
            assert!(p.satisfies(
                0,
                &[Constraint::Vertex {
                    agent: 0,
                    v: D,
                    t: 5
                }]
            ));
        }
        assert!(!f.is_empty());
    }

    #[test]
    fn infeasible_gives_empty_frontier() {
        let inst = fig1();
        let cs = [
            Constraint::Edge {
                agent: 0,
                u: A,
                v: B,
                t: 0,
            },
            Constraint::Edge {
                agent: 0,
                u: A,
                v: C,
                t: 0,
            },
            Constraint::Vertex {
                agent: 0,
                v: A,
                t: 1,
            },
        ];
        assert!(plan(&inst, 0, &cs).is_empty());
    }

    #[test]
    fn path_queries() {
        let inst = fig1();
        let p = Path::from_vertices(&inst.graph, vec![A, C, D]).unwrap();
        assert_eq!(p.at(0), A);
        assert_eq!(p.at(2), D);
        assert_eq!(p.at(1_000_000), D);
        assert_eq!(p.cost, half(1.5, 3.0));
        assert!(Path::from_vertices(&inst.graph, vec![A, D]).is_none());
    }

    #[test]
    fn cache_serves_repeats_and_empty_frontiers() {
        let inst = fig1();
        let mut ll = LowLevel::new(&inst, true, true);
        let s = ConstraintSet::empty(2).add(Constraint::Vertex {
            agent: 1,
            v: D,
            t: 2,
        });
        let a = ll.frontier_for(1, &s, None).unwrap();
        let b = ll.frontier_for(1, &s, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(ll.searches(), 1);
        assert_eq!(ll.cache_hits(), 1);

        let blocked = ConstraintSet::empty(2)
            .add(Constraint::Edge {
                agent: 0,
                u: A,
                v: B,
                t: 0,
            })
            .add(Constraint::Edge {
                agent: 0,
                u: A,
                v: C,
                t: 0,
            })
            .add(Constraint::Vertex {
                agent: 0,
                v: A,
                t: 1,
            });
        assert!(ll.frontier_for(0, &blocked, None).unwrap().is_empty());
        assert!(ll.frontier_for(0, &blocked, None).unwrap().is_empty());
        assert_eq!(ll.searches(), 2);

        let direct = plan(&inst, 1, s.for_agent(1));
        let mut cold = LowLevel::new(&inst, true, false);
        assert_eq!(*cold.frontier_for(1, &s, None).unwrap(), direct);
    }

    #[test]
    fn zero_heuristic_agrees() {
        let inst = fig1();
        let cs = [Constraint::Vertex {
            agent: 0,
            v: D,
            t: 2,
        }];
        let a = &inst.agents[0];
        let z = HeuristicTable::zero(&inst.graph);
        let f = pareto_paths(&inst.graph, a, &cs, &z, None).unwrap();
        assert_eq!(f, plan(&inst, 0, &cs));
    }
}
