//! Vertex and edge constraints, per-agent constraint sets with a canonical
//! order, and the low-level frontier cache keyed by (agent, constraints).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::instance::{Graph, VertexId};
use crate::scalar::CostScalar;

/// A prohibition on one agent.
///
/// `Vertex` forbids occupying `v` at timestep `t`. `Edge` forbids moving
/// along `u -> v` between `t` and `t + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Constraint {
    Vertex {
        agent: usize,
        v: VertexId,
        t: usize,
    },
    Edge {
        agent: usize,
        u: VertexId,
        v: VertexId,
        t: usize,
    },
}

impl Constraint {
    pub fn agent(&self) -> usize {
        match *self {
            Constraint::Vertex { agent, .. } | Constraint::Edge { agent, .. } => agent,
        }
    }

    pub fn time(&self) -> usize {
        match *self {
            Constraint::Vertex { t, .. } | Constraint::Edge { t, .. } => t,
        }
    }

    /// Canonical sort key `(kind, t, u, v)`; vertex constraints use `u = v`.
    fn key(&self) -> (u8, usize, VertexId, VertexId, usize) {
        match *self {
            Constraint::Vertex { agent, v, t } => (0, t, v, v, agent),
            Constraint::Edge { agent, u, v, t } => (1, t, u, v, agent),
        }
    }

    pub fn is_valid_for<C: CostScalar>(&self, graph: &Graph<C>) -> bool {
        match *self {
            Constraint::Vertex { v, .. } => v < graph.vertex_count(),
            Constraint::Edge { u, v, .. } => graph.has_edge(u, v),
        }
    }

    /// Whether this constraint forbids `agent` moving `u -> v` at `t`
    /// (arriving at `v` at `t + 1`).
    #[inline]
    pub fn forbids(&self, agent: usize, u: VertexId, v: VertexId, t: usize) -> bool {
        match *self {
            Constraint::Vertex {
                agent: a,
                v: cv,
                t: ct,
            } => a == agent && cv == v && ct == t + 1,
            Constraint::Edge {
                agent: a,
                u: cu,
                v: cv,
                t: ct,
            } => a == agent && cu == u && cv == v && ct == t,
        }
    }
}

impl Ord for Constraint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Constraint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Constraint::Vertex { agent, v, t } => write!(f, "<a{agent},{v},{t}>"),
            Constraint::Edge { agent, u, v, t } => write!(f, "<a{agent},{u}->{v},{t}>"),
        }
    }
}

/// Sorted, duplicate-free constraints for every agent.
///
/// Per-agent lists are shared between sets, so adding a constraint only
/// copies the list of the agent it applies to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstraintSet {
    per_agent: Vec<Arc<Vec<Constraint>>>,
}

impl ConstraintSet {
    pub fn empty(agents: usize) -> Self {
        let shared = Arc::new(Vec::new());
        ConstraintSet {
            per_agent: vec![shared; agents],
        }
    }

    /// Returns a new set that also contains `c`; unchanged if `c` is present.
    pub fn add(&self, c: Constraint) -> Self {
        let list = &self.per_agent[c.agent()];
        match list.binary_search(&c) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut next = Vec::with_capacity(list.len() + 1);
                next.extend_from_slice(&list[..pos]);
                next.push(c);
                next.extend_from_slice(&list[pos..]);
                let mut out = self.clone();
                out.per_agent[c.agent()] = Arc::new(next);
                out
            }
        }
    }

    pub fn for_agent(&self, agent: usize) -> &Arc<Vec<Constraint>> {
        &self.per_agent[agent]
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        self.per_agent[c.agent()].binary_search(c).is_ok()
    }

    pub fn len(&self) -> usize {
        self.per_agent.iter().map(|l| l.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.per_agent.iter().flat_map(|l| l.iter())
    }

    /// True iff `agent` may not take the action `u -> v` at `t`.
    pub fn forbids(&self, agent: usize, u: VertexId, v: VertexId, t: usize) -> bool {
        self.per_agent[agent]
            .iter()
            .any(|c| c.forbids(agent, u, v, t))
    }

    /// Canonical text encoding; independent of insertion order.
    pub fn encode(&self) -> String {
        let mut out = String::new();
        for c in self.iter() {
            if !out.is_empty() {
                out.push(';');
            }
            write!(out, "{c}").unwrap();
        }
        out
    }
}

/// Lookup table from `(agent, constraints on that agent)` to a computed
/// frontier. Confined to one solver run.
#[derive(Debug)]
pub struct FrontierCache<V> {
    map: HashMap<(usize, Arc<Vec<Constraint>>), Arc<V>>,
    enabled: bool,
    hits: u64,
    misses: u64,
}

impl<V> FrontierCache<V> {
    pub fn new(enabled: bool) -> Self {
        FrontierCache {
            map: HashMap::new(),
            enabled,
            hits: 0,
            misses: 0,
        }
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Returns the cached value for the key, or runs `compute` and stores
    /// its result. Errors from `compute` are returned and not cached.
    pub fn lookup_or_compute<E>(
        &mut self,
        agent: usize,
        constraints: &Arc<Vec<Constraint>>,
        compute: impl FnOnce() -> Result<V, E>,
    ) -> Result<Arc<V>, E> {
        if !self.enabled {
            self.misses += 1;
            return compute().map(Arc::new);
        }
        let key = (agent, Arc::clone(constraints));
        if let Some(v) = self.map.get(&key) {
            self.hits += 1;
            return Ok(Arc::clone(v));
        }
        self.misses += 1;
        let v = Arc::new(compute()?);
        self.map.insert(key, Arc::clone(&v));
        Ok(v)
    }
}
