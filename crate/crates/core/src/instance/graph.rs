use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::CostVec;
use crate::scalar::CostScalar;

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge<C> {
    pub to: VertexId,
    pub cost: CostVec<C>,
}

/// Directed graph with vector edge costs and a self-loop at every vertex.
///
/// Costs are stored in fixed-point units; `scale` units make one unit of
/// the modelled real-valued cost.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph<C> {
    objectives: usize,
    scale: u64,
    adjacency: Vec<Vec<Edge<C>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl<C: CostScalar> Graph<C> {
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn objectives(&self) -> usize {
        self.objectives
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Outgoing edges of `u`, sorted by target; includes the self-loop.
    pub fn edges(&self, u: VertexId) -> &[Edge<C>] {
        &self.adjacency[u]
    }

    pub fn edge_cost(&self, u: VertexId, v: VertexId) -> Option<&CostVec<C>> {
        let edges = &self.adjacency[u];
        edges
            .binary_search_by_key(&v, |e| e.to)
            .ok()
            .map(|i| &edges[i].cost)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.vertex_count() && v < self.vertex_count() && self.edge_cost(u, v).is_some()
    }

    pub fn wait_cost(&self, v: VertexId) -> &CostVec<C> {
        self.edge_cost(v, v)
            .expect("graph invariant: every vertex has a self-loop")
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Human-readable name of `v`: its label if present, else its index.
    pub fn vertex_name(&self, v: VertexId) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    /// Incoming adjacency: for every vertex, the `(source, cost)` pairs.
    pub fn reversed(&self) -> Vec<Vec<(VertexId, &CostVec<C>)>> {
        let mut rev = vec![Vec::new(); self.vertex_count()];
        for (u, edges) in self.adjacency.iter().enumerate() {
            for e in edges {
                rev[e.to].push((u, &e.cost));
            }
        }
        rev
    }

    /// Same topology with every cost converted by `f`.
    pub fn map_costs<D: CostScalar>(&self, scale: u64, f: impl Fn(C) -> D) -> Graph<D> {
        Graph {
            objectives: self.objectives,
            scale,
            adjacency: self
                .adjacency
                .iter()
                .map(|es| {
                    es.iter()
                        .map(|e| Edge {
                            to: e.to,
                            cost: e.cost.map(&f),
                        })
                        .collect()
                })
                .collect(),
            labels: self.labels.clone(),
        }
    }

    /// Inserts an all-ones component (one real unit, i.e. `scale` fixed-point
    /// units) at `position` on every edge, self-loops included. This encodes
    /// flowtime as an extra objective.
    pub fn augment_flowtime(&self, position: usize) -> Result<Graph<C>> {
        if position > self.objectives {
            return Err(Error::Config(format!(
                "flowtime position {position} out of range 0..={}",
                self.objectives
            )));
        }
        let one = C::from_units(self.scale);
        Ok(Graph {
            objectives: self.objectives + 1,
            scale: self.scale,
            adjacency: self
                .adjacency
                .iter()
                .map(|es| {
                    es.iter()
                        .map(|e| Edge {
                            to: e.to,
                            cost: e.cost.insert_component(position, one),
                        })
                        .collect()
                })
                .collect(),
            labels: self.labels.clone(),
        })
    }
}

/// Incremental graph construction with invariant checks in [`GraphBuilder::build`].
#[derive(Debug, Clone)]
pub struct GraphBuilder<C> {
    objectives: usize,
    scale: u64,
    adjacency: Vec<Vec<Edge<C>>>,
    labels: Option<Vec<String>>,
}

impl<C: CostScalar> GraphBuilder<C> {
    pub fn new(vertex_count: usize, objectives: usize, scale: u64) -> Self {
        GraphBuilder {
            objectives,
            scale,
            adjacency: vec![Vec::new(); vertex_count],
            labels: None,
        }
    }

    pub fn labels(mut self, labels: Vec<String>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn add_edge(&mut self, from: VertexId, to: VertexId, cost: CostVec<C>) -> &mut Self {
        self.adjacency[from].push(Edge { to, cost });
        self
    }

    /// Adds `cost` as the self-loop of every vertex that has none yet.
    pub fn default_wait_cost(&mut self, cost: &CostVec<C>) -> &mut Self {
        for (v, edges) in self.adjacency.iter_mut().enumerate() {
            if !edges.iter().any(|e| e.to == v) {
                edges.push(Edge {
                    to: v,
                    cost: cost.clone(),
                });
            }
        }
        self
    }

    pub fn build(mut self) -> Result<Graph<C>> {
        let n = self.adjacency.len();
        if self.objectives == 0 {
            return Err(Error::InvalidInstance(
                "graph needs at least one objective".into(),
            ));
        }
        if self.scale == 0 {
            return Err(Error::InvalidInstance(
                "fixed-point scale must be positive".into(),
            ));
        }
        if let Some(l) = &self.labels {
            if l.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "{} labels for {n} vertices",
                    l.len()
                )));
            }
        }
        for (u, edges) in self.adjacency.iter_mut().enumerate() {
            edges.sort_by_key(|e| e.to);
            for w in edges.windows(2) {
                if w[0].to == w[1].to {
                    return Err(Error::InvalidInstance(format!(
                        "duplicate edge {u} -> {}",
                        w[0].to
                    )));
                }
            }
            for e in edges.iter() {
                if e.to >= n {
                    return Err(Error::InvalidInstance(format!(
                        "edge {u} -> {} leaves the graph",
                        e.to
                    )));
                }
                if e.cost.len() != self.objectives {
                    return Err(Error::InvalidInstance(format!(
                        "edge {u} -> {} has {} cost components, expected {}",
                        e.to,
                        e.cost.len(),
                        self.objectives
                    )));
                }
            }
            if !edges.iter().any(|e| e.to == u) {
                return Err(Error::InvalidInstance(format!(
                    "vertex {u} has no self-loop"
                )));
            }
        }
        Ok(Graph {
            objectives: self.objectives,
            scale: self.scale,
            adjacency: self.adjacency,
            labels: self.labels,
        })
    }
}
