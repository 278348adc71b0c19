//! JSON instance format: explicit vertices, directed edges with integer
//! fixed-point cost vectors, a scale, and agents.
//!
//! ```json
//! {
//!   "scale": 2,
//!   "objectives": 2,
//!   "vertices": ["A", "B"],
//!   "wait_cost": [2, 0],
//!   "edges": [{"from": "A", "to": "B", "cost": [2, 2]}],
//!   "agents": [{"start": "A", "goal": "B"}],
//!   "edge_conflicts": true
//! }
//! ```
//!
//! Vertices may be referenced by label or by index. Vertices without an
//! explicit self-loop get `wait_cost`.

use serde::{Deserialize, Serialize};

use super::graph::{GraphBuilder, VertexId};
use super::Instance;
use crate::error::{Error, Result};
use crate::pareto::CostVec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexRef {
    Index(usize),
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: VertexRef,
    pub to: VertexRef,
    pub cost: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub start: VertexRef,
    pub goal: VertexRef,
}

fn default_scale() -> u64 {
    1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default = "default_scale")]
    pub scale: u64,
    pub objectives: usize,
    /// Vertex labels; their count defines the vertex set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wait_cost: Option<Vec<u64>>,
    pub edges: Vec<EdgeSpec>,
    pub agents: Vec<AgentSpec>,
    #[serde(default = "yes")]
    pub edge_conflicts: bool,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance<u64>> {
        let n = match (&self.vertices, self.vertex_count) {
            (Some(v), None) => v.len(),
            (None, Some(n)) => n,
            (Some(v), Some(n)) if v.len() == n => n,
            _ => {
                return Err(Error::InvalidInstance(
                    "give either `vertices` or a matching `vertex_count`".into(),
                ))
            }
        };
        let resolve = |r: &VertexRef| -> Result<VertexId> {
            match r {
                VertexRef::Index(i) if *i < n => Ok(*i),
                VertexRef::Index(i) => Err(Error::InvalidInstance(format!(
                    "vertex index {i} out of range"
                ))),
                VertexRef::Label(l) => self
                    .vertices
                    .as_ref()
                    .and_then(|vs| vs.iter().position(|v| v == l))
                    .ok_or_else(|| Error::InvalidInstance(format!("unknown vertex `{l}`"))),
            }
        };
        let mut b = GraphBuilder::new(n, self.objectives, self.scale);
        if let Some(labels) = &self.vertices {
            b = b.labels(labels.clone());
        }
        for e in &self.edges {
            b.add_edge(
                resolve(&e.from)?,
                resolve(&e.to)?,
                CostVec::from_units(&e.cost),
            );
        }
        if let Some(w) = &self.wait_cost {
            b.default_wait_cost(&CostVec::from_units(w));
        }
        let graph = b.build()?;
        let endpoints = self
            .agents
            .iter()
            .map(|a| Ok((resolve(&a.start)?, resolve(&a.goal)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance::new(graph, &endpoints)?.with_edge_conflicts(self.edge_conflicts))
    }

    /// Explicit-edge description of `inst`, self-loops included.
    pub fn from_instance(inst: &Instance<u64>) -> Self {
        let g = &inst.graph;
        let vref = |v: VertexId| match g.labels() {
            Some(l) => VertexRef::Label(l[v].clone()),
            None => VertexRef::Index(v),
        };
        let mut edges = Vec::with_capacity(g.edge_count());
        for u in 0..g.vertex_count() {
            for e in g.edges(u) {
                edges.push(EdgeSpec {
                    from: vref(u),
                    to: vref(e.to),
                    cost: e.cost.components().to_vec(),
                });
            }
        }
        InstanceFile {
            scale: g.scale(),
            objectives: g.objectives(),
            vertices: g.labels().map(|l| l.to_vec()),
            vertex_count: if g.labels().is_some() {
                None
            } else {
                Some(g.vertex_count())
            },
            wait_cost: None,
            edges,
            agents: inst
                .agents
                .iter()
                .map(|a| AgentSpec {
                    start: vref(a.start),
                    goal: vref(a.goal),
                })
                .collect(),
            edge_conflicts: inst.edge_conflicts,
        }
    }
}

pub fn load_instance_json(text: &str) -> Result<Instance<u64>> {
    let file: InstanceFile = serde_json::from_str(text)?;
    file.into_instance()
}
