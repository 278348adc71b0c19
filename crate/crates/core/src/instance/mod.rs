//! Problem instances: graphs, agents, grid maps and objective generators.

mod graph;
mod json;
mod movingai;
mod objectives;

pub use graph::{Edge, Graph, GraphBuilder, VertexId};
pub use json::{load_instance_json, EdgeSpec, InstanceFile};
pub use movingai::{
    load_map, load_scenario, write_map, write_scenario, Cell, GridMap, ScenarioEntry,
};
pub use objectives::{build_graph, make_height_map, GridGraph, ObjectiveConfig, ObjectiveKind};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::CostScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Agent {
    pub id: usize,
    pub start: VertexId,
    pub goal: VertexId,
}

/// A graph plus an ordered team of agents.
///
/// `edge_conflicts` controls whether two agents swapping vertices in the
/// same timestep count as a conflict. Vertex conflicts always count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance<C> {
    pub graph: Graph<C>,
    pub agents: Vec<Agent>,
    pub edge_conflicts: bool,
}

impl<C: CostScalar> Instance<C> {
    /// Builds an instance from `(start, goal)` pairs; agent ids follow the
    /// order of `endpoints`.
    pub fn new(graph: Graph<C>, endpoints: &[(VertexId, VertexId)]) -> Result<Self> {
        let agents: Vec<Agent> = endpoints
            .iter()
            .enumerate()
            .map(|(id, &(start, goal))| Agent { id, start, goal })
            .collect();
        let inst = Instance {
            graph,
            agents,
            edge_conflicts: true,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_edge_conflicts(mut self, on: bool) -> Self {
        self.edge_conflicts = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.vertex_count();
        if self.agents.is_empty() {
            return Err(Error::InvalidInstance("instance has no agents".into()));
        }
        for (i, a) in self.agents.iter().enumerate() {
            if a.id != i {
                return Err(Error::InvalidInstance(format!(
                    "agent at position {i} has id {}",
                    a.id
                )));
            }
            if a.start >= n || a.goal >= n {
                return Err(Error::InvalidInstance(format!(
                    "agent {i} references a missing vertex"
                )));
            }
            for b in &self.agents[..i] {
                if b.start == a.start {
                    return Err(Error::InvalidInstance(format!(
                        "agents {} and {i} share start vertex {}",
                        b.id, a.start
                    )));
                }
                if b.goal == a.goal {
                    return Err(Error::InvalidInstance(format!(
                        "agents {} and {i} share goal vertex {}",
                        b.id, a.goal
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn objectives(&self) -> usize {
        self.graph.objectives()
    }

    /// Same instance with costs converted by `f` and the given scale.
    pub fn map_costs<D: CostScalar>(&self, scale: u64, f: impl Fn(C) -> D) -> Instance<D> {
        Instance {
            graph: self.graph.map_costs(scale, f),
            agents: self.agents.clone(),
            edge_conflicts: self.edge_conflicts,
        }
    }
}

impl Instance<u64> {
    /// Exact rational view of a fixed-point instance (units divided by scale).
    pub fn to_rational(&self) -> Instance<num_rational::Ratio<u64>> {
        let scale = self.graph.scale();
        self.map_costs(1, |c| num_rational::Ratio::new(c, scale))
    }
}
