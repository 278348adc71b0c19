use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constraints::Constraint;
use crate::instance::VertexId;
use crate::low_level::Path;
use crate::scalar::CostScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConflictKind {
    /// Both agents occupy `v` at `t`.
    Vertex { v: VertexId },
    /// The first agent moves `u -> v` while the second moves `v -> u`,
    /// between `t` and `t + 1`.
    Edge { u: VertexId, v: VertexId },
}

/// A collision between agents `first < second` at timestep `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Conflict {
    pub first: usize,
    pub second: usize,
    pub t: usize,
    #[serde(flatten)]
    pub kind: ConflictKind,
}

impl Conflict {
    /// The two constraints that resolve this conflict, one per agent.
    pub fn constraints(&self) -> [Constraint; 2] {
        let t = self.t;
        match self.kind {
            ConflictKind::Vertex { v } => [
                Constraint::Vertex {
                    agent: self.first,
                    v,
                    t,
                },
                Constraint::Vertex {
                    agent: self.second,
                    v,
                    t,
                },
            ],
            ConflictKind::Edge { u, v } => [
                Constraint::Edge {
                    agent: self.first,
                    u,
                    v,
                    t,
                },
                Constraint::Edge {
                    agent: self.second,
                    u: v,
                    v: u,
                    t,
                },
            ],
        }
    }
}

/// The conflict with the smallest `(t, first, second)`, vertex conflicts
/// before edge conflicts, or `None` if the paths are conflict-free.
///
/// Terminated agents keep occupying their goals, so checking up to the
/// latest termination time is enough.
pub fn detect_first_conflict<C: CostScalar>(
    paths: &[Arc<Path<C>>],
    edge_conflicts: bool,
) -> Option<Conflict> {
    let horizon = paths.iter().map(|p| p.arrival_time()).max()?;
    for t in 0..=horizon {
        for i in 0..paths.len() {
            for j in i + 1..paths.len() {
                let (pi, pj) = (&paths[i], &paths[j]);
                if pi.at(t) == pj.at(t) {
                    return Some(Conflict {
                        first: i,
                        second: j,
                        t,
                        kind: ConflictKind::Vertex { v: pi.at(t) },
                    });
                }
                if edge_conflicts && t < horizon {
                    let (u, v) = (pi.at(t), pi.at(t + 1));
                    if u != v && pj.at(t) == v && pj.at(t + 1) == u {
                        return Some(Conflict {
                            first: i,
                            second: j,
                            t,
                            kind: ConflictKind::Edge { u, v },
                        });
                    }
                }
            }
        }
    }
    None
}
