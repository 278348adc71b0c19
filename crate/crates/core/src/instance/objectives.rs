//! Objective generators that turn a grid map into a vector-cost graph.
//!
//! Random objectives use ChaCha8 seeded with `seed_from_u64(seed)` and draw
//! in a fixed order: source cells row-major, then directions N, S, W, E,
//! wait (only for edges that exist), then component index. Each draw is
//! uniform over {1, 2}.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::{Graph, GraphBuilder, VertexId};
use super::movingai::{Cell, GridMap};
use crate::error::{Error, Result};
use crate::pareto::CostVec;
use crate::scalar::CostScalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ObjectiveKind {
    RandomBi,
    RandomTri,
    /// Travel time and energy. Heights come from the grid if present,
    /// otherwise from a hill of `max_height` peaked at the map center.
    TimeEnergy {
        max_height: Option<u32>,
    },
    /// `base` objectives plus an all-ones flowtime component at `position`.
    FlowtimeAugmented {
        base: Box<ObjectiveKind>,
        position: usize,
    },
}

impl ObjectiveKind {
    pub fn objectives(&self) -> usize {
        match self {
            ObjectiveKind::RandomBi | ObjectiveKind::TimeEnergy { .. } => 2,
            ObjectiveKind::RandomTri => 3,
            ObjectiveKind::FlowtimeAugmented { base, .. } => base.objectives() + 1,
        }
    }

    /// Short name used in reports and CLI flags.
    pub fn name(&self) -> String {
        match self {
            ObjectiveKind::RandomBi => "random-bi".into(),
            ObjectiveKind::RandomTri => "random-tri".into(),
            ObjectiveKind::TimeEnergy { max_height: None } => "time-energy".into(),
            ObjectiveKind::TimeEnergy {
                max_height: Some(h),
            } => format!("time-energy:{h}"),
            ObjectiveKind::FlowtimeAugmented { base, position } => {
                format!("{}+flowtime@{position}", base.name())
            }
        }
    }
}

/// Parses the names produced by [`ObjectiveKind::name`]; `+flowtime`
/// without a position inserts the flowtime component first.
impl std::str::FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some((base, rest)) = s.rsplit_once("+flowtime") {
            let position = match rest.strip_prefix('@') {
                Some(p) => p
                    .parse()
                    .map_err(|_| Error::Config(format!("bad flowtime position in `{s}`")))?,
                None if rest.is_empty() => 0,
                None => return Err(Error::Config(format!("unknown objective `{s}`"))),
            };
            return Ok(ObjectiveKind::FlowtimeAugmented {
                base: Box::new(base.parse()?),
                position,
            });
        }
        match s {
            "random-bi" => Ok(ObjectiveKind::RandomBi),
            "random-tri" => Ok(ObjectiveKind::RandomTri),
            "time-energy" => Ok(ObjectiveKind::TimeEnergy { max_height: None }),
            _ => match s.strip_prefix("time-energy:") {
                Some(h) => h
                    .parse()
                    .map(|h| ObjectiveKind::TimeEnergy { max_height: Some(h) })
                    .map_err(|_| Error::Config(format!("bad max height in `{s}`"))),
                None => Err(Error::Config(format!(
                    "unknown objective `{s}` (expected random-bi, random-tri, time-energy[:H], optionally +flowtime[@P])"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub kind: ObjectiveKind,
    pub seed: u64,
    /// When set, self-loops get this cost instead of a random draw (random
    /// objectives only). Wait draws are then skipped in the draw order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wait_cost: Option<Vec<u64>>,
}

impl ObjectiveConfig {
    pub fn new(kind: ObjectiveKind, seed: u64) -> Self {
        ObjectiveConfig {
            kind,
            seed,
            wait_cost: None,
        }
    }
}

/// A graph built from a grid, with the cell/vertex correspondence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridGraph<C> {
    pub graph: Graph<C>,
    /// Cell of each vertex; vertices are passable cells in row-major order.
    pub cells: Vec<Cell>,
    width: usize,
    vertex_of: Vec<Option<VertexId>>,
}

impl<C: CostScalar> GridGraph<C> {
    pub fn vertex_at(&self, c: Cell) -> Result<VertexId> {
        if c.x >= self.width || c.y * self.width + c.x >= self.vertex_of.len() {
            return Err(Error::Config(format!(
                "cell ({}, {}) is outside the map",
                c.x, c.y
            )));
        }
        self.vertex_of[c.y * self.width + c.x]
            .ok_or_else(|| Error::Config(format!("cell ({}, {}) is blocked", c.x, c.y)))
    }
}

const DIRECTIONS: [(isize, isize); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

/// Height of every cell on a hill peaked at the map center:
/// `round(max_height * (1 - d / d_max))` with `d` the Euclidean distance
/// between cell centers.
pub fn make_height_map(grid: &GridMap, max_height: u32) -> Vec<u32> {
    let cx = (grid.width as f64 - 1.0) / 2.0;
    let cy = (grid.height as f64 - 1.0) / 2.0;
    let dist = |x: usize, y: usize| ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
    let d_max = dist(0, 0);
    let mut out = Vec::with_capacity(grid.width * grid.height);
    for y in 0..grid.height {
        for x in 0..grid.width {
            let h = if d_max == 0.0 {
                max_height as f64
            } else {
                max_height as f64 * (1.0 - dist(x, y) / d_max)
            };
            out.push(h.round().max(0.0) as u32);
        }
    }
    out
}

/// Builds the 4-connected graph of `grid` with costs assigned by `cfg`.
pub fn build_graph<C: CostScalar>(grid: &GridMap, cfg: &ObjectiveConfig) -> Result<GridGraph<C>> {
    let mut cells = Vec::new();
    let mut vertex_of = vec![None; grid.width * grid.height];
    for y in 0..grid.height {
        for x in 0..grid.width {
            let c = Cell { x, y };
            if grid.is_passable(c) {
                vertex_of[grid.index(c)] = Some(cells.len());
                cells.push(c);
            }
        }
    }
    let neighbors = |c: Cell| -> Vec<VertexId> {
        let mut out = Vec::with_capacity(5);
        for (dx, dy) in DIRECTIONS {
            let (nx, ny) = (c.x as isize + dx, c.y as isize + dy);
            if nx < 0 || ny < 0 {
                continue;
            }
            let n = Cell {
                x: nx as usize,
                y: ny as usize,
            };
            if grid.is_passable(n) {
                out.push(vertex_of[grid.index(n)].unwrap());
            }
        }
        out.push(vertex_of[grid.index(c)].unwrap());
        out
    };

    let graph = match &cfg.kind {
        ObjectiveKind::FlowtimeAugmented { base, position } => {
            let inner = ObjectiveConfig {
                kind: (**base).clone(),
                ..cfg.clone()
            };
            build_graph::<C>(grid, &inner)?
                .graph
                .augment_flowtime(*position)?
        }
        ObjectiveKind::RandomBi | ObjectiveKind::RandomTri => {
            let n_obj = cfg.kind.objectives();
            if let Some(w) = &cfg.wait_cost {
                if w.len() != n_obj {
                    return Err(Error::Config(format!("wait cost needs {n_obj} components")));
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut b = GraphBuilder::new(cells.len(), n_obj, 1);
            for (u, &c) in cells.iter().enumerate() {
                for v in neighbors(c) {
                    let units: Vec<u64> = match (&cfg.wait_cost, u == v) {
                        (Some(w), true) => w.clone(),
                        _ => (0..n_obj).map(|_| rng.gen_range(1..=2u64)).collect(),
                    };
                    b.add_edge(u, v, CostVec::from_units(&units));
                }
            }
            b.build()?
        }
        ObjectiveKind::TimeEnergy { max_height } => {
            let heights = match (&grid.heights, max_height) {
                (Some(h), _) => h.clone(),
                (None, Some(m)) => make_height_map(grid, *m),
                (None, None) => {
                    return Err(Error::Config(
                        "time-energy objectives need a height map".into(),
                    ))
                }
            };
            let mut b = GraphBuilder::new(cells.len(), 2, 1);
            for (u, &c) in cells.iter().enumerate() {
                let hu = heights[grid.index(c)];
                for v in neighbors(c) {
                    let hv = heights[grid.index(cells[v])];
                    let energy = if hv > hu { (hv - hu) as u64 } else { 1 };
                    b.add_edge(u, v, CostVec::from_units(&[1, energy]));
                }
            }
            b.build()?
        }
    };
    Ok(GridGraph {
        graph,
        cells,
        width: grid.width,
        vertex_of,
    })
}
