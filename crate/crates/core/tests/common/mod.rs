#![allow(dead_code)]

use mocbs::bench::{generate_scenario, instance_from_grid};
use mocbs::constraints::Constraint;
use mocbs::high_level::{SolveOptions, SolveOutcome, Solver, SplitStrategy};
use mocbs::instance::{GridMap, Instance, ObjectiveConfig, ObjectiveKind};
use mocbs::oracle::{joint_pareto, OracleFrontier};
use mocbs::FixedInstance;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIG1: &str = include_str!("../../data/fig1.json");

pub fn fig1() -> FixedInstance {
    mocbs::instance::load_instance_json(FIG1).unwrap()
}

/// Connected 4x4 grid with `passable` open cells.
pub fn random_grid(rng: &mut ChaCha8Rng, width: usize, height: usize, passable: usize) -> GridMap {
    loop {
        let mut open = vec![true; width * height];
        let mut cells: Vec<usize> = (0..width * height).collect();
        cells.shuffle(rng);
        for &c in &cells[..width * height - passable] {
            open[c] = false;
        }
        let grid = GridMap::new(width, height, open).unwrap();
        if connected(&grid) {
            return grid;
        }
    }
}

fn connected(grid: &GridMap) -> bool {
    let open: Vec<usize> = (0..grid.width * grid.height)
        .filter(|&i| grid.passable[i])
        .collect();
    let mut seen = vec![false; grid.width * grid.height];
    let mut stack = vec![open[0]];
    seen[open[0]] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        let (x, y) = (i % grid.width, i / grid.width);
        let mut nb = Vec::new();
        if x > 0 {
            nb.push(i - 1);
        }
        if x + 1 < grid.width {
            nb.push(i + 1);
        }
        if y > 0 {
            nb.push(i - grid.width);
        }
        if y + 1 < grid.height {
            nb.push(i + grid.width);
        }
        for n in nb {
            if grid.passable[n] && !seen[n] {
                seen[n] = true;
                count += 1;
                stack.push(n);
            }
        }
    }
    count == open.len()
}

/// A small instance drawn from `seed`: 4x4 grid with 10 to 14 open cells,
/// 2 or 3 agents, random bi-objective costs.
pub fn small_instance(seed: u64) -> FixedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let passable = rng.gen_range(10..=14);
    let agents = rng.gen_range(2..=3);
    let grid = random_grid(&mut rng, 4, 4, passable);
    let entries = generate_scenario(&grid, agents, rng.gen()).unwrap();
    instance_from_grid(
        &grid,
        &entries,
        &ObjectiveConfig::new(ObjectiveKind::RandomBi, rng.gen()),
    )
    .unwrap()
}

/// Solvable small instances with their exact frontiers, drawn from
/// consecutive seeds starting at `first_seed`. Seeds whose instance has no
/// joint solution at all are skipped.
pub fn solvable_suite(
    first_seed: u64,
    count: usize,
) -> Vec<(u64, FixedInstance, OracleFrontier<u64>)> {
    let mut out = Vec::new();
    let mut seed = first_seed;
    while out.len() < count {
        let inst = small_instance(seed);
        let frontier = joint_pareto(&inst, 4);
        assert!(
            frontier.fixpoint,
            "oracle bound did not settle for seed {seed}"
        );
        if !frontier.solutions.is_empty() {
            out.push((seed, inst, frontier));
        }
        seed += 1;
    }
    out
}

/// Expansion cap for test runs. A standard-splitting run on a corridor
/// instance can outgrow memory long before any time limit hits.
pub const MAX_EXPANSIONS: u64 = 1_000_000;

pub fn capped(strategy: SplitStrategy) -> SolveOptions {
    SolveOptions::new(strategy).max_expansions(MAX_EXPANSIONS)
}

pub fn solve(inst: &FixedInstance, strategy: SplitStrategy) -> SolveOutcome<u64> {
    Solver::new(
        inst,
        capped(strategy).time_limit(std::time::Duration::from_secs(60)),
    )
    .solve()
}

/// Random constraints on agent 0 of `inst`, times below `horizon`.
pub fn random_constraints<C: mocbs::CostScalar>(
    rng: &mut ChaCha8Rng,
    inst: &Instance<C>,
    count: usize,
    horizon: usize,
) -> Vec<Constraint> {
    let n = inst.graph.vertex_count();
    (0..count)
        .map(|_| {
            let t = rng.gen_range(0..horizon);
            let u = rng.gen_range(0..n);
            if rng.gen_bool(0.6) {
                Constraint::Vertex {
                    agent: 0,
                    v: u,
                    t: t + 1,
                }
            } else {
                let es = inst.graph.edges(u);
                let v = es[rng.gen_range(0..es.len())].to;
                Constraint::Edge { agent: 0, u, v, t }
            }
        })
        .collect()
}
