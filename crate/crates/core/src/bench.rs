//! Experiment runner: build instances from MovingAI files, solve them, and
//! aggregate per-run records into success rates and branching factors.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path as FsPath, PathBuf};
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::high_level::{
    SearchStats, SolveOptions, SolveOutcome, SolveStatus, Solver, SplitStrategy,
};
use crate::instance::{
    build_graph, load_instance_json, load_map, load_scenario, Cell, GridMap, Instance,
    ObjectiveConfig, ObjectiveKind, ScenarioEntry,
};

/// Where the instance comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum InstanceSource {
    MovingAi {
        map: PathBuf,
        scen: PathBuf,
        agents: usize,
    },
    Json {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub source: InstanceSource,
    /// Ignored for JSON instances, which carry their own costs.
    pub objective: ObjectiveKind,
    pub seed: u64,
    pub strategy: SplitStrategy,
    pub time_limit_secs: f64,
    #[serde(default = "yes")]
    pub heuristic: bool,
    #[serde(default = "yes")]
    pub cache: bool,
}

fn yes() -> bool {
    true
}

impl RunConfig {
    pub fn moving_ai(
        map: impl Into<PathBuf>,
        scen: impl Into<PathBuf>,
        agents: usize,
        objective: ObjectiveKind,
        seed: u64,
        strategy: SplitStrategy,
        time_limit_secs: f64,
    ) -> Self {
        RunConfig {
            source: InstanceSource::MovingAi {
                map: map.into(),
                scen: scen.into(),
                agents,
            },
            objective,
            seed,
            strategy,
            time_limit_secs,
            heuristic: true,
            cache: true,
        }
    }

    pub fn json(path: impl Into<PathBuf>, strategy: SplitStrategy, time_limit_secs: f64) -> Self {
        RunConfig {
            source: InstanceSource::Json { path: path.into() },
            objective: ObjectiveKind::RandomBi,
            seed: 0,
            strategy,
            time_limit_secs,
            heuristic: true,
            cache: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time_limit_secs > 0.0 && self.time_limit_secs.is_finite()) {
            return Err(Error::Config(format!(
                "time limit must be positive, got {}",
                self.time_limit_secs
            )));
        }
        if let InstanceSource::MovingAi { agents: 0, .. } = self.source {
            return Err(Error::Config("agent count must be at least 1".into()));
        }
        Ok(())
    }

    /// Everything but the strategy and switches: runs with equal keys solve
    /// the same instance.
    fn instance_key(&self) -> String {
        format!("{:?}|{}|{}", self.source, self.objective.name(), self.seed)
    }

    fn group(&self) -> (String, String, usize) {
        match &self.source {
            InstanceSource::MovingAi { map, agents, .. } => {
                (file_name(map), self.objective.name(), *agents)
            }
            InstanceSource::Json { path } => (file_name(path), "json".into(), 0),
        }
    }
}

fn file_name(p: &FsPath) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

fn read(path: &FsPath) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

/// Builds the instance a config describes. Deterministic in the config.
pub fn build_instance(config: &RunConfig) -> Result<Instance<u64>> {
    match &config.source {
        InstanceSource::Json { path } => load_instance_json(&read(path)?),
        InstanceSource::MovingAi { map, scen, agents } => {
            let grid = load_map(&read(map)?)?;
            let entries = load_scenario(&read(scen)?, *agents)?;
            instance_from_grid(
                &grid,
                &entries,
                &ObjectiveConfig::new(config.objective.clone(), config.seed),
            )
        }
    }
}

pub fn instance_from_grid(
    grid: &GridMap,
    entries: &[ScenarioEntry],
    cfg: &ObjectiveConfig,
) -> Result<Instance<u64>> {
    let gg = build_graph::<u64>(grid, cfg)?;
    let endpoints = entries
        .iter()
        .map(|e| Ok((gg.vertex_at(e.start)?, gg.vertex_at(e.goal)?)))
        .collect::<Result<Vec<_>>>()?;
    Instance::new(gg.graph, &endpoints)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Complete,
    Timeout,
    ExpansionLimit,
    Error,
}

impl From<SolveStatus> for RunStatus {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Complete => RunStatus::Complete,
            SolveStatus::Timeout => RunStatus::Timeout,
            SolveStatus::ExpansionLimit => RunStatus::ExpansionLimit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default)]
    pub unsolvable: bool,
    pub scale: u64,
    /// Solution costs in fixed-point units, lexicographically sorted.
    pub frontier: Vec<Vec<u64>>,
    pub stats: SearchStats,
    pub wall_time_secs: f64,
}

impl RunRecord {
    pub fn solved(&self) -> bool {
        self.status == RunStatus::Complete
    }

    /// Solution costs in real units.
    pub fn frontier_real(&self) -> Vec<Vec<f64>> {
        let s = self.scale as f64;
        self.frontier
            .iter()
            .map(|c| c.iter().map(|&u| u as f64 / s).collect())
            .collect()
    }

    /// The record with its timing fields zeroed, for determinism checks.
    pub fn without_timing(&self) -> RunRecord {
        RunRecord {
            wall_time_secs: 0.0,
            ..self.clone()
        }
    }

    fn failed(config: RunConfig, err: &Error) -> RunRecord {
        RunRecord {
            config,
            status: RunStatus::Error,
            error: Some(err.to_string()),
            unsolvable: false,
            scale: 1,
            frontier: Vec::new(),
            stats: SearchStats::default(),
            wall_time_secs: 0.0,
        }
    }
}

pub fn solve_options(config: &RunConfig) -> SolveOptions {
    SolveOptions::new(config.strategy)
        .time_limit(Duration::from_secs_f64(config.time_limit_secs))
        .heuristic(config.heuristic)
        .cache(config.cache)
}

pub fn record_from_outcome(
    instance: &Instance<u64>,
    config: &RunConfig,
    out: &SolveOutcome<u64>,
) -> RunRecord {
    RunRecord {
        config: config.clone(),
        status: out.status.into(),
        error: None,
        unsolvable: out.unsolvable,
        scale: instance.graph.scale(),
        frontier: out
            .solutions
            .iter()
            .map(|s| s.cost.components().to_vec())
            .collect(),
        stats: out.stats.clone(),
        wall_time_secs: out.stats.wall_time.as_secs_f64(),
    }
}

pub fn solve_instance(instance: &Instance<u64>, config: &RunConfig) -> RunRecord {
    let out = Solver::new(instance, solve_options(config)).solve();
    record_from_outcome(instance, config, &out)
}

/// Builds and solves one configuration.
pub fn run_one(config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let instance = build_instance(config)?;
    Ok(solve_instance(&instance, config))
}

/// Runs every config, in parallel across configs, and returns the records
/// in input order. Failing configs yield `Error` records.
pub fn run_suite(configs: &[RunConfig]) -> Vec<RunRecord> {
    configs
        .par_iter()
        .map(|c| run_one(c).unwrap_or_else(|e| RunRecord::failed(c.clone(), &e)))
        .collect()
}

/// One line of the aggregate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub map: String,
    pub objective: String,
    pub agents: usize,
    pub strategy: SplitStrategy,
    pub instances: usize,
    pub solved: usize,
    pub success_rate: f64,
    /// Instances solved by every strategy in the group.
    pub common: usize,
    pub mean_runtime_secs: Option<f64>,
    pub mean_expansions: Option<f64>,
    /// Children per split, pooled over the commonly solved instances.
    pub branching_factor: Option<f64>,
}

/// Aggregates records per (map, objective, agent count, strategy).
///
/// Success rates use every instance. Runtimes, expansions and branching
/// factors only use instances every strategy of the group solved.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    type Group = (String, String, usize);
    let mut by_group: BTreeMap<Group, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        by_group.entry(r.config.group()).or_default().push(r);
    }
    let mut rows = Vec::new();
    for ((map, objective, agents), recs) in by_group {
        let strategies: BTreeSet<SplitStrategy> = recs.iter().map(|r| r.config.strategy).collect();
        let mut solved_by: BTreeMap<String, BTreeSet<SplitStrategy>> = BTreeMap::new();
        for r in &recs {
            let e = solved_by.entry(r.config.instance_key()).or_default();
            if r.solved() {
                e.insert(r.config.strategy);
            }
        }
        let common: BTreeSet<&String> = solved_by
            .iter()
            .filter(|(_, s)| **s == strategies)
            .map(|(k, _)| k)
            .collect();
        for &strategy in &strategies {
            let mine: Vec<&&RunRecord> = recs
                .iter()
                .filter(|r| r.config.strategy == strategy)
                .collect();
            let solved = mine.iter().filter(|r| r.solved()).count();
            let shared: Vec<&&RunRecord> = mine
                .iter()
                .copied()
                .filter(|r| r.solved() && common.contains(&r.config.instance_key()))
                .collect();
            let mean = |f: &dyn Fn(&RunRecord) -> f64| {
                (!shared.is_empty())
                    .then(|| shared.iter().map(|r| f(r)).sum::<f64>() / shared.len() as f64)
            };
            let splits: u64 = shared.iter().map(|r| r.stats.splits).sum();
            let children: u64 = shared.iter().map(|r| r.stats.children).sum();
            rows.push(AggregateRow {
                map: map.clone(),
                objective: objective.clone(),
                agents,
                strategy,
                instances: mine.len(),
                solved,
                success_rate: if mine.is_empty() {
                    0.0
                } else {
                    solved as f64 / mine.len() as f64
                },
                common: shared.len(),
                mean_runtime_secs: mean(&|r| r.wall_time_secs),
                mean_expansions: mean(&|r| r.stats.expansions as f64),
                branching_factor: (splits > 0).then(|| children as f64 / splits as f64),
            });
        }
    }
    rows
}

pub fn write_aggregate_csv<W: std::io::Write>(rows: &[AggregateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_jsonl<W: std::io::Write>(records: &[RunRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records_jsonl(text: &str) -> Result<Vec<RunRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

/// Random scenario: `count` agents with distinct starts and distinct goals,
/// each goal reachable from its start.
pub fn generate_scenario(grid: &GridMap, count: usize, seed: u64) -> Result<Vec<ScenarioEntry>> {
    let comp = components(grid);
    let mut cells: Vec<Cell> = (0..grid.height)
        .flat_map(|y| (0..grid.width).map(move |x| Cell { x, y }))
        .filter(|&c| grid.is_passable(c))
        .collect();
    if cells.len() < count {
        return Err(Error::Config(format!(
            "map has {} passable cells, need {count}",
            cells.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = cells.clone();
    starts.shuffle(&mut rng);
    cells.shuffle(&mut rng);
    let mut used_goals = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    for &s in &starts {
        if out.len() == count {
            break;
        }
        let goal = cells.iter().copied().find(|&g| {
            comp[grid.index(g)] == comp[grid.index(s)] && !used_goals.contains(&grid.index(g))
        });
        if let Some(g) = goal {
            used_goals.insert(grid.index(g));
            out.push(ScenarioEntry { start: s, goal: g });
        }
    }
    if out.len() < count {
        return Err(Error::Config(format!(
            "could only place {} of {count} agents",
            out.len()
        )));
    }
    Ok(out)
}

/// 4-connected component label per cell; blocked cells get `usize::MAX`.
fn components(grid: &GridMap) -> Vec<usize> {
    let mut label = vec![usize::MAX; grid.width * grid.height];
    let mut next = 0;
    for y in 0..grid.height {
        for x in 0..grid.width {
            let c = Cell { x, y };
            if !grid.is_passable(c) || label[grid.index(c)] != usize::MAX {
                continue;
            }
            let mut stack = vec![c];
            label[grid.index(c)] = next;
            while let Some(Cell { x, y }) = stack.pop() {
                let around = [
                    (x.wrapping_sub(1), y),
                    (x + 1, y),
                    (x, y.wrapping_sub(1)),
                    (x, y + 1),
                ];
                for (nx, ny) in around {
                    let n = Cell { x: nx, y: ny };
                    if grid.contains(n) && grid.is_passable(n) && label[grid.index(n)] == usize::MAX
                    {
                        label[grid.index(n)] = next;
                        stack.push(n);
                    }
                }
            }
            next += 1;
        }
    }
    label
}

/// The desk-scale suite: every scenario file × agent count × strategy.
pub fn desk_suite(
    map: &FsPath,
    scens: &[PathBuf],
    agents: std::ops::RangeInclusive<usize>,
    objective: &ObjectiveKind,
    seed: u64,
    time_limit_secs: f64,
) -> Vec<RunConfig> {
    let mut out = Vec::new();
    for n in agents {
        for scen in scens {
            for s in SplitStrategy::ALL {
                out.push(RunConfig::moving_ai(
                    map,
                    scen,
                    n,
                    objective.clone(),
                    seed,
                    s,
                    time_limit_secs,
                ));
            }
        }
    }
    out
}
