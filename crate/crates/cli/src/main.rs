use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use mocbs::bench::{
    aggregate, build_instance, desk_suite, generate_scenario, read_records_jsonl,
    record_from_outcome, run_suite, solve_options, write_aggregate_csv, write_records_jsonl,
    RunConfig,
};
use mocbs::high_level::{Solver, SplitStrategy, TraceRecord};
use mocbs::instance::{load_map, write_scenario, ObjectiveKind};

/// Overrides the default output directory of `suite` and `aggregate`.
const OUT_DIR_ENV: &str = "MOCBS_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "mocbs",
    version,
    about = "Multi-objective conflict-based search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print its run record as JSON.
    Solve(SolveArgs),
    /// Run every scenario x agent count x strategy and write records and
    /// an aggregate table.
    Suite(SuiteArgs),
    /// Rebuild the aggregate table from a records file.
    Aggregate(AggregateArgs),
    /// Write a random MovingAI scenario for a map.
    GenScen(GenScenArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// JSON instance file (instead of --map/--scen).
    #[arg(long, conflicts_with_all = ["map", "scen"])]
    instance: Option<PathBuf>,
    #[arg(long, requires = "scen")]
    map: Option<PathBuf>,
    #[arg(long, requires = "map")]
    scen: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    agents: usize,
    /// random-bi, random-tri, time-energy[:H], optionally +flowtime[@P]
    #[arg(long, default_value = "random-bi")]
    objective: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// standard, cost or disjoint
    #[arg(long, default_value = "disjoint")]
    strategy: SplitStrategy,
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long)]
    no_heuristic: bool,
    #[arg(long)]
    no_cache: bool,
    /// Write a JSONL search trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the record here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include the witness paths in the output.
    #[arg(long)]
    paths: bool,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long, required = true, num_args = 1..)]
    scen: Vec<PathBuf>,
    #[arg(long, default_value_t = 2)]
    min_agents: usize,
    #[arg(long, default_value_t = 6)]
    max_agents: usize,
    #[arg(long, default_value = "random-bi")]
    objective: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Defaults to $MOCBS_OUT_DIR, then ./results.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct AggregateArgs {
    records: PathBuf,
    /// CSV destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenScenArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve(args: SolveArgs) -> anyhow::Result<()> {
    let objective: ObjectiveKind = args.objective.parse()?;
    let mut config = match (&args.instance, &args.map, &args.scen) {
        (Some(path), _, _) => RunConfig::json(path, args.strategy, args.time_limit),
        (None, Some(map), Some(scen)) => RunConfig::moving_ai(
            map,
            scen,
            args.agents,
            objective,
            args.seed,
            args.strategy,
            args.time_limit,
        ),
        _ => bail!(mocbs::Error::Config(
            "give either --instance or both --map and --scen".into()
        )),
    };
    config.heuristic = !args.no_heuristic;
    config.cache = !args.no_cache;
    config.validate()?;
    let instance = build_instance(&config)?;

    let solver = Solver::new(&instance, solve_options(&config));
    let out = match &args.trace {
        Some(trace) => {
            let file = File::create(trace)
                .with_context(|| format!("cannot create {}", trace.display()))?;
            let mut w = BufWriter::new(file);
            let mut io_err = None;
            let out = solver.solve_observed(|e| {
                for r in TraceRecord::from_event(&e, config.strategy) {
                    let res = serde_json::to_writer(&mut w, &r).map_err(std::io::Error::from);
                    if let Err(e) = res.and_then(|_| w.write_all(b"\n")) {
                        io_err.get_or_insert(e);
                    }
                }
            });
            if let Some(e) = io_err {
                return Err(e).context("writing trace");
            }
            w.flush()?;
            out
        }
        None => solver.solve(),
    };
    let record = record_from_outcome(&instance, &config, &out);

    let mut value = serde_json::to_value(&record)?;
    value["frontier_real"] = serde_json::to_value(record.frontier_real())?;
    if args.paths {
        let g = &instance.graph;
        value["paths"] = out
            .solutions
            .iter()
            .map(|s| {
                s.paths
                    .iter()
                    .map(|p| {
                        p.vertices
                            .iter()
                            .map(|&v| g.vertex_name(v))
                            .collect::<Vec<_>>()
                    })
                    .collect()
            })
            .collect::<Vec<Vec<Vec<String>>>>()
            .into();
    }
    let text = serde_json::to_string(&value)? + "\n";
    write_or_print(args.out.as_deref(), &text)
}

fn suite(args: SuiteArgs) -> anyhow::Result<()> {
    let objective: ObjectiveKind = args.objective.parse()?;
    if args.min_agents == 0 || args.min_agents > args.max_agents {
        bail!(mocbs::Error::Config(format!(
            "bad agent range {}..={}",
            args.min_agents, args.max_agents
        )));
    }
    let configs = desk_suite(
        &args.map,
        &args.scen,
        args.min_agents..=args.max_agents,
        &objective,
        args.seed,
        args.time_limit,
    );
    for c in &configs {
        c.validate()?;
    }
    let dir = out_dir(args.out_dir);
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let records = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(|| run_suite(&configs)),
        None => run_suite(&configs),
    };
    write_records_jsonl(&records, File::create(dir.join("records.jsonl"))?)?;
    write_aggregate_csv(
        &aggregate(&records),
        File::create(dir.join("aggregate.csv"))?,
    )?;
    for r in records.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: {:?}: {}",
            r.config.source,
            r.error.as_deref().unwrap_or_default()
        );
    }
    eprintln!("wrote {} records to {}", records.len(), dir.display());
    Ok(())
}

fn aggregate_cmd(args: AggregateArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.records)
        .with_context(|| format!("cannot read {}", args.records.display()))?;
    let rows = aggregate(&read_records_jsonl(&text)?);
    let mut buf = Vec::new();
    write_aggregate_csv(&rows, &mut buf)?;
    write_or_print(args.out.as_deref(), &String::from_utf8(buf)?)
}

fn gen_scen(args: GenScenArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.map)
        .with_context(|| format!("cannot read {}", args.map.display()))?;
    let grid = load_map(&text)?;
    let entries = generate_scenario(&grid, args.count, args.seed)?;
    let name = args
        .map
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    write_or_print(args.out.as_deref(), &write_scenario(&name, &grid, &entries))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let parse = err.chain().any(|c| {
        c.downcast_ref::<mocbs::Error>()
            .is_some_and(|e| e.is_parse())
            || c.downcast_ref::<serde_json::Error>().is_some()
    });
    if parse {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Suite(a) => suite(a),
        Command::Aggregate(a) => aggregate_cmd(a),
        Command::GenScen(a) => gen_scen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
