use super::*;
use crate::instance::{load_instance_json, Instance};
use crate::low_level::LowLevel;
use crate::pareto::CostVec;

const FIG1: &str = include_str!("../../data/fig1.json");
const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;
const E: usize = 4;
const F: usize = 5;

fn fig1() -> Instance<u64> {
    load_instance_json(FIG1).unwrap()
}

// fig1.json uses scale 2: (1.5, 3) is stored as (3, 6).
fn cv(a: u64, b: u64) -> CostVec<u64> {
    CostVec::from_units(&[a, b])
}

/// Split node, its conflict, its children and the discarded count.
type SplitRecord = (CtNode<u64>, Conflict, Vec<CtNode<u64>>, usize);

struct Run {
    outcome: SolveOutcome<u64>,
    roots: Vec<CtNode<u64>>,
    splits: Vec<SplitRecord>,
    /// (seq, what happened after the pop)
    pops: Vec<(u64, &'static str)>,
}

fn run(inst: &Instance<u64>, strategy: SplitStrategy) -> Run {
    let mut roots = Vec::new();
    let mut splits = Vec::new();
    let mut pops: Vec<(u64, &'static str)> = Vec::new();
    let outcome = Solver::new(inst, SolveOptions::new(strategy)).solve_observed(|e| match e {
        SearchEvent::Root(n) => roots.push(n.clone()),
        SearchEvent::Pop(n) => pops.push((n.seq, "expand")),
        SearchEvent::Pruned { on_pop: true, .. } => pops.last_mut().unwrap().1 = "pruned",
        SearchEvent::Solution(_) => pops.last_mut().unwrap().1 = "solution",
        SearchEvent::Split {
            node,
            conflict,
            children,
            discarded,
        } => splits.push((node.clone(), *conflict, children.to_vec(), discarded)),
        SearchEvent::Pruned { on_pop: false, .. } => {}
    });
    Run {
        outcome,
        roots,
        splits,
        pops,
    }
}

#[test]
fn fig1_frontier_all_strategies() {
    let inst = fig1();
    for s in SplitStrategy::ALL {
        let r = run(&inst, s);
        assert_eq!(r.outcome.status, SolveStatus::Complete);
        assert_eq!(r.outcome.costs(), vec![cv(13, 14), cv(16, 12)], "{s}");
        for sol in &r.outcome.solutions {
            assert_eq!(detect_first_conflict(&sol.paths, inst.edge_conflicts), None);
        }
    }
}

#[test]
fn fig1_roots() {
    let inst = fig1();
    let r = run(&inst, SplitStrategy::Disjoint);
    assert_eq!(r.roots.len(), 2);
    assert_eq!(r.roots[0].lb, vec![cv(3, 6), cv(8, 8)]);
    assert_eq!(r.roots[1].lb, vec![cv(6, 4), cv(8, 8)]);
    assert!(r.roots[0].ub[0].is_empty());
    assert_eq!(r.roots[1].ub[0], vec![cv(6, 6)]);
    assert!(r.roots.iter().all(|n| n.ub[1].is_empty()));
}

#[test]
fn fig1_standard_trace() {
    let r = run(&fig1(), SplitStrategy::Standard);
    let st = &r.outcome.stats;
    assert_eq!((st.roots, st.children, st.generations), (2, 6, 8));
    assert_eq!(st.split_children, vec![3, 3]);
    assert_eq!(st.expansions, 4);
    // seq 2,3 = a1's children of n1 ([A,C,C,D], [A,B,B,D]), seq 4 = a2's child
    assert_eq!(r.splits[0].2[0].paths[0].vertices, vec![A, C, C, D]);
    assert_eq!(r.splits[0].2[1].paths[0].vertices, vec![A, B, B, D]);
    assert_eq!(r.splits[0].2[2].paths[1].vertices, vec![E, F, F, D, B, A]);
    assert_eq!(r.splits[0].1.kind, ConflictKind::Vertex { v: D });
    // The (6.5,7) child of n2 is dropped at insertion, not at pop.
    assert_eq!(st.pruned_on_insert, 1);
    assert_eq!(
        r.pops,
        vec![
            (0, "expand"),
            (2, "solution"),
            (4, "pruned"),
            (1, "expand"),
            (3, "solution"),
            (6, "pruned"),
            (7, "pruned")
        ]
    );
}

#[test]
fn fig1_n5_cost_is_dominated() {
    let r = run(&fig1(), SplitStrategy::Standard);
    let n5 = &r.splits[0].2[2];
    assert_eq!(n5.cost, cv(13, 14));
    let mut s: crate::pareto::NdSet<u64> = crate::pareto::NdSet::new();
    assert!(!dominated_by_solutions(&s, &n5.cost));
    s.insert(cv(13, 14), ());
    assert!(dominated_by_solutions(&s, &n5.cost));
    assert!(dominated_by_solutions(&s, &cv(16, 16)));
}

#[test]
fn fig1_cost_split() {
    let r = run(&fig1(), SplitStrategy::Cost);
    assert_eq!(r.outcome.stats.children, 5);
    let (n1, _, kids, _) = &r.splits[0];
    assert_eq!(n1.seq, 0);
    let a1: Vec<_> = kids.iter().filter(|k| k.origin.unwrap().0 == 0).collect();
    assert_eq!(a1.len(), 1);
    assert_eq!(a1[0].lb[0], cv(5, 6));
    assert_eq!(a1[0].paths[0].vertices, vec![A, C, C, D]);

    let (n2, _, kids, _) = r.splits.iter().find(|s| s.0.seq == 1).unwrap();
    assert_eq!(n2.lb[0], cv(6, 4));
    let mut lbs: Vec<_> = kids
        .iter()
        .filter(|k| k.origin.unwrap().0 == 0)
        .map(|k| k.lb[0].clone())
        .collect();
    lbs.sort();
    assert_eq!(lbs, vec![cv(6, 6), cv(8, 4)]);
    for k in kids.iter().filter(|k| k.origin.unwrap().0 == 0) {
        assert_eq!(n2.lb[0].comax(&k.paths[0].cost), k.lb[0]);
    }
}

#[test]
fn fig1_disjoint_split() {
    let r = run(&fig1(), SplitStrategy::Disjoint);
    assert_eq!(r.outcome.stats.children, 4);
    assert_eq!(r.outcome.stats.disjoint_discarded, 1);
    let (_, _, kids, discarded) = r.splits.iter().find(|s| s.0.seq == 1).unwrap();
    assert_eq!(*discarded, 1);
    let a1: Vec<_> = kids.iter().filter(|k| k.origin.unwrap().0 == 0).collect();
    assert_eq!(a1.len(), 1);
    assert_eq!(a1[0].lb[0], cv(8, 4));
    assert_eq!(a1[0].ub[0], vec![cv(8, 6)]);
    assert_eq!(a1[0].paths[0].vertices, vec![A, B, B, D]);
}

#[test]
fn split_functions_on_same_node() {
    let inst = fig1();
    let r = run(&inst, SplitStrategy::Standard);
    let mut low = LowLevel::new(&inst, true, true);
    for (node, conflict, kids, _) in &r.splits {
        let n: Vec<usize> = SplitStrategy::ALL
            .iter()
            .map(|&s| {
                split_node(&mut low, s, node, conflict, None)
                    .unwrap()
                    .children
                    .len()
            })
            .collect();
        assert_eq!(n[0], kids.len());
        assert!(n[2] <= n[1] && n[1] <= n[0], "{n:?}");
    }
}

#[test]
fn swap_conflicts_enabled_fig1() {
    // n3's paths swap B and D between t=2 and t=3. With swap conflicts on,
    // a1 can no longer go through B at all, but waiting is free in the
    // second objective, so the B branch spawns an endless chain of nodes
    // with second component 6 that (6.5,7) never dominates.
    let inst = fig1().with_edge_conflicts(true);
    for s in SplitStrategy::ALL {
        let o = Solver::new(&inst, SolveOptions::new(s).max_expansions(300)).solve();
        assert_eq!(o.status, SolveStatus::ExpansionLimit, "{s}");
        assert_eq!(o.costs(), vec![cv(13, 14)], "{s}");
    }
}

#[test]
fn limits() {
    let inst = fig1();
    let o = Solver::new(
        &inst,
        SolveOptions::new(SplitStrategy::Standard).max_expansions(1),
    )
    .solve();
    assert_eq!(o.status, SolveStatus::ExpansionLimit);
    assert!(o.solutions.is_empty());
    let o = Solver::new(
        &inst,
        SolveOptions::new(SplitStrategy::Cost).time_limit(std::time::Duration::ZERO),
    )
    .solve();
    assert_eq!(o.status, SolveStatus::Timeout);
}

#[test]
fn single_agent_returns_its_frontier() {
    let mut inst = fig1();
    inst.agents.truncate(1);
    let o = Solver::new(&inst, SolveOptions::new(SplitStrategy::Disjoint)).solve();
    assert_eq!(o.costs(), vec![cv(3, 6), cv(6, 4)]);
    assert_eq!(o.stats.splits, 0);
}

#[test]
fn unsolvable_flag() {
    let mut inst = fig1();
    // nothing leaves D except D->B, nothing enters E
    inst.agents[1].goal = E;
    inst.agents[1].start = D;
    let o = Solver::new(&inst, SolveOptions::new(SplitStrategy::Cost)).solve();
    assert!(o.unsolvable);
    assert_eq!(o.status, SolveStatus::Complete);
    assert!(o.solutions.is_empty());
}

#[test]
fn trace_records() {
    let inst = fig1();
    let mut lines = Vec::new();
    Solver::new(&inst, SolveOptions::new(SplitStrategy::Disjoint)).solve_observed(|e| {
        for r in TraceRecord::from_event(&e, SplitStrategy::Disjoint) {
            lines.push(serde_json::to_string(&r).unwrap());
        }
    });
    let recs: Vec<TraceRecord<u64>> = lines
        .iter()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(recs.iter().filter(|r| r.event == "child").count(), 4);
    assert_eq!(recs.iter().filter(|r| r.event == "solution").count(), 2);
    assert_eq!(recs.iter().filter(|r| r.event == "root").count(), 2);
    let split = recs.iter().find(|r| r.event == "split").unwrap();
    assert!(split.conflict.is_some() && split.ub.is_some());
    assert!(lines[0].contains("\"event\":\"root\""));
}
