//! Best-first search over partial placements.
//!
//! Nodes live in an arena and store only their parent, the option taken and the
//! scores; a popped node's state is rebuilt by replaying its path. Used traps and
//! reused atoms are tracked with generation stamps so nothing is cleared between
//! expansions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::arch::Architecture;
use crate::compat::{AtomId, GroupSet};
use crate::error::{Error, Result};

use super::baseline;
use super::cost::heuristic_accelerating;
use super::problem::{apply, Opt, Problem};
use super::{NextLayer, Placement, PlacementKind, PlacerParams};

/// Counters of one layer search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expanded: usize,
    pub generated: usize,
    /// The distance-greedy placement was at least as cheap as anything found.
    pub used_baseline: bool,
}

const ROOT: u32 = u32::MAX;

struct Node {
    parent: u32,
    option: u32,
}

#[derive(PartialEq)]
struct Entry {
    f: f64,
    depth: u32,
    seq: u64,
    node: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    // BinaryHeap is a max-heap: the "greatest" entry has the smallest f, then the
    // largest depth, then the smallest sequence number.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Stamps {
    trap: Vec<u32>,
    reused: Vec<u32>,
    generation: u32,
}

impl Stamps {
    fn next(&mut self) {
        self.generation += 1;
    }
}

/// Gate placement for the CZ `pairs` of one layer, starting from `prev`.
pub fn place_gate_layer(
    prev: &Placement,
    pairs: &[(AtomId, AtomId)],
    next: &NextLayer,
    arch: &Architecture,
    params: &PlacerParams,
) -> Result<Placement> {
    search_gate_layer(prev, pairs, next, arch, params).map(|(p, _)| p)
}

/// Intermediate placement after the gate placement `prev`.
pub fn place_intermediate(
    prev: &Placement,
    next: &NextLayer,
    arch: &Architecture,
    params: &PlacerParams,
) -> Result<Placement> {
    search_intermediate(prev, next, arch, params).map(|(p, _)| p)
}

pub fn search_gate_layer(
    prev: &Placement,
    pairs: &[(AtomId, AtomId)],
    next: &NextLayer,
    arch: &Architecture,
    params: &PlacerParams,
) -> Result<(Placement, SearchStats)> {
    let problem = Problem::for_gate_layer(arch, prev, pairs, next, params)?;
    let seed = baseline::gate_choices(&problem).ok();
    run(&problem, seed)
}

pub fn search_intermediate(
    prev: &Placement,
    next: &NextLayer,
    arch: &Architecture,
    params: &PlacerParams,
) -> Result<(Placement, SearchStats)> {
    let problem = Problem::for_intermediate(arch, prev, next, params)?;
    let seed = baseline::intermediate_choices(&problem).ok();
    run(&problem, seed)
}

fn feasible(stamps: &Stamps, opt: &Opt) -> bool {
    opt.traps.iter().all(|&t| stamps.trap[t] != stamps.generation)
        && opt.conflicts.iter().all(|&a| stamps.reused[a] != stamps.generation)
}

/// Runs the search; `seed` is a complete alternative (one option per item, in
/// item order) that the result must not be worse than.
fn run(problem: &Problem, seed: Option<Vec<Opt>>) -> Result<(Placement, SearchStats)> {
    let params = &problem.params;
    let items = &problem.items;
    let n = items.len();
    let mut stats = SearchStats::default();
    if n == 0 {
        return Ok((problem.unchanged(), stats));
    }

    // suffix sums of the per-item mean look-ahead
    let mut mean_suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        mean_suffix[i] = mean_suffix[i + 1] + items[i].mean_extra;
    }
    // items are sorted by descending d_min, so the largest unplaced d_min is the next item's
    let heuristic = |groups: &GroupSet, depth: usize| -> f64 {
        if depth == n {
            return 0.0;
        }
        let h = (items[depth].d_min.sqrt() - groups.max_sqrt_d_max()).max(0.0);
        heuristic_accelerating(h, groups.sd_sum(problem.scale), n - depth, params) + mean_suffix[depth]
    };

    // options only ever name traps that are free in `prev`
    let mut stamps = Stamps {
        trap: vec![0; problem.occupied.len()],
        reused: vec![0; problem.prev.atom_count()],
        generation: 0,
    };

    let mut arena: Vec<Node> = Vec::new();
    let mut frontier = BinaryHeap::new();
    let mut seq = 0u64;
    frontier.push(Entry {
        f: heuristic(&GroupSet::new(), 0),
        depth: 0,
        seq,
        node: ROOT,
    });
    let mut best_goal: Option<(f64, u32)> = None;
    let mut path: Vec<u32> = Vec::with_capacity(n);
    let mut exhausted = false;

    while let Some(entry) = frontier.pop() {
        let depth = entry.depth as usize;
        if depth == n {
            break;
        }
        if stats.expanded >= params.max_nodes {
            exhausted = true;
            break;
        }
        stats.expanded += 1;

        // rebuild the node's state
        stamps.next();
        path.clear();
        let mut cur = entry.node;
        while cur != ROOT {
            path.push(cur);
            cur = arena[cur as usize].parent;
        }
        let mut groups = GroupSet::new();
        let mut extra = 0.0;
        for (d, &id) in path.iter().rev().enumerate() {
            let opt = &items[d].options[arena[id as usize].option as usize];
            apply(&mut groups, opt);
            extra += opt.extra(params.alpha);
            mark(&mut stamps, opt);
        }

        for (oi, opt) in items[depth].options.iter().enumerate() {
            if !feasible(&stamps, opt) {
                continue;
            }
            let mut child = groups.clone();
            apply(&mut child, opt);
            let g = child.cost() + extra + opt.extra(params.alpha);
            let f = g + heuristic(&child, depth + 1);
            arena.push(Node {
                parent: entry.node,
                option: oi as u32,
            });
            let id = (arena.len() - 1) as u32;
            stats.generated += 1;
            if depth + 1 == n && best_goal.is_none_or(|(bg, _)| g < bg) {
                best_goal = Some((g, id));
            }
            seq += 1;
            frontier.push(Entry {
                f,
                depth: depth as u32 + 1,
                seq,
                node: id,
            });
        }
    }

    let found = best_goal.map(|(g, id)| {
        let mut chosen = Vec::with_capacity(n);
        let mut cur = id;
        while cur != ROOT {
            let node = &arena[cur as usize];
            chosen.push(node.option);
            cur = node.parent;
        }
        chosen.reverse();
        (g, chosen)
    });
    let seed_cost = seed.as_ref().map(|s| problem.evaluate(s.iter()).total_cost(params));
    let seed_wins = match (&found, seed_cost) {
        (Some((g, _)), Some(s)) => s < g - 1e-9,
        (None, Some(_)) => true,
        _ => false,
    };
    let placement = if seed_wins {
        stats.used_baseline = true;
        problem.placement(seed.iter().flatten())
    } else if let Some((_, chosen)) = found {
        problem.placement(chosen.iter().enumerate().map(|(d, &o)| &items[d].options[o as usize]))
    } else {
        return Err(if exhausted {
            Error::SearchBudget {
                max_nodes: params.max_nodes,
                best: None,
            }
        } else {
            Error::Capacity {
                zone: match problem.kind {
                    PlacementKind::Intermediate => "storage".into(),
                    _ => "entanglement".into(),
                },
                message: "no complete placement within the candidate windows".into(),
            }
        });
    };
    if exhausted {
        return Err(Error::SearchBudget {
            max_nodes: params.max_nodes,
            best: Some(Box::new(placement)),
        });
    }
    Ok((placement, stats))
}

fn mark(stamps: &mut Stamps, opt: &Opt) {
    let generation = stamps.generation;
    for &t in &opt.traps {
        stamps.trap[t] = generation;
    }
    if let Some(a) = opt.reuse {
        stamps.reused[a] = generation;
    }
}
