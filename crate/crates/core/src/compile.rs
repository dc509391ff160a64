//! End-to-end compilation of one circuit.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arch::Architecture;
use crate::circuit::Circuit;
use crate::compat::AtomId;
use crate::error::{Error, Result};
use crate::placer::{self, LayerTarget, NextLayer, Placement, PlacerParams};
use crate::program::{emit, Metrics, Program, TimingConfig};
use crate::router::{route_transition, Route};
use crate::schedule::{analyze_reuse, schedule_asap, ReuseMarks, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacerKind {
    Aware,
    Baseline,
}

impl PlacerKind {
    pub fn name(self) -> &'static str {
        match self {
            PlacerKind::Aware => "aware",
            PlacerKind::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileOptions {
    pub placer: PlacerKind,
    pub params: PlacerParams,
    pub timing: TimingConfig,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            placer: PlacerKind::Aware,
            params: PlacerParams::default(),
            timing: TimingConfig::default(),
        }
    }
}

/// Movement groups of one transition as routed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionGroups {
    pub transition: usize,
    /// Atoms of each rearrangement step.
    pub groups: Vec<Vec<AtomId>>,
    /// Σ √max_dist over the steps.
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct Compilation {
    pub schedule: Schedule,
    pub reuse: ReuseMarks,
    /// Initial placement, then gate and intermediate placement per two-qubit layer.
    pub placements: Vec<Placement>,
    pub routes: Vec<Route>,
    pub program: Program,
    /// Layers where the search ran out of budget and returned its best result.
    pub budget_hits: usize,
}

impl Compilation {
    pub fn metrics(&self) -> &Metrics {
        &self.program.metrics
    }

    pub fn groups(&self) -> Vec<TransitionGroups> {
        self.routes
            .iter()
            .enumerate()
            .map(|(i, r)| TransitionGroups {
                transition: i,
                groups: r.steps.iter().map(|s| s.movements.iter().map(|m| m.atom).collect()).collect(),
                cost: r.steps.iter().map(|s| s.max_dist.sqrt()).sum(),
            })
            .collect()
    }
}

pub fn compile(circuit: &Circuit, arch: &Architecture, opts: &CompileOptions) -> Result<Compilation> {
    circuit.validate()?;
    opts.params.validate()?;
    let schedule = schedule_asap(circuit);
    let reuse = analyze_reuse(&schedule);
    compile_scheduled(schedule, reuse, arch, opts)
}

/// Compiles from an existing schedule and reuse analysis.
pub fn compile_scheduled(
    schedule: Schedule,
    reuse: ReuseMarks,
    arch: &Architecture,
    opts: &CompileOptions,
) -> Result<Compilation> {
    let pairs: Vec<Vec<(AtomId, AtomId)>> = schedule.two_qubit_layers().map(|l| l.pairs()).collect();
    let mut budget_hits = 0;

    let started = Instant::now();
    let mut placements = vec![placer::place_initial(schedule.num_qubits, arch)?];
    for (i, layer) in pairs.iter().enumerate() {
        let next = match pairs.get(i + 1) {
            Some(next_pairs) => NextLayer::new(next_pairs, reuse.after(i)),
            None => NextLayer::none(),
        };
        for target in [LayerTarget::Gates(layer), LayerTarget::Intermediate] {
            let prev = placements.last().expect("initial placement present");
            let placed = place(prev, target, &next, arch, opts, &mut budget_hits)?;
            placements.push(placed);
        }
    }
    let placement_time = started.elapsed();

    let started = Instant::now();
    let routes = placements
        .windows(2)
        .map(|w| route_transition(&w[0], &w[1], arch))
        .collect::<Result<Vec<_>>>()?;
    let routing_time = started.elapsed();

    let mut program = emit(&schedule, &placements, &routes, arch, &opts.timing)?;
    program.metrics.placement_time_ms = placement_time.as_secs_f64() * 1e3;
    program.metrics.routing_time_ms = routing_time.as_secs_f64() * 1e3;
    Ok(Compilation {
        schedule,
        reuse,
        placements,
        routes,
        program,
        budget_hits,
    })
}

fn place(
    prev: &Placement,
    target: LayerTarget<'_>,
    next: &NextLayer,
    arch: &Architecture,
    opts: &CompileOptions,
    budget_hits: &mut usize,
) -> Result<Placement> {
    let params = &opts.params;
    let placed = match (opts.placer, target) {
        (PlacerKind::Baseline, _) => return placer::place_baseline(prev, target, next, arch, params),
        (PlacerKind::Aware, LayerTarget::Gates(pairs)) => placer::place_gate_layer(prev, pairs, next, arch, params),
        (PlacerKind::Aware, LayerTarget::Intermediate) => placer::place_intermediate(prev, next, arch, params),
    };
    match placed {
        Err(Error::SearchBudget { best, .. }) => {
            *budget_hits += 1;
            match best {
                Some(best) => Ok(*best),
                None => placer::place_baseline(prev, target, next, arch, params),
            }
        }
        other => other,
    }
}
