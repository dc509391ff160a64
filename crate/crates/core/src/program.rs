//! Instruction emission, the physical time model and run metrics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arch::{Architecture, Point};
use crate::circuit::Gate;
use crate::compat::AtomId;
use crate::error::{Error, Result};
use crate::placer::Placement;
use crate::router::{RearrangementStep, Route};
use crate::schedule::{LayerKind, Schedule};

/// Gate durations added on top of rearrangement time. Both default to 0 so the
/// reported totals isolate rearrangement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TimingConfig {
    pub rydberg_pulse_us: f64,
    pub one_qubit_layer_us: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoveVector {
    pub atom: AtomId,
    pub from: Point,
    pub to: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instruction {
    OneQubitBatch { gates: Vec<Gate> },
    Pickup { atoms: Vec<AtomId> },
    Move { moves: Vec<MoveVector>, duration_us: f64 },
    Drop { atoms: Vec<AtomId> },
    RydbergPulse { pairs: Vec<(AtomId, AtomId)> },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Wall-clock time spent placing, in ms.
    pub placement_time_ms: f64,
    /// Wall-clock time spent routing, in ms.
    pub routing_time_ms: f64,
    pub rearrangement_steps: usize,
    /// Physical duration of all rearrangement steps, in ms.
    pub rearrangement_time_ms: f64,
    pub trap_transfers: usize,
    /// Rearrangement time plus configured gate durations, in ms.
    pub total_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Program {
    pub instructions: Vec<Instruction>,
    pub per_step_times_us: Vec<f64>,
    pub metrics: Metrics,
}

impl Program {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Travel time in seconds for a distance in µm under constant acceleration.
pub fn movement_time(d_um: f64, arch: &Architecture) -> Result<f64> {
    movement_time_with(d_um, arch.acceleration)
}

pub fn movement_time_with(d_um: f64, acceleration: f64) -> Result<f64> {
    if !(d_um >= 0.0) {
        return Err(Error::Contract(format!("negative travel distance {d_um}")));
    }
    Ok((d_um * 1e-6 / acceleration).sqrt())
}

/// Duration of one step in µs: all transfers plus one movement at the step's
/// longest distance.
pub fn step_time_us(step: &RearrangementStep, arch: &Architecture) -> f64 {
    step.transfers() as f64 * arch.trap_transfer_time_us
        + movement_time(step.max_dist, arch).expect("step distances are non-negative") * 1e6
}

/// Flattens schedule, placements and routes into one instruction stream.
///
/// `placements` alternate gate and intermediate placements after the initial one,
/// two per two-qubit layer; `routes[i]` leads from `placements[i]` to
/// `placements[i + 1]`.
pub fn emit(
    schedule: &Schedule,
    placements: &[Placement],
    routes: &[Route],
    arch: &Architecture,
    timing: &TimingConfig,
) -> Result<Program> {
    let layers_2q = schedule.two_qubit_layer_count();
    if placements.len() != 2 * layers_2q + 1 {
        return Err(Error::Contract(format!(
            "{} placements for {layers_2q} two-qubit layers",
            placements.len()
        )));
    }
    if let Some(missing) = (0..2 * layers_2q).find(|&i| i >= routes.len()) {
        return Err(Error::Coverage(missing));
    }

    let mut program = Program {
        instructions: Vec::new(),
        per_step_times_us: Vec::new(),
        metrics: Metrics::default(),
    };
    let mut gate_time_us = 0.0;
    let mut layer = 0;
    for l in &schedule.layers {
        match l.kind {
            LayerKind::OneQubit => {
                if !l.gates.is_empty() {
                    program.instructions.push(Instruction::OneQubitBatch { gates: l.gates.clone() });
                    gate_time_us += timing.one_qubit_layer_us;
                }
            }
            LayerKind::TwoQubit => {
                push_route(&mut program, &routes[2 * layer], arch);
                program.instructions.push(Instruction::RydbergPulse { pairs: l.pairs() });
                gate_time_us += timing.rydberg_pulse_us;
                push_route(&mut program, &routes[2 * layer + 1], arch);
                layer += 1;
            }
        }
    }
    let rearrangement_us: f64 = program.per_step_times_us.iter().sum();
    program.metrics.rearrangement_time_ms = rearrangement_us / 1e3;
    program.metrics.total_time_ms = (rearrangement_us + gate_time_us) / 1e3;
    Ok(program)
}

fn push_route(program: &mut Program, route: &Route, arch: &Architecture) {
    for step in &route.steps {
        let duration_us = movement_time(step.max_dist, arch).expect("step distances are non-negative") * 1e6;
        for batch in &step.pickup_batches {
            program.instructions.push(Instruction::Pickup { atoms: batch.clone() });
        }
        program.instructions.push(Instruction::Move {
            moves: step
                .movements
                .iter()
                .map(|m| MoveVector {
                    atom: m.atom,
                    from: m.from,
                    to: m.to,
                })
                .collect(),
            duration_us,
        });
        for batch in &step.drop_batches {
            program.instructions.push(Instruction::Drop { atoms: batch.clone() });
        }
        program.per_step_times_us.push(step_time_us(step, arch));
        program.metrics.rearrangement_steps += 1;
        program.metrics.trap_transfers += step.transfers();
    }
}

/// Atom positions after one instruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFrame {
    pub instruction: usize,
    pub kind: String,
    pub positions: BTreeMap<AtomId, Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub initial: BTreeMap<AtomId, Point>,
    pub frames: Vec<TraceFrame>,
}

/// Replays the instruction stream from the initial placement, recording every
/// atom's position after each instruction.
pub fn trace(program: &Program, initial: &Placement, arch: &Architecture) -> Result<Trace> {
    let start: BTreeMap<AtomId, Point> = initial.positions(arch).into_iter().enumerate().collect();
    let mut positions = start.clone();
    let mut frames = Vec::with_capacity(program.instructions.len());
    for (i, ins) in program.instructions.iter().enumerate() {
        let kind = match ins {
            Instruction::OneQubitBatch { .. } => "one_qubit_batch",
            Instruction::Pickup { .. } => "pickup",
            Instruction::Drop { .. } => "drop",
            Instruction::RydbergPulse { .. } => "rydberg_pulse",
            Instruction::Move { moves, .. } => {
                for m in moves {
                    let p = positions
                        .get_mut(&m.atom)
                        .ok_or_else(|| Error::Contract(format!("move of unknown atom {}", m.atom)))?;
                    if p.key() != m.from.key() {
                        return Err(Error::Contract(format!("atom {} is not at the move's origin", m.atom)));
                    }
                    *p = m.to;
                }
                "move"
            }
        };
        frames.push(TraceFrame {
            instruction: i,
            kind: kind.into(),
            positions: positions.clone(),
        });
    }
    Ok(Trace { initial: start, frames })
}
