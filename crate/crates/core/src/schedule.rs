//! ASAP layering into alternating single-qubit / CZ layers, and reuse analysis.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, Qubit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    OneQubit,
    TwoQubit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    pub kind: LayerKind,
    pub gates: Vec<Gate>,
}

impl Layer {
    pub fn qubits(&self) -> BTreeSet<Qubit> {
        self.gates.iter().flat_map(Gate::operands).collect()
    }

    /// CZ operand pairs of a two-qubit layer.
    pub fn pairs(&self) -> Vec<(Qubit, Qubit)> {
        self.gates
            .iter()
            .filter_map(|g| match *g {
                Gate::Cz(a, b) => Some((a, b)),
                Gate::OneQubit { .. } => None,
            })
            .collect()
    }
}

/// Layers alternate one-qubit / two-qubit, starting with a (possibly empty)
/// one-qubit layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub num_qubits: usize,
    pub layers: Vec<Layer>,
}

impl Schedule {
    pub fn two_qubit_layers(&self) -> impl Iterator<Item = &Layer> {
        self.layers.iter().filter(|l| l.kind == LayerKind::TwoQubit)
    }

    pub fn two_qubit_layer_count(&self) -> usize {
        self.two_qubit_layers().count()
    }

    pub fn max_gates_per_two_qubit_layer(&self) -> usize {
        self.two_qubit_layers().map(|l| l.gates.len()).max().unwrap_or(0)
    }
}

/// For each boundary between consecutive two-qubit layers `i` and `i + 1`
/// (indices counted over two-qubit layers only), the atoms acting in both.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReuseMarks {
    pub boundaries: Vec<BTreeSet<Qubit>>,
}

impl ReuseMarks {
    /// Marks between two-qubit layer `i` and `i + 1`; empty past the last layer.
    pub fn after(&self, i: usize) -> &BTreeSet<Qubit> {
        static EMPTY: BTreeSet<Qubit> = BTreeSet::new();
        self.boundaries.get(i).unwrap_or(&EMPTY)
    }
}

pub fn schedule_asap(circuit: &Circuit) -> Schedule {
    // Layer `2k` is the k-th one-qubit layer, `2k + 1` the k-th two-qubit layer.
    // `front[q]` is the index of the last layer holding a gate on `q`.
    let mut front: Vec<Option<usize>> = vec![None; circuit.num_qubits];
    let mut layers: Vec<Layer> = Vec::new();
    for gate in &circuit.gates {
        let target = match *gate {
            Gate::OneQubit { qubit, .. } => match front[qubit] {
                None => 0,
                Some(f) => f + f % 2,
            },
            Gate::Cz(a, b) => match front[a].max(front[b]) {
                None => 1,
                Some(f) => f + 1 + f % 2,
            },
        };
        while layers.len() <= target {
            let kind = if layers.len().is_multiple_of(2) {
                LayerKind::OneQubit
            } else {
                LayerKind::TwoQubit
            };
            layers.push(Layer {
                kind,
                gates: Vec::new(),
            });
        }
        for q in gate.operands() {
            front[q] = Some(target);
        }
        layers[target].gates.push(gate.clone());
    }
    Schedule {
        num_qubits: circuit.num_qubits,
        layers,
    }
}

pub fn analyze_reuse(schedule: &Schedule) -> ReuseMarks {
    let qubits: Vec<BTreeSet<Qubit>> = schedule.two_qubit_layers().map(Layer::qubits).collect();
    ReuseMarks {
        boundaries: qubits
            .windows(2)
            .map(|w| w[0].intersection(&w[1]).copied().collect())
            .collect(),
    }
}
