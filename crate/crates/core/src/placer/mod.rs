//! Layer-by-layer atom placement.
//!
//! The routing-aware placer runs an A* search per layer whose cost is the
//! routing proxy of the movements it implies (see [`compat`](crate::compat)),
//! plus look-ahead terms for the next layer. Gate placements are built gate by
//! gate, intermediate placements atom by atom. A distance-greedy baseline that
//! ignores movement compatibility is provided for comparison.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::arch::{Architecture, Point, TrapAddress, Window, ZoneKind};
use crate::compat::{AtomId, GroupSet};
use crate::error::{Error, Result};

mod baseline;
pub mod cost;
mod problem;
mod search;

pub use baseline::{place_baseline, place_baseline_gate_layer, place_baseline_intermediate, LayerTarget};
pub use search::{place_gate_layer, place_intermediate, search_gate_layer, search_intermediate, SearchStats};

pub const DEFAULT_MAX_NODES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacerParams {
    /// Weight of the look-ahead terms.
    pub alpha: f64,
    /// Constant added to the deviation sum of the accelerating heuristic.
    pub beta: f64,
    /// Bonus subtracted from the look-ahead of a reused atom.
    pub gamma: f64,
    /// Weight of the accelerating heuristic.
    pub delta: f64,
    /// Candidate window; `None` uses the architecture default.
    pub window: Option<Window>,
    /// Node expansions per layer before the search gives up.
    pub max_nodes: usize,
}

impl PlacerParams {
    /// Tuned for small and medium circuits.
    pub fn qasmbench() -> Self {
        Self {
            alpha: 0.2,
            beta: 0.2,
            gamma: 5.0,
            delta: 0.6,
            window: None,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }

    /// Tuned for large circuits.
    pub fn large() -> Self {
        Self {
            beta: 0.8,
            delta: 0.9,
            ..Self::qasmbench()
        }
    }

    pub fn profile(name: &str) -> Option<Self> {
        match name {
            "qasmbench" => Some(Self::qasmbench()),
            "large" => Some(Self::large()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::validation(name, "must be a non-negative number"));
            }
        }
        if matches!(self.window, Some(w) if w.rows == 0 || w.cols == 0) {
            return Err(Error::validation("window", "extents must be at least 1"));
        }
        if self.max_nodes == 0 {
            return Err(Error::validation("max_nodes", "must be at least 1"));
        }
        Ok(())
    }

    pub fn window_for(&self, arch: &Architecture) -> Window {
        self.window.unwrap_or(arch.window)
    }
}

impl Default for PlacerParams {
    fn default() -> Self {
        Self::qasmbench()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementKind {
    Initial,
    Gate,
    Intermediate,
}

/// Location of every atom at one point of the computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub kind: PlacementKind,
    /// Trap of atom `i` at index `i`.
    pub assignment: Vec<TrapAddress>,
    /// Atoms kept in the entanglement zone across a layer boundary.
    pub reused: BTreeSet<AtomId>,
    /// Order in which the placer grouped the movements leading here.
    #[serde(default)]
    pub move_order: Vec<AtomId>,
}

impl Placement {
    pub fn atom_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn trap(&self, atom: AtomId) -> TrapAddress {
        self.assignment[atom]
    }

    pub fn position(&self, arch: &Architecture, atom: AtomId) -> Point {
        arch.position(self.assignment[atom])
    }

    pub fn positions(&self, arch: &Architecture) -> Vec<Point> {
        self.assignment.iter().map(|&t| arch.position(t)).collect()
    }

    /// Atom at each occupied trap.
    pub fn occupancy(&self) -> HashMap<TrapAddress, AtomId> {
        self.assignment.iter().enumerate().map(|(a, &t)| (t, a)).collect()
    }

    pub fn atoms_in(&self, arch: &Architecture, kind: ZoneKind) -> Vec<AtomId> {
        (0..self.assignment.len())
            .filter(|&a| arch.zone(self.assignment[a].zone).kind == kind)
            .collect()
    }

    /// Checks validity of every address and that no two atoms share a trap.
    pub fn check_injective(&self, arch: &Architecture) -> Result<()> {
        let mut seen = HashMap::new();
        for (atom, &t) in self.assignment.iter().enumerate() {
            arch.validate(t)?;
            if let Some(other) = seen.insert(t, atom) {
                return Err(Error::Contract(format!("atoms {other} and {atom} share trap {t}")));
            }
        }
        Ok(())
    }

    /// Structural invariant of a gate placement for the given CZ pairs.
    pub fn check_gate(&self, arch: &Architecture, pairs: &[(AtomId, AtomId)]) -> Result<()> {
        self.check_injective(arch)?;
        let mut in_gate = BTreeSet::new();
        for &(a, b) in pairs {
            let (ta, tb) = (self.assignment[a], self.assignment[b]);
            if arch.zone(ta.zone).kind != ZoneKind::Entanglement || ta.pair_partner() != Some(tb) {
                return Err(Error::Contract(format!("gate ({a}, {b}) is not on one trap pair")));
            }
            in_gate.insert(a);
            in_gate.insert(b);
        }
        for atom in self.atoms_in(arch, ZoneKind::Entanglement) {
            if !in_gate.contains(&atom) {
                return Err(Error::Contract(format!("idle atom {atom} left in the entanglement zone")));
            }
        }
        Ok(())
    }

    /// Structural invariant of an intermediate placement.
    pub fn check_intermediate(&self, arch: &Architecture) -> Result<()> {
        self.check_injective(arch)?;
        for atom in self.atoms_in(arch, ZoneKind::Entanglement) {
            if !self.reused.contains(&atom) {
                return Err(Error::Contract(format!(
                    "atom {atom} is in the entanglement zone but not reused"
                )));
            }
        }
        Ok(())
    }
}

/// Interactions of the following two-qubit layer, seen from the current one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NextLayer {
    /// Next-layer interaction partner of each atom acting in it.
    pub partner: HashMap<AtomId, AtomId>,
    /// Atoms acting in both the current and the next layer.
    pub marks: BTreeSet<AtomId>,
}

impl NextLayer {
    pub fn new(next_pairs: &[(AtomId, AtomId)], marks: &BTreeSet<AtomId>) -> Self {
        let mut partner = HashMap::new();
        for &(a, b) in next_pairs {
            partner.insert(a, b);
            partner.insert(b, a);
        }
        Self {
            partner,
            marks: marks.clone(),
        }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_marked(&self, atom: AtomId) -> bool {
        self.marks.contains(&atom)
    }

    pub fn partner_of(&self, atom: AtomId) -> Option<AtomId> {
        self.partner.get(&atom).copied()
    }
}

/// A (partial) placement as seen by the search: placed atoms, the movement
/// groups they imply, and the look-ahead terms collected so far.
#[derive(Debug, Clone, Default)]
pub struct SearchNode {
    pub partial: BTreeMap<AtomId, TrapAddress>,
    pub groups: GroupSet,
    /// Σ cost_r over placed reused atoms (γ bonus included).
    pub reuse_cost: f64,
    /// Σ cost_l over placed gates/atoms, unweighted.
    pub lookahead_cost: f64,
    /// Number of placed gates or atoms.
    pub depth: usize,
}

impl SearchNode {
    pub fn total_cost(&self, params: &PlacerParams) -> f64 {
        cost::total_cost(self.groups.cost(), self.reuse_cost, self.lookahead_cost, params.alpha)
    }
}

/// Cost terms of `target` as the placer scores it when reached from `prev`.
pub fn layer_cost(
    prev: &Placement,
    target: &Placement,
    layer: LayerTarget<'_>,
    next: &NextLayer,
    arch: &Architecture,
    params: &PlacerParams,
) -> Result<SearchNode> {
    let problem = match layer {
        LayerTarget::Gates(pairs) => problem::Problem::for_gate_layer(arch, prev, pairs, next, params)?,
        LayerTarget::Intermediate => problem::Problem::for_intermediate(arch, prev, next, params)?,
    };
    let options = problem.options_for(target)?;
    Ok(problem.evaluate(options.iter()))
}

/// Initial placement: atoms fill storage traps row by row, starting with the rows
/// closest to an entanglement zone, columns ascending.
pub fn place_initial(atom_count: usize, arch: &Architecture) -> Result<Placement> {
    let capacity = arch.storage_capacity();
    if atom_count > capacity {
        return Err(Error::Capacity {
            zone: "storage".into(),
            message: format!("{atom_count} atoms exceed {capacity} storage traps"),
        });
    }
    let gap = |y: f64| -> f64 {
        arch.zones_of(ZoneKind::Entanglement)
            .map(|e| {
                let z = arch.zone(e);
                let (lo, hi) = (z.origin.y, z.origin.y + f64::from(z.rows - 1) * z.row_pitch);
                (lo - y).max(y - hi).max(0.0)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut rows: Vec<(f64, usize, u32)> = arch
        .zones_of(ZoneKind::Storage)
        .flat_map(|z| (0..arch.zone(z).rows).map(move |r| (z, r)))
        .map(|(z, r)| (gap(arch.zone(z).site_center(r, 0).y), z, r))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let assignment = rows
        .into_iter()
        .flat_map(|(_, z, r)| {
            (0..arch.zone(z).cols).map(move |c| TrapAddress::new(z, r, c, crate::arch::Slot::Single))
        })
        .take(atom_count)
        .collect();
    Ok(Placement {
        kind: PlacementKind::Initial,
        assignment,
        reused: BTreeSet::new(),
        move_order: Vec::new(),
    })
}
