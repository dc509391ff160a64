//! One layer's placement problem: the items to place, their options, and the
//! geometry needed to turn options into movements.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::arch::{Architecture, Point, Slot, TrapAddress, ZoneId, ZoneKind};
use crate::compat::{discretize, AtomId, GroupSet, Movement};
use crate::error::{Error, Result};

use super::cost::{lookahead_cost_atom, AtomOption};
use super::{NextLayer, Placement, PlacementKind, PlacerParams, SearchNode};

/// One way of placing an item.
#[derive(Debug, Clone)]
pub(crate) struct Opt {
    pub targets: Vec<(AtomId, TrapAddress)>,
    /// Dense indices of the traps the option takes.
    pub traps: Vec<usize>,
    pub movements: Vec<Movement>,
    pub max_dist: f64,
    /// Reuse term, unweighted.
    pub reuse_cost: f64,
    /// Look-ahead term, not yet weighted by α.
    pub lookahead: f64,
    /// Atom kept in the entanglement zone by this option.
    pub reuse: Option<AtomId>,
    /// The option is infeasible once any of these atoms is reused.
    pub conflicts: Vec<AtomId>,
}

impl Opt {
    pub fn extra(&self, alpha: f64) -> f64 {
        self.reuse_cost + alpha * self.lookahead
    }
}

/// A gate (gate placement) or an atom (intermediate placement).
#[derive(Debug, Clone)]
pub(crate) struct Item {
    /// Gate index in the layer, or atom id.
    pub label: usize,
    pub atoms: Vec<AtomId>,
    pub options: Vec<Opt>,
    /// Smallest travel distance any option forces on the item's farthest atom.
    pub d_min: f64,
    /// Mean of the options' weighted look-ahead terms.
    pub mean_extra: f64,
}

/// Target-side coordinates of traps: zone-local grid coordinates when a single
/// zone is targeted, dense ranks of physical coordinates otherwise.
#[derive(Debug, Clone)]
struct TargetFrame {
    single: bool,
    ys: BTreeMap<i64, i64>,
    xs: BTreeMap<i64, i64>,
}

impl TargetFrame {
    fn new(arch: &Architecture, zones: &[ZoneId]) -> Self {
        let single = zones.len() == 1;
        let mut ys = BTreeMap::new();
        let mut xs = BTreeMap::new();
        if !single {
            for &z in zones {
                for t in arch.traps(z) {
                    let k = arch.position(t).key();
                    ys.insert(k.1, 0);
                    xs.insert(k.0, 0);
                }
            }
            for (i, v) in ys.values_mut().enumerate() {
                *v = i as i64;
            }
            for (i, v) in xs.values_mut().enumerate() {
                *v = i as i64;
            }
        }
        Self { single, ys, xs }
    }

    fn coords(&self, arch: &Architecture, t: TrapAddress) -> (i64, i64) {
        if self.single {
            arch.grid_coords(t)
        } else {
            let k = arch.position(t).key();
            (self.ys[&k.1], self.xs[&k.0])
        }
    }
}

pub(crate) struct Problem<'a> {
    pub arch: &'a Architecture,
    pub prev: &'a Placement,
    pub next: &'a NextLayer,
    pub params: PlacerParams,
    pub kind: PlacementKind,
    /// Items in processing order.
    pub items: Vec<Item>,
    /// Reused atoms carried over unchanged (gate placement only).
    pub kept: BTreeSet<AtomId>,
    /// Trap occupancy of `prev` by dense trap index.
    pub occupied: Vec<bool>,
    pub scale: (f64, f64),
    disc: HashMap<AtomId, (u32, u32)>,
    frame: TargetFrame,
}

impl<'a> Problem<'a> {
    pub fn for_gate_layer(
        arch: &'a Architecture,
        prev: &'a Placement,
        pairs: &[(AtomId, AtomId)],
        next: &'a NextLayer,
        params: &PlacerParams,
    ) -> Result<Self> {
        params.validate()?;
        check_atoms(prev, pairs.iter().flat_map(|&(a, b)| [a, b]))?;
        let in_ent = |a: AtomId| arch.zone(prev.trap(a).zone).kind == ZoneKind::Entanglement;
        let mut in_layer = BTreeSet::new();
        for &(a, b) in pairs {
            if a == b || !in_layer.insert(a) || !in_layer.insert(b) {
                return Err(Error::Contract(format!("gate ({a}, {b}) shares an atom with another gate")));
            }
        }
        for atom in prev.atoms_in(arch, ZoneKind::Entanglement) {
            if !in_layer.contains(&atom) {
                return Err(Error::Contract(format!(
                    "atom {atom} is in the entanglement zone but takes no part in the layer"
                )));
            }
        }

        let mut problem = Self::empty(arch, prev, next, params, PlacementKind::Gate, ZoneKind::Entanglement);
        let mut movers = Vec::new();
        // (label, atoms, forced option target) per item
        let mut pending: Vec<(usize, [AtomId; 2], Option<(AtomId, TrapAddress)>)> = Vec::new();
        for (gi, &(a, b)) in pairs.iter().enumerate() {
            match (in_ent(a), in_ent(b)) {
                (true, true) => {
                    if prev.trap(a).pair_partner() != Some(prev.trap(b)) {
                        return Err(Error::Contract(format!(
                            "reused atoms {a} and {b} of gate {gi} sit at different sites"
                        )));
                    }
                    problem.kept.extend([a, b]);
                }
                (true, false) | (false, true) => {
                    let (stay, mover) = if in_ent(a) { (a, b) } else { (b, a) };
                    let target = prev.trap(stay).pair_partner().ok_or_else(|| {
                        Error::Contract(format!("reused atom {stay} is not on a trap pair"))
                    })?;
                    if problem.occupied[arch.trap_index(target)] {
                        return Err(Error::Contract(format!(
                            "trap {target} next to reused atom {stay} is occupied"
                        )));
                    }
                    problem.kept.insert(stay);
                    movers.push(mover);
                    pending.push((gi, [stay, mover], Some((mover, target))));
                }
                (false, false) => {
                    movers.extend([a, b]);
                    pending.push((gi, [a, b], None));
                }
            }
        }
        problem.set_sources(&movers);

        let free_items = pending.iter().filter(|p| p.2.is_none()).count();
        let window = params.window_for(arch);
        let ent_zones: Vec<ZoneId> = arch.zones_of(ZoneKind::Entanglement).collect();
        for (label, [a, b], forced) in pending {
            let options = match forced {
                Some((mover, target)) => vec![problem.gate_option(a, b, [(mover, target)])],
                None => {
                    let (pa, pb) = (prev.position(arch, a), prev.position(arch, b));
                    let around = pa.midpoint(pb);
                    let mut sites = Vec::new();
                    for &z in &ent_zones {
                        let occupied = &problem.occupied;
                        let zone = arch.zone(z);
                        let found = arch.candidate_sites(z, around, window, free_items, |r, c| {
                            [Slot::PairLeft, Slot::PairRight]
                                .iter()
                                .all(|&s| !occupied[arch.trap_index(TrapAddress::new(z, r, c, s))])
                        });
                        match found {
                            Ok(found) => sites.extend(
                                found
                                    .into_iter()
                                    .map(|(r, c)| (zone.site_center(r, c).distance(around), z, r, c)),
                            ),
                            Err(Error::Capacity { .. }) => {}
                            Err(e) => return Err(e),
                        }
                    }
                    if sites.is_empty() {
                        return Err(Error::Capacity {
                            zone: "entanglement".into(),
                            message: format!("no free trap pair for gate {label}"),
                        });
                    }
                    sites.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2, x.3).cmp(&(y.1, y.2, y.3))));
                    let mut options = Vec::with_capacity(2 * sites.len());
                    for (_, z, r, c) in sites {
                        let left = TrapAddress::new(z, r, c, Slot::PairLeft);
                        let right = TrapAddress::new(z, r, c, Slot::PairRight);
                        options.push(problem.gate_option(a, b, [(a, left), (b, right)]));
                        options.push(problem.gate_option(a, b, [(a, right), (b, left)]));
                    }
                    options
                }
            };
            problem.push_item(label, vec![a, b], options);
        }
        problem.finish();
        Ok(problem)
    }

    pub fn for_intermediate(
        arch: &'a Architecture,
        prev: &'a Placement,
        next: &'a NextLayer,
        params: &PlacerParams,
    ) -> Result<Self> {
        params.validate()?;
        check_atoms(prev, std::iter::empty())?;
        let mut problem = Self::empty(arch, prev, next, params, PlacementKind::Intermediate, ZoneKind::Storage);
        let atoms = prev.atoms_in(arch, ZoneKind::Entanglement);
        problem.set_sources(&atoms);
        let window = params.window_for(arch);
        let storage: Vec<ZoneId> = arch.zones_of(ZoneKind::Storage).collect();
        for &atom in &atoms {
            let here = prev.position(arch, atom);
            let mut traps = Vec::new();
            for &z in &storage {
                let occupied = &problem.occupied;
                let found = arch.candidate_sites(z, here, window, atoms.len(), |r, c| {
                    !occupied[arch.trap_index(TrapAddress::new(z, r, c, Slot::Single))]
                });
                match found {
                    Ok(found) => traps.extend(found.into_iter().map(|(r, c)| {
                        let t = TrapAddress::new(z, r, c, Slot::Single);
                        (arch.position(t).distance(here), t)
                    })),
                    Err(Error::Capacity { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            traps.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            let mut options: Vec<Opt> = traps.into_iter().map(|(_, t)| problem.storage_option(atom, t)).collect();
            if let Some(reuse) = problem.reuse_option(atom) {
                options.push(reuse);
            }
            if options.is_empty() {
                return Err(Error::Capacity {
                    zone: "storage".into(),
                    message: format!("no free storage trap for atom {atom}"),
                });
            }
            problem.push_item(atom, vec![atom], options);
        }
        problem.finish();
        Ok(problem)
    }

    fn empty(
        arch: &'a Architecture,
        prev: &'a Placement,
        next: &'a NextLayer,
        params: &PlacerParams,
        kind: PlacementKind,
        target: ZoneKind,
    ) -> Self {
        let mut occupied = vec![false; arch.trap_count()];
        for &t in &prev.assignment {
            occupied[arch.trap_index(t)] = true;
        }
        let zones: Vec<ZoneId> = arch.zones_of(target).collect();
        Self {
            arch,
            prev,
            next,
            params: *params,
            kind,
            items: Vec::new(),
            kept: BTreeSet::new(),
            occupied,
            scale: (1.0, 1.0),
            disc: HashMap::new(),
            frame: TargetFrame::new(arch, &zones),
        }
    }

    fn set_sources(&mut self, movers: &[AtomId]) {
        let pts: Vec<(AtomId, Point)> = movers.iter().map(|&a| (a, self.prev.position(self.arch, a))).collect();
        self.disc = discretize(&pts);
    }

    fn push_item(&mut self, label: usize, atoms: Vec<AtomId>, options: Vec<Opt>) {
        let d_min = options.iter().map(|o| o.max_dist).fold(f64::INFINITY, f64::min);
        let alpha = self.params.alpha;
        let mean_extra = options.iter().map(|o| o.extra(alpha)).sum::<f64>() / options.len() as f64;
        self.items.push(Item {
            label,
            atoms,
            options,
            d_min,
            mean_extra,
        });
    }

    /// Orders items hardest first and fixes the scale factors.
    fn finish(&mut self) {
        self.items
            .sort_by(|x, y| y.d_min.total_cmp(&x.d_min).then(x.label.cmp(&y.label)));

        let src_rows: BTreeSet<u32> = self.disc.values().map(|s| s.0).collect();
        let src_cols: BTreeSet<u32> = self.disc.values().map(|s| s.1).collect();
        let mut lo = (i64::MAX, i64::MAX);
        let mut hi = (i64::MIN, i64::MIN);
        for m in self.items.iter().flat_map(|i| &i.options).flat_map(|o| &o.movements) {
            lo = (lo.0.min(m.dst.0), lo.1.min(m.dst.1));
            hi = (hi.0.max(m.dst.0), hi.1.max(m.dst.1));
        }
        if lo.0 <= hi.0 {
            self.scale = (
                (hi.0 - lo.0 + 1) as f64 / src_rows.len().max(1) as f64,
                (hi.1 - lo.1 + 1) as f64 / src_cols.len().max(1) as f64,
            );
        }
    }

    fn movement(&self, atom: AtomId, target: TrapAddress) -> Movement {
        let from = self.prev.position(self.arch, atom);
        Movement {
            atom,
            src: self.disc[&atom],
            dst: self.frame.coords(self.arch, target),
            dist: from.distance(self.arch.position(target)),
        }
    }

    fn build(&self, targets: Vec<(AtomId, TrapAddress)>) -> Opt {
        let movements: Vec<Movement> = targets
            .iter()
            .filter(|&&(a, t)| self.prev.trap(a) != t)
            .map(|&(a, t)| self.movement(a, t))
            .collect();
        Opt {
            traps: targets.iter().map(|&(_, t)| self.arch.trap_index(t)).collect(),
            max_dist: movements.iter().map(|m| m.dist).fold(0.0, f64::max),
            movements,
            targets,
            reuse_cost: 0.0,
            lookahead: 0.0,
            reuse: None,
            conflicts: Vec::new(),
        }
    }

    /// Option placing gate `(a, b)`; `moves` lists the atoms that travel.
    pub fn gate_option<const N: usize>(&self, a: AtomId, b: AtomId, moves: [(AtomId, TrapAddress); N]) -> Opt {
        let mut opt = self.build(moves.to_vec());
        let final_trap = |x: AtomId| {
            moves
                .iter()
                .find(|&&(m, _)| m == x)
                .map_or(self.prev.trap(x), |&(_, t)| t)
        };
        for (x, other) in [(a, b), (b, a)] {
            if !self.next.is_marked(x) {
                continue;
            }
            let Some(y) = self.next.partner_of(x) else { continue };
            if y == other {
                continue;
            }
            let adjacent = self.arch.position(final_trap(other));
            opt.lookahead += self.prev.position(self.arch, y).distance(adjacent).sqrt();
        }
        opt
    }

    pub fn storage_option(&self, atom: AtomId, trap: TrapAddress) -> Opt {
        let mut opt = self.build(vec![(atom, trap)]);
        let partner = self.partner_position(atom);
        opt.lookahead = lookahead_cost_atom(AtomOption::Storage(self.arch.position(trap)), partner, true, 0.0)
            .unwrap_or(0.0);
        opt
    }

    /// Keeping `atom` in place; `None` unless it is reuse-marked.
    pub fn reuse_option(&self, atom: AtomId) -> Option<Opt> {
        let here = self.prev.trap(atom);
        let adjacent = self.arch.position(here.pair_partner()?);
        let partner = self.next.partner_of(atom)?;
        let reuse_cost = lookahead_cost_atom(
            AtomOption::Reuse { adjacent },
            self.partner_position(atom),
            self.next.is_marked(atom),
            self.params.gamma,
        )?;
        let mut conflicts = Vec::new();
        let occupancy = self.prev.occupancy();
        if let Some(&mate) = occupancy.get(&here.pair_partner()?) {
            if mate != partner {
                conflicts.push(mate);
            }
        }
        let partner_trap = self.prev.trap(partner);
        if self.arch.zone(partner_trap.zone).kind == ZoneKind::Entanglement && partner_trap.site() != here.site() {
            conflicts.push(partner);
        }
        let mut opt = self.build(vec![]);
        opt.targets = vec![(atom, here)];
        opt.reuse_cost = reuse_cost;
        opt.reuse = Some(atom);
        opt.conflicts = conflicts;
        Some(opt)
    }

    fn partner_position(&self, atom: AtomId) -> Option<Point> {
        self.next
            .partner_of(atom)
            .filter(|_| self.next.is_marked(atom))
            .map(|p| self.prev.position(self.arch, p))
    }

    /// Full cost of one option per item, in processing order.
    pub fn evaluate<'o>(&self, chosen: impl IntoIterator<Item = &'o Opt>) -> SearchNode {
        let mut node = SearchNode::default();
        for opt in chosen {
            apply(&mut node.groups, opt);
            node.reuse_cost += opt.reuse_cost;
            node.lookahead_cost += opt.lookahead;
            node.partial.extend(opt.targets.iter().copied());
            node.depth += 1;
        }
        node
    }

    /// Placement with one option per item applied on top of `prev`.
    pub fn placement<'o>(&self, chosen: impl IntoIterator<Item = &'o Opt>) -> Placement {
        let mut assignment = self.prev.assignment.clone();
        let mut reused = self.kept.clone();
        let mut move_order = Vec::new();
        for opt in chosen {
            for &(a, t) in &opt.targets {
                assignment[a] = t;
            }
            reused.extend(opt.reuse);
            move_order.extend(opt.movements.iter().map(|m| m.atom));
        }
        Placement {
            kind: self.kind,
            assignment,
            reused,
            move_order,
        }
    }

    /// Option of every item that leads to `target`, in item order.
    pub fn options_for(&self, target: &Placement) -> Result<Vec<Opt>> {
        if target.atom_count() != self.prev.atom_count() {
            return Err(Error::Contract("placements cover different atom counts".into()));
        }
        self.items
            .iter()
            .map(|item| {
                let moves: Vec<(AtomId, TrapAddress)> = item
                    .atoms
                    .iter()
                    .map(|&a| (a, target.trap(a)))
                    .filter(|&(a, t)| self.prev.trap(a) != t)
                    .collect();
                match (self.kind, moves.as_slice()) {
                    (PlacementKind::Intermediate, []) => self
                        .reuse_option(item.label)
                        .ok_or_else(|| Error::Contract(format!("atom {} kept without a reuse mark", item.label))),
                    (PlacementKind::Intermediate, &[(a, t)]) => Ok(self.storage_option(a, t)),
                    (_, &[m]) => Ok(self.gate_option(item.atoms[0], item.atoms[1], [m])),
                    (_, &[m, n]) => Ok(self.gate_option(item.atoms[0], item.atoms[1], [m, n])),
                    _ => Err(Error::Contract(format!("item {} does not move", item.label))),
                }
            })
            .collect()
    }

    /// Placement leaving every atom where it is.
    pub fn unchanged(&self) -> Placement {
        self.placement(std::iter::empty())
    }
}

pub(crate) fn apply(groups: &mut GroupSet, opt: &Opt) {
    for m in &opt.movements {
        groups.insert(*m);
    }
}

fn check_atoms(prev: &Placement, atoms: impl Iterator<Item = AtomId>) -> Result<()> {
    let n = prev.atom_count();
    for a in atoms {
        if a >= n {
            return Err(Error::OperandOutOfRange {
                operand: a,
                num_qubits: n,
            });
        }
    }
    Ok(())
}
