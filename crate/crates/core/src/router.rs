//! Turning two consecutive placements into rearrangement steps.
//!
//! Movers are grouped with the same first-fit structure the placer scores, each
//! group becomes one step, and steps run longest first unless a target is still
//! occupied. Pickups and drops are split into batches that keep bystander atoms
//! off active row/column intersections.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::arch::{quantize, Architecture, Point, PosKey, TrapAddress};
use crate::compat::{discretize, AtomId, GroupSet, Movement};
use crate::error::{Error, Result};
use crate::placer::Placement;

/// One atom's straight-line transfer within a step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomMove {
    pub atom: AtomId,
    pub from_trap: TrapAddress,
    pub to_trap: TrapAddress,
    pub from: Point,
    pub to: Point,
    pub dist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangementStep {
    pub movements: Vec<AtomMove>,
    pub pickup_batches: Vec<Vec<AtomId>>,
    pub drop_batches: Vec<Vec<AtomId>>,
    pub max_dist: f64,
}

impl RearrangementStep {
    pub fn transfers(&self) -> usize {
        self.pickup_batches.len() + self.drop_batches.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub steps: Vec<RearrangementStep>,
}

impl Route {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Source,
    Target,
}

pub fn route_transition(from: &Placement, to: &Placement, arch: &Architecture) -> Result<Route> {
    if from.atom_count() != to.atom_count() {
        return Err(Error::Contract(format!(
            "placements cover {} and {} atoms",
            from.atom_count(),
            to.atom_count()
        )));
    }
    from.check_injective(arch)?;
    for &t in &to.assignment {
        arch.validate(t)?;
    }

    let movers: Vec<AtomId> = (0..from.atom_count()).filter(|&a| from.trap(a) != to.trap(a)).collect();
    if movers.is_empty() {
        return Ok(Route::default());
    }
    let holder = from.occupancy();
    for &a in &movers {
        if let Some(&b) = holder.get(&to.trap(a)) {
            if from.trap(b) == to.trap(b) {
                return Err(Error::Routing(format!(
                    "target {} of atom {a} is held by atom {b}, which does not move",
                    to.trap(a)
                )));
            }
        }
    }
    to.check_injective(arch)?;

    let groups = group_movers(from, to, arch, &movers);
    let mut pending: Vec<Vec<AtomMove>> = groups
        .into_iter()
        .map(|g| {
            g.members
                .iter()
                .map(|m| atom_move(arch, m.atom, from.trap(m.atom), to.trap(m.atom)))
                .collect()
        })
        .collect();
    sort_by_max_dist(&mut pending);

    let mut state: Vec<TrapAddress> = from.assignment.clone();
    let mut occupied: HashMap<TrapAddress, AtomId> = holder;
    let mut steps = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let ready = pending.iter().position(|moves| {
            moves.iter().all(|m| match occupied.get(&m.to_trap) {
                None => true,
                Some(b) => moves.iter().any(|o| o.atom == *b),
            })
        });
        let moves = match ready {
            Some(i) => pending.remove(i),
            None => {
                // every pending step waits for another: park one blocking atom
                let blocked = pending[0]
                    .iter()
                    .find_map(|m| occupied.get(&m.to_trap).copied().filter(|b| !pending[0].iter().any(|o| o.atom == *b)))
                    .expect("a blocked step has a blocking atom");
                let targets: HashSet<TrapAddress> = pending.iter().flatten().map(|m| m.to_trap).collect();
                let here = state[blocked];
                let final_trap = to.trap(blocked);
                let aux = arch
                    .traps(final_trap.zone)
                    .filter(|t| !occupied.contains_key(t) && !targets.contains(t))
                    .min_by(|a, b| {
                        let (da, db) = (arch.position(*a).distance(arch.position(here)), arch.position(*b).distance(arch.position(here)));
                        da.total_cmp(&db).then(a.cmp(b))
                    })
                    .or_else(|| {
                        arch.zones()
                            .iter()
                            .enumerate()
                            .flat_map(|(z, _)| arch.traps(z))
                            .find(|t| !occupied.contains_key(t) && !targets.contains(t))
                    })
                    .ok_or_else(|| Error::Routing("no free trap to break a cyclic dependency".into()))?;
                for step in &mut pending {
                    step.retain(|m| m.atom != blocked);
                }
                pending.retain(|s| !s.is_empty());
                pending.push(vec![atom_move(arch, blocked, aux, final_trap)]);
                sort_by_max_dist(&mut pending);
                vec![atom_move(arch, blocked, here, aux)]
            }
        };
        let step = make_step(moves, &occupied, arch);
        for m in &step.movements {
            occupied.remove(&m.from_trap);
        }
        for m in &step.movements {
            occupied.insert(m.to_trap, m.atom);
            state[m.atom] = m.to_trap;
        }
        steps.push(step);
    }
    debug_assert_eq!(state, to.assignment);
    Ok(Route { steps })
}

/// First-fit groups of the movers; tries descending distance and the placer's
/// order and keeps the cheaper result.
fn group_movers(from: &Placement, to: &Placement, arch: &Architecture, movers: &[AtomId]) -> Vec<crate::compat::MovementGroup> {
    let pts: Vec<(AtomId, Point)> = movers.iter().map(|&a| (a, from.position(arch, a))).collect();
    let disc = discretize(&pts);
    let movement = |a: AtomId| {
        let (p, q) = (from.position(arch, a), to.position(arch, a));
        Movement {
            atom: a,
            src: disc[&a],
            dst: (quantize(q.y), quantize(q.x)),
            dist: p.distance(q),
        }
    };
    let mut by_dist: Vec<Movement> = movers.iter().map(|&a| movement(a)).collect();
    by_dist.sort_by(|x, y| y.dist.total_cmp(&x.dist).then(x.atom.cmp(&y.atom)));

    let mover_set: BTreeSet<AtomId> = movers.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut placer_order: Vec<Movement> = to
        .move_order
        .iter()
        .filter(|a| mover_set.contains(a) && seen.insert(**a))
        .map(|&a| movement(a))
        .collect();
    placer_order.extend(by_dist.iter().filter(|m| !seen.contains(&m.atom)).copied());

    let build = |order: &[Movement]| {
        let mut set = GroupSet::new();
        for m in order {
            set.insert(*m);
        }
        set
    };
    let (a, b) = (build(&placer_order), build(&by_dist));
    let better = if b.cost() < a.cost() - 1e-9 { b } else { a };
    better.into_groups()
}

fn atom_move(arch: &Architecture, atom: AtomId, from_trap: TrapAddress, to_trap: TrapAddress) -> AtomMove {
    let (from, to) = (arch.position(from_trap), arch.position(to_trap));
    AtomMove {
        atom,
        from_trap,
        to_trap,
        from,
        to,
        dist: from.distance(to),
    }
}

fn sort_by_max_dist(steps: &mut [Vec<AtomMove>]) {
    let key = |s: &Vec<AtomMove>| s.iter().map(|m| m.dist).fold(0.0, f64::max);
    steps.sort_by(|a, b| key(b).total_cmp(&key(a)));
}

fn make_step(mut movements: Vec<AtomMove>, occupied: &HashMap<TrapAddress, AtomId>, arch: &Architecture) -> RearrangementStep {
    movements.sort_by_key(|m| m.atom);
    let occupancy: BTreeMap<PosKey, AtomId> = occupied.iter().map(|(&t, &a)| (arch.position(t).key(), a)).collect();
    RearrangementStep {
        pickup_batches: split_ghost_batches(&movements, &occupancy, Endpoint::Source),
        drop_batches: split_ghost_batches(&movements, &occupancy, Endpoint::Target),
        max_dist: movements.iter().map(|m| m.dist).fold(0.0, f64::max),
        movements,
    }
}

/// Positions that a transfer batch must not touch besides its own atoms, at the
/// moment the batch runs.
///
/// Pickups affect atoms sitting in traps: `occupancy` minus the atoms picked up by
/// earlier batches. Drops affect atoms still held by the moving grid: the targets
/// of movements not dropped yet.
fn bystanders(
    movements: &[AtomMove],
    occupancy: &BTreeMap<PosKey, AtomId>,
    endpoint: Endpoint,
    done: &HashSet<AtomId>,
) -> HashMap<PosKey, AtomId> {
    match endpoint {
        Endpoint::Source => occupancy
            .iter()
            .filter(|(_, a)| !done.contains(a))
            .map(|(&k, &a)| (k, a))
            .collect(),
        Endpoint::Target => movements
            .iter()
            .filter(|m| !done.contains(&m.atom))
            .map(|m| (m.to.key(), m.atom))
            .collect(),
    }
}

fn endpoint_key(m: &AtomMove, endpoint: Endpoint) -> PosKey {
    match endpoint {
        Endpoint::Source => m.from.key(),
        Endpoint::Target => m.to.key(),
    }
}

/// Atoms outside the batch sitting on one of its row/column intersections.
fn violators(batch: &[&AtomMove], others: &HashMap<PosKey, AtomId>, endpoint: Endpoint) -> Vec<AtomId> {
    let keys: Vec<PosKey> = batch.iter().map(|m| endpoint_key(m, endpoint)).collect();
    let ys: BTreeSet<i64> = keys.iter().map(|k| k.1).collect();
    let xs: BTreeSet<i64> = keys.iter().map(|k| k.0).collect();
    let members: HashSet<AtomId> = batch.iter().map(|m| m.atom).collect();
    let mut out = Vec::new();
    for &y in &ys {
        for &x in &xs {
            if let Some(a) = others.get(&PosKey(x, y)) {
                if !members.contains(a) {
                    out.push(*a);
                }
            }
        }
    }
    out
}

/// Greedy partition of a step's transfers into ghost-spot-free batches.
///
/// Atoms are swept in row-major order of the endpoint; each batch takes every
/// remaining atom that keeps it valid, then the next batch starts.
pub fn split_ghost_batches(
    movements: &[AtomMove],
    occupancy: &BTreeMap<PosKey, AtomId>,
    endpoint: Endpoint,
) -> Vec<Vec<AtomId>> {
    let mut order: Vec<&AtomMove> = movements.iter().collect();
    order.sort_by_key(|m| {
        let k = endpoint_key(m, endpoint);
        (k.1, k.0, m.atom)
    });
    let mut done: HashSet<AtomId> = HashSet::new();
    let mut batches = Vec::new();
    while done.len() < movements.len() {
        let others = bystanders(movements, occupancy, endpoint, &done);
        let mut batch: Vec<&AtomMove> = Vec::new();
        for m in order.iter().filter(|m| !done.contains(&m.atom)) {
            if batch.iter().any(|b| b.atom == m.atom) {
                continue;
            }
            // grow the candidate by remaining movers on its intersections until it
            // is closed or hits a real bystander
            let mut candidate = batch.clone();
            candidate.push(m);
            loop {
                let hit = violators(&candidate, &others, endpoint);
                if hit.is_empty() {
                    batch = candidate;
                    break;
                }
                let pulled: Vec<&AtomMove> = order
                    .iter()
                    .copied()
                    .filter(|o| hit.contains(&o.atom) && !done.contains(&o.atom))
                    .collect();
                if pulled.len() < hit.len() {
                    break;
                }
                candidate.extend(pulled);
            }
        }
        debug_assert!(!batch.is_empty());
        done.extend(batch.iter().map(|m| m.atom));
        batches.push(batch.iter().map(|m| m.atom).collect());
    }
    batches
}

/// Reason a step breaks a rearrangement constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepViolation {
    Empty,
    /// Two movements reverse or merge/split their order along an axis.
    Order { atoms: (AtomId, AtomId), axis: char },
    /// A transfer batch touches an atom outside the batch.
    GhostSpot { atom: AtomId, bystander: AtomId },
    /// An atom is missing from, or repeated in, the batches.
    Batches(AtomId),
}

/// Independent check of one step against the rearrangement constraints, given
/// the trap occupancy (position → atom) right before the step.
pub fn verify_step(step: &RearrangementStep, occupancy: &BTreeMap<PosKey, AtomId>) -> Result<(), StepViolation> {
    if step.movements.is_empty() {
        return Err(StepViolation::Empty);
    }
    let pos = |p: Point| (quantize(p.x), quantize(p.y));
    for (i, m) in step.movements.iter().enumerate() {
        for n in &step.movements[i + 1..] {
            let (ms, mt, ns, nt) = (pos(m.from), pos(m.to), pos(n.from), pos(n.to));
            if ms.0.cmp(&ns.0) != mt.0.cmp(&nt.0) {
                return Err(StepViolation::Order { atoms: (m.atom, n.atom), axis: 'x' });
            }
            if ms.1.cmp(&ns.1) != mt.1.cmp(&nt.1) {
                return Err(StepViolation::Order { atoms: (m.atom, n.atom), axis: 'y' });
            }
        }
    }
    for (batches, endpoint) in [(&step.pickup_batches, Endpoint::Source), (&step.drop_batches, Endpoint::Target)] {
        let mut seen = HashSet::new();
        for batch in batches {
            for &a in batch {
                if !seen.insert(a) || !step.movements.iter().any(|m| m.atom == a) {
                    return Err(StepViolation::Batches(a));
                }
            }
        }
        if let Some(m) = step.movements.iter().find(|m| !seen.contains(&m.atom)) {
            return Err(StepViolation::Batches(m.atom));
        }

        // positions of atoms exposed to each batch, tracked by brute force
        let mut exposed: Vec<(i64, i64, AtomId)> = match endpoint {
            Endpoint::Source => occupancy.iter().map(|(k, &a)| (k.0, k.1, a)).collect(),
            Endpoint::Target => step.movements.iter().map(|m| (pos(m.to).0, pos(m.to).1, m.atom)).collect(),
        };
        for batch in batches {
            if batch.is_empty() {
                return Err(StepViolation::Empty);
            }
            let ends: Vec<(i64, i64)> = batch
                .iter()
                .map(|a| {
                    let m = step.movements.iter().find(|m| m.atom == *a).expect("checked above");
                    match endpoint {
                        Endpoint::Source => pos(m.from),
                        Endpoint::Target => pos(m.to),
                    }
                })
                .collect();
            for &(x, y, atom) in &exposed {
                let hit = ends.iter().any(|e| e.0 == x) && ends.iter().any(|e| e.1 == y);
                if hit && !batch.contains(&atom) {
                    return Err(StepViolation::GhostSpot {
                        atom: batch[0],
                        bystander: atom,
                    });
                }
            }
            exposed.retain(|e| !batch.contains(&e.2));
        }
    }
    Ok(())
}

/// Applies a route to `from`, checking every step and that no two atoms ever
/// share a trap. Returns the final assignment.
pub fn replay(from: &Placement, route: &Route, arch: &Architecture) -> Result<Vec<TrapAddress>> {
    let mut state = from.assignment.clone();
    let mut occupied: HashMap<TrapAddress, AtomId> = from.occupancy();
    for (i, step) in route.steps.iter().enumerate() {
        let occupancy: BTreeMap<PosKey, AtomId> = occupied.iter().map(|(&t, &a)| (arch.position(t).key(), a)).collect();
        verify_step(step, &occupancy).map_err(|v| Error::Routing(format!("step {i}: {v:?}")))?;
        for m in &step.movements {
            if state[m.atom] != m.from_trap {
                return Err(Error::Routing(format!("step {i}: atom {} is not at {}", m.atom, m.from_trap)));
            }
            occupied.remove(&m.from_trap);
        }
        for m in &step.movements {
            if let Some(other) = occupied.insert(m.to_trap, m.atom) {
                return Err(Error::Routing(format!("step {i}: atoms {other} and {} meet at {}", m.atom, m.to_trap)));
            }
            state[m.atom] = m.to_trap;
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::{ArchitectureSpec, Slot, Window, Zone, ZoneKind};
    use crate::placer::PlacementKind;

    fn grid(rows: u32, cols: u32) -> Architecture {
        Architecture::from_spec(ArchitectureSpec {
            zones: vec![
                Zone {
                    id: "s".into(),
                    kind: ZoneKind::Storage,
                    origin: Point::new(0.0, 0.0),
                    rows,
                    cols,
                    row_pitch: 10.0,
                    col_pitch: 10.0,
                    pair_offset: None,
                },
                Zone {
                    id: "e".into(),
                    kind: ZoneKind::Entanglement,
                    origin: Point::new(0.0, f64::from(rows) * 10.0 + 20.0),
                    rows: 1,
                    cols: 2,
                    row_pitch: 10.0,
                    col_pitch: 12.0,
                    pair_offset: Some(2.0),
                },
            ],
            acceleration: None,
            trap_transfer_time_us: None,
            interaction_radius: 2.0,
            window: Window::new(2, 2),
        })
        .unwrap()
    }

    fn at(r: u32, c: u32) -> TrapAddress {
        TrapAddress::new(0, r, c, Slot::Single)
    }

    fn placement(traps: &[(u32, u32)]) -> Placement {
        Placement {
            kind: PlacementKind::Intermediate,
            assignment: traps.iter().map(|&(r, c)| at(r, c)).collect(),
            reused: BTreeSet::new(),
            move_order: Vec::new(),
        }
    }

    fn mv(atom: AtomId, from: (f64, f64), to: (f64, f64)) -> AtomMove {
        let (f, t) = (Point::new(from.0, from.1), Point::new(to.0, to.1));
        AtomMove {
            atom,
            from_trap: at(0, 0),
            to_trap: at(0, 0),
            from: f,
            to: t,
            dist: f.distance(t),
        }
    }

    fn occ(points: &[(AtomId, (f64, f64))]) -> BTreeMap<PosKey, AtomId> {
        points.iter().map(|&(a, (x, y))| (Point::new(x, y).key(), a)).collect()
    }

    fn step(movements: Vec<AtomMove>, pickups: Vec<Vec<AtomId>>, drops: Vec<Vec<AtomId>>) -> RearrangementStep {
        RearrangementStep {
            max_dist: movements.iter().map(|m| m.dist).fold(0.0, f64::max),
            movements,
            pickup_batches: pickups,
            drop_batches: drops,
        }
    }

    #[test]
    fn identity_routes_to_nothing() {
        let arch = grid(3, 3);
        let p = placement(&[(0, 0), (1, 1)]);
        assert!(route_transition(&p, &p, &arch).unwrap().is_empty());
    }

    #[test]
    fn crossing_columns_rejected() {
        let s = step(
            vec![mv(0, (0.0, 0.0), (20.0, 10.0)), mv(1, (10.0, 0.0), (0.0, 10.0))],
            vec![vec![0, 1]],
            vec![vec![0, 1]],
        );
        let o = occ(&[(0, (0.0, 0.0)), (1, (10.0, 0.0))]);
        assert!(matches!(verify_step(&s, &o), Err(StepViolation::Order { axis: 'x', .. })));
    }

    #[test]
    fn split_rows_rejected() {
        let s = step(
            vec![mv(0, (0.0, 0.0), (0.0, 10.0)), mv(1, (10.0, 0.0), (10.0, 20.0))],
            vec![vec![0, 1]],
            vec![vec![0, 1]],
        );
        let o = occ(&[(0, (0.0, 0.0)), (1, (10.0, 0.0))]);
        assert!(matches!(verify_step(&s, &o), Err(StepViolation::Order { axis: 'y', .. })));
    }

    #[test]
    fn bystander_at_intersection() {
        // atoms on a diagonal, bystander on the off-diagonal intersection
        let moves = vec![mv(0, (0.0, 0.0), (0.0, 50.0)), mv(1, (10.0, 10.0), (10.0, 60.0))];
        let o = occ(&[(0, (0.0, 0.0)), (1, (10.0, 10.0)), (2, (10.0, 0.0))]);
        let joint = step(moves.clone(), vec![vec![0, 1]], vec![vec![0, 1]]);
        assert!(matches!(verify_step(&joint, &o), Err(StepViolation::GhostSpot { bystander: 2, .. })));

        let batches = split_ghost_batches(&moves, &o, Endpoint::Source);
        assert_eq!(batches, vec![vec![0], vec![1]]);
        let split = step(moves.clone(), batches, split_ghost_batches(&moves, &o, Endpoint::Target));
        assert_eq!(verify_step(&split, &o), Ok(()));
    }

    #[test]
    fn full_rectangle_is_one_batch() {
        let moves = vec![
            mv(0, (0.0, 0.0), (0.0, 50.0)),
            mv(1, (10.0, 0.0), (10.0, 50.0)),
            mv(2, (0.0, 10.0), (0.0, 60.0)),
            mv(3, (10.0, 10.0), (10.0, 60.0)),
        ];
        let o = occ(&[(0, (0.0, 0.0)), (1, (10.0, 0.0)), (2, (0.0, 10.0)), (3, (10.0, 10.0))]);
        assert_eq!(split_ghost_batches(&moves, &o, Endpoint::Source).len(), 1);
        assert_eq!(split_ghost_batches(&moves[..1], &o, Endpoint::Source), vec![vec![0]]);
    }

    #[test]
    fn batches_must_cover_each_atom_once() {
        let moves = vec![mv(0, (0.0, 0.0), (0.0, 50.0)), mv(1, (10.0, 0.0), (10.0, 50.0))];
        let o = occ(&[(0, (0.0, 0.0)), (1, (10.0, 0.0))]);
        let missing = step(moves.clone(), vec![vec![0]], vec![vec![0, 1]]);
        assert_eq!(verify_step(&missing, &o), Err(StepViolation::Batches(1)));
        let twice = step(moves, vec![vec![0, 1], vec![1]], vec![vec![0, 1]]);
        assert_eq!(verify_step(&twice, &o), Err(StepViolation::Batches(1)));
    }

    #[test]
    fn swap_is_buffered() {
        let arch = grid(3, 3);
        let from = placement(&[(0, 0), (0, 1)]);
        let to = placement(&[(0, 1), (0, 0)]);
        let route = route_transition(&from, &to, &arch).unwrap();
        assert_eq!(replay(&from, &route, &arch).unwrap(), to.assignment);
        assert_eq!(route.len(), 3);
    }

    #[test]
    fn chained_targets_are_ordered() {
        let arch = grid(3, 3);
        // 0 moves into 1's trap, 1 moves on into a free trap
        let from = placement(&[(0, 0), (1, 1)]);
        let to = placement(&[(1, 1), (2, 2)]);
        let route = route_transition(&from, &to, &arch).unwrap();
        assert_eq!(replay(&from, &route, &arch).unwrap(), to.assignment);
    }

    #[test]
    fn blocked_target_is_a_routing_error() {
        let arch = grid(3, 3);
        let from = placement(&[(0, 0), (1, 1)]);
        let mut to = placement(&[(1, 1), (1, 1)]);
        to.assignment[1] = at(1, 1);
        // atom 1 stays, atom 0 wants its trap
        let err = route_transition(&from, &to, &arch).unwrap_err();
        assert!(matches!(&err, Error::Routing(m) if m.contains("zone 0 (1, 1")), "{err}");
    }

    #[test]
    fn parallel_shift_is_one_step() {
        let arch = grid(4, 4);
        let from = placement(&[(0, 0), (0, 1), (0, 2)]);
        let to = placement(&[(2, 1), (2, 2), (2, 3)]);
        let route = route_transition(&from, &to, &arch).unwrap();
        assert_eq!(route.len(), 1);
        assert_eq!(route.steps[0].transfers(), 2);
        assert_eq!(replay(&from, &route, &arch).unwrap(), to.assignment);
    }
}
