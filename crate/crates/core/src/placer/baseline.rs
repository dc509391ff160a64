//! Distance-greedy placement that ignores movement compatibility.

use std::collections::BTreeSet;

use crate::arch::{Architecture, Slot, TrapAddress, ZoneKind};
use crate::compat::AtomId;
use crate::error::{Error, Result};

use super::problem::{Opt, Problem};
use super::{NextLayer, Placement, PlacerParams};

/// What the baseline is asked to place.
#[derive(Debug, Clone, Copy)]
pub enum LayerTarget<'a> {
    Gates(&'a [(AtomId, AtomId)]),
    Intermediate,
}

pub fn place_baseline(
    prev: &Placement,
    target: LayerTarget<'_>,
    next: &NextLayer,
    arch: &Architecture,
    params: &PlacerParams,
) -> Result<Placement> {
    match target {
        LayerTarget::Gates(pairs) => place_baseline_gate_layer(prev, pairs, next, arch, params),
        LayerTarget::Intermediate => place_baseline_intermediate(prev, next, arch, params),
    }
}

pub fn place_baseline_gate_layer(
    prev: &Placement,
    pairs: &[(AtomId, AtomId)],
    next: &NextLayer,
    arch: &Architecture,
    params: &PlacerParams,
) -> Result<Placement> {
    let problem = Problem::for_gate_layer(arch, prev, pairs, next, params)?;
    let chosen = in_label_order(&problem, gate_choices(&problem)?);
    Ok(problem.placement(chosen.iter()))
}

pub fn place_baseline_intermediate(
    prev: &Placement,
    next: &NextLayer,
    arch: &Architecture,
    params: &PlacerParams,
) -> Result<Placement> {
    let problem = Problem::for_intermediate(arch, prev, next, params)?;
    let chosen = in_label_order(&problem, intermediate_choices(&problem)?);
    Ok(problem.placement(chosen.iter()))
}

fn in_label_order(problem: &Problem, chosen: Vec<Opt>) -> Vec<Opt> {
    let mut paired: Vec<(usize, Opt)> = problem.items.iter().map(|i| i.label).zip(chosen).collect();
    paired.sort_by_key(|(label, _)| *label);
    paired.into_iter().map(|(_, o)| o).collect()
}

/// Items taken in label order, each given its distance-minimal free pair site.
/// The result is listed in the problem's item order.
pub(crate) fn gate_choices(problem: &Problem) -> Result<Vec<Opt>> {
    let arch = problem.arch;
    let mut used = problem.occupied.clone();
    let mut order: Vec<usize> = (0..problem.items.len()).collect();
    order.sort_by_key(|&i| problem.items[i].label);
    let mut chosen: Vec<Option<Opt>> = vec![None; problem.items.len()];
    for i in order {
        let item = &problem.items[i];
        let opt = if problem.kept.contains(&item.atoms[0]) {
            // one atom already waits in the entanglement zone
            item.options[0].clone()
        } else {
            let (a, b) = (item.atoms[0], item.atoms[1]);
            let (pa, pb) = (problem.prev.position(arch, a), problem.prev.position(arch, b));
            let mut best: Option<(f64, [(AtomId, TrapAddress); 2])> = None;
            for z in arch.zones_of(ZoneKind::Entanglement) {
                for left in arch.traps(z).filter(|t| t.slot == Slot::PairLeft) {
                    let right = left.pair_partner().expect("entanglement traps come in pairs");
                    if used[arch.trap_index(left)] || used[arch.trap_index(right)] {
                        continue;
                    }
                    let (l, r) = (arch.position(left), arch.position(right));
                    for (d, moves) in [
                        (pa.distance(l) + pb.distance(r), [(a, left), (b, right)]),
                        (pa.distance(r) + pb.distance(l), [(a, right), (b, left)]),
                    ] {
                        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                            best = Some((d, moves));
                        }
                    }
                }
            }
            let (_, moves) = best.ok_or_else(|| Error::Capacity {
                zone: "entanglement".into(),
                message: format!("no free trap pair for gate {}", item.label),
            })?;
            problem.gate_option(a, b, moves)
        };
        for &t in &opt.traps {
            used[t] = true;
        }
        chosen[i] = Some(opt);
    }
    Ok(chosen.into_iter().map(|o| o.expect("every item chosen")).collect())
}

/// Atoms taken by id; reuse whenever marked and allowed, otherwise the nearest
/// free storage trap. The result is listed in the problem's item order.
pub(crate) fn intermediate_choices(problem: &Problem) -> Result<Vec<Opt>> {
    let arch = problem.arch;
    let mut used = problem.occupied.clone();
    let mut reused = BTreeSet::new();
    let mut order: Vec<usize> = (0..problem.items.len()).collect();
    order.sort_by_key(|&i| problem.items[i].label);
    let mut chosen: Vec<Option<Opt>> = vec![None; problem.items.len()];
    for i in order {
        let item = &problem.items[i];
        let atom = item.label;
        let reuse = item
            .options
            .iter()
            .find(|o| o.reuse.is_some() && o.conflicts.iter().all(|c| !reused.contains(c)));
        let opt = match reuse {
            Some(o) => {
                reused.insert(atom);
                o.clone()
            }
            None => {
                let here = problem.prev.position(arch, atom);
                let trap = arch
                    .zones_of(ZoneKind::Storage)
                    .flat_map(|z| arch.traps(z))
                    .filter(|&t| !used[arch.trap_index(t)])
                    .map(|t| (arch.position(t).distance(here), t))
                    .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
                    .ok_or_else(|| Error::Capacity {
                        zone: "storage".into(),
                        message: format!("no free storage trap for atom {atom}"),
                    })?
                    .1;
                problem.storage_option(atom, trap)
            }
        };
        for &t in &opt.traps {
            used[t] = true;
        }
        chosen[i] = Some(opt);
    }
    Ok(chosen.into_iter().map(|o| o.expect("every item chosen")).collect())
}
