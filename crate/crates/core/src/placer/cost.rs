//! Cost and heuristic terms of the placement search.
//!
//! All distances are in µm; every term is expressed in √µm, the unit of the
//! routing cost proxy.

use crate::arch::Point;
use crate::compat::GroupSet;

use super::PlacerParams;

/// Routing cost proxy of a set of movement groups: Σ_G √d_max(G).
pub fn cost(groups: &GroupSet) -> f64 {
    groups.cost()
}

/// Look-ahead of a gate placement: for each atom of the gate that acts again in
/// the next layer with a different partner, √ of the distance that partner has to
/// travel to the trap next to the atom.
///
/// `reused_atoms` lists `(partner's current position, position of the trap
/// adjacent to the atom)` for each such atom; everything else contributes 0.
pub fn lookahead_cost_gate(reused_atoms: &[(Point, Point)]) -> f64 {
    reused_atoms.iter().map(|(p, t)| p.distance(*t).sqrt()).sum()
}

/// What happens to an atom leaving a gate in an intermediate placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomOption {
    /// Move to the storage trap at this position.
    Storage(Point),
    /// Stay in the entanglement zone; the position is the trap adjacent to the atom.
    Reuse { adjacent: Point },
}

/// Look-ahead of an intermediate placement option, `None` when the reuse option is
/// asked for an atom that is not reuse-marked.
///
/// `partner` is the current position of the atom's next-layer partner, if any.
/// The reuse value already includes the `−γ` bonus and is not meant to be
/// weighted by α; the storage value is.
pub fn lookahead_cost_atom(
    option: AtomOption,
    partner: Option<Point>,
    marked: bool,
    gamma: f64,
) -> Option<f64> {
    match option {
        AtomOption::Reuse { adjacent } => {
            let partner = partner.filter(|_| marked)?;
            Some(partner.distance(adjacent).sqrt() - gamma)
        }
        AtomOption::Storage(trap) => Some(partner.map_or(0.0, |p| p.distance(trap).sqrt())),
    }
}

/// Full cost of a (partial) placement: routing proxy plus unweighted reuse terms
/// plus α-weighted look-ahead terms.
pub fn total_cost(groups_cost: f64, reuse_cost_sum: f64, lookahead_sum: f64, alpha: f64) -> f64 {
    groups_cost + reuse_cost_sum + alpha * lookahead_sum
}

/// Lower bound on the cost increase until all items are placed.
///
/// Assuming every remaining movement joins an existing group, only the largest
/// group distance can grow, and it must reach at least the largest minimal
/// distance of an unplaced atom.
pub fn heuristic_admissible(max_group_sqrt_d_max: f64, unplaced_d_min: impl IntoIterator<Item = f64>) -> f64 {
    let needed = unplaced_d_min.into_iter().map(f64::sqrt).fold(f64::NEG_INFINITY, f64::max);
    if needed == f64::NEG_INFINITY {
        return 0.0;
    }
    (needed - max_group_sqrt_d_max).max(0.0)
}

/// Adds the conflict-likelihood estimate δ·(β + Σ SD)·|unplaced|.
pub fn heuristic_accelerating(h: f64, sd_sum: f64, unplaced: usize, params: &PlacerParams) -> f64 {
    h + params.delta * (params.beta + sd_sum) * unplaced as f64
}

/// Adds, for each unplaced item, the mean look-ahead over its options. Option
/// values must already be weighted (α for trap options, unweighted for reuse).
pub fn heuristic_full<'a>(h_accelerating: f64, unplaced_options: impl IntoIterator<Item = &'a [f64]>) -> f64 {
    h_accelerating
        + unplaced_options
            .into_iter()
            .filter(|o| !o.is_empty())
            .map(|o| o.iter().sum::<f64>() / o.len() as f64)
            .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compat::Movement;

    fn params(alpha: f64, beta: f64, gamma: f64, delta: f64) -> PlacerParams {
        PlacerParams {
            alpha,
            beta,
            gamma,
            delta,
            ..PlacerParams::default()
        }
    }

    fn groups(d_max: &[f64]) -> GroupSet {
        let mut set = GroupSet::new();
        // all movements share source row 0 but target distinct rows in reverse,
        // so each one needs its own group
        for (i, &d) in d_max.iter().enumerate() {
            set.insert(Movement {
                atom: i,
                src: (0, 0),
                dst: (-(i as i64), 0),
                dist: d,
            });
        }
        assert_eq!(set.len(), d_max.len());
        set
    }

    #[test]
    fn proxy_cost() {
        assert_eq!(cost(&GroupSet::new()), 0.0);
        assert_eq!(cost(&groups(&[100.0])), 10.0);
        assert_eq!(cost(&groups(&[25.0, 16.0])), 9.0);
    }

    #[test]
    fn gate_lookahead() {
        assert_eq!(lookahead_cost_gate(&[]), 0.0);
        let t = Point::new(0.0, 0.0);
        assert_eq!(lookahead_cost_gate(&[(Point::new(60.0, 80.0), t)]), 10.0);
        assert_eq!(lookahead_cost_gate(&[(t, t)]), 0.0);
    }

    #[test]
    fn atom_lookahead() {
        let origin = Point::new(0.0, 0.0);
        assert_eq!(lookahead_cost_atom(AtomOption::Storage(origin), None, false, 5.0), Some(0.0));
        let partner = Point::new(15.0, 20.0);
        assert_eq!(
            lookahead_cost_atom(AtomOption::Reuse { adjacent: origin }, Some(partner), true, 5.0),
            Some(0.0)
        );
        assert_eq!(
            lookahead_cost_atom(AtomOption::Storage(Point::new(15.0, 36.0)), Some(partner), true, 5.0),
            Some(4.0)
        );
        assert_eq!(lookahead_cost_atom(AtomOption::Reuse { adjacent: origin }, Some(partner), false, 5.0), None);
    }

    #[test]
    fn total_cost_terms() {
        assert_eq!(total_cost(9.0, 0.0, 0.0, 0.0), 9.0);
        assert_eq!(total_cost(9.0, -2.0, 0.0, 0.2), 7.0);
        assert!((total_cost(9.0, 0.0, 10.0, 0.2) - 11.0).abs() < 1e-12);
    }

    #[test]
    fn admissible_part() {
        assert_eq!(heuristic_admissible(10.0, []), 0.0);
        assert_eq!(heuristic_admissible(10.0, [144.0, 4.0]), 2.0);
        assert_eq!(heuristic_admissible(10.0, [49.0]), 0.0);
        assert_eq!(heuristic_admissible(0.0, [49.0]), 7.0);
    }

    #[test]
    fn accelerating_part() {
        let p = params(0.2, 0.2, 5.0, 0.6);
        assert_eq!(heuristic_accelerating(3.0, 1.5, 0, &p), 3.0);
        assert_eq!(heuristic_accelerating(3.0, 0.0, 4, &params(0.2, 0.0, 5.0, 0.6)), 3.0);
        assert!((heuristic_accelerating(3.0, 1.0, 2, &p) - (3.0 + 0.6 * 1.2 * 2.0)).abs() < 1e-12);
    }

    #[test]
    fn full_heuristic() {
        let none: [&[f64]; 0] = [];
        assert_eq!(heuristic_full(4.0, none), 4.0);
        assert_eq!(heuristic_full(4.0, [&[0.0, 0.0, 0.0][..]]), 4.0);
        assert!((heuristic_full(4.0, [&[0.2 * 10.0, 0.2 * 20.0][..]]) - 7.0).abs() < 1e-12);
    }
}
