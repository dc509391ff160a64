//! Randomized properties over the public API.

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::sample::subsequence;

use zoneplace::arch::{Architecture, TrapAddress};
use zoneplace::circuit::{parse_circuit, Circuit, Format};
use zoneplace::compile::{compile, CompileOptions, PlacerKind};
use zoneplace::placer::{Placement, PlacementKind};
use zoneplace::router::{replay, route_transition};

fn small_arch() -> Architecture {
    Architecture::from_json(
        r#"{"zones": [
            {"id": "e", "kind": "entanglement", "origin": [0, 0], "rows": 2, "cols": 4, "row_pitch": 10, "col_pitch": 12, "pair_offset": 2},
            {"id": "s", "kind": "storage", "origin": [0, 30], "rows": 4, "cols": 8, "row_pitch": 3, "col_pitch": 3}
        ], "interaction_radius": 2, "window": {"rows": 2, "cols": 2}}"#,
    )
    .unwrap()
}

fn traps(arch: &Architecture) -> Vec<TrapAddress> {
    (0..arch.trap_count()).map(|i| arch.trap_at(i)).collect()
}

fn placement(assignment: Vec<TrapAddress>) -> Placement {
    Placement {
        kind: PlacementKind::Gate,
        assignment,
        reused: BTreeSet::new(),
        move_order: Vec::new(),
    }
}

/// Up to 8 qubits with a random mix of CZ and one-qubit gates.
fn circuit() -> impl Strategy<Value = Circuit> {
    (2usize..=8).prop_flat_map(|n| {
        let gate = prop_oneof![
            (0..n, 0..n).prop_filter("distinct", |(a, b)| a != b).prop_map(|(a, b)| (Some(a), b)),
            (0..n).prop_map(|q| (None, q)),
        ];
        proptest::collection::vec(gate, 0..20).prop_map(move |gates| {
            gates.into_iter().fold(Circuit::new(n), |c, g| match g {
                (Some(a), b) => c.cz(a, b),
                (None, q) => c.one_qubit("h", q),
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn routes_reach_their_target(
        (from, to) in (1usize..=12).prop_flat_map(|n| {
            let all = traps(&small_arch());
            (subsequence(all.clone(), n).prop_shuffle(), subsequence(all, n).prop_shuffle())
        })
    ) {
        let arch = small_arch();
        let (from, to) = (placement(from), placement(to));
        let route = route_transition(&from, &to, &arch).unwrap();
        prop_assert_eq!(replay(&from, &route, &arch).unwrap(), to.assignment);
    }

    #[test]
    fn random_circuits_compile_with_both_placers(c in circuit()) {
        let arch = small_arch();
        for placer in [PlacerKind::Aware, PlacerKind::Baseline] {
            let opts = CompileOptions { placer, ..CompileOptions::default() };
            let compiled = compile(&c, &arch, &opts).unwrap();
            prop_assert_eq!(compiled.routes.len() + 1, compiled.placements.len());
            for (i, route) in compiled.routes.iter().enumerate() {
                let reached = replay(&compiled.placements[i], route, &arch).unwrap();
                prop_assert_eq!(&reached, &compiled.placements[i + 1].assignment);
            }
        }
    }

    #[test]
    fn circuits_round_trip_through_both_formats(c in circuit()) {
        prop_assert_eq!(&parse_circuit(&c.to_qasm(), Format::Qasm).unwrap(), &c);
        prop_assert_eq!(&parse_circuit(&c.to_json(), Format::Json).unwrap(), &c);
    }
}
