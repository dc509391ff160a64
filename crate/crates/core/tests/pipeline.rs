//! End-to-end pipeline behaviour through the public library API.

use zoneplace::arch::{Architecture, ZoneKind};
use zoneplace::bench::{self, Benchmark, Family, ScanGrid};
use zoneplace::circuit::{parse_circuit, Circuit, Format};
use zoneplace::compile::{compile, CompileOptions, PlacerKind};
use zoneplace::placer::PlacerParams;
use zoneplace::program::{trace, Program};
use zoneplace::router::replay;
use zoneplace::schedule::{analyze_reuse, schedule_asap};

const GHZ_QASM: &str = r#"OPENQASM 2.0;
include "qelib1.inc";
qreg q[4];
h q[0];
cz q[0],q[1];
h q[1];
cz q[1],q[2];
cz q[2],q[3];
"#;

fn opts(placer: PlacerKind) -> CompileOptions {
    CompileOptions {
        placer,
        ..CompileOptions::default()
    }
}

#[test]
fn qasm_compiles_with_both_placers() {
    let arch = Architecture::builtin();
    let circuit = parse_circuit(GHZ_QASM, Format::Qasm).unwrap();
    for placer in [PlacerKind::Aware, PlacerKind::Baseline] {
        let c = compile(&circuit, &arch, &opts(placer)).unwrap();
        assert_eq!(c.schedule.two_qubit_layer_count(), 3);
        assert_eq!(c.routes.len(), 6);
        let m = c.metrics();
        assert_eq!(m.rearrangement_steps, c.routes.iter().map(|r| r.len()).sum::<usize>());
        assert!(m.rearrangement_time_ms > 0.0);
        assert_eq!(m.total_time_ms, m.rearrangement_time_ms);
        assert_eq!(c.budget_hits, 0);
    }
}

#[test]
fn routes_replay_onto_each_placement() {
    let arch = Architecture::builtin();
    let circuit = bench::generate(Family::Random, 16, 4).unwrap();
    for placer in [PlacerKind::Aware, PlacerKind::Baseline] {
        let c = compile(&circuit, &arch, &opts(placer)).unwrap();
        for (i, route) in c.routes.iter().enumerate() {
            let reached = replay(&c.placements[i], route, &arch).unwrap();
            assert_eq!(reached, c.placements[i + 1].assignment, "transition {i}");
        }
        let fin = c.placements.last().unwrap();
        assert!(fin.atoms_in(&arch, ZoneKind::Entanglement).is_empty());
    }
}

#[test]
fn program_json_round_trips() {
    let arch = Architecture::builtin();
    let circuit = parse_circuit(GHZ_QASM, Format::Qasm).unwrap();
    let c = compile(&circuit, &arch, &CompileOptions::default()).unwrap();
    let json = c.program.to_json().unwrap();
    let back: Program = serde_json::from_str(&json).unwrap();
    assert_eq!(back, c.program);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let kinds: Vec<&str> = value["instructions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds.iter().filter(|k| **k == "rydberg_pulse").count(), 3);
    assert_eq!(kinds[0], "one_qubit_batch");
}

#[test]
fn trace_ends_at_final_placement() {
    let arch = Architecture::builtin();
    let circuit = bench::generate(Family::Qft, 6, 1).unwrap();
    let c = compile(&circuit, &arch, &CompileOptions::default()).unwrap();
    let t = trace(&c.program, &c.placements[0], &arch).unwrap();
    assert_eq!(t.frames.len(), c.program.instructions.len());
    let fin = c.placements.last().unwrap();
    for (atom, p) in &t.frames.last().unwrap().positions {
        assert_eq!(p.key(), fin.position(&arch, *atom).key());
    }
}

#[test]
fn circuit_formats_round_trip() {
    let circuit = bench::generate(Family::Wstate, 5, 1).unwrap();
    let from_qasm = parse_circuit(&circuit.to_qasm(), Format::Qasm).unwrap();
    let from_json = parse_circuit(&circuit.to_json(), Format::Json).unwrap();
    assert_eq!(from_qasm, circuit);
    assert_eq!(from_json, circuit);
}

#[test]
fn empty_circuit_set_gives_empty_report() {
    let report = bench::compare(&[], &Architecture::builtin(), &PlacerParams::default());
    assert!(report.runs.is_empty());
    assert_eq!(report.to_json().unwrap().replace(char::is_whitespace, ""), r#"{"runs":[]}"#);
}

#[test]
fn compare_shares_one_schedule_per_circuit() {
    let set = vec![Benchmark::generated(Family::Ghz, 8, 1).unwrap()];
    let report = bench::compare(&set, &Architecture::builtin(), &PlacerParams::default());
    let run = &report.runs[0];
    let schedule = schedule_asap(&set[0].circuit);
    let reuse = analyze_reuse(&schedule);
    assert_eq!(run.schedule_hash, bench::schedule_hash(&schedule, &reuse));
    assert_eq!(run.max_gates_per_layer, 1);
    assert_eq!(run.layers, 7);
    assert!(report.table().contains("max2q"));
}

#[test]
fn failed_circuits_are_recorded_and_the_run_continues() {
    let arch = Architecture::from_json(
        r#"{"zones": [
            {"id": "e", "kind": "entanglement", "origin": [0, 0], "rows": 1, "cols": 1, "row_pitch": 10, "col_pitch": 12, "pair_offset": 2},
            {"id": "s", "kind": "storage", "origin": [0, 20], "rows": 1, "cols": 6, "row_pitch": 3, "col_pitch": 3}
        ], "interaction_radius": 2, "window": {"rows": 1, "cols": 1}}"#,
    )
    .unwrap();
    let set = vec![
        Benchmark {
            id: "too_wide".into(),
            circuit: Circuit::new(4).cz(0, 1).cz(2, 3),
        },
        Benchmark {
            id: "fits".into(),
            circuit: Circuit::new(2).cz(0, 1),
        },
    ];
    let report = bench::compare(&set, &arch, &PlacerParams::default());
    assert!(report.runs[0].aware.error.is_some());
    assert!(report.runs[0].aware.metrics.is_none());
    assert!(report.runs[1].aware.metrics.is_some());
}

#[test]
fn single_point_scan_matches_aware_compare_run() {
    let arch = Architecture::builtin();
    let set = vec![Benchmark::generated(Family::ReuseChain, 12, 1).unwrap()];
    let params = PlacerParams::default();
    let rows = bench::paramscan(&set, &arch, &params, &ScanGrid::single(&params));
    assert_eq!(rows.len(), 1);
    let aware = bench::compare(&set, &arch, &params).runs[0].aware.metrics.unwrap();
    assert_eq!(rows[0].rearrangement_steps, aware.rearrangement_steps);
    assert!((rows[0].rearrangement_time_ms - aware.rearrangement_time_ms).abs() < 1e-12);
    assert_eq!(rows[0].failures, 0);
}

#[test]
fn aware_needs_fewer_groups_on_parallel_chain() {
    let set = vec![Benchmark::generated(Family::Ising, 40, 1).unwrap()];
    let report = bench::compare(&set, &Architecture::builtin(), &PlacerParams::default());
    let run = &report.runs[0];
    let (a, b) = (run.aware.metrics.unwrap(), run.baseline.metrics.unwrap());
    assert!(b.rearrangement_steps > a.rearrangement_steps);
}

#[test]
fn large_profile_compiles() {
    let arch = Architecture::builtin();
    let circuit = bench::generate(Family::Ising, 30, 1).unwrap();
    let opts = CompileOptions {
        params: PlacerParams::large(),
        ..CompileOptions::default()
    };
    let c = compile(&circuit, &arch, &opts).unwrap();
    assert!(c.metrics().rearrangement_steps > 0);
}
