//! Synthetic benchmark families and the comparison / parameter-scan harness.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arch::Architecture;
use crate::circuit::Circuit;
use crate::compile::{compile_scheduled, CompileOptions, PlacerKind};
use crate::error::{Error, Result};
use crate::placer::PlacerParams;
use crate::program::Metrics;
use crate::schedule::{analyze_reuse, schedule_asap, ReuseMarks, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// 1D transverse-field Ising Trotter step: ZZ on even bonds, then odd bonds.
    Ising,
    Ghz,
    /// All-to-all controlled phases.
    Qft,
    Wstate,
    /// One hub atom interacting with every other atom in turn, repeated per hub.
    ReuseChain,
    /// Random CZ pairs interleaved with single-qubit gates.
    Random,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Ising,
        Family::Ghz,
        Family::Qft,
        Family::Wstate,
        Family::ReuseChain,
        Family::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Ising => "ising",
            Family::Ghz => "ghz",
            Family::Qft => "qft",
            Family::Wstate => "wstate",
            Family::ReuseChain => "reuse_chain",
            Family::Random => "random",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Builds a circuit of the family on `n` qubits. Only [`Family::Random`] uses the seed.
pub fn generate(family: Family, n: usize, seed: u64) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::validation("qubits", "at least 2 qubits are needed"));
    }
    let mut c = Circuit::new(n);
    match family {
        Family::Ising => {
            for q in 0..n {
                c = c.one_qubit("h", q);
            }
            for start in [0, 1] {
                for i in (start..n - 1).step_by(2) {
                    c = c.cz(i, i + 1).one_qubit("rz", i + 1).cz(i, i + 1);
                }
            }
            for q in 0..n {
                c = c.one_qubit("rx", q);
            }
        }
        Family::Ghz => {
            c = c.one_qubit("h", 0);
            for i in 0..n - 1 {
                c = c.one_qubit("h", i + 1).cz(i, i + 1).one_qubit("h", i + 1);
            }
        }
        Family::Qft => {
            for i in 0..n {
                c = c.one_qubit("h", i);
                for j in i + 1..n {
                    c = c.cz(i, j).one_qubit("rz", j).cz(i, j);
                }
            }
        }
        Family::Wstate => {
            c = c.one_qubit("x", 0);
            for i in 0..n - 1 {
                c = c.one_qubit("ry", i + 1).cz(i, i + 1).one_qubit("ry", i + 1).cz(i + 1, i);
            }
        }
        Family::ReuseChain => {
            // hubs 0, k, 2k, ... each talk to their k - 1 spokes in turn
            let k = 5.min(n);
            for hub in (0..n).step_by(k) {
                for spoke in hub + 1..(hub + k).min(n) {
                    c = c.cz(hub, spoke).one_qubit("rz", spoke);
                }
            }
        }
        Family::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut qubits: Vec<usize> = (0..n).collect();
            for _ in 0..3 * n {
                qubits.shuffle(&mut rng);
                let (a, b) = (qubits[0], qubits[1]);
                c = c.cz(a, b);
                let q = rng.gen_range(0..n);
                c = c.one_qubit("u", q);
            }
        }
    }
    Ok(c)
}

/// A named circuit of a benchmark set.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub id: String,
    pub circuit: Circuit,
}

impl Benchmark {
    pub fn generated(family: Family, n: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            id: format!("{}_{n}", family.name()),
            circuit: generate(family, n, seed)?,
        })
    }
}

/// Families and qubit counts of the default comparison suite.
pub const SUITE: &[(Family, &[usize])] = &[
    (Family::Ising, &[40, 60, 80, 100]),
    (Family::Ghz, &[20, 40]),
    (Family::Wstate, &[20, 40]),
    (Family::Qft, &[10, 18]),
    (Family::ReuseChain, &[20, 40, 60]),
    (Family::Random, &[20, 40]),
];

/// The default comparison suite; `seed` only affects the random family.
pub fn synthetic_suite(seed: u64) -> Vec<Benchmark> {
    SUITE
        .iter()
        .flat_map(|&(f, sizes)| sizes.iter().map(move |&n| Benchmark::generated(f, n, seed).expect("suite sizes are valid")))
        .collect()
}

/// Outcome of one placer on one circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacerRun {
    pub metrics: Option<Metrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub budget_hits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub benchmark: String,
    pub qubits: usize,
    pub two_qubit_gates: usize,
    pub layers: usize,
    pub max_gates_per_layer: usize,
    /// Hash of the schedule and reuse marks both placers consumed.
    pub schedule_hash: String,
    pub aware: PlacerRun,
    pub baseline: PlacerRun,
    /// (aware − baseline) / baseline in whole percent.
    pub delta_steps_pct: Option<i64>,
    pub delta_time_pct: Option<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub runs: Vec<RunReport>,
}

impl CompareReport {
    /// Copy with wall-clock fields zeroed, for determinism checks.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for run in &mut out.runs {
            for p in [&mut run.aware, &mut run.baseline] {
                if let Some(m) = &mut p.metrics {
                    m.placement_time_ms = 0.0;
                    m.routing_time_ms = 0.0;
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Aligned text table, one row per circuit.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<16} {:>6} {:>7} {:>6} {:>6} | {:>9} {:>9} {:>6} | {:>10} {:>10} {:>6} | {:>9} {:>9}\n",
            "benchmark", "qubits", "2q", "layers", "max2q", "steps/agn", "steps/aw", "d%", "time/agn", "time/aw", "d%",
            "place/aw", "route/aw"
        );
        for r in &self.runs {
            let m = |p: &PlacerRun| p.metrics.unwrap_or_default();
            let (b, a) = (m(&r.baseline), m(&r.aware));
            let pct = |d: Option<i64>| d.map_or("-".to_string(), |d| format!("{d:+}"));
            out.push_str(&format!(
                "{:<16} {:>6} {:>7} {:>6} {:>6} | {:>9} {:>9} {:>6} | {:>10.3} {:>10.3} {:>6} | {:>9.1} {:>9.1}\n",
                r.benchmark,
                r.qubits,
                r.two_qubit_gates,
                r.layers,
                r.max_gates_per_layer,
                b.rearrangement_steps,
                a.rearrangement_steps,
                pct(r.delta_steps_pct),
                b.rearrangement_time_ms,
                a.rearrangement_time_ms,
                pct(r.delta_time_pct),
                a.placement_time_ms,
                a.routing_time_ms,
            ));
        }
        out
    }
}

/// Relative change in whole percent, halves rounded away from zero.
pub fn delta_pct(aware: f64, baseline: f64) -> Option<i64> {
    (baseline > 0.0).then(|| ((aware - baseline) / baseline * 100.0).round() as i64)
}

pub fn schedule_hash(schedule: &Schedule, reuse: &ReuseMarks) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(schedule).expect("schedule serializes"));
    h.update(serde_json::to_vec(reuse).expect("reuse marks serialize"));
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn run_one(schedule: &Schedule, reuse: &ReuseMarks, arch: &Architecture, opts: &CompileOptions) -> PlacerRun {
    match compile_scheduled(schedule.clone(), reuse.clone(), arch, opts) {
        Ok(c) => PlacerRun {
            metrics: Some(*c.metrics()),
            error: None,
            budget_hits: c.budget_hits,
        },
        Err(e) => PlacerRun {
            metrics: None,
            error: Some(e.to_string()),
            budget_hits: 0,
        },
    }
}

/// Runs both placers on every circuit with one shared schedule per circuit.
pub fn compare(benchmarks: &[Benchmark], arch: &Architecture, params: &PlacerParams) -> CompareReport {
    let runs = benchmarks
        .iter()
        .map(|b| {
            let schedule = schedule_asap(&b.circuit);
            let reuse = analyze_reuse(&schedule);
            let hash = schedule_hash(&schedule, &reuse);
            let opts = |placer| CompileOptions {
                placer,
                params: *params,
                ..CompileOptions::default()
            };
            let baseline = run_one(&schedule, &reuse, arch, &opts(PlacerKind::Baseline));
            let aware = run_one(&schedule, &reuse, arch, &opts(PlacerKind::Aware));
            debug_assert_eq!(hash, schedule_hash(&schedule, &reuse));
            let (delta_steps_pct, delta_time_pct) = match (aware.metrics, baseline.metrics) {
                (Some(a), Some(b)) => (
                    delta_pct(a.rearrangement_steps as f64, b.rearrangement_steps as f64),
                    delta_pct(a.rearrangement_time_ms, b.rearrangement_time_ms),
                ),
                _ => (None, None),
            };
            RunReport {
                benchmark: b.id.clone(),
                qubits: b.circuit.num_qubits,
                two_qubit_gates: b.circuit.two_qubit_gate_count(),
                layers: schedule.two_qubit_layer_count(),
                max_gates_per_layer: schedule.max_gates_per_two_qubit_layer(),
                schedule_hash: hash,
                aware,
                baseline,
                delta_steps_pct,
                delta_time_pct,
            }
        })
        .collect();
    CompareReport { runs }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub rearrangement_steps: usize,
    pub rearrangement_time_ms: f64,
    pub mean_placement_time_ms: f64,
    pub failures: usize,
}

/// Values tried per parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
}

impl ScanGrid {
    pub fn single(p: &PlacerParams) -> Self {
        Self {
            alpha: vec![p.alpha],
            beta: vec![p.beta],
            gamma: vec![p.gamma],
            delta: vec![p.delta],
        }
    }

    pub fn combinations(&self, base: &PlacerParams) -> Vec<PlacerParams> {
        let mut out = Vec::new();
        for &alpha in &self.alpha {
            for &beta in &self.beta {
                for &gamma in &self.gamma {
                    for &delta in &self.delta {
                        out.push(PlacerParams {
                            alpha,
                            beta,
                            gamma,
                            delta,
                            ..*base
                        });
                    }
                }
            }
        }
        out
    }
}

/// Aware-placer totals over the benchmark set for every grid point.
pub fn paramscan(benchmarks: &[Benchmark], arch: &Architecture, base: &PlacerParams, grid: &ScanGrid) -> Vec<ScanRow> {
    let prepared: Vec<(Schedule, ReuseMarks)> = benchmarks
        .iter()
        .map(|b| {
            let s = schedule_asap(&b.circuit);
            let r = analyze_reuse(&s);
            (s, r)
        })
        .collect();
    grid.combinations(base)
        .into_iter()
        .map(|params| {
            let opts = CompileOptions {
                placer: PlacerKind::Aware,
                params,
                ..CompileOptions::default()
            };
            let mut row = ScanRow {
                alpha: params.alpha,
                beta: params.beta,
                gamma: params.gamma,
                delta: params.delta,
                rearrangement_steps: 0,
                rearrangement_time_ms: 0.0,
                mean_placement_time_ms: 0.0,
                failures: 0,
            };
            let mut ok = 0;
            for (s, r) in &prepared {
                match run_one(s, r, arch, &opts).metrics {
                    Some(m) => {
                        ok += 1;
                        row.rearrangement_steps += m.rearrangement_steps;
                        row.rearrangement_time_ms += m.rearrangement_time_ms;
                        row.mean_placement_time_ms += m.placement_time_ms;
                    }
                    None => row.failures += 1,
                }
            }
            if ok > 0 {
                row.mean_placement_time_ms /= ok as f64;
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ising_shape() {
        let c = generate(Family::Ising, 10, 0).unwrap();
        assert_eq!(c.two_qubit_gate_count(), 18);
        let s = schedule_asap(&c);
        assert_eq!(s.two_qubit_layer_count(), 4);
        assert_eq!(s.max_gates_per_two_qubit_layer(), 5);
    }

    #[test]
    fn families_are_valid_and_random_is_seeded() {
        for f in Family::ALL {
            let c = generate(f, 7, 3).unwrap();
            c.validate().unwrap();
            assert!(c.two_qubit_gate_count() > 0, "{}", f.name());
            assert_eq!(Family::parse(f.name()), Some(f));
        }
        assert_eq!(generate(Family::Random, 8, 1).unwrap(), generate(Family::Random, 8, 1).unwrap());
        assert_ne!(generate(Family::Random, 8, 1).unwrap(), generate(Family::Random, 8, 2).unwrap());
        assert!(generate(Family::Ghz, 1, 0).is_err());
    }

    #[test]
    fn reuse_chain_reuses_hubs() {
        let c = generate(Family::ReuseChain, 5, 0).unwrap();
        let marks = analyze_reuse(&schedule_asap(&c));
        assert!(marks.boundaries.iter().all(|b| b.contains(&0)));
        assert_eq!(marks.boundaries.len(), 3);
    }

    #[test]
    fn percent_deltas() {
        assert_eq!(delta_pct(5.0, 10.0), Some(-50));
        assert_eq!(delta_pct(1.0, 8.0), Some(-88)); // -87.5
        assert_eq!(delta_pct(17.0, 8.0), Some(113)); // 112.5
        assert_eq!(delta_pct(1.0, 0.0), None);
    }
}
