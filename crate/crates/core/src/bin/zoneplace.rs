//! Command-line front end: compile circuits, compare placers, scan parameters and
//! generate synthetic circuits.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use zoneplace::arch::{Architecture, Window};
use zoneplace::bench::{self, Benchmark, Family, ScanGrid};
use zoneplace::circuit::{parse_circuit, Circuit, Format};
use zoneplace::compile::{compile, CompileOptions, PlacerKind};
use zoneplace::placer::PlacerParams;
use zoneplace::program::{trace, TimingConfig};
use zoneplace::{Error, Result};

#[derive(Parser)]
#[command(name = "zoneplace", version, about = "Routing-aware placement for zoned neutral atom architectures")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Architecture JSON; the built-in architecture when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    arch: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Placer::Aware)]
    placer: Placer,
    /// Parameter preset the overrides below apply to.
    #[arg(long, global = true, value_enum, default_value_t = Profile::Qasmbench)]
    profile: Profile,
    /// Look-ahead weight.
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Constant added to the deviation sum of the accelerating heuristic.
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Reuse bonus.
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Weight of the accelerating heuristic.
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Candidate window as ROWSxCOLS.
    #[arg(long, global = true, value_parser = parse_window, value_name = "RxC")]
    window: Option<Window>,
    /// Node expansions per layer before the search stops.
    #[arg(long, global = true)]
    max_nodes: Option<usize>,
    /// Seed of the random circuit family.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write the atom-position trace of a compiled program to this file.
    #[arg(long, global = true, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Placer {
    Aware,
    Baseline,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Qasmbench,
    Large,
}

#[derive(Subcommand)]
enum Command {
    /// Compile one circuit and print its metrics as JSON.
    Compile(CompileArgs),
    /// Run both placers on a circuit set and report the differences.
    Compare(SetArgs),
    /// Run the routing-aware placer over a grid of parameters.
    Paramscan(ScanArgs),
    /// Generate a synthetic circuit.
    Gen(GenArgs),
}

#[derive(Args)]
struct CompileArgs {
    /// Circuit file (.qasm, or .json for the circuit JSON form).
    circuit: PathBuf,
    /// Program JSON destination; defaults to the circuit path with extension `program.json`.
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Write the layer schedule and reuse marks as JSON.
    #[arg(long, value_name = "PATH")]
    dump_schedule: Option<PathBuf>,
    /// Write the movement groups of every transition as JSON.
    #[arg(long, value_name = "PATH")]
    dump_groups: Option<PathBuf>,
    /// Duration of a Rydberg pulse in µs, added to the total time only.
    #[arg(long, default_value_t = 0.0)]
    rydberg_us: f64,
    /// Duration of a one-qubit layer in µs, added to the total time only.
    #[arg(long, default_value_t = 0.0)]
    one_qubit_us: f64,
}

#[derive(Args)]
struct SetArgs {
    /// Circuit files or directories of circuit files.
    paths: Vec<PathBuf>,
    /// Generated circuits of this family instead of files.
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    /// Qubit counts for --family.
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    sizes: Vec<usize>,
    /// Also write the JSON report to this file.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    set: SetArgs,
    /// Comma-separated alpha values; the base value when omitted.
    #[arg(long = "alpha-values", value_delimiter = ',', allow_negative_numbers = true)]
    alpha_values: Vec<f64>,
    /// Comma-separated beta values; the base value when omitted.
    #[arg(long = "beta-values", value_delimiter = ',', allow_negative_numbers = true)]
    beta_values: Vec<f64>,
    /// Comma-separated gamma values; the base value when omitted.
    #[arg(long = "gamma-values", value_delimiter = ',', allow_negative_numbers = true)]
    gamma_values: Vec<f64>,
    /// Comma-separated delta values; the base value when omitted.
    #[arg(long = "delta-values", value_delimiter = ',', allow_negative_numbers = true)]
    delta_values: Vec<f64>,
}

#[derive(Args)]
struct GenArgs {
    /// One of ising, ghz, qft, wstate, reuse_chain, random.
    #[arg(value_parser = parse_family)]
    family: Family,
    /// Number of qubits.
    qubits: usize,
    /// Destination file; standard output when omitted.
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

fn parse_window(s: &str) -> std::result::Result<Window, String> {
    let (r, c) = s.split_once(['x', 'X']).ok_or("expected ROWSxCOLS")?;
    let rows: u32 = r.trim().parse().map_err(|e| format!("rows: {e}"))?;
    let cols: u32 = c.trim().parse().map_err(|e| format!("cols: {e}"))?;
    if rows == 0 || cols == 0 {
        return Err("window extents must be at least 1".into());
    }
    Ok(Window::new(rows, cols))
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    Family::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
        format!("unknown family `{s}` (one of {})", names.join(", "))
    })
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    kind: &'a str,
    message: String,
}

/// A failure and whether it stems from command-line usage rather than the pipeline.
struct Failure {
    error: Error,
    usage: bool,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let usage = matches!(error, Error::Io { .. });
        Self { error, usage }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

fn usage(error: Error) -> Failure {
    Failure { error, usage: true }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { error, usage }) => {
            let report = ErrorReport {
                kind: error.kind(),
                message: error.to_string(),
            };
            eprintln!("{}", serde_json::json!({ "error": report }));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    let g = &cli.global;
    let params = params(g).map_err(usage)?;
    let arch = match &g.arch {
        Some(path) => Architecture::from_json(&read(path)?)?,
        None => Architecture::builtin(),
    };
    match &cli.command {
        Command::Compile(args) => cmd_compile(g, args, &arch, params),
        Command::Compare(args) => {
            let benchmarks = benchmarks(args, g.seed)?;
            let report = bench::compare(&benchmarks, &arch, &params);
            let json = report.to_json()?;
            if let Some(path) = &args.report {
                write(path, &json)?;
            }
            if g.json {
                println!("{json}");
            } else {
                print!("{}", report.table());
            }
            Ok(())
        }
        Command::Paramscan(args) => {
            let benchmarks = benchmarks(&args.set, g.seed)?;
            let or = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
            let grid = ScanGrid {
                alpha: or(&args.alpha_values, params.alpha),
                beta: or(&args.beta_values, params.beta),
                gamma: or(&args.gamma_values, params.gamma),
                delta: or(&args.delta_values, params.delta),
            };
            for p in grid.combinations(&params) {
                p.validate().map_err(usage)?;
            }
            let rows = bench::paramscan(&benchmarks, &arch, &params, &grid);
            let json = serde_json::to_string_pretty(&rows)?;
            if let Some(path) = &args.set.report {
                write(path, &json)?;
            }
            println!("{json}");
            Ok(())
        }
        Command::Gen(args) => {
            let c = bench::generate(args.family, args.qubits, g.seed).map_err(usage)?;
            let text = if g.json { c.to_json() + "\n" } else { c.to_qasm() };
            match &args.output {
                Some(path) => write(path, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

fn params(g: &Global) -> Result<PlacerParams> {
    let mut p = match g.profile {
        Profile::Qasmbench => PlacerParams::qasmbench(),
        Profile::Large => PlacerParams::large(),
    };
    p.alpha = g.alpha.unwrap_or(p.alpha);
    p.beta = g.beta.unwrap_or(p.beta);
    p.gamma = g.gamma.unwrap_or(p.gamma);
    p.delta = g.delta.unwrap_or(p.delta);
    p.window = g.window.or(p.window);
    p.max_nodes = g.max_nodes.unwrap_or(p.max_nodes);
    p.validate()?;
    Ok(p)
}

fn cmd_compile(
    g: &Global,
    args: &CompileArgs,
    arch: &Architecture,
    params: PlacerParams,
) -> std::result::Result<(), Failure> {
    let timing = TimingConfig {
        rydberg_pulse_us: args.rydberg_us,
        one_qubit_layer_us: args.one_qubit_us,
    };
    if !(timing.rydberg_pulse_us >= 0.0 && timing.one_qubit_layer_us >= 0.0) {
        return Err(usage(Error::Validation {
            field: "timing".into(),
            message: "gate durations must be non-negative".into(),
        }));
    }
    let circuit = load_circuit(&args.circuit)?;
    let opts = CompileOptions {
        placer: match g.placer {
            Placer::Aware => PlacerKind::Aware,
            Placer::Baseline => PlacerKind::Baseline,
        },
        params,
        timing,
    };
    let compiled = compile(&circuit, arch, &opts)?;

    if let Some(path) = &args.dump_schedule {
        let doc = serde_json::json!({ "schedule": compiled.schedule, "reuse": compiled.reuse });
        write(path, &serde_json::to_string_pretty(&doc)?)?;
    }
    if let Some(path) = &args.dump_groups {
        write(path, &serde_json::to_string_pretty(&compiled.groups())?)?;
    }
    if let Some(path) = &g.trace {
        let t = trace(&compiled.program, &compiled.placements[0], arch)?;
        write(path, &serde_json::to_string_pretty(&t)?)?;
    }
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| args.circuit.with_extension("program.json"));
    write(&output, &compiled.program.to_json()?)?;
    println!("{}", serde_json::to_string_pretty(compiled.metrics())?);
    Ok(())
}

fn benchmarks(args: &SetArgs, seed: u64) -> Result<Vec<Benchmark>> {
    let mut out = Vec::new();
    if let Some(family) = args.family {
        for &n in &args.sizes {
            out.push(Benchmark::generated(family, n, seed)?);
        }
    }
    for path in &args.paths {
        if path.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(path)
                .map_err(|e| io_error(path, e))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("qasm" | "json")))
                .collect();
            files.sort();
            for f in files {
                out.push(load_benchmark(&f)?);
            }
        } else {
            out.push(load_benchmark(path)?);
        }
    }
    if args.family.is_none() && args.paths.is_empty() {
        out = bench::synthetic_suite(seed);
    }
    Ok(out)
}

fn load_benchmark(path: &Path) -> Result<Benchmark> {
    Ok(Benchmark {
        id: path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned()),
        circuit: load_circuit(path)?,
    })
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    parse_circuit(&read(path)?, Format::from_path(path))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}
