//! C ABI for the zoneplace compiler.
//!
//! Architectures, circuits and compiled programs are opaque handles owned by the
//! caller and released with the matching `*_free` function. Every fallible call
//! returns a [`ZpStatus`]; on failure the message is available from
//! [`zp_last_error_message`] on the same thread until the next call. Strings
//! returned through out-parameters are released with [`zp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use zoneplace::arch::{Architecture, Window};
use zoneplace::circuit::{parse_circuit, Circuit, Format};
use zoneplace::compile::{compile, CompileOptions, PlacerKind};
use zoneplace::placer::PlacerParams;
use zoneplace::program::{movement_time, Metrics, Program, TimingConfig};
use zoneplace::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    UnsupportedGate = 4,
    OperandOutOfRange = 5,
    Validation = 6,
    InvalidAddress = 7,
    Capacity = 8,
    Routing = 9,
    Contract = 10,
    SearchBudget = 11,
    Coverage = 12,
    Io = 13,
    Json = 14,
    Panic = 15,
}

impl From<&Error> for ZpStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } => ZpStatus::Parse,
            Error::UnsupportedGate(_) => ZpStatus::UnsupportedGate,
            Error::OperandOutOfRange { .. } => ZpStatus::OperandOutOfRange,
            Error::Validation { .. } => ZpStatus::Validation,
            Error::InvalidAddress(_) => ZpStatus::InvalidAddress,
            Error::Capacity { .. } => ZpStatus::Capacity,
            Error::Routing(_) => ZpStatus::Routing,
            Error::Contract(_) => ZpStatus::Contract,
            Error::SearchBudget { .. } => ZpStatus::SearchBudget,
            Error::Coverage(_) => ZpStatus::Coverage,
            Error::Io { .. } => ZpStatus::Io,
            Error::Json(_) => ZpStatus::Json,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZpFormat {
    Qasm = 0,
    Json = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZpPlacer {
    Aware = 0,
    Baseline = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZpProfile {
    Qasmbench = 0,
    Large = 1,
}

/// Compiler settings. Obtain defaults from [`zp_compile_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZpCompileOptions {
    pub placer: ZpPlacer,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Candidate window rows; 0 together with `window_cols` 0 uses the architecture default.
    pub window_rows: u32,
    pub window_cols: u32,
    pub max_nodes: usize,
    pub rydberg_pulse_us: f64,
    pub one_qubit_layer_us: f64,
}

impl ZpCompileOptions {
    fn to_options(self) -> CompileOptions {
        let window = (self.window_rows != 0 || self.window_cols != 0).then_some(Window {
            rows: self.window_rows,
            cols: self.window_cols,
        });
        CompileOptions {
            placer: match self.placer {
                ZpPlacer::Aware => PlacerKind::Aware,
                ZpPlacer::Baseline => PlacerKind::Baseline,
            },
            params: PlacerParams {
                alpha: self.alpha,
                beta: self.beta,
                gamma: self.gamma,
                delta: self.delta,
                window,
                max_nodes: self.max_nodes,
            },
            timing: TimingConfig {
                rydberg_pulse_us: self.rydberg_pulse_us,
                one_qubit_layer_us: self.one_qubit_layer_us,
            },
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZpMetrics {
    pub placement_time_ms: f64,
    pub routing_time_ms: f64,
    pub rearrangement_steps: usize,
    pub rearrangement_time_ms: f64,
    pub trap_transfers: usize,
    pub total_time_ms: f64,
}

impl From<&Metrics> for ZpMetrics {
    fn from(m: &Metrics) -> Self {
        Self {
            placement_time_ms: m.placement_time_ms,
            routing_time_ms: m.routing_time_ms,
            rearrangement_steps: m.rearrangement_steps,
            rearrangement_time_ms: m.rearrangement_time_ms,
            trap_transfers: m.trap_transfers,
            total_time_ms: m.total_time_ms,
        }
    }
}

pub struct ZpArchitecture {
    inner: Architecture,
}

pub struct ZpCircuit {
    inner: Circuit,
}

pub struct ZpProgram {
    inner: Program,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(ZpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(ZpStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ZpStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ZpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ZpStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            ZpStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(ZpStatus::InvalidUtf8, format!("`{what}` is not UTF-8: {e}")))
}

unsafe fn write_out<T>(out: *mut T, value: T) {
    ptr::write(out, value);
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(ZpStatus::Contract, e.to_string()))
}

/// Message of the last failed call on this thread, or null. Owned by the library
/// and valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn zp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Built-in default architecture.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_architecture_builtin(out: *mut *mut ZpArchitecture) -> ZpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let arch = Box::new(ZpArchitecture {
            inner: Architecture::builtin(),
        });
        write_out(out, Box::into_raw(arch));
        Ok(())
    })
}

/// Parses an architecture from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_architecture_load_json(
    json: *const c_char,
    out: *mut *mut ZpArchitecture,
) -> ZpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = Architecture::from_json(text(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(ZpArchitecture { inner })));
        Ok(())
    })
}

/// # Safety
/// `arch` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zp_architecture_free(arch: *mut ZpArchitecture) {
    if !arch.is_null() {
        drop(Box::from_raw(arch));
    }
}

/// Parses a circuit from QASM or circuit JSON text.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_circuit_parse(
    source: *const c_char,
    format: ZpFormat,
    out: *mut *mut ZpCircuit,
) -> ZpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let format = match format {
            ZpFormat::Qasm => Format::Qasm,
            ZpFormat::Json => Format::Json,
        };
        let inner = parse_circuit(text(source, "source")?, format)?;
        write_out(out, Box::into_raw(Box::new(ZpCircuit { inner })));
        Ok(())
    })
}

/// Number of qubits of a circuit, or 0 for null.
///
/// # Safety
/// `circuit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn zp_circuit_num_qubits(circuit: *const ZpCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.inner.num_qubits)
}

/// # Safety
/// `circuit` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zp_circuit_free(circuit: *mut ZpCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Default settings for a parameter profile, using the routing-aware placer and
/// zero gate durations.
#[no_mangle]
pub extern "C" fn zp_compile_options_default(profile: ZpProfile) -> ZpCompileOptions {
    let p = match profile {
        ZpProfile::Qasmbench => PlacerParams::qasmbench(),
        ZpProfile::Large => PlacerParams::large(),
    };
    let t = TimingConfig::default();
    ZpCompileOptions {
        placer: ZpPlacer::Aware,
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma,
        delta: p.delta,
        window_rows: 0,
        window_cols: 0,
        max_nodes: p.max_nodes,
        rydberg_pulse_us: t.rydberg_pulse_us,
        one_qubit_layer_us: t.one_qubit_layer_us,
    }
}

/// Compiles a circuit. A null `options` uses the default profile.
///
/// # Safety
/// `circuit` and `arch` must be live handles, `options` null or valid for reads
/// and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_compile(
    circuit: *const ZpCircuit,
    arch: *const ZpArchitecture,
    options: *const ZpCompileOptions,
    out: *mut *mut ZpProgram,
) -> ZpStatus {
    guard(|| {
        let circuit = circuit.as_ref().ok_or_else(|| null("circuit"))?;
        let arch = arch.as_ref().ok_or_else(|| null("arch"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| zp_compile_options_default(ZpProfile::Qasmbench))
            .to_options();
        let compiled = compile(&circuit.inner, &arch.inner, &opts)?;
        write_out(out, Box::into_raw(Box::new(ZpProgram { inner: compiled.program })));
        Ok(())
    })
}

/// # Safety
/// `program` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_program_metrics(program: *const ZpProgram, out: *mut ZpMetrics) -> ZpStatus {
    guard(|| {
        let program = program.as_ref().ok_or_else(|| null("program"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_out(out, ZpMetrics::from(&program.inner.metrics));
        Ok(())
    })
}

/// Program JSON. Release the string with [`zp_string_free`].
///
/// # Safety
/// `program` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_program_to_json(program: *const ZpProgram, out: *mut *mut c_char) -> ZpStatus {
    guard(|| {
        let program = program.as_ref().ok_or_else(|| null("program"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_out(out, into_c_string(program.inner.to_json()?)?);
        Ok(())
    })
}

/// # Safety
/// `program` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zp_program_free(program: *mut ZpProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Duration in µs of a single move over `distance_um` on `arch`.
///
/// # Safety
/// `arch` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_movement_time_us(
    arch: *const ZpArchitecture,
    distance_um: f64,
    out: *mut f64,
) -> ZpStatus {
    guard(|| {
        let arch = arch.as_ref().ok_or_else(|| null("arch"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_out(out, movement_time(distance_um, &arch.inner)? * 1e6);
        Ok(())
    })
}
