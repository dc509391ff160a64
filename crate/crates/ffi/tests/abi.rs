//! Calls through the exported C ABI.

use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use zoneplace_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = zp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

const QASM: &str = "OPENQASM 2.0;\nqreg q[4];\ncz q[0],q[1];\ncz q[2],q[3];\ncz q[1],q[2];\n";

#[test]
fn compile_round_trip() {
    unsafe {
        let mut arch = ptr::null_mut();
        assert_eq!(zp_architecture_builtin(&mut arch), ZpStatus::Ok);
        let mut circuit = ptr::null_mut();
        assert_eq!(zp_circuit_parse(c(QASM).as_ptr(), ZpFormat::Qasm, &mut circuit), ZpStatus::Ok);
        assert_eq!(zp_circuit_num_qubits(circuit), 4);

        let mut metrics = [ZpMetrics::default(); 2];
        for (i, placer) in [ZpPlacer::Aware, ZpPlacer::Baseline].into_iter().enumerate() {
            let opts = ZpCompileOptions {
                placer,
                ..zp_compile_options_default(ZpProfile::Qasmbench)
            };
            let mut program = ptr::null_mut();
            assert_eq!(zp_compile(circuit, arch, &opts, &mut program), ZpStatus::Ok);
            assert_eq!(zp_program_metrics(program, &mut metrics[i]), ZpStatus::Ok);
            let mut json = ptr::null_mut();
            assert_eq!(zp_program_to_json(program, &mut json), ZpStatus::Ok);
            let value: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
            assert_eq!(
                value["metrics"]["rearrangement_steps"].as_u64().unwrap() as usize,
                metrics[i].rearrangement_steps
            );
            zp_string_free(json);
            zp_program_free(program);
        }
        assert!(metrics.iter().all(|m| m.rearrangement_steps > 0));

        // null options fall back to the default profile
        let mut program = ptr::null_mut();
        assert_eq!(zp_compile(circuit, arch, ptr::null(), &mut program), ZpStatus::Ok);
        zp_program_free(program);

        zp_circuit_free(circuit);
        zp_architecture_free(arch);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut circuit = ptr::null_mut();
        let src = c("OPENQASM 2.0;\nqreg q[3];\nccx q[0],q[1],q[2];\n");
        assert_eq!(zp_circuit_parse(src.as_ptr(), ZpFormat::Qasm, &mut circuit), ZpStatus::UnsupportedGate);
        assert!(circuit.is_null());
        assert!(last_error().contains("ccx"));

        assert_eq!(zp_circuit_parse(ptr::null(), ZpFormat::Qasm, &mut circuit), ZpStatus::NullPointer);
        let invalid = [0xffu8, 0];
        assert_eq!(
            zp_circuit_parse(invalid.as_ptr().cast(), ZpFormat::Json, &mut circuit),
            ZpStatus::InvalidUtf8
        );

        let mut arch = ptr::null_mut();
        assert_eq!(zp_architecture_load_json(c("{").as_ptr(), &mut arch), ZpStatus::Parse);
        assert_eq!(zp_architecture_builtin(&mut arch), ZpStatus::Ok);
        assert!(zp_last_error_message().is_null());

        assert_eq!(zp_circuit_parse(c(QASM).as_ptr(), ZpFormat::Qasm, &mut circuit), ZpStatus::Ok);
        let opts = ZpCompileOptions {
            alpha: -1.0,
            ..zp_compile_options_default(ZpProfile::Large)
        };
        let mut program = ptr::null_mut();
        assert_eq!(zp_compile(circuit, arch, &opts, &mut program), ZpStatus::Validation);
        assert!(last_error().contains("alpha"));
        assert_eq!(zp_compile(ptr::null(), arch, &opts, &mut program), ZpStatus::NullPointer);

        let mut us = 0.0;
        assert_eq!(zp_movement_time_us(arch, 110.0, &mut us), ZpStatus::Ok);
        assert!((us - 200.0).abs() < 1e-6, "{us}");
        assert_eq!(zp_movement_time_us(arch, -1.0, &mut us), ZpStatus::Contract);

        zp_circuit_free(circuit);
        zp_architecture_free(arch);
        zp_circuit_free(ptr::null_mut());
        zp_string_free(ptr::null_mut());
    }
}

#[test]
fn large_profile_defaults() {
    let o = zp_compile_options_default(ZpProfile::Large);
    assert_eq!((o.alpha, o.beta, o.gamma, o.delta), (0.2, 0.8, 5.0, 0.9));
    assert_eq!((o.window_rows, o.window_cols), (0, 0));
}

/// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libzoneplace_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
