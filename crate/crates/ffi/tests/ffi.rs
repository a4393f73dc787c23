use std::ffi::{c_char, CStr, CString};
use std::ptr;

use spinfact_ffi::*;

fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { spinfact_string_free(p) };
    s
}

fn last_error() -> String {
    take_string(spinfact_last_error())
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(spinfact_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn algebra_handle_round_trip() {
    let fam = CString::new("s4-singlet").unwrap();
    let mode = CString::new("appendix").unwrap();
    let mut alg = ptr::null_mut();
    assert_eq!(unsafe { spinfact_algebra_new(fam.as_ptr(), mode.as_ptr(), &mut alg) }, SpinfactStatus::Ok);
    let (mut d, mut c, mut g) = (0usize, 0usize, 0usize);
    assert_eq!(unsafe { spinfact_algebra_dimensions(alg, &mut d, &mut c, &mut g) }, SpinfactStatus::Ok);
    assert_eq!((d, c, g), (28, 4, 24));
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { spinfact_algebra_to_json(alg, 0, &mut json) }, SpinfactStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(v["ideal_multiset"], "3x8");
    unsafe { spinfact_algebra_free(alg) };
}

#[test]
fn invalid_arguments_report_errors() {
    let bad = CString::new("s7").unwrap();
    let mode = CString::new("appendix").unwrap();
    let mut alg = ptr::null_mut();
    assert_eq!(unsafe { spinfact_algebra_new(bad.as_ptr(), mode.as_ptr(), &mut alg) }, SpinfactStatus::InvalidArgument);
    assert!(alg.is_null());
    assert!(last_error().contains("unknown family"));
    assert_eq!(unsafe { spinfact_algebra_new(ptr::null(), mode.as_ptr(), &mut alg) }, SpinfactStatus::NullPointer);
    assert!(last_error().contains("family"));
    let fam = CString::new("s2-iiab").unwrap();
    assert_eq!(unsafe { spinfact_algebra_new(fam.as_ptr(), mode.as_ptr(), ptr::null_mut()) }, SpinfactStatus::NullPointer);
    let mut d = 0usize;
    assert_eq!(
        unsafe { spinfact_algebra_dimensions(ptr::null(), &mut d, &mut d, &mut d) },
        SpinfactStatus::NullPointer
    );
    unsafe {
        spinfact_algebra_free(ptr::null_mut());
        spinfact_string_free(ptr::null_mut());
    }
}

#[test]
fn factorization_and_schedule() {
    let fam = CString::new("s2-iiab").unwrap();
    let mut fz = ptr::null_mut();
    assert_eq!(unsafe { spinfact_factorizer_new(fam.as_ptr(), &mut fz) }, SpinfactStatus::Ok);
    let mut n = 0usize;
    assert_eq!(unsafe { spinfact_factorizer_factor_count(fz, &mut n) }, SpinfactStatus::Ok);
    assert_eq!(n, 5);
    let mut fac = ptr::null_mut();
    assert_eq!(unsafe { spinfact_factorize(fz, 1.1, 0, &mut fac) }, SpinfactStatus::Ok);
    let (mut cost, mut fock) = (1.0, 1.0);
    assert_eq!(unsafe { spinfact_factorization_residuals(fac, &mut cost, &mut fock) }, SpinfactStatus::Ok);
    assert!(cost < 1e-10 && fock < 1e-6);
    let mut count = 0usize;
    assert_eq!(unsafe { spinfact_factorization_angles(fac, ptr::null_mut(), 0, &mut count) }, SpinfactStatus::Ok);
    assert_eq!(count, 5);
    let mut angles = vec![0.0; count];
    assert_eq!(unsafe { spinfact_factorization_angles(fac, angles.as_mut_ptr(), count, &mut count) }, SpinfactStatus::Ok);
    assert!(angles.iter().any(|a| *a != 0.0));
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { spinfact_factorization_to_json(fac, &mut json) }, SpinfactStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(v["family"], "s2-iiab");
    let mut total = 0usize;
    let mut sched = ptr::null_mut();
    assert_eq!(unsafe { spinfact_schedule_json(fz, fac, &mut total, &mut sched) }, SpinfactStatus::Ok);
    assert_eq!(total, 48);
    let v: serde_json::Value = serde_json::from_str(&take_string(sched)).unwrap();
    assert_eq!(v["n_qubits"], 6);
    assert_eq!(unsafe { spinfact_factorize(fz, f64::NAN, 0, &mut fac) }, SpinfactStatus::InvalidArgument);
    unsafe {
        spinfact_factorization_free(fac);
        spinfact_factorizer_free(fz);
    }
}

#[test]
fn vqe_from_json_config() {
    let cfg = CString::new(r#"{"pool": "sa", "source": "synthetic:3,1"}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { spinfact_vqe_run_json(cfg.as_ptr(), &mut out) }, SpinfactStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(v["converged"], true);

    let cfg = CString::new(r#"{"pool": "sa", "source": "synthetic:4,0", "max_iters": 1}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { spinfact_vqe_run_json(cfg.as_ptr(), &mut out) }, SpinfactStatus::NotConverged);
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(v["converged"], false);

    let cfg = CString::new("{not json").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { spinfact_vqe_run_json(cfg.as_ptr(), &mut out) }, SpinfactStatus::Parse);
    assert!(out.is_null());
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/spinfact.h");
    let src = include_str!("../src/lib.rs");
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for ty in ["SpinfactStatus", "SpinfactAlgebra", "SpinfactFactorizer", "SpinfactFactorization"] {
        assert!(header.contains(ty));
    }
}

#[test]
fn header_compiles_as_c() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| std::process::Command::new(c).arg("--version").output().is_ok()) else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile_dir();
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        "#include \"spinfact.h\"\nint main(void) { SpinfactAlgebra *a = 0; return spinfact_algebra_new(\"s2-iiab\", \"appendix\", &a) == SPINFACT_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let out = std::process::Command::new(cc).args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", include]).arg(&src).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("spinfact-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
