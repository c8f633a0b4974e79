use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use infprod_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(infprod_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn family_round_trip() {
    let json = CString::new(r#"{"matrices": [[["1/2", "1/2"], ["1/3", "2/3"]], [["1/2", "1/2"], ["1/2", "1/2"]]], "v": ["1", "2"]}"#).unwrap();
    let mut fam = ptr::null_mut();
    unsafe {
        assert_eq!(infprod_family_from_json(json.as_ptr(), &mut fam), InfprodStatus::Ok);
        let (mut conv, mut cases) = (0, 0);
        assert_eq!(infprod_classify(fam, &mut conv, &mut cases), InfprodStatus::Ok);
        assert_eq!((conv, cases), (1, 0b1111));
        let (mut gap, mut pconv) = (f64::NAN, 0);
        assert_eq!(infprod_probe(fam, 40, 20, 0, 1e-3, &mut gap, &mut pconv), InfprodStatus::Ok);
        assert!(gap < 1e-3 && pconv == 1);
        infprod_family_free(fam);
    }
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new(r#"{"matrices": [[["1", "x"], ["0", "1"]]], "v": ["1", "1"]}"#).unwrap();
    let mut fam = ptr::null_mut();
    unsafe {
        assert_eq!(infprod_family_from_json(bad.as_ptr(), &mut fam), InfprodStatus::Parse);
        assert!(fam.is_null());
        assert!(last_error().contains("matrices[0][0][1]"));
        assert_eq!(infprod_family_from_json(ptr::null(), &mut fam), InfprodStatus::NullPointer);
        let entries = [-1.0, 0.0, 0.0, 1.0];
        assert_eq!(infprod_family_new(entries.as_ptr(), 1, 1.0, 1.0, &mut fam), InfprodStatus::Precondition);
        let (mut conv, mut cases) = (0, 0);
        assert_eq!(infprod_classify(ptr::null(), &mut conv, &mut cases), InfprodStatus::NullPointer);
        infprod_family_free(ptr::null_mut());
    }
}

#[test]
fn system_measures() {
    let (num, den) = ([1i64, 1, 8], [10i64, 10, 10]);
    let mut sys = ptr::null_mut();
    unsafe {
        assert_eq!(infprod_system_new(2, 2, num.as_ptr(), den.as_ptr(), 3, &mut sys), InfprodStatus::Ok);
        let mut letters = 0;
        assert_eq!(infprod_system_letters(sys, &mut letters), InfprodStatus::Ok);
        assert_eq!(letters, 4);
        let (mut wg, mut wit) = (1, 0);
        assert_eq!(infprod_weak_gibbs(sys, &mut wg, &mut wit), InfprodStatus::Ok);
        assert_eq!(wg, 0);
        assert_ne!(wit & INFPROD_WITNESS_B, 0);
        let mut total = 0.0;
        for e in 0..letters {
            let mut m = 0.0;
            assert_eq!(infprod_cylinder_measure(sys, &e, 1, &mut m), InfprodStatus::Ok);
            total += m;
        }
        assert!((total - 1.0).abs() < 1e-14);
        let big = 7usize;
        let mut m = 0.0;
        assert_eq!(infprod_cylinder_measure(sys, &big, 1, &mut m), InfprodStatus::Precondition);
        infprod_system_free(sys);
    }
}

#[test]
fn exact_and_monte_carlo_agree() {
    let json = CString::new(r#"{"a": 1, "b": 1, "p": ["1/2", "1/2"]}"#).unwrap();
    let (lo, hi) = (CString::new("0").unwrap(), CString::new("1").unwrap());
    let mut sys = ptr::null_mut();
    unsafe {
        assert_eq!(infprod_system_from_json(json.as_ptr(), &mut sys), InfprodStatus::Ok);
        let mut exact = InfprodEstimate::default();
        assert_eq!(infprod_interval_measure(sys, lo.as_ptr(), hi.as_ptr(), 0, 1e-12, &mut exact), InfprodStatus::Ok);
        assert!((exact.value - 2.0 / 3.0).abs() < 1e-9);
        let mut mc = InfprodEstimate::default();
        assert_eq!(infprod_monte_carlo(sys, 0.0, 1.0, 200_000, 3, 0, &mut mc), InfprodStatus::Ok);
        assert!((mc.value - exact.value).abs() < 4.0 * mc.std_error);
        infprod_system_free(sys);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(infprod_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_against_the_header() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipped");
        return;
    }
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // Test binaries and the static library both land in `target/<profile>/deps`.
    let lib_dir = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let staticlib = lib_dir.join("libinfprod_ffi.a");
    assert!(staticlib.exists(), "{} missing", staticlib.display());
    let exe = tempfile::tempdir().unwrap();
    let bin = exe.path().join("smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/smoke.c"))
        .arg(&staticlib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
