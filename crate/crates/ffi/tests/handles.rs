use fock_partition_ffi::*;
use std::ffi::CStr;
use std::process::Command;
use std::ptr;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe { fp_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn probs(s: *const FpState) -> Vec<f64> {
    let mut d = 0;
    assert_eq!(unsafe { fp_state_dim(s, &mut d) }, FpStatus::Ok);
    let mut v = vec![0.0; d];
    let mut needed = 0;
    assert_eq!(unsafe { fp_state_probs(s, v.as_mut_ptr(), v.len(), &mut needed) }, FpStatus::Ok);
    assert_eq!(needed, d);
    v
}

#[test]
fn binomial_state_roundtrip() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fp_state_binomial(2, 0.7, 3, &mut s) }, FpStatus::Ok);
    let p = probs(s);
    for (a, b) in p.iter().zip([0.09, 0.42, 0.49]) {
        assert!((a - b).abs() < 1e-15);
    }
    let mut tail = f64::NAN;
    assert_eq!(unsafe { fp_state_tail_mass(s, &mut tail) }, FpStatus::Ok);
    assert_eq!(tail, 0.0);
    unsafe { fp_state_free(s) };
}

#[test]
fn damping_number_state_gives_binomial() {
    let (mut n, mut out) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { fp_state_number(5, 6, &mut n) }, FpStatus::Ok);
    let eta: f64 = 0.6;
    assert_eq!(unsafe { fp_state_damp(n, -0.5 * eta.ln(), &mut out) }, FpStatus::Ok);
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { fp_state_binomial(5, eta, 6, &mut b) }, FpStatus::Ok);
    for (x, y) in probs(out).iter().zip(probs(b)) {
        assert!((x - y).abs() < 1e-12);
    }
    unsafe {
        fp_state_free(n);
        fp_state_free(out);
        fp_state_free(b);
    }
}

#[test]
fn photon_subtraction_matches_negative_binomial() {
    let (mut t, mut sub, mut nb) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { fp_state_negbinomial(2, 0.5, 64, &mut nb) }, FpStatus::Ok);
    let d = probs(nb).len();
    assert_eq!(unsafe { fp_state_thermal(0.5, d + 2, &mut t) }, FpStatus::Ok);
    let mut norm = 0.0;
    assert_eq!(unsafe { fp_state_photon_subtract(t, 2, &mut sub, &mut norm) }, FpStatus::Ok);
    assert!((norm - 2.0).abs() < 1e-10);
    for (x, y) in probs(sub).iter().zip(probs(nb)) {
        assert!((x - y).abs() < 1e-12);
    }
    let (mut mean, mut bound) = (0.0, 0.0);
    assert_eq!(unsafe { fp_state_mean_photon(nb, &mut mean, &mut bound) }, FpStatus::Ok);
    assert!((mean - 3.0).abs() < 1e-9 + bound);
    unsafe {
        fp_state_free(t);
        fp_state_free(sub);
        fp_state_free(nb);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fp_state_binomial(2, 1.5, 3, &mut s) }, FpStatus::Domain);
    assert!(s.is_null());
    assert!(last_error().contains("sigma"), "{}", last_error());
    assert!(fp_last_error_length() > 0);

    assert_eq!(unsafe { fp_state_number(0, 1, &mut s) }, FpStatus::Domain);
    assert_eq!(unsafe { fp_state_number(0, 2, ptr::null_mut()) }, FpStatus::NullPointer);
    assert_eq!(unsafe { fp_state_negbinomial(0, 0.001, 8, &mut s) }, FpStatus::Cutoff);
    assert!(last_error().contains("try a cutoff"));

    assert_eq!(unsafe { fp_state_number(1, 2, &mut s) }, FpStatus::Ok);
    assert_eq!(fp_last_error_length(), 0);
    let mut small = [0.0; 1];
    let mut needed = 0;
    assert_eq!(unsafe { fp_state_probs(s, small.as_mut_ptr(), 1, &mut needed) }, FpStatus::BufferTooSmall);
    assert_eq!(needed, 2);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fp_state_photon_subtract(s, 3, &mut out, ptr::null_mut()) }, FpStatus::Domain);
    let mut wide = ptr::null_mut();
    assert_eq!(unsafe { fp_state_number(1, 4, &mut wide) }, FpStatus::Ok);
    assert_eq!(unsafe { fp_state_photon_subtract(wide, 2, &mut out, ptr::null_mut()) }, FpStatus::Degenerate);
    assert!(out.is_null());
    unsafe { fp_state_free(wide) };
    assert_eq!(unsafe { fp_state_damp(s, -1.0, &mut out) }, FpStatus::Domain);
    unsafe { fp_state_free(s) };
    unsafe { fp_state_free(ptr::null_mut()) };
}

#[test]
fn partition_residuals() {
    let mut r = [0.0; 1];
    let mut max = 0.0;
    let st = unsafe { fp_partition_residuals(FpFamily::Binomial, 0.5, 10, 1, r.as_mut_ptr(), 1, &mut max) };
    assert_eq!(st, FpStatus::Ok);
    assert_eq!(r[0], 2f64.powi(-10));
    assert_eq!(max, r[0]);

    let mut r = [0.0; 20];
    let st = unsafe { fp_partition_residuals(FpFamily::NegativeBinomial, 0.5, 60, 20, r.as_mut_ptr(), 20, &mut max) };
    assert_eq!(st, FpStatus::Ok);
    assert!((max - 2.097021204462051e-6).abs() < 1e-12);
    let st = unsafe { fp_partition_residuals(FpFamily::Binomial, 0.5, 60, 20, r.as_mut_ptr(), 5, &mut max) };
    assert_eq!(st, FpStatus::BufferTooSmall);
}

#[test]
fn verify_all_passes() {
    let (mut total, mut failed) = (0, 0);
    assert_eq!(unsafe { fp_verify_all(1e-10, &mut total, &mut failed) }, FpStatus::Ok);
    assert!(total > 1000);
    assert_eq!(failed, 0);
    assert_eq!(unsafe { fp_verify_all(f64::NAN, &mut total, &mut failed) }, FpStatus::Domain);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(fp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/fock_partition.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["fp_state_number", "fp_state_free", "fp_partition_residuals", "fp_verify_all", "FP_STATUS_OK"] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).output() else {
        eprintln!("no C compiler on PATH; skipped syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
