use dmkdv_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last() -> String {
    unsafe { CStr::from_ptr(dmkdv_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn theta_and_saddles() {
    let (mut re, mut im) = (0.0, 0.0);
    let st = unsafe { dmkdv_theta(2.0, 0.0, -12.0, &mut re, &mut im) };
    assert_eq!(st, DmkdvStatus::Ok);
    // lambda = 3/4, k = 5/4: theta = 3/4 (-12 + 4 * 25/16 + 2)
    assert!((re - 0.75 * (-10.0 + 6.25)).abs() < 1e-14 && im == 0.0);
    let (mut sr, mut si, mut se) = ([0.0; 4], [0.0; 4], [0.0; 4]);
    let st = unsafe { dmkdv_saddles(-12.0, sr.as_mut_ptr(), si.as_mut_ptr(), se.as_mut_ptr()) };
    assert_eq!(st, DmkdvStatus::Ok);
    assert!((sr[0] - 1.931_851_652_578_136_6).abs() < 1e-12);
    assert_eq!(se, [1.0, -1.0, 1.0, -1.0]);
}

#[test]
fn error_codes() {
    let mut re = 0.0;
    let st = unsafe { dmkdv_theta(0.0, 0.0, 1.0, &mut re, ptr::null_mut()) };
    assert_eq!(st, DmkdvStatus::NullPointer);
    assert!(last().contains("null"));
    let mut im = 0.0;
    let st = unsafe { dmkdv_theta(0.0, 0.0, 1.0, &mut re, &mut im) };
    assert_eq!(st, DmkdvStatus::Domain);
    assert!(!last().is_empty());
    let mut h = ptr::null_mut();
    let bad = CString::new("tanh+gaussian(1,2)").unwrap();
    let st = unsafe { dmkdv_scattering_new(bad.as_ptr(), 15.0, &mut h) };
    assert_eq!(st, DmkdvStatus::Config);
    assert!(h.is_null());
    unsafe { dmkdv_scattering_free(ptr::null_mut()) };
    let v = unsafe { CStr::from_ptr(dmkdv_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn handles_round_trip() {
    let mut h = ptr::null_mut();
    let d = CString::new("tanh").unwrap();
    assert_eq!(unsafe { dmkdv_scattering_new(d.as_ptr(), 15.0, &mut h) }, DmkdvStatus::Ok);
    let (mut re, mut im) = (1.0, 1.0);
    assert_eq!(unsafe { dmkdv_scattering_r(h, 3.0, &mut re, &mut im) }, DmkdvStatus::Ok);
    assert!(re.hypot(im) < 1e-8, "tanh is reflectionless");
    let mut n = 99;
    assert_eq!(unsafe { dmkdv_scattering_eigenvalue_count(h, &mut n) }, DmkdvStatus::Ok);
    let (mut a, mut b, mut c, mut e) = (0.0, 0.0, 0.0, 0.0);
    assert_eq!(unsafe { dmkdv_scattering_eigenvalue(h, n, &mut a, &mut b, &mut c, &mut e) }, DmkdvStatus::Domain);
    let mut q = 0.0;
    assert_eq!(unsafe { dmkdv_q_asym(h, 300.0, 30.0, DmkdvConvention::Normalized, &mut q) }, DmkdvStatus::Ok);
    assert_eq!(q, 1.0);
    assert_eq!(unsafe { dmkdv_q_asym(h, 180.0, 30.0, DmkdvConvention::Normalized, &mut q) }, DmkdvStatus::NearBoundary);
    let mut lf = ptr::null_mut();
    assert_eq!(unsafe { dmkdv_left_field_new(h, -10.0, &mut lf) }, DmkdvStatus::Ok);
    assert_eq!(unsafe { dmkdv_left_field_f(lf, 40.0, DmkdvConvention::Normalized, &mut re, &mut im) }, DmkdvStatus::Ok);
    assert!(re.abs() < 1e-6 && im.abs() < 1e-6);
    unsafe {
        dmkdv_left_field_free(lf);
        dmkdv_scattering_free(h);
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/dmkdv.h")).unwrap();
    for name in [
        "dmkdv_theta",
        "dmkdv_saddles",
        "dmkdv_scattering_new",
        "dmkdv_scattering_free",
        "dmkdv_q_asym",
        "dmkdv_left_field_f",
        "dmkdv_last_error",
        "typedef struct DmkdvScattering DmkdvScattering",
        "DMKDV_STATUS_NEAR_BOUNDARY",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}
