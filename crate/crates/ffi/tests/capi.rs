use std::ffi::{CStr, CString};
use std::ptr;

use projent_ffi::*;

fn last_error() -> String {
    let p = projent_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn isotropic_dproj_through_handles() {
    unsafe {
        let mut rho = ptr::null_mut();
        let mut cone = ptr::null_mut();
        assert_eq!(projent_state_isotropic(2, 0.75, &mut rho), ProjentStatus::Ok);
        assert_eq!(projent_cone_ppt(2, 2, &mut cone), ProjentStatus::Ok);
        assert_eq!(projent_state_dim(rho), 4);
        let (mut bits, mut lower) = (0.0, 0.0);
        let s = projent_set_measure(ProjentMeasure::Dproj, rho, cone, 0.0, &mut bits, &mut lower);
        assert_eq!(s, ProjentStatus::Ok);
        assert!((bits - 3f64.log2()).abs() < 1e-6);
        assert!(lower <= bits + 1e-12 && bits - lower < 1e-5);
        let mut closed = 0.0;
        assert_eq!(projent_isotropic_dproj(2, 0.75, &mut closed), ProjentStatus::Ok);
        assert!((closed - bits).abs() < 1e-6);
        projent_state_free(rho);
        projent_cone_free(cone);
    }
}

#[test]
fn state_from_matrix_and_pairwise() {
    unsafe {
        let re = [0.9, 0.0, 0.0, 0.1];
        let half = [0.5, 0.0, 0.0, 0.5];
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(projent_state_new(re.as_ptr(), ptr::null(), 2, ptr::null(), 0, &mut a), ProjentStatus::Ok);
        assert_eq!(projent_state_new(half.as_ptr(), ptr::null(), 2, ptr::null(), 0, &mut b), ProjentStatus::Ok);
        let mut bits = 0.0;
        assert_eq!(projent_dproj(a, b, &mut bits), ProjentStatus::Ok);
        assert!((bits - 9f64.log2()).abs() < 1e-9);
        let mut cone = ptr::null_mut();
        assert_eq!(projent_cone_singleton(b, &mut cone), ProjentStatus::Ok);
        let mut set_bits = 0.0;
        let s = projent_set_measure(ProjentMeasure::Dproj, a, cone, 0.0, &mut set_bits, ptr::null_mut());
        assert_eq!(s, ProjentStatus::Ok);
        assert!((set_bits - bits).abs() < 1e-9);
        projent_cone_free(cone);
        projent_state_free(a);
        projent_state_free(b);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let bad = [1.0, 0.0, 0.0, -0.5];
        let mut s = ptr::null_mut();
        let status = projent_state_new(bad.as_ptr(), ptr::null(), 2, ptr::null(), 0, &mut s);
        assert_eq!(status, ProjentStatus::NotDensity);
        assert!(s.is_null());
        assert!(!last_error().is_empty());

        let mut bits = 0.0;
        let status = projent_set_measure(ProjentMeasure::Dmax, ptr::null(), ptr::null(), 0.0, &mut bits, ptr::null_mut());
        assert_eq!(status, ProjentStatus::NullPointer);
        assert!(last_error().contains("null"));

        assert_eq!(projent_isotropic_dproj(2, 1.5, &mut bits), ProjentStatus::InvalidArgument);
    }
}

#[test]
fn cone_from_json() {
    unsafe {
        let json = CString::new(r#"{"kind":"diagonal","dim":2}"#).unwrap();
        let mut cone = ptr::null_mut();
        assert_eq!(projent_cone_from_json(json.as_ptr(), &mut cone), ProjentStatus::Ok);
        let mut rho = ptr::null_mut();
        let plus = [0.5, 0.5, 0.5, 0.5];
        assert_eq!(projent_state_new(plus.as_ptr(), ptr::null(), 2, ptr::null(), 0, &mut rho), ProjentStatus::Ok);
        let mut bits = 0.0;
        let status = projent_rel_entropy_set(rho, cone, &mut bits, ptr::null_mut());
        assert_eq!(status, ProjentStatus::Ok);
        assert!((bits - 1.0).abs() < 1e-9);
        projent_state_free(rho);
        projent_cone_free(cone);
    }
}

#[test]
fn header_is_generated() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/projent.h")).unwrap();
    for sym in ["projent_set_measure", "ProjentStatus", "typedef struct ProjentState ProjentState"] {
        assert!(header.contains(sym), "missing {sym}");
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(projent_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
