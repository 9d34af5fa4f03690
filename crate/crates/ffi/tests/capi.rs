use std::ffi::{CStr, CString};
use std::ptr;

use vndim_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(vndim_last_error()) }.to_str().unwrap().to_string()
}

struct Session(*mut VndimSession);

impl Session {
    fn new(profile: &str) -> Session {
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { vndim_session_new(c(profile).as_ptr(), &mut s) }, VndimStatus::Ok);
        Session(s)
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        unsafe { vndim_session_free(self.0) }
    }
}

fn take(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { vndim_string_free(p) };
    s
}

#[test]
fn ball_sizes() {
    assert_eq!(vndim_path_ball_size(5, 1), 17);
    assert_eq!(vndim_path_ball_size(1, 10), 118097);
}

#[test]
fn unknown_profile_is_rejected() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { vndim_session_new(c("huge").as_ptr(), &mut s) }, VndimStatus::InvalidArgument);
    assert!(s.is_null());
    assert!(last_error().contains("huge"));
    assert_eq!(unsafe { vndim_session_new(ptr::null(), &mut s) }, VndimStatus::NullPointer);
}

#[test]
fn nullity_codes() {
    let s = Session::new("desk");
    let mut n = 9usize;
    assert_eq!(unsafe { vndim_nullity(s.0, 11, 11, &mut n) }, VndimStatus::Ok);
    assert_eq!(n, 1);
    assert_eq!(unsafe { vndim_nullity(s.0, 11, 12, &mut n) }, VndimStatus::Ok);
    assert_eq!(n, 0);
    assert_eq!(unsafe { vndim_nullity(s.0, 11, 13, &mut n) }, VndimStatus::InvalidArgument);
    assert_eq!(unsafe { vndim_nullity(ptr::null(), 11, 11, &mut n) }, VndimStatus::NullPointer);
    assert!(last_error().contains("session"));
}

#[test]
fn membership() {
    let s = Session::new("desk");
    let mut m = false;
    assert_eq!(unsafe { vndim_is_member(s.0, c("1").as_ptr(), c("bbbaBBB").as_ptr(), &mut m) }, VndimStatus::Ok);
    assert!(m);
    assert_eq!(unsafe { vndim_is_member(s.0, c("").as_ptr(), c("bbbaBBB").as_ptr(), &mut m) }, VndimStatus::Ok);
    assert!(!m);
    assert_eq!(unsafe { vndim_is_member(s.0, c("7").as_ptr(), c("a").as_ptr(), &mut m) }, VndimStatus::InvalidArgument);
    assert_eq!(unsafe { vndim_is_member(s.0, c("1").as_ptr(), c("xyz").as_ptr(), &mut m) }, VndimStatus::InvalidArgument);
}

#[test]
fn configure_then_report() {
    let s = Session::new("paper");
    assert_eq!(unsafe { vndim_session_configure(s.0, c("lengths = 3\nprecision = 10").as_ptr()) }, VndimStatus::Ok);
    assert_eq!(unsafe { vndim_session_configure(s.0, c("nonsense").as_ptr()) }, VndimStatus::InvalidArgument);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { vndim_dimension(s.0, c("").as_ptr(), 10, &mut out) }, VndimStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["partial_sum_display"], "2^-354292");
    assert_eq!(v["lengths"], serde_json::json!([[1, 3]]));
}

#[test]
fn certificate_round_trip() {
    let s = Session::new("paper");
    unsafe { vndim_session_configure(s.0, c("lengths = 3").as_ptr()) };
    let mut certified = false;
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { vndim_compare(s.0, c("").as_ptr(), c("1").as_ptr(), 23, &mut certified, &mut out) },
        VndimStatus::Ok
    );
    assert!(certified);
    let json = take(out);
    let mut consistent = false;
    assert_eq!(unsafe { vndim_recheck_certificate(c(&json).as_ptr(), &mut consistent) }, VndimStatus::Ok);
    assert!(consistent);
    let forged = json.replace("CERTIFIED_POSITIVE", "INCONCLUSIVE");
    assert_eq!(unsafe { vndim_recheck_certificate(c(&forged).as_ptr(), &mut consistent) }, VndimStatus::Ok);
    assert!(!consistent);
    assert_eq!(
        unsafe { vndim_compare(s.0, c("1").as_ptr(), c("").as_ptr(), 23, &mut certified, ptr::null_mut()) },
        VndimStatus::NullPointer
    );
}

#[test]
fn header_lists_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/vndim.h")).unwrap();
    for name in [
        "vndim_last_error",
        "vndim_session_new",
        "vndim_session_configure",
        "vndim_session_free",
        "vndim_string_free",
        "vndim_path_ball_size",
        "vndim_nullity",
        "vndim_is_member",
        "vndim_dimension",
        "vndim_compare",
        "vndim_recheck_certificate",
        "VNDIM_STATUS_PANIC",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
