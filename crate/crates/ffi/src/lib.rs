//! C interface over `vndim`.
//!
//! Every call returns a [`VndimStatus`]; outputs go through pointers. Strings
//! handed out are owned by the caller and released with
//! [`vndim_string_free`]. After a failure [`vndim_last_error`] describes it
//! until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use vndim::config::{parse_indices, Profile, RunConfig};
use vndim::geometry::{path_ball_size, ReducedWord};
use vndim::quotient::{build_quotient_graph, kernel_at_4, QuotientCase};
use vndim::series::{compare, partial_dimension, recheck_certificate, Verdict};
use vndim::subgroup::{Membership, SubgroupSpec};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VndimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ComputationFailed = 4,
    Panic = 5,
}

/// Settings shared by calls: rule constants, generator lengths, length rule.
pub struct VndimSession {
    config: RunConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(VndimStatus, String);

impl Failure {
    fn arg(msg: impl ToString) -> Self {
        Failure(VndimStatus::InvalidArgument, msg.to_string())
    }

    fn compute(msg: impl ToString) -> Self {
        Failure(VndimStatus::ComputationFailed, msg.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VndimStatus {
    set_last_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VndimStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            VndimStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(VndimStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(VndimStatus::InvalidUtf8, e.to_string()))
}

unsafe fn session<'a>(s: *const VndimSession) -> Result<&'a VndimSession, Failure> {
    s.as_ref().ok_or_else(|| Failure(VndimStatus::NullPointer, "null session".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(VndimStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(Failure::compute)?;
    write_out(out, c.into_raw())
}

fn spec_of(config: &RunConfig, indices: &str) -> Result<SubgroupSpec, Failure> {
    let set = parse_indices(indices).map_err(Failure::arg)?;
    SubgroupSpec::new(set, config.lengths.clone()).map_err(Failure::arg)
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the thread.
#[no_mangle]
pub extern "C" fn vndim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a session for `profile` ("paper" or "desk").
///
/// # Safety
/// `profile` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vndim_session_new(profile: *const c_char, out: *mut *mut VndimSession) -> VndimStatus {
    guard(|| {
        let profile: Profile = read_str(profile)?.parse().map_err(Failure::arg)?;
        let boxed = Box::new(VndimSession { config: RunConfig::for_profile(profile) });
        write_out(out, Box::into_raw(boxed))
    })
}

/// Applies `key = value` lines, as in a config file.
///
/// # Safety
/// `s` must come from [`vndim_session_new`]; `text` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn vndim_session_configure(s: *mut VndimSession, text: *const c_char) -> VndimStatus {
    guard(|| {
        let text = read_str(text)?;
        let s = s.as_mut().ok_or_else(|| Failure(VndimStatus::NullPointer, "null session".into()))?;
        let mut next = s.config.clone();
        next.apply(text).map_err(Failure::arg)?;
        s.config = next;
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`vndim_session_new`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn vndim_session_free(s: *mut VndimSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a string handed out by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn vndim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `|B(P, r)|` for a path `P` with `vertices` vertices.
#[no_mangle]
pub extern "C" fn vndim_path_ball_size(vertices: u64, r: u32) -> u64 {
    path_ball_size(vertices, r)
}

/// Nullity of `Q - 4` for the quotient graph with `len` path vertices.
/// `case_code` is 11, 12 or 22.
///
/// # Safety
/// `s` must come from [`vndim_session_new`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vndim_nullity(s: *const VndimSession, len: usize, case_code: u32, out: *mut usize) -> VndimStatus {
    guard(|| {
        let s = session(s)?;
        let case: QuotientCase = case_code.to_string().parse().map_err(Failure::arg)?;
        let g = build_quotient_graph(len, case, &s.config.params).map_err(Failure::arg)?;
        write_out(out, kernel_at_4(&g).nullity())
    })
}

/// Whether `word` (letters a, A, b, B; "e" for the identity) lies in the
/// subgroup generated by the listed indices, e.g. "1,2".
///
/// # Safety
/// Strings must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vndim_is_member(
    s: *const VndimSession,
    indices: *const c_char,
    word: *const c_char,
    out: *mut bool,
) -> VndimStatus {
    guard(|| {
        let s = session(s)?;
        let spec = spec_of(&s.config, read_str(indices)?)?;
        let w: ReducedWord = read_str(word)?.parse().map_err(Failure::arg)?;
        write_out(out, Membership::new(&spec).contains(&w))
    })
}

/// Partial dimension report as JSON.
///
/// # Safety
/// Strings must be NUL-terminated; `out_json` writable. Free the result
/// with [`vndim_string_free`].
#[no_mangle]
pub unsafe extern "C" fn vndim_dimension(
    s: *const VndimSession,
    indices: *const c_char,
    truncation: usize,
    out_json: *mut *mut c_char,
) -> VndimStatus {
    guard(|| {
        let s = session(s)?;
        let spec = spec_of(&s.config, read_str(indices)?)?;
        let report = partial_dimension(&spec, truncation, &s.config.params, s.config.length_rule).map_err(Failure::compute)?;
        write_string(out_json, report.to_json(s.config.precision).to_string())
    })
}

/// Certificate comparing two index sets; `out_certified` is set to whether
/// the upper set's dimension is certified larger.
///
/// # Safety
/// Strings must be NUL-terminated; outputs writable. Free the JSON with
/// [`vndim_string_free`].
#[no_mangle]
pub unsafe extern "C" fn vndim_compare(
    s: *const VndimSession,
    lower: *const c_char,
    upper: *const c_char,
    truncation: usize,
    out_certified: *mut bool,
    out_json: *mut *mut c_char,
) -> VndimStatus {
    guard(|| {
        let s = session(s)?;
        let lo = spec_of(&s.config, read_str(lower)?)?;
        let hi = spec_of(&s.config, read_str(upper)?)?;
        let cert = compare(&lo, &hi, truncation, &s.config.params, s.config.length_rule).map_err(Failure::compute)?;
        if out_certified.is_null() || out_json.is_null() {
            return Err(Failure(VndimStatus::NullPointer, "null output pointer".into()));
        }
        write_out(out_certified, cert.verdict == Verdict::CertifiedPositive)?;
        write_string(out_json, cert.to_json().to_string())
    })
}

/// Re-derives a certificate's verdict from its JSON; `out_consistent` is
/// set to whether the stated verdict matches.
///
/// # Safety
/// `json` must be NUL-terminated; `out_consistent` writable.
#[no_mangle]
pub unsafe extern "C" fn vndim_recheck_certificate(json: *const c_char, out_consistent: *mut bool) -> VndimStatus {
    guard(|| {
        let value: serde_json::Value = serde_json::from_str(read_str(json)?).map_err(Failure::arg)?;
        write_out(out_consistent, recheck_certificate(&value).map_err(Failure::arg)?)
    })
}
