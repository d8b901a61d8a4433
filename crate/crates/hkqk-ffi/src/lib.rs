//! C ABI over the verification pipeline.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Strings returned by the library are released
//! with `hkqk_string_free`. On failure a function returns a status other than
//! `HKQK_STATUS_OK` and `hkqk_last_error` describes the failure on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hkqk::catalog;
use hkqk::pipeline::{self, ModelConfig};
use hkqk::verify::Mode;
use hkqk::{Error, VerificationReport};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkqkStatus {
    Ok = 0,
    /// The run completed and some check failed.
    VerificationFailed = 1,
    /// The configuration could not be parsed or is invalid.
    ConfigError = 2,
    /// The model could not be built or the run aborted.
    RunError = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// A parsed model configuration.
pub struct HkqkConfig {
    inner: ModelConfig,
}

/// A finished verification report.
pub struct HkqkReport {
    inner: VerificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> HkqkStatus) -> HkqkStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            HkqkStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, HkqkStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(HkqkStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        HkqkStatus::InvalidUtf8
    })
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn status_of(e: &Error) -> HkqkStatus {
    match e {
        Error::Parse(_) | Error::InvalidParams(_) => HkqkStatus::ConfigError,
        _ => HkqkStatus::RunError,
    }
}

/// Parses a model parameter file given as JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hkqk_config_from_json(json: *const c_char, out: *mut *mut HkqkConfig) -> HkqkStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return HkqkStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let src = match read_str(json) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match ModelConfig::from_json(src) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(HkqkConfig { inner: cfg }));
                HkqkStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Overrides the sampling settings; `mode` is 0 for symbolic, 1 for sampled.
///
/// # Safety
/// `config` must come from `hkqk_config_from_json`.
#[no_mangle]
pub unsafe extern "C" fn hkqk_config_set_sampling(config: *mut HkqkConfig, mode: c_int, samples: usize, seed: u64) -> HkqkStatus {
    guard(|| {
        let Some(cfg) = config.as_mut() else {
            set_error("null config");
            return HkqkStatus::NullPointer;
        };
        let mode = match mode {
            0 => Mode::Symbolic,
            1 => Mode::Sampled,
            m => {
                set_error(format!("unknown mode {m}"));
                return HkqkStatus::ConfigError;
            }
        };
        if samples == 0 {
            set_error("samples must be at least 1");
            return HkqkStatus::ConfigError;
        }
        cfg.inner.mode = mode;
        cfg.inner.samples = samples;
        cfg.inner.seed = seed;
        HkqkStatus::Ok
    })
}

/// # Safety
/// `config` must come from `hkqk_config_from_json` or be null.
#[no_mangle]
pub unsafe extern "C" fn hkqk_config_free(config: *mut HkqkConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the pipeline. A report is produced whenever the run completes, and
/// the status is `HKQK_STATUS_VERIFICATION_FAILED` if any check failed.
///
/// # Safety
/// `config` must come from `hkqk_config_from_json` and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hkqk_run(config: *const HkqkConfig, out: *mut *mut HkqkReport) -> HkqkStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return HkqkStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let Some(cfg) = config.as_ref() else {
            set_error("null config");
            return HkqkStatus::NullPointer;
        };
        match pipeline::run(&cfg.inner) {
            Ok(report) => {
                let passed = report.passed();
                *out = Box::into_raw(Box::new(HkqkReport { inner: report }));
                if passed {
                    HkqkStatus::Ok
                } else {
                    set_error("verification failed");
                    HkqkStatus::VerificationFailed
                }
            }
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

/// 1 if every check passed, 0 if not, -1 for a null report.
///
/// # Safety
/// `report` must come from `hkqk_run` or be null.
#[no_mangle]
pub unsafe extern "C" fn hkqk_report_passed(report: *const HkqkReport) -> c_int {
    match report.as_ref() {
        Some(r) => c_int::from(r.inner.passed()),
        None => -1,
    }
}

/// The report as JSON; null for a null report.
///
/// # Safety
/// `report` must come from `hkqk_run` or be null.
#[no_mangle]
pub unsafe extern "C" fn hkqk_report_to_json(report: *const HkqkReport) -> *mut c_char {
    report.as_ref().map_or(ptr::null_mut(), |r| to_c_string(r.inner.to_json()))
}

/// The report as text; null for a null report.
///
/// # Safety
/// `report` must come from `hkqk_run` or be null.
#[no_mangle]
pub unsafe extern "C" fn hkqk_report_to_text(report: *const HkqkReport) -> *mut c_char {
    report.as_ref().map_or(ptr::null_mut(), |r| to_c_string(r.inner.to_text()))
}

/// # Safety
/// `report` must come from `hkqk_run` or be null.
#[no_mangle]
pub unsafe extern "C" fn hkqk_report_free(report: *mut HkqkReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Every check name with its anchor, one per line.
#[no_mangle]
pub extern "C" fn hkqk_list_checks() -> *mut c_char {
    to_c_string(catalog::list())
}

/// # Safety
/// `s` must be a string returned by this library or null.
#[no_mangle]
pub unsafe extern "C" fn hkqk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn hkqk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> (HkqkStatus, *mut HkqkConfig) {
        let src = CString::new(json).unwrap();
        let mut cfg = ptr::null_mut();
        let s = unsafe { hkqk_config_from_json(src.as_ptr(), &mut cfg) };
        (s, cfg)
    }

    #[test]
    fn parse_errors_set_last_error() {
        let (s, cfg) = config("{not json");
        assert_eq!(s, HkqkStatus::ConfigError);
        assert!(cfg.is_null());
        assert!(!hkqk_last_error().is_null());
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { hkqk_config_from_json(ptr::null(), &mut out) }, HkqkStatus::NullPointer);
    }

    #[test]
    fn null_handles() {
        unsafe {
            assert_eq!(hkqk_report_passed(ptr::null()), -1);
            assert!(hkqk_report_to_json(ptr::null()).is_null());
            hkqk_report_free(ptr::null_mut());
            hkqk_config_free(ptr::null_mut());
            hkqk_string_free(ptr::null_mut());
            let mut out = ptr::null_mut();
            assert_eq!(hkqk_run(ptr::null(), &mut out), HkqkStatus::NullPointer);
        }
    }

    #[test]
    fn list_checks_round_trip() {
        let p = hkqk_list_checks();
        let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
        unsafe { hkqk_string_free(p) };
        assert!(s.contains("cmap_structure_constants"));
    }
}
