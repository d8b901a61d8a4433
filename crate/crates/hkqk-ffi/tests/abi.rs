use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use hkqk_ffi::*;

#[test]
fn cmap_run_through_the_abi() {
    let src = CString::new(r#"{"model": "cmap", "lambda2": "4/3", "samples": 5, "seed": 2, "mode": "sampled"}"#).unwrap();
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(hkqk_config_from_json(src.as_ptr(), &mut cfg), HkqkStatus::Ok);
        assert_eq!(hkqk_config_set_sampling(cfg, 1, 4, 3), HkqkStatus::Ok);
        assert_eq!(hkqk_config_set_sampling(cfg, 7, 4, 3), HkqkStatus::ConfigError);
        let mut report = ptr::null_mut();
        assert_eq!(hkqk_run(cfg, &mut report), HkqkStatus::Ok);
        assert_eq!(hkqk_report_passed(report), 1);
        let json = hkqk_report_to_json(report);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["summary"]["dim"], 8);
        hkqk_string_free(json);
        hkqk_report_free(report);
        hkqk_config_free(cfg);
    }
}

#[test]
fn failing_run_returns_a_report() {
    let src = CString::new(r#"{"model": "cmap", "lambda2": 1}"#).unwrap();
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(hkqk_config_from_json(src.as_ptr(), &mut cfg), HkqkStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(hkqk_run(cfg, &mut report), HkqkStatus::VerificationFailed);
        assert_eq!(hkqk_report_passed(report), 0);
        let text = hkqk_report_to_text(report);
        assert!(CStr::from_ptr(text).to_str().unwrap().contains("[FAIL] special_connection"));
        hkqk_string_free(text);
        hkqk_report_free(report);
        hkqk_config_free(cfg);
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", &format!("{dir}/include/hkqk.h")]).output() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
