use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use cubeproc::examples::example_intro_restricted;
use cubeproc::format::write_process;
use cubeproc::Rational;
use cubeproc_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { cp_string_free(s) };
    out
}

fn last_error() -> String {
    let p = cp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn handle() -> *mut CpProcess {
    let p = example_intro_restricted(3, &Rational::new(1, 2)).unwrap();
    let json = CString::new(write_process(&p)).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { cp_process_from_json(json.as_ptr(), &mut h) }, CpStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn line_extraction_through_the_abi() {
    let h = handle();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cp_eta_star_lines(h, &mut out) }, CpStatus::Ok);
    assert_eq!(take(out), "0/1");
    let req = CString::new(r#"{"mode":"lines","epsilon":"1/4","sigma":"1/96","allow_small_n":true}"#).unwrap();
    assert_eq!(unsafe { cp_extract_json(h, req.as_ptr(), &mut out) }, CpStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["gamma0"], serde_json::json!(["1", "3"]));
    assert_eq!(v["beta"], "3");
    unsafe { cp_process_free(h) };
}

#[test]
fn error_codes_and_messages() {
    let mut h = ptr::null_mut();
    let bad = CString::new("{").unwrap();
    assert_eq!(unsafe { cp_process_from_json(bad.as_ptr(), &mut h) }, CpStatus::Parse);
    assert!(h.is_null());
    assert!(last_error().starts_with("parse error"));
    assert_eq!(unsafe { cp_process_from_json(ptr::null(), &mut h) }, CpStatus::NullArgument);

    let h = handle();
    let mut out = ptr::null_mut();
    let req = CString::new(r#"{"mode":"lines","epsilon":"9/10","sigma":"1/96"}"#).unwrap();
    assert_eq!(unsafe { cp_extract_json(h, req.as_ptr(), &mut out) }, CpStatus::Params);
    assert!(last_error().contains("epsilon_upper"));
    unsafe { cp_process_free(h) };
    unsafe { cp_process_free(ptr::null_mut()) };
}

#[test]
fn words_entry_points() {
    let mut out = ptr::null_mut();
    let w = CString::new("[[1,2],[2,1],[1,1]]").unwrap();
    assert_eq!(unsafe { cp_separation_index_json(w.as_ptr(), &mut out) }, CpStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert!(v["set_index"].as_u64().unwrap() <= v["tuple_index"].as_u64().unwrap());
    assert_eq!(unsafe { cp_type_of_tuple_json(w.as_ptr(), &mut out) }, CpStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["tuple_dim"], 2);
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/cubeproc.h");
    let src = std::env::temp_dir().join("cubeproc_header_check.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\nint main(void) {{ CpProcess *p = 0; CpStatus s = CP_STATUS_OK; (void)p; return (int)s; }}\n"
        ),
    )
    .unwrap();
    let Ok(out) = Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg(&src).output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
