//! C ABI over `cubeproc`. Processes are opaque handles; results come back as
//! JSON strings owned by the caller and released with `cp_string_free`.
//! Every entry point returns a `CpStatus`; on failure the message is
//! available from `cp_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde::Deserialize;
use serde_json::json;

use cubeproc::extractor::{
    extract_line_witness, extract_one_sep_witness, extract_simplicial_witness, ExtractOptions, Extraction,
};
use cubeproc::format::{parse_process, parse_words, render_words};
use cubeproc::invariants::{
    separation_index_set, separation_index_tuple, type_of_set, type_of_tuple, DEFAULT_EXACT_CAP,
};
use cubeproc::process::{stationarity_modulus_lines, AnalysisParams, CubeProcess};
use cubeproc::report::{certificate_json, line_witness_json, separated_witness_json};
use cubeproc::{Error, Rational};

/// Opaque process handle.
pub struct CpProcess {
    inner: CubeProcess,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    Params = 5,
    NotStationary = 6,
    Inequality = 7,
    Budget = 8,
    /// Extraction found no witness; the output holds the certificate.
    Pseudorandom = 9,
    Other = 10,
    Panic = 11,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CpStatus {
    match e {
        Error::Parse(_) => CpStatus::Parse,
        Error::Params { .. } => CpStatus::Params,
        Error::NotStationary { .. } => CpStatus::NotStationary,
        Error::Inequality { .. } => CpStatus::Inequality,
        Error::Budget(_) => CpStatus::Budget,
        Error::Io(_) => CpStatus::Other,
        _ => CpStatus::Invalid,
    }
}

enum Fail {
    Status(CpStatus, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Status(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<CpStatus, Fail>) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside cubeproc".into());
            CpStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Status(CpStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Status(CpStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn write_out(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Status(CpStatus::NullArgument, "null output pointer".into()));
    }
    let c = CString::new(s).map_err(|_| Fail::Status(CpStatus::Other, "output contains a nul byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Parse a process spec. On success `*out` owns a handle for `cp_process_free`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_process_from_json(json: *const c_char, out: *mut *mut CpProcess) -> CpStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Status(CpStatus::NullArgument, "null output pointer".into()));
        }
        *out = ptr::null_mut();
        let p = parse_process(read_str(json)?)?;
        *out = Box::into_raw(Box::new(CpProcess { inner: p }));
        Ok(CpStatus::Ok)
    })
}

/// # Safety
/// `p` must come from `cp_process_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cp_process_free(p: *mut CpProcess) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The line stationarity modulus as an `"a/b"` string.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_eta_star_lines(p: *const CpProcess, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        let p = p.as_ref().ok_or(Fail::Status(CpStatus::NullArgument, "null process".into()))?;
        let m = stationarity_modulus_lines(&p.inner);
        write_out(out, m.eta_star.to_string())?;
        Ok(CpStatus::Ok)
    })
}

/// Type of a tuple given as a JSON word list.
///
/// # Safety
/// `words` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_type_of_tuple_json(words: *const c_char, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        let (a, ws) = parse_words(read_str(words)?, None)?;
        let tt = type_of_tuple(&ws)?;
        let ts = type_of_set(ws.iter())?;
        let v = json!({
            "tuple_type": render_words(&a, &tt.columns),
            "tuple_dim": tt.dim,
            "set_type": ts.elements.iter().map(|e| a.render(e)).collect::<Vec<_>>(),
            "set_dim": ts.dim,
        });
        write_out(out, v.to_string())?;
        Ok(CpStatus::Ok)
    })
}

/// Separation indices of a tuple and of its set.
///
/// # Safety
/// `words` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_separation_index_json(words: *const c_char, out: *mut *mut c_char) -> CpStatus {
    guard(|| {
        let (a, ws) = parse_words(read_str(words)?, None)?;
        let st = separation_index_tuple(&ws)?;
        let ss = separation_index_set(&ws, DEFAULT_EXACT_CAP)?;
        let v = json!({
            "tuple_index": st.value,
            "set_index": ss.value,
            "set_exact": ss.exact,
            "witness": ss.witness.map(|w| render_words(&a, &w)),
        });
        write_out(out, v.to_string())?;
        Ok(CpStatus::Ok)
    })
}

#[derive(Deserialize)]
struct ExtractRequest {
    mode: String,
    epsilon: Rational,
    sigma: Rational,
    #[serde(default)]
    eta: Option<Rational>,
    #[serde(default)]
    kappa: Option<usize>,
    #[serde(default)]
    m: Option<usize>,
    #[serde(default)]
    proof_shape: bool,
    #[serde(default)]
    allow_small_n: bool,
    #[serde(default)]
    seed: u64,
}

/// Run an extraction described by `request`
/// (`{"mode": "lines"|"onesep"|"simplicial", "epsilon": "a/b", "sigma": "a/b", ...}`).
/// Writes the witness or certificate JSON; returns `Pseudorandom` for a
/// certificate.
///
/// # Safety
/// `p` must be a live handle, `request` a nul-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cp_extract_json(
    p: *const CpProcess,
    request: *const c_char,
    out: *mut *mut c_char,
) -> CpStatus {
    guard(|| {
        let p = &p.as_ref().ok_or(Fail::Status(CpStatus::NullArgument, "null process".into()))?.inner;
        let req: ExtractRequest = serde_json::from_str(read_str(request)?).map_err(Error::from)?;
        let params = AnalysisParams::new(
            req.epsilon,
            req.sigma,
            req.eta.unwrap_or_else(Rational::zero),
            req.kappa.unwrap_or(p.k()),
            req.m.unwrap_or(1),
        )?;
        let opts = ExtractOptions {
            proof_shape: req.proof_shape,
            allow_small_n: req.allow_small_n,
            seed: req.seed,
            ..Default::default()
        };
        let a = p.alphabet();
        let (v, pseudo) = match req.mode.as_str() {
            "lines" => match extract_line_witness(p, &params, &opts)? {
                Extraction::Witness(w) => (line_witness_json(a, &w), false),
                Extraction::Pseudorandom(c) => (certificate_json(a, &c), true),
            },
            "onesep" | "simplicial" => {
                let r = if req.mode == "onesep" {
                    extract_one_sep_witness(p, &params, &opts)?
                } else {
                    extract_simplicial_witness(p, &params, &opts)?
                };
                match r {
                    Extraction::Witness(w) => (separated_witness_json(a, &w), false),
                    Extraction::Pseudorandom(c) => (certificate_json(a, &c), true),
                }
            }
            other => return Err(Fail::Status(CpStatus::Invalid, format!("unknown mode {other:?}"))),
        };
        write_out(out, v.to_string())?;
        Ok(if pseudo { CpStatus::Pseudorandom } else { CpStatus::Ok })
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn cp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
