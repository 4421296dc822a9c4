//! C ABI for polyreason.
//!
//! Handles are opaque. Every call returns a `PrStatus`; on failure the
//! message is kept per thread and read with `pr_last_error`. Strings
//! returned through out-pointers are owned by the caller and released
//! with `pr_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use polyreason::config::RunConfig;
use polyreason::logiclang::Language;
use polyreason::pipeline::Pipeline;
use serde_json::json;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The configuration could not be read or is invalid.
    Config = 3,
    /// The program text has parse or validation errors.
    Diagnostics = 4,
    /// The run finished but at least one question has no answer.
    Partial = 5,
    /// An internal panic was caught at the boundary.
    Panic = 6,
}

/// Input language for `pr_check`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrLanguage {
    Lp = 0,
    Fol = 1,
    Csp = 2,
    Smt = 3,
}

impl From<PrLanguage> for Language {
    fn from(l: PrLanguage) -> Self {
        match l {
            PrLanguage::Lp => Language::Lp,
            PrLanguage::Fol => Language::Fol,
            PrLanguage::Csp => Language::Csp,
            PrLanguage::Smt => Language::Smt,
        }
    }
}

/// Opaque pipeline handle.
pub struct PrPipeline {
    inner: Pipeline,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(PrStatus, String);

fn guard(f: impl FnOnce() -> Result<PrStatus, Fail>) -> PrStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal error: {msg}"));
            PrStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(PrStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(PrStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn check_out<T>(out: *mut T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        Err(Fail(PrStatus::NullArgument, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Creates a pipeline with the offline defaults.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pr_pipeline_new(out: *mut *mut PrPipeline) -> PrStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = Box::into_raw(Box::new(PrPipeline { inner: Pipeline::offline() }));
        Ok(PrStatus::Ok)
    })
}

/// Creates a pipeline from a TOML configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pr_pipeline_from_config(path: *const c_char, out: *mut *mut PrPipeline) -> PrStatus {
    guard(|| {
        check_out(out, "out")?;
        let path = read_str(path, "path")?;
        let cfg = RunConfig::load(Path::new(path)).map_err(|e| Fail(PrStatus::Config, e.to_string()))?;
        let inner = cfg.pipeline().map_err(|e| Fail(PrStatus::Config, e.to_string()))?;
        *out = Box::into_raw(Box::new(PrPipeline { inner }));
        Ok(PrStatus::Ok)
    })
}

/// Releases a pipeline. Null is ignored.
///
/// # Safety
/// `pipeline` must come from a `pr_pipeline_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pr_pipeline_free(pipeline: *mut PrPipeline) {
    if !pipeline.is_null() {
        drop(Box::from_raw(pipeline));
    }
}

/// Solves every question in `text`. On `PR_STATUS_OK` or `PR_STATUS_PARTIAL`,
/// `out_json` receives `{"answers":[{"problem_id","answer"}],"complete":bool}`,
/// plus `"trace"` when `with_trace` is non-zero.
///
/// # Safety
/// `pipeline` must be a live handle, `text` a NUL-terminated string and
/// `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pr_solve(
    pipeline: *const PrPipeline,
    text: *const c_char,
    with_trace: i32,
    out_json: *mut *mut c_char,
) -> PrStatus {
    guard(|| {
        check_out(out_json, "out_json")?;
        *out_json = ptr::null_mut();
        let p = pipeline.as_ref().ok_or_else(|| Fail(PrStatus::NullArgument, "pipeline is null".into()))?;
        let text = read_str(text, "text")?;
        let run = p.inner.run(text);
        let answers: Vec<_> = run
            .answers
            .iter()
            .map(|(id, a)| json!({ "problem_id": id.as_str(), "answer": a.to_string() }))
            .collect();
        let complete = run.complete();
        let mut doc = json!({ "answers": answers, "complete": complete });
        if with_trace != 0 {
            doc["trace"] = serde_json::to_value(&run.trace).map_err(|e| Fail(PrStatus::Panic, e.to_string()))?;
        }
        *out_json = into_c(doc.to_string());
        if complete {
            Ok(PrStatus::Ok)
        } else {
            set_error("not every question was answered");
            Ok(PrStatus::Partial)
        }
    })
}

/// Parses and validates a program. On `PR_STATUS_DIAGNOSTICS`, `out_diagnostics`
/// (when non-null) receives one diagnostic per line.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out_diagnostics` may be null.
#[no_mangle]
pub unsafe extern "C" fn pr_check(language: PrLanguage, text: *const c_char, out_diagnostics: *mut *mut c_char) -> PrStatus {
    guard(|| {
        if !out_diagnostics.is_null() {
            *out_diagnostics = ptr::null_mut();
        }
        let text = read_str(text, "text")?;
        match Language::from(language).parse(text) {
            Ok(_) => Ok(PrStatus::Ok),
            Err(d) => {
                let msg = d.to_string();
                if !out_diagnostics.is_null() {
                    *out_diagnostics = into_c(msg.clone());
                }
                Err(Fail(PrStatus::Diagnostics, msg))
            }
        }
    })
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn pr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
