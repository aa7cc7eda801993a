//! C ABI over `koszul-core`.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `_free` function. Every fallible call returns a
//! [`KoszulStatus`]; on anything other than `KOSZUL_STATUS_OK` a message is
//! available from [`koszul_last_error`] until the next failing call on the
//! same thread.
//! Strings returned to the caller are owned by it and released with
//! [`koszul_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};

use koszul_core::cli::{load_algebra, load_module, run, CliError, RunConfig, VERSION};
use koszul_core::duality::verify_duality;
use koszul_core::kg::{validate_kg, KgModule};
use koszul_core::lie::LieAlgebra;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KoszulStatus {
    Ok = 0,
    /// The computation ran and a check failed; any report is still written.
    MathFailure = 1,
    InvalidInput = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

/// A Lie algebra certified reductive.
pub struct KoszulAlgebra {
    inner: Arc<LieAlgebra>,
}

/// A differential g-module over some [`KoszulAlgebra`].
pub struct KoszulModule {
    inner: KgModule,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: KoszulStatus, msg: impl Into<String>) -> KoszulStatus {
    set_error(msg);
    status
}

fn from_cli(e: CliError) -> KoszulStatus {
    let status = if e.exit_code() == 2 { KoszulStatus::InvalidInput } else { KoszulStatus::MathFailure };
    fail(status, e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, KoszulStatus> {
    if p.is_null() {
        return Err(fail(KoszulStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(KoszulStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn guarded(f: impl FnOnce() -> KoszulStatus) -> KoszulStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(KoszulStatus::Panic, "internal panic"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) {
    *out = CString::new(s).map(CString::into_raw).unwrap_or(std::ptr::null_mut());
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn koszul_version() -> *const c_char {
    static V: OnceLock<CString> = OnceLock::new();
    V.get_or_init(|| CString::new(VERSION).expect("version has no nul byte")).as_ptr()
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn koszul_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn koszul_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a builtin (`su2`, `sl2`, `su2xsu2`, `abelian:n`) or a JSON file and
/// certifies it reductive.
///
/// # Safety
/// `spec` is a nul-terminated string and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn koszul_algebra_load(spec: *const c_char, out: *mut *mut KoszulAlgebra) -> KoszulStatus {
    guarded(|| {
        if out.is_null() {
            return fail(KoszulStatus::NullPointer, "out is null");
        }
        let spec = match read_str(spec, "spec") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match load_algebra(spec) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(KoszulAlgebra { inner: g }));
                KoszulStatus::Ok
            }
            Err(e) => from_cli(e),
        }
    })
}

/// Dimension of the algebra, 0 for a null handle.
///
/// # Safety
/// `g` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn koszul_algebra_dim(g: *const KoszulAlgebra) -> usize {
    g.as_ref().map_or(0, |g| g.inner.dim())
}

/// # Safety
/// `g` is null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn koszul_algebra_free(g: *mut KoszulAlgebra) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Builds a module from the same specs the command line accepts. The module
/// keeps its own reference to the algebra.
///
/// # Safety
/// `g` is a live handle, `spec` is nul-terminated and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn koszul_module_load(
    g: *const KoszulAlgebra,
    spec: *const c_char,
    out: *mut *mut KoszulModule,
) -> KoszulStatus {
    guarded(|| {
        let Some(g) = g.as_ref() else {
            return fail(KoszulStatus::NullPointer, "algebra is null");
        };
        if out.is_null() {
            return fail(KoszulStatus::NullPointer, "out is null");
        }
        let spec = match read_str(spec, "spec") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match load_module(&g.inner, spec) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(KoszulModule { inner: m }));
                KoszulStatus::Ok
            }
            Err(e) => from_cli(e),
        }
    })
}

/// Total dimension of the module's graded space.
///
/// # Safety
/// `m` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn koszul_module_total_dim(m: *const KoszulModule) -> usize {
    m.as_ref().map_or(0, |m| m.inner.dims().total())
}

/// # Safety
/// `m` is null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn koszul_module_free(m: *mut KoszulModule) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Checks the K(g) identities. Returns `KOSZUL_STATUS_MATH_FAILURE` if any fails.
///
/// # Safety
/// `m` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn koszul_module_validate(m: *const KoszulModule) -> KoszulStatus {
    guarded(|| {
        let Some(m) = m.as_ref() else {
            return fail(KoszulStatus::NullPointer, "module is null");
        };
        let r = validate_kg(&m.inner);
        match r.failures().first() {
            None => KoszulStatus::Ok,
            Some(bad) => fail(KoszulStatus::MathFailure, format!("identity {} fails", bad.identity)),
        }
    })
}

/// Runs the duality check through `max_degree - 1` and writes the JSON report
/// to `out_json` whether or not the check passes.
///
/// # Safety
/// `m` is a live handle and `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn koszul_duality(
    m: *const KoszulModule,
    max_degree: i32,
    corrupt_transgression: bool,
    out_json: *mut *mut c_char,
) -> KoszulStatus {
    guarded(|| {
        let Some(m) = m.as_ref() else {
            return fail(KoszulStatus::NullPointer, "module is null");
        };
        if out_json.is_null() {
            return fail(KoszulStatus::NullPointer, "out_json is null");
        }
        match verify_duality(&m.inner, max_degree, corrupt_transgression) {
            Ok(r) => {
                let pass = r.pass;
                write_string(out_json, serde_json::to_string_pretty(&r).expect("reports serialize"));
                if pass {
                    KoszulStatus::Ok
                } else {
                    fail(KoszulStatus::MathFailure, "duality check failed")
                }
            }
            Err(e) => from_cli(e.into()),
        }
    })
}

/// Runs one command from a JSON run configuration, the same object the
/// command line echoes under `config`, and writes the full envelope.
///
/// # Safety
/// `config_json` is nul-terminated and `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn koszul_run(config_json: *const c_char, out_json: *mut *mut c_char) -> KoszulStatus {
    guarded(|| {
        if out_json.is_null() {
            return fail(KoszulStatus::NullPointer, "out_json is null");
        }
        let text = match read_str(config_json, "config_json") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let cfg: RunConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(KoszulStatus::InvalidInput, format!("config: {e}")),
        };
        match run(&cfg) {
            Ok(env) => {
                write_string(out_json, env.to_json());
                if env.pass {
                    KoszulStatus::Ok
                } else {
                    fail(KoszulStatus::MathFailure, "check failed")
                }
            }
            Err(e) => from_cli(e),
        }
    })
}
