//! C ABI over `logpurity`.
//!
//! Rings, forms and verification reports are opaque handles owned by the
//! caller and released with the matching `*_free`. Every entry point returns
//! an [`LpStatus`]; on failure [`lp_last_error`] describes the error for the
//! calling thread. Panics are caught at the boundary and reported as
//! [`LpStatus::Panic`].

#![deny(unsafe_op_in_unsafe_fn)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use logpurity::cartier::cartier;
use logpurity::cech::{cech_cohomology, BoxPolicy, SheafSpec};
use logpurity::cli::{execute, render, Format, Output, RunConfig, Task};
use logpurity::forms::{FormRing, LogForm};
use logpurity::gf::PrimeField;
use logpurity::suites::SuiteParams;
use logpurity::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Ok = 0,
    InvalidArgument = 1,
    ResourceLimit = 2,
    VerificationFailed = 3,
    NullPointer = 4,
    Parse = 5,
    BufferTooSmall = 6,
    Internal = 7,
    Panic = 8,
}

/// A coefficient ring `F_p[T_1..T_m]` with log variables and a weight window.
pub struct LpRing(FormRing);

/// A homogeneous log differential form over an [`LpRing`].
pub struct LpForm(LogForm);

/// Outcome of a verification run: its JSON rendering and overall verdict.
pub struct LpReport {
    json: CString,
    passed: bool,
    checks: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> LpStatus {
    match e {
        Error::ResourceLimit(_) => LpStatus::ResourceLimit,
        Error::Parse { .. } => LpStatus::Parse,
        Error::Internal(_) | Error::Io(_) => LpStatus::Internal,
        _ => LpStatus::InvalidArgument,
    }
}

/// Runs `body`, recording errors and catching panics.
fn guard<F>(body: F) -> LpStatus
where
    F: FnOnce() -> Result<(), (LpStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            LpStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("panic: {msg}"));
            LpStatus::Panic
        }
    }
}

fn lib<T>(r: logpurity::Result<T>) -> Result<T, (LpStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (LpStatus, String) {
    (LpStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or point to a live `T`.
unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, (LpStatus, String)> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

/// # Safety
/// `p` must be null or a NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (LpStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| (LpStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// # Safety
/// `data` must be null with `len == 0`, or point to `len` readable values.
unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], (LpStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(unsafe { std::slice::from_raw_parts(data, len) })
}

fn put<T>(out: *mut *mut T, value: T) -> Result<(), (LpStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Copies `s` and its NUL into `buf` when it fits; `*needed` receives the
/// size including the NUL either way.
fn copy_out(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Result<(), (LpStatus, String)> {
    let bytes = s.as_bytes();
    if !needed.is_null() {
        unsafe { *needed = bytes.len() + 1 };
    }
    if buf.is_null() || cap < bytes.len() + 1 {
        return Err((LpStatus::BufferTooSmall, format!("need {} bytes", bytes.len() + 1)));
    }
    unsafe {
        ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, bytes.len());
        *buf.add(bytes.len()) = 0;
    }
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn lp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates `F_p[T_1..T_m]` with log variables `log_labels` (1-based) and
/// window radius `radius` (0 keeps the default).
///
/// # Safety
/// `log_labels` must point to `n_log` bytes (or be null with `n_log == 0`);
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_ring_new(p: u32, m: usize, log_labels: *const u8, n_log: usize, radius: i32, out: *mut *mut LpRing) -> LpStatus {
    guard(|| {
        let labels = unsafe { slice(log_labels, n_log, "log_labels") }?;
        let mut r = lib(FormRing::new(lib(PrimeField::new(p))?, m))?;
        r = lib(r.with_log(labels))?;
        if radius != 0 {
            r = lib(r.with_radius(radius))?;
        }
        put(out, LpRing(r))
    })
}

/// # Safety
/// `ring` must be null or come from [`lp_ring_new`] and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn lp_ring_free(ring: *mut LpRing) {
    if !ring.is_null() {
        drop(unsafe { Box::from_raw(ring) });
    }
}

/// Parses a form such as `2*T1^3*T2 dlogT1^dT3`. `degree < 0` infers the degree.
///
/// # Safety
/// `ring` must be a live ring handle, `text` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lp_form_parse(ring: *const LpRing, text_in: *const c_char, degree: i32, out: *mut *mut LpForm) -> LpStatus {
    guard(|| {
        let r = unsafe { borrow(ring, "ring") }?.0;
        let s = unsafe { text(text_in, "text") }?;
        let f = if degree < 0 { lib(LogForm::parse(r, s))? } else { lib(LogForm::parse_with_degree(r, s, degree as usize))? };
        put(out, LpForm(f))
    })
}

/// # Safety
/// `form` must be null or a live form handle.
#[no_mangle]
pub unsafe extern "C" fn lp_form_free(form: *mut LpForm) {
    if !form.is_null() {
        drop(unsafe { Box::from_raw(form) });
    }
}

/// Writes the form's text into `buf` (capacity `cap`); `*needed` gets the
/// required size. Returns `BufferTooSmall` when `cap` is short.
///
/// # Safety
/// `form` live; `buf` writable for `cap` bytes or null; `needed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn lp_form_to_string(form: *const LpForm, buf: *mut c_char, cap: usize, needed: *mut usize) -> LpStatus {
    guard(|| {
        let f = unsafe { borrow(form, "form") }?;
        copy_out(&f.0.to_string(), buf, cap, needed)
    })
}

/// # Safety
/// `form` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lp_form_degree(form: *const LpForm, out: *mut usize) -> LpStatus {
    guard(|| {
        let f = unsafe { borrow(form, "form") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        unsafe { *out = f.0.degree() };
        Ok(())
    })
}

/// # Safety
/// `form` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lp_form_is_closed(form: *const LpForm, out: *mut bool) -> LpStatus {
    guard(|| {
        let f = unsafe { borrow(form, "form") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        unsafe { *out = f.0.is_closed() };
        Ok(())
    })
}

/// Exterior derivative.
///
/// # Safety
/// `form` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lp_form_differential(form: *const LpForm, out: *mut *mut LpForm) -> LpStatus {
    guard(|| {
        let f = unsafe { borrow(form, "form") }?;
        put(out, LpForm(f.0.differential()))
    })
}

/// Cartier operator on a closed form.
///
/// # Safety
/// `form` live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lp_form_cartier(form: *const LpForm, out: *mut *mut LpForm) -> LpStatus {
    guard(|| {
        let f = unsafe { borrow(form, "form") }?;
        put(out, LpForm(lib(cartier(&f.0))?))
    })
}

fn write_dims(dims: &[usize], out: *mut usize, cap: usize, len: *mut usize) -> Result<(), (LpStatus, String)> {
    if len.is_null() {
        return Err(null("out_len"));
    }
    unsafe { *len = dims.len() };
    if out.is_null() || cap < dims.len() {
        return Err((LpStatus::BufferTooSmall, format!("need {} entries", dims.len())));
    }
    unsafe { ptr::copy_nonoverlapping(dims.as_ptr(), out, dims.len()) };
    Ok(())
}

/// `dim H^i(P^n, Ω^j(log Σ_{s∈log} V(X_s))(twist))` for `i = 0..=n` into
/// `dims` (capacity `cap`); `*len` receives `n + 1`.
///
/// # Safety
/// `log` points to `n_log` values or is null with `n_log == 0`; `dims`
/// writable for `cap` entries; `len` valid.
#[no_mangle]
pub unsafe extern "C" fn lp_projective_cohomology(
    p: u32,
    n: usize,
    j: usize,
    twist: i32,
    log: *const usize,
    n_log: usize,
    dims: *mut usize,
    cap: usize,
    len: *mut usize,
) -> LpStatus {
    guard(|| {
        let log = unsafe { slice(log, n_log, "log") }?;
        let spec = SheafSpec::projective(n, j, log, twist);
        let r = lib(cech_cohomology(lib(PrimeField::new(p))?, &spec, BoxPolicy::default()))?;
        write_dims(&r.dims, dims, cap, len)
    })
}

/// Čech dimensions of `Ω^j(log(E + D̄_1))` on the blowup of `A^m` along
/// `V(T_1..T_c)`. Entry 0 is truncated to the stabilized weight box.
///
/// # Safety
/// `dims` writable for `cap` entries; `len` valid.
#[no_mangle]
pub unsafe extern "C" fn lp_blowup_cohomology(p: u32, m: usize, c: usize, j: usize, dims: *mut usize, cap: usize, len: *mut usize) -> LpStatus {
    guard(|| {
        let r = lib(cech_cohomology(lib(PrimeField::new(p))?, &SheafSpec::blowup(m, c, j), BoxPolicy::default()))?;
        write_dims(&r.dims, dims, cap, len)
    })
}

/// Runs a verification suite (`"all"` for every suite). `p == 0`, `m < 0`
/// and `n < 0` keep the suite's default grid. A report is produced even when
/// checks fail; the status is then `VerificationFailed`.
///
/// # Safety
/// `suite` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lp_verify(suite: *const c_char, p: u32, m: i32, n: i32, out: *mut *mut LpReport) -> LpStatus {
    let mut failed = false;
    let status = guard(|| {
        let name = unsafe { text(suite, "suite") }?;
        let params = SuiteParams {
            primes: (p != 0).then(|| vec![p]),
            m: (m >= 0).then_some(m as usize),
            n: (n >= 0).then_some(n as usize),
        };
        let task = Task::Verify { suite: (name != "all").then(|| name.to_string()), params };
        let output = lib(execute(&RunConfig::new(task)))?;
        let Output::Checks(checks) = &output else {
            return Err((LpStatus::Internal, "verify produced no checks".into()));
        };
        let json = lib(render(&output, Format::Json))?;
        let passed = output.success();
        failed = !passed;
        put(out, LpReport { json: CString::new(json).map_err(|e| (LpStatus::Internal, e.to_string()))?, passed, checks: checks.len() })
    });
    if status == LpStatus::Ok && failed {
        set_error("some checks failed");
        return LpStatus::VerificationFailed;
    }
    status
}

/// JSON array of check outcomes; valid while the report lives.
///
/// # Safety
/// `report` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn lp_report_json(report: *const LpReport) -> *const c_char {
    match unsafe { report.as_ref() } {
        Some(r) => r.json.as_ptr(),
        None => ptr::null(),
    }
}

/// # Safety
/// `report` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn lp_report_passed(report: *const LpReport) -> bool {
    unsafe { report.as_ref() }.is_some_and(|r| r.passed)
}

/// # Safety
/// `report` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn lp_report_checks(report: *const LpReport) -> usize {
    unsafe { report.as_ref() }.map_or(0, |r| r.checks)
}

/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn lp_report_free(report: *mut LpReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}
