//! C ABI over the oblot simulator.
//!
//! Every object crosses the boundary as an opaque pointer created by a
//! `*_new`/`*_from_json`/`oblot_run` call and released by the matching
//! `*_free`. Fallible calls return an [`OblotStatus`]; the message of the most
//! recent failure on the calling thread is available from
//! [`oblot_last_error_message`]. Strings handed out by the library must be
//! released with [`oblot_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use oblot::engine::{run, RunStatus, Trace};
use oblot::scenario::{parse_scenario, Scenario};
use oblot::session::{Session, SessionError, StepRequest};
use oblot::{Error, Point, Tolerance};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OblotStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Schema = 3,
    Model = 4,
    Capability = 5,
    Usage = 6,
    Io = 7,
    UnknownRobot = 8,
    Finished = 9,
    FairnessForced = 10,
    Internal = 11,
    Panic = 12,
}

pub struct OblotScenario {
    inner: Scenario,
}

pub struct OblotTrace {
    inner: Trace,
}

pub struct OblotSession {
    inner: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn core_status(e: &Error) -> OblotStatus {
    match e {
        Error::Schema { .. } | Error::Json(_) => OblotStatus::Schema,
        Error::Model(_) => OblotStatus::Model,
        Error::Capability(_) => OblotStatus::Capability,
        Error::Usage(_) | Error::SequenceUndefined => OblotStatus::Usage,
        Error::Io(_) => OblotStatus::Io,
        Error::AdversaryContract(_) => OblotStatus::Internal,
    }
}

fn session_status(e: &SessionError) -> OblotStatus {
    match e {
        SessionError::UnknownSession(_) => OblotStatus::Internal,
        SessionError::UnknownRobot { .. } => OblotStatus::UnknownRobot,
        SessionError::Finished => OblotStatus::Finished,
        SessionError::Forced { .. } => OblotStatus::FairnessForced,
        SessionError::BadRequest(_) => OblotStatus::Usage,
        SessionError::Core(c) => core_status(c),
    }
}

struct Failure(OblotStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(core_status(&e), e.to_string())
    }
}

impl From<SessionError> for Failure {
    fn from(e: SessionError) -> Self {
        Failure(session_status(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(OblotStatus::Internal, e.to_string())
    }
}

/// Runs `f`, turning errors and panics into a status plus the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OblotStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OblotStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside oblot");
            OblotStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(OblotStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(OblotStatus::InvalidUtf8, e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(OblotStatus::NullPointer, format!("null {what} handle")))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(OblotStatus::NullPointer, format!("null {what} handle")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(OblotStatus::NullPointer, "null output pointer".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(OblotStatus::NullPointer, "null output pointer".into()));
    }
    let c = CString::new(s).map_err(|e| Failure(OblotStatus::Internal, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn oblot_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|c| c.as_ptr()).unwrap_or(ptr::null()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn oblot_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, released once.
#[no_mangle]
pub unsafe extern "C" fn oblot_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a scenario document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblot_scenario_from_json(json: *const c_char, out: *mut *mut OblotScenario) -> OblotStatus {
    guard(|| {
        let text = read_str(json)?;
        let inner = parse_scenario(text)?;
        inner.validate()?;
        put(out, OblotScenario { inner })
    })
}

/// # Safety
/// `scenario` must be null or a handle from this library, released once.
#[no_mangle]
pub unsafe extern "C" fn oblot_scenario_free(scenario: *mut OblotScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs a scenario to formation or its horizon.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblot_run(scenario: *const OblotScenario, out: *mut *mut OblotTrace) -> OblotStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let inner = run(&s.inner)?;
        put(out, OblotTrace { inner })
    })
}

/// # Safety
/// `trace` must be null or a handle from this library, released once.
#[no_mangle]
pub unsafe extern "C" fn oblot_trace_free(trace: *mut OblotTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// True when the run formed its pattern and went quiescent. False for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oblot_trace_formed(trace: *const OblotTrace) -> bool {
    trace.as_ref().is_some_and(|t| t.inner.status == RunStatus::Formed)
}

/// Number of executed rounds. Zero for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oblot_trace_rounds(trace: *const OblotTrace) -> u64 {
    trace.as_ref().map_or(0, |t| t.inner.events.len() as u64)
}

/// Number of completed epochs. Zero for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oblot_trace_epochs(trace: *const OblotTrace) -> u64 {
    trace.as_ref().map_or(0, |t| t.inner.epochs())
}

/// Hex digest of the round records. Release with `oblot_string_free`.
///
/// # Safety
/// `trace` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblot_trace_hash(trace: *const OblotTrace, out: *mut *mut c_char) -> OblotStatus {
    guard(|| put_string(out, deref(trace, "trace")?.inner.hash.clone()))
}

/// Line-delimited trace. Release with `oblot_string_free`.
///
/// # Safety
/// `trace` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblot_trace_to_jsonl(trace: *const OblotTrace, out: *mut *mut c_char) -> OblotStatus {
    guard(|| put_string(out, deref(trace, "trace")?.inner.to_jsonl()?))
}

/// Opens an interactive session on a scenario document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblot_session_new(json: *const c_char, out: *mut *mut OblotSession) -> OblotStatus {
    guard(|| {
        let text = read_str(json)?;
        let scenario = parse_scenario(text)?;
        scenario.validate()?;
        put(out, OblotSession { inner: Session::new("ffi".into(), scenario)? })
    })
}

/// # Safety
/// `session` must be null or a handle from this library, released once.
#[no_mangle]
pub unsafe extern "C" fn oblot_session_free(session: *mut OblotSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Session state as JSON. Release with `oblot_string_free`.
///
/// # Safety
/// `session` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblot_session_state(session: *const OblotSession, out: *mut *mut c_char) -> OblotStatus {
    guard(|| {
        let s = deref(session, "session")?;
        put_string(out, serde_json::to_string(&s.inner.state()?)?)
    })
}

/// Preview of `robot`'s next move as JSON, without changing the session.
///
/// # Safety
/// `session` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblot_session_what_if(
    session: *const OblotSession,
    robot: usize,
    out: *mut *mut c_char,
) -> OblotStatus {
    guard(|| {
        let s = deref(session, "session")?;
        put_string(out, serde_json::to_string(&s.inner.what_if(robot)?)?)
    })
}

/// Activates `robot` for one round; the response (state and round event) is JSON.
///
/// # Safety
/// `session` must be a live handle not used concurrently; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblot_session_step(
    session: *mut OblotSession,
    robot: usize,
    stop_fraction: f64,
    out: *mut *mut c_char,
) -> OblotStatus {
    guard(|| {
        let s = deref_mut(session, "session")?;
        let r = s.inner.step(&StepRequest { robot, stop_fraction })?;
        put_string(out, serde_json::to_string(&r)?)
    })
}

/// Smallest enclosing circle of `len` points given as parallel coordinate arrays.
///
/// # Safety
/// `xs` and `ys` must point to `len` readable values; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn oblot_sec(
    xs: *const f64,
    ys: *const f64,
    len: usize,
    out_cx: *mut f64,
    out_cy: *mut f64,
    out_r: *mut f64,
) -> OblotStatus {
    guard(|| {
        if xs.is_null() || ys.is_null() || out_cx.is_null() || out_cy.is_null() || out_r.is_null() {
            return Err(Failure(OblotStatus::NullPointer, "null coordinate pointer".into()));
        }
        let xs = std::slice::from_raw_parts(xs, len);
        let ys = std::slice::from_raw_parts(ys, len);
        let pts: Vec<Point> = xs.iter().zip(ys).map(|(&x, &y)| Point::new(x, y)).collect();
        let c = oblot::geometry::smallest_enclosing_circle(&pts, Tolerance::default())?;
        *out_cx = c.center.x;
        *out_cy = c.center.y;
        *out_r = c.radius;
        Ok(())
    })
}
