//! C interface to the `subrank` solver.
//!
//! Instances and runs are opaque heap handles released with
//! [`subrank_instance_free`] and [`subrank_run_free`]. Every fallible call
//! returns a [`SubrankStatus`]; on failure [`subrank_last_error`] describes
//! what went wrong on the calling thread. Element indices crossing the
//! boundary are 1-based, like the JSON formats.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use subrank::analysis::gamma_certificate;
use subrank::document::{parse_instance, to_canonical_json, TraceDocument};
use subrank::{
    adaptive_residual_updates, brute_force_optimal, cover_times, cumulative_greedy, CoverReport, Error, Instance,
    LinearOrdering, Producer, RunTrace, DEFAULT_TOLERANCE,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubrankStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The document could not be parsed or the instance is invalid.
    InvalidInstance = 3,
    /// The instance exceeds the brute-force limit.
    TooLarge = 4,
    BufferTooSmall = 5,
    InvalidArgument = 6,
    /// Solver traces exist only for the adaptive and greedy algorithms.
    NoTrace = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubrankAlgorithm {
    AdaptiveResidual = 0,
    CumulativeGreedy = 1,
    BruteForce = 2,
}

/// A validated instance.
pub struct SubrankInstance {
    inner: Instance,
}

/// The outcome of [`subrank_solve`].
pub struct SubrankRun {
    ordering: LinearOrdering,
    report: CoverReport,
    trace: Option<RunTrace>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("interior NULs were removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

struct Failure(SubrankStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(SubrankStatus::NullPointer, format!("{what} is NULL"))
    }
}

fn solver_failure(err: Error) -> Failure {
    let status = match err {
        Error::TooLarge { .. } => SubrankStatus::TooLarge,
        Error::NotAPermutation { .. } => SubrankStatus::InvalidArgument,
        _ => SubrankStatus::InvalidInstance,
    };
    Failure(status, err.to_string())
}

/// Runs `body`, turning errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SubrankStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            SubrankStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            SubrankStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(text: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if text.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| Failure(SubrankStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn deref<'a, T>(handle: *const T, what: &str) -> Result<&'a T, Failure> {
    handle.as_ref().ok_or_else(|| Failure::null(what))
}

/// Parses an instance document with the default threshold slack (1e-9).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn subrank_instance_from_json(
    json: *const c_char,
    out: *mut *mut SubrankInstance,
) -> SubrankStatus {
    subrank_instance_from_json_with_tolerance(json, DEFAULT_TOLERANCE, out)
}

/// Parses an instance document; a function counts as covered once its value
/// reaches `1 - tolerance`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn subrank_instance_from_json_with_tolerance(
    json: *const c_char,
    tolerance: f64,
    out: *mut *mut SubrankInstance,
) -> SubrankStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        *out = ptr::null_mut();
        let text = read_str(json, "json")?;
        let inner =
            parse_instance(text, tolerance).map_err(|e| Failure(SubrankStatus::InvalidInstance, e.to_string()))?;
        *out = Box::into_raw(Box::new(SubrankInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `instance` must be NULL or a handle from `subrank_instance_from_json*`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn subrank_instance_free(instance: *mut SubrankInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Number of elements `m`, or 0 for NULL.
///
/// # Safety
/// `instance` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subrank_instance_num_elements(instance: *const SubrankInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.num_elements())
}

/// Number of functions `n`, or 0 for NULL.
///
/// # Safety
/// `instance` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subrank_instance_num_functions(instance: *const SubrankInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.num_functions())
}

/// Writes the certified smallest marginal `epsilon_hat` and
/// `gamma = ln(1/epsilon_hat) + 2`.
///
/// # Safety
/// `instance` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn subrank_instance_gamma(
    instance: *const SubrankInstance,
    epsilon_hat: *mut f64,
    gamma: *mut f64,
) -> SubrankStatus {
    guard(|| {
        let instance = deref(instance, "instance")?;
        if epsilon_hat.is_null() || gamma.is_null() {
            return Err(Failure::null("output pointer"));
        }
        let cert = gamma_certificate(&instance.inner).map_err(solver_failure)?;
        *epsilon_hat = cert.epsilon_hat;
        *gamma = cert.gamma;
        Ok(())
    })
}

/// Cost of a caller-supplied 1-based ordering of length `m`.
///
/// # Safety
/// `instance` must be a live handle, `ordering` must point to `len` readable
/// values and `cost` must be writable.
#[no_mangle]
pub unsafe extern "C" fn subrank_cover_cost(
    instance: *const SubrankInstance,
    ordering: *const usize,
    len: usize,
    cost: *mut f64,
) -> SubrankStatus {
    guard(|| {
        let instance = deref(instance, "instance")?;
        if ordering.is_null() || cost.is_null() {
            return Err(Failure::null("ordering or cost"));
        }
        let order = std::slice::from_raw_parts(ordering, len);
        let ordering = LinearOrdering::from_one_based(order, Producer::External).map_err(solver_failure)?;
        if ordering.len() != instance.inner.num_elements() {
            return Err(Failure(
                SubrankStatus::InvalidArgument,
                format!(
                    "ordering has {len} entries, instance has {} elements",
                    instance.inner.num_elements()
                ),
            ));
        }
        *cost = cover_times(&instance.inner, &ordering)
            .map_err(solver_failure)?
            .total_cost;
        Ok(())
    })
}

/// Orders the elements of `instance`. `limit` caps the ground set size for
/// brute force (0 selects the default of 9) and is ignored otherwise.
///
/// # Safety
/// `instance` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn subrank_solve(
    instance: *const SubrankInstance,
    algorithm: SubrankAlgorithm,
    limit: usize,
    out: *mut *mut SubrankRun,
) -> SubrankStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        *out = ptr::null_mut();
        let instance = &deref(instance, "instance")?.inner;
        let run = match algorithm {
            SubrankAlgorithm::AdaptiveResidual | SubrankAlgorithm::CumulativeGreedy => {
                let trace = if algorithm == SubrankAlgorithm::AdaptiveResidual {
                    adaptive_residual_updates(instance)
                } else {
                    cumulative_greedy(instance)
                };
                SubrankRun {
                    ordering: trace.ordering.clone(),
                    report: trace.report(instance).map_err(solver_failure)?,
                    trace: Some(trace),
                }
            }
            SubrankAlgorithm::BruteForce => {
                let limit = if limit == 0 {
                    subrank::solvers::BRUTE_FORCE_DEFAULT_LIMIT
                } else {
                    limit
                };
                let opt = brute_force_optimal(instance, limit).map_err(solver_failure)?;
                SubrankRun {
                    ordering: opt.ordering,
                    report: opt.report,
                    trace: None,
                }
            }
        };
        *out = Box::into_raw(Box::new(run));
        Ok(())
    })
}

/// # Safety
/// `run` must be NULL or a handle from [`subrank_solve`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn subrank_run_free(run: *mut SubrankRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Total weighted cover time, or NaN for NULL.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subrank_run_cost(run: *const SubrankRun) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.report.total_cost)
}

unsafe fn copy_out(values: &[usize], buffer: *mut usize, len: usize) -> Result<(), Failure> {
    if buffer.is_null() {
        return Err(Failure::null("buffer"));
    }
    if len < values.len() {
        return Err(Failure(
            SubrankStatus::BufferTooSmall,
            format!("buffer holds {len} values, need {}", values.len()),
        ));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buffer, values.len());
    Ok(())
}

/// Copies the 1-based ordering (`m` values) into `buffer`.
///
/// # Safety
/// `run` must be a live handle and `buffer` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn subrank_run_ordering(run: *const SubrankRun, buffer: *mut usize, len: usize) -> SubrankStatus {
    guard(|| copy_out(&deref(run, "run")?.ordering.one_based(), buffer, len))
}

/// Copies the cover times (`n` values, each in `1..=m`) into `buffer`.
///
/// # Safety
/// `run` must be a live handle and `buffer` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn subrank_run_cover_times(
    run: *const SubrankRun,
    buffer: *mut usize,
    len: usize,
) -> SubrankStatus {
    guard(|| copy_out(&deref(run, "run")?.report.cover_times, buffer, len))
}

/// The canonical JSON trace of an adaptive or greedy run. Release the string
/// with [`subrank_string_free`].
///
/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn subrank_run_trace_json(run: *const SubrankRun, out: *mut *mut c_char) -> SubrankStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        *out = ptr::null_mut();
        let trace = deref(run, "run")?
            .trace
            .as_ref()
            .ok_or_else(|| Failure(SubrankStatus::NoTrace, "brute-force runs have no trace".into()))?;
        let doc = TraceDocument::from_trace(trace).map_err(solver_failure)?;
        let text = CString::new(to_canonical_json(&doc)).expect("JSON has no NUL bytes");
        *out = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `text` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn subrank_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Message for the most recent failed call on this thread, or NULL after a
/// successful one. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn subrank_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
