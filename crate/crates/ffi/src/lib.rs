//! C ABI for the repeaterlab core.
//!
//! Every fallible function returns an [`RlStatus`] and writes its results
//! through out-pointers. On failure a message is stored per thread and can be
//! fetched with [`rl_last_error_message`]. Handles are created by `*_new`
//! style functions and released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use repeaterlab::bounds::{achieving_operator, p_max};
use repeaterlab::criterion::{built_in, from_kets, is_optimal};
use repeaterlab::qmath::{Ket, C64};
use repeaterlab::repeater::{
    projection_bounds, run_protocol_analytic_with, run_protocol_sampled, AnalyticRun, ProjectiveMeasurement,
};
use repeaterlab::states::SchmidtState;
use repeaterlab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    NullPointer = 1,
    AngleOutOfRange = 2,
    InvalidSchmidt = 3,
    DimensionMismatch = 4,
    InvalidMeasurement = 5,
    NumericalFailure = 6,
    InvalidArgument = 7,
    IndexOutOfRange = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> RlStatus {
    match e {
        Error::AngleOutOfRange { .. } | Error::AngleOrdering { .. } | Error::NoEntanglement => {
            RlStatus::AngleOutOfRange
        }
        Error::InvalidSchmidt(_) => RlStatus::InvalidSchmidt,
        Error::DimensionMismatch(_) | Error::NotSquare { .. } | Error::NotTwoQubit { .. } | Error::InvalidWire { .. } => {
            RlStatus::DimensionMismatch
        }
        Error::IncompleteMeasurement { .. }
        | Error::NotProjective(_)
        | Error::ProjectorRank { .. }
        | Error::NotUnitary { .. }
        | Error::NotNormalized { .. } => RlStatus::InvalidMeasurement,
        Error::Parse { .. } => RlStatus::InvalidArgument,
        _ => RlStatus::NumericalFailure,
    }
}

/// Runs `f`, converting errors and panics into a status plus stored message.
fn guard(f: impl FnOnce() -> Result<(), RlStatus>) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RlStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            RlStatus::Panic
        }
    }
}

trait IntoStatus<T> {
    fn status(self) -> Result<T, RlStatus>;
}

impl<T> IntoStatus<T> for repeaterlab::Result<T> {
    fn status(self) -> Result<T, RlStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            status_of(&e)
        })
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), RlStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        Err(RlStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// # Safety
/// `ptr` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(ptr: *const f64, len: usize, name: &str) -> Result<&'a [f64], RlStatus> {
    non_null(ptr, name)?;
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// Copies the last error message of this thread into `buf` (NUL terminated,
/// truncated to `cap`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rl_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `min{2 sin²θ, 2 sin²η}` computed by running the protocol.
///
/// # Safety
/// `out` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn rl_success_probability(theta: f64, eta: f64, out: *mut f64) -> RlStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = run_protocol_analytic_with(theta, eta, 0.0, 0.0).status()?.p_ms;
        Ok(())
    })
}

/// Probabilities of the two generically successful projections.
///
/// # Safety
/// `lower` and `upper` must be valid pointers to doubles.
#[no_mangle]
pub unsafe extern "C" fn rl_projection_bounds(theta: f64, eta: f64, lower: *mut f64, upper: *mut f64) -> RlStatus {
    guard(|| {
        non_null(lower, "lower")?;
        non_null(upper, "upper")?;
        let (lo, hi) = projection_bounds(theta, eta).status()?;
        *lower = lo;
        *upper = hi;
        Ok(())
    })
}

/// Analytic protocol run with Clare's optimal basis.
pub struct RlProtocol {
    run: AnalyticRun,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RlOutcome {
    pub probability: f64,
    /// Alice and Bob are maximally entangled right after this outcome.
    pub maximal: bool,
    pub bob_acts: bool,
    /// Probability that Bob's filter succeeds, given this outcome.
    pub bob_success: f64,
}

/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to free
/// with [`rl_protocol_free`].
#[no_mangle]
pub unsafe extern "C" fn rl_protocol_new(
    theta: f64,
    eta: f64,
    beta1: f64,
    beta2: f64,
    out: *mut *mut RlProtocol,
) -> RlStatus {
    guard(|| {
        non_null(out, "out")?;
        let run = run_protocol_analytic_with(theta, eta, beta1, beta2).status()?;
        *out = Box::into_raw(Box::new(RlProtocol { run }));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`rl_protocol_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn rl_protocol_free(handle: *mut RlProtocol) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Overall success probability and the probability that Bob has to act.
///
/// # Safety
/// `handle` must be live; `p_ms` and `bob_acts` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rl_protocol_summary(
    handle: *const RlProtocol,
    p_ms: *mut f64,
    bob_acts: *mut f64,
) -> RlStatus {
    guard(|| {
        non_null(handle, "handle")?;
        non_null(p_ms, "p_ms")?;
        non_null(bob_acts, "bob_acts")?;
        let run = &(*handle).run;
        *p_ms = run.p_ms;
        *bob_acts = run.ledger.bob_acts_probability;
        Ok(())
    })
}

/// Details of Clare's outcome `index` (0 to 3).
///
/// # Safety
/// `handle` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_protocol_outcome(handle: *const RlProtocol, index: usize, out: *mut RlOutcome) -> RlStatus {
    guard(|| {
        non_null(handle, "handle")?;
        non_null(out, "out")?;
        let run = &(*handle).run;
        let o = run.per_outcome.get(index).ok_or_else(|| {
            set_error(format!("outcome index {index} out of range"));
            RlStatus::IndexOutOfRange
        })?;
        *out = RlOutcome {
            probability: o.probability,
            maximal: o.maximal,
            bob_acts: o.bob_acts,
            bob_success: o.bob_success,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RlSampleSummary {
    pub successes: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub bob_acts_frequency: f64,
}

/// Monte-Carlo estimate from `n` seeded protocol runs.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_sample_protocol(theta: f64, eta: f64, n: u64, seed: u64, out: *mut RlSampleSummary) -> RlStatus {
    guard(|| {
        non_null(out, "out")?;
        if n == 0 {
            set_error("n must be positive");
            return Err(RlStatus::InvalidArgument);
        }
        let r = run_protocol_sampled(theta, eta, n, seed).status()?;
        *out = RlSampleSummary {
            successes: r.successes,
            estimate: r.estimate,
            std_error: r.stderr,
            bob_acts_frequency: r.bob_acts_frequency,
        };
        Ok(())
    })
}

/// A validated projective measurement on Clare's two qubits.
pub struct RlMeasurement {
    inner: ProjectiveMeasurement,
}

/// Built-in measurement: `"bell"`, `"optimal"` or `"computational"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_measurement_builtin(
    name: *const c_char,
    theta: f64,
    eta: f64,
    out: *mut *mut RlMeasurement,
) -> RlStatus {
    guard(|| {
        non_null(name, "name")?;
        non_null(out, "out")?;
        let name = CStr::from_ptr(name).to_string_lossy();
        let inner = built_in(&name, theta, eta)
            .ok_or_else(|| {
                set_error(format!("unknown measurement {name}"));
                RlStatus::InvalidArgument
            })?
            .status()?;
        *out = Box::into_raw(Box::new(RlMeasurement { inner }));
        Ok(())
    })
}

/// Measurement from four kets of dimension 4, given as 16 real and 16
/// imaginary parts in row-major order (one ket per row).
///
/// # Safety
/// `re` and `im` must point to 16 doubles each; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rl_measurement_from_kets(
    re: *const f64,
    im: *const f64,
    out: *mut *mut RlMeasurement,
) -> RlStatus {
    guard(|| {
        let re = slice(re, 16, "re")?;
        let im = slice(im, 16, "im")?;
        non_null(out, "out")?;
        let kets: Vec<Ket> = (0..4)
            .map(|k| Ket::from_amplitudes((0..4).map(|j| C64::new(re[4 * k + j], im[4 * k + j])).collect()))
            .collect();
        let inner = from_kets(&kets).status()?;
        *out = Box::into_raw(Box::new(RlMeasurement { inner }));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from an `rl_measurement_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn rl_measurement_free(handle: *mut RlMeasurement) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RlCriterion {
    pub lhs: f64,
    pub rhs: f64,
    pub p_s: f64,
    pub optimal: bool,
}

/// Optimality test of the measurement for the pair angles `θ`, `η`.
///
/// # Safety
/// `handle` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_criterion(
    handle: *const RlMeasurement,
    theta: f64,
    eta: f64,
    tol: f64,
    out: *mut RlCriterion,
) -> RlStatus {
    guard(|| {
        non_null(handle, "handle")?;
        non_null(out, "out")?;
        let r = is_optimal(&(*handle).inner, theta, eta, tol).status()?;
        *out = RlCriterion {
            lhs: r.lhs,
            rhs: r.rhs,
            p_s: r.p_s,
            optimal: r.optimal,
        };
        Ok(())
    })
}

unsafe fn schmidt_pair(a: *const f64, len_a: usize, b: *const f64, len_b: usize) -> Result<(SchmidtState, SchmidtState), RlStatus> {
    let a = SchmidtState::new(slice(a, len_a, "a")?.to_vec()).status()?;
    let b = SchmidtState::new(slice(b, len_b, "b")?.to_vec()).status()?;
    Ok((a, b))
}

/// Upper bound on one successful outcome for Schmidt coefficient lists.
///
/// # Safety
/// `a` and `b` must point to `len_a` and `len_b` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rl_p_max(a: *const f64, len_a: usize, b: *const f64, len_b: usize, out: *mut f64) -> RlStatus {
    guard(|| {
        non_null(out, "out")?;
        let (a, b) = schmidt_pair(a, len_a, b, len_b)?;
        *out = p_max(&a, &b);
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RlBound {
    pub p_max: f64,
    pub achieved_p: f64,
    pub post_fidelity: f64,
}

/// Applies the bound-achieving measurement element and reports the result.
///
/// # Safety
/// As for [`rl_p_max`].
#[no_mangle]
pub unsafe extern "C" fn rl_achieving_operator(
    a: *const f64,
    len_a: usize,
    b: *const f64,
    len_b: usize,
    out: *mut RlBound,
) -> RlStatus {
    guard(|| {
        non_null(out, "out")?;
        let (a, b) = schmidt_pair(a, len_a, b, len_b)?;
        let r = achieving_operator(&a, &b).status()?;
        *out = RlBound {
            p_max: r.p_max,
            achieved_p: r.achieved_p,
            post_fidelity: r.post_fidelity,
        };
        Ok(())
    })
}
