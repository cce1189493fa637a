//! C interface to `nitsche-lab`.
//!
//! Every function returns an [`NlStatus`] and writes results through out
//! pointers. Metrics and radial profiles are opaque handles owned by the
//! caller and released with the matching `*_free` function. After a
//! non-zero status, [`nl_last_error`] describes the failure on the calling
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nitsche_lab::metric::{metric_from_json, CurvatureBound, CurvatureSign, RotMetric};
use nitsche_lab::modulus::modulus_circular;
use nitsche_lab::radial::{critical_outer, solve_bvp, BvpOutcome, RadialProfile};
use nitsche_lab::report::{
    check_bound, verify_end_to_end, BoundReport, SolverChoice, VerifyParams,
};
use nitsche_lab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Domain = 3,
    /// The radial problem has no monotone solution.
    NoSolution = 4,
    Numerical = 5,
    Io = 6,
    Panic = 7,
}

/// Sign of a curvature bound: `-1`, `0` or `1`, with `kappa` ignored for 0.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NlBound {
    pub sign: c_int,
    pub kappa: f64,
}

/// Both sides of `rho2/rho1 >= Psi*mod^2 + 1`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NlBoundReport {
    pub modulus: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub psi_big: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    /// Number of failed sub-checks (always 0 for arithmetic reports).
    pub failed_subchecks: u32,
    pub pass: bool,
}

pub struct NlMetric(RotMetric);

pub struct NlProfile(RadialProfile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NlStatus {
    match e {
        Error::InvalidInput(_)
        | Error::Unsupported(_)
        | Error::Json(_)
        | Error::DegenerateMask(_) => NlStatus::InvalidInput,
        Error::Domain(_) => NlStatus::Domain,
        Error::NoSolution { .. } => NlStatus::NoSolution,
        Error::Io(_) => NlStatus::Io,
        _ => NlStatus::Numerical,
    }
}

fn guard<F>(f: F) -> NlStatus
where
    F: FnOnce() -> Result<(), NlFailure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NlStatus::Ok,
        Ok(Err(NlFailure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            NlStatus::NullPointer
        }
        Ok(Err(NlFailure::Lib(e))) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            NlStatus::Panic
        }
    }
}

enum NlFailure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for NlFailure {
    fn from(e: Error) -> Self {
        NlFailure::Lib(e)
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, NlFailure> {
    p.as_ref().ok_or(NlFailure::Null(what))
}

unsafe fn write<T>(p: *mut T, what: &'static str, value: T) -> Result<(), NlFailure> {
    if p.is_null() {
        return Err(NlFailure::Null(what));
    }
    p.write(value);
    Ok(())
}

fn to_bound(b: NlBound) -> Result<CurvatureBound, Error> {
    match b.sign {
        s if s < 0 => CurvatureBound::negative(b.kappa),
        0 => Ok(CurvatureBound::zero()),
        _ => CurvatureBound::positive(b.kappa),
    }
}

fn to_report(r: &BoundReport) -> NlBoundReport {
    NlBoundReport {
        modulus: r.modulus,
        rho1: r.rho1,
        rho2: r.rho2,
        psi_big: r.psi_big,
        lhs: r.lhs,
        rhs: r.rhs,
        margin: r.margin,
        tolerance: r.tolerance,
        failed_subchecks: r.failed_subchecks().len() as u32,
        pass: r.passed(),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn nl_metric_constant(bound: NlBound, out: *mut *mut NlMetric) -> NlStatus {
    guard(|| {
        let m = RotMetric::constant(to_bound(bound)?);
        write(out, "out", Box::into_raw(Box::new(NlMetric(m))))
    })
}

/// Build a metric from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nl_metric_from_json(
    json: *const c_char,
    out: *mut *mut NlMetric,
) -> NlStatus {
    guard(|| {
        if json.is_null() {
            return Err(NlFailure::Null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Error::InvalidInput("metric JSON is not UTF-8".into()))?;
        let m = metric_from_json(text)?;
        write(out, "out", Box::into_raw(Box::new(NlMetric(m))))
    })
}

/// # Safety
/// `m` must come from a `nl_metric_*` constructor or be NULL.
#[no_mangle]
pub unsafe extern "C" fn nl_metric_free(m: *mut NlMetric) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Geodesic polar coefficient `G(rho)`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nl_metric_g(m: *const NlMetric, rho: f64, out: *mut f64) -> NlStatus {
    guard(|| write(out, "out", deref(m, "metric")?.0.metric_g(rho)?))
}

/// Distance from the origin of the chart point at radius `s`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nl_metric_distance(m: *const NlMetric, s: f64, out: *mut f64) -> NlStatus {
    guard(|| write(out, "out", deref(m, "metric")?.0.distance(s)?))
}

/// Gaussian curvature at chart radius `s`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nl_metric_curvature(
    m: *const NlMetric,
    s: f64,
    out: *mut f64,
) -> NlStatus {
    guard(|| write(out, "out", deref(m, "metric")?.0.gaussian_curvature(s)?))
}

/// Declared or inferred curvature bound of a metric.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nl_metric_bound(m: *const NlMetric, out: *mut NlBound) -> NlStatus {
    guard(|| {
        let b = deref(m, "metric")?.0.bound();
        let sign = match b.sign() {
            CurvatureSign::Negative => -1,
            CurvatureSign::Zero => 0,
            CurvatureSign::Positive => 1,
        };
        write(
            out,
            "out",
            NlBound {
                sign,
                kappa: b.kappa().unwrap_or(0.0),
            },
        )
    })
}

/// Laplacian comparison coefficient `psi(rho)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_psi(bound: NlBound, rho: f64, out: *mut f64) -> NlStatus {
    guard(|| write(out, "out", to_bound(bound)?.psi_small(rho)?))
}

/// Hessian comparison function `h_c(r)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_h_c(bound: NlBound, r: f64, out: *mut f64) -> NlStatus {
    guard(|| write(out, "out", to_bound(bound)?.h_c(r)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_modulus_circular(r1: f64, r2: f64, out: *mut f64) -> NlStatus {
    guard(|| write(out, "out", modulus_circular(r1, r2)?))
}

/// Arithmetic report of both sides of the bound.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_check_bound(
    bound: NlBound,
    rho1: f64,
    rho2: f64,
    modulus: f64,
    out: *mut NlBoundReport,
) -> NlStatus {
    guard(|| {
        let r = check_bound(&to_bound(bound)?, rho1, rho2, modulus)?;
        write(out, "out", to_report(&r))
    })
}

/// Solve the harmonic map on an `nr x ntheta` log-polar grid and run every
/// diagnostic. `radial` selects the shooting solver instead of Newton-Krylov.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nl_verify(
    m: *const NlMetric,
    r1: f64,
    r2: f64,
    rho1: f64,
    rho2: f64,
    nr: usize,
    ntheta: usize,
    radial: bool,
    out: *mut NlBoundReport,
) -> NlStatus {
    guard(|| {
        let params = VerifyParams {
            r1,
            r2,
            rho1,
            rho2,
            nr,
            ntheta,
            solver: if radial {
                SolverChoice::Radial
            } else {
                SolverChoice::Grid
            },
            orientation: Default::default(),
        };
        let r = verify_end_to_end(&deref(m, "metric")?.0, &params)?;
        write(out, "out", to_report(&r))
    })
}

/// Outer radius reached by the radial map with zero initial slope.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nl_critical_outer(
    m: *const NlMetric,
    rho1: f64,
    modulus: f64,
    out: *mut f64,
) -> NlStatus {
    guard(|| {
        write(
            out,
            "out",
            critical_outer(&deref(m, "metric")?.0, rho1, modulus)?,
        )
    })
}

/// Radial boundary-value problem. On `NL_STATUS_NO_SOLUTION` the critical
/// outer radius is written to `critical` when it is not NULL and `out` is
/// left untouched.
///
/// # Safety
/// `m` must be a live handle, `out` writable and `critical` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn nl_solve_bvp(
    m: *const NlMetric,
    rho1: f64,
    rho2: f64,
    modulus: f64,
    out: *mut *mut NlProfile,
    critical: *mut f64,
) -> NlStatus {
    guard(|| {
        if out.is_null() {
            return Err(NlFailure::Null("out"));
        }
        match solve_bvp(&deref(m, "metric")?.0, rho1, rho2, modulus)? {
            BvpOutcome::Solved(p) => write(out, "out", Box::into_raw(Box::new(NlProfile(p)))),
            BvpOutcome::NoSolution { critical_outer } => {
                if !critical.is_null() {
                    critical.write(critical_outer);
                }
                Err(Error::NoSolution { critical_outer }.into())
            }
        }
    })
}

/// # Safety
/// `p` must come from [`nl_solve_bvp`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn nl_profile_free(p: *mut NlProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of nodes in a profile, or 0 for NULL.
///
/// # Safety
/// `p` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn nl_profile_len(p: *const NlProfile) -> usize {
    p.as_ref().map_or(0, |p| p.0.t.len())
}

/// Initial slope `rho'(0)` of a solved profile.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nl_profile_slope0(p: *const NlProfile, out: *mut f64) -> NlStatus {
    guard(|| write(out, "out", deref(p, "profile")?.0.slope0))
}

/// Copy up to `len` nodes of `(t, rho, rho')` into caller buffers; any
/// buffer may be NULL.
///
/// # Safety
/// Non-NULL buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn nl_profile_copy(
    p: *const NlProfile,
    t: *mut f64,
    rho: *mut f64,
    slope: *mut f64,
    len: usize,
) -> NlStatus {
    guard(|| {
        let p = &deref(p, "profile")?.0;
        let n = len.min(p.t.len());
        for (dst, src) in [(t, &p.t), (rho, &p.rho), (slope, &p.slope)] {
            if !dst.is_null() {
                ptr::copy_nonoverlapping(src.as_ptr(), dst, n);
            }
        }
        Ok(())
    })
}
