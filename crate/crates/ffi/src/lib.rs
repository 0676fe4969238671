//! C interface to the inversion kernel.
//!
//! Curves and inverses are opaque handles created by `ni_*_new`/`ni_*_from_json`
//! and released with the matching `ni_*_free`. Every fallible call returns an
//! [`NiStatus`]; on failure the message is available from
//! [`ni_last_error_message`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nurbs_invert::bspline::NurbsCurve;
use nurbs_invert::document::CurveDocument;
use nurbs_invert::inverse::PiecewiseInverse;
use nurbs_invert::ratpoly::{format_rational, parse_rational, Rational};
use nurbs_invert::Error;

/// Result codes shared by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    OutOfDomain = 5,
    NonGeneral = 6,
    NotOnCurve = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

/// One preimage of a query point.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NiPreimage {
    pub u: f64,
    /// Knot interval index of the segment that produced `u`.
    pub segment: usize,
    pub residual: f64,
}

/// Opaque curve handle.
pub struct NiCurve {
    exact: NurbsCurve<Rational>,
    float: NurbsCurve<f64>,
}

/// Opaque piecewise inverse handle.
pub struct NiInverse {
    exact: PiecewiseInverse<Rational>,
    float: PiecewiseInverse<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> NiStatus {
    match e {
        Error::Parse(_) => NiStatus::Parse,
        Error::OutOfDomain { .. } => NiStatus::OutOfDomain,
        Error::NonGeneralSegment { .. } | Error::CollinearTriple { .. } => NiStatus::NonGeneral,
        Error::PointNotOnCurve => NiStatus::NotOnCurve,
        _ => NiStatus::Validation,
    }
}

struct Failure(NiStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NiStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NiStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(NiStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(NiStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Copies `s` plus a terminating NUL into `buf`; `needed` receives the full length
/// including the NUL either way.
unsafe fn write_text(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), Failure> {
    let bytes = s.as_bytes();
    if let Some(n) = needed.as_mut() {
        *n = bytes.len() + 1;
    }
    if buf.is_null() || len < bytes.len() + 1 {
        return Err(Failure(NiStatus::BufferTooSmall, format!("buffer needs {} bytes", bytes.len() + 1)));
    }
    ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
    *buf.add(bytes.len()) = 0;
    Ok(())
}

/// Message of the last failing call on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ni_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a JSON curve document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_curve` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ni_curve_from_json(json: *const c_char, out_curve: *mut *mut NiCurve) -> NiStatus {
    guard(|| {
        let slot = out(out_curve, "out_curve")?;
        *slot = ptr::null_mut();
        let exact = CurveDocument::from_json(text(json, "json")?)?.to_curve()?;
        let float = exact.cast::<f64>();
        *slot = Box::into_raw(Box::new(NiCurve { exact, float }));
        Ok(())
    })
}

/// Releases a curve. Null is ignored.
///
/// # Safety
/// `curve` must come from [`ni_curve_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ni_curve_free(curve: *mut NiCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Parameter domain of the curve.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ni_curve_domain(curve: *const NiCurve, lo: *mut f64, hi: *mut f64) -> NiStatus {
    guard(|| {
        let (a, b) = deref(curve, "curve")?.float.domain();
        *out(lo, "lo")? = a;
        *out(hi, "hi")? = b;
        Ok(())
    })
}

/// Evaluates the curve at `u`, writing `x`, `y` into `point[0..2]`.
///
/// # Safety
/// `curve` must be valid and `point` must hold two doubles.
#[no_mangle]
pub unsafe extern "C" fn ni_curve_eval(curve: *const NiCurve, u: f64, point: *mut f64) -> NiStatus {
    guard(|| {
        let c = deref(curve, "curve")?;
        if point.is_null() {
            return Err(null("point"));
        }
        let [x, y] = c.float.eval(&u)?;
        *point = x;
        *point.add(1) = y;
        Ok(())
    })
}

/// Builds the piecewise inverse of a curve. The curve handle may be freed afterwards.
///
/// # Safety
/// `curve` must be valid and `out_inverse` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ni_inverse_new(curve: *const NiCurve, out_inverse: *mut *mut NiInverse) -> NiStatus {
    guard(|| {
        let slot = out(out_inverse, "out_inverse")?;
        *slot = ptr::null_mut();
        let exact = PiecewiseInverse::new(&deref(curve, "curve")?.exact)?;
        let float = exact.to_float();
        *slot = Box::into_raw(Box::new(NiInverse { exact, float }));
        Ok(())
    })
}

/// Releases an inverse. Null is ignored.
///
/// # Safety
/// `inverse` must come from [`ni_inverse_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ni_inverse_free(inverse: *mut NiInverse) {
    if !inverse.is_null() {
        drop(Box::from_raw(inverse));
    }
}

/// Number of segments (nonempty knot intervals) in the inverse.
///
/// # Safety
/// `inverse` must be valid or null (null yields 0).
#[no_mangle]
pub unsafe extern "C" fn ni_inverse_segment_count(inverse: *const NiInverse) -> usize {
    inverse.as_ref().map_or(0, |i| i.float.segments().len())
}

/// Inverts a point with the float backend.
///
/// Candidates are sorted by residual. `count` receives the total number found;
/// at most `capacity` are written to `preimages`. A point farther than `tol`
/// from the curve yields `NI_STATUS_NOT_ON_CURVE`.
///
/// # Safety
/// `inverse` and `count` must be valid; `preimages` must hold `capacity` entries.
#[no_mangle]
pub unsafe extern "C" fn ni_inverse_invert(
    inverse: *const NiInverse,
    x: f64,
    y: f64,
    tol: f64,
    preimages: *mut NiPreimage,
    capacity: usize,
    count: *mut usize,
) -> NiStatus {
    guard(|| {
        let inv = deref(inverse, "inverse")?;
        let count = out(count, "count")?;
        *count = 0;
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure(NiStatus::Validation, format!("tol must be positive, got {tol}")));
        }
        if capacity > 0 && preimages.is_null() {
            return Err(null("preimages"));
        }
        let r = inv.float.invert_point(&[x, y], &tol)?;
        *count = r.candidates.len();
        for (j, c) in r.candidates.iter().take(capacity).enumerate() {
            *preimages.add(j) = NiPreimage { u: c.u, segment: c.segment, residual: c.residual };
        }
        Ok(())
    })
}

/// Inverts a point given as exact decimal or `p/q` text, writing the best
/// parameter as text into `buf`.
///
/// `needed` (may be null) receives the buffer size required, including the NUL.
///
/// # Safety
/// String arguments must be NUL-terminated; `buf` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ni_inverse_invert_exact(
    inverse: *const NiInverse,
    x: *const c_char,
    y: *const c_char,
    tol: *const c_char,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> NiStatus {
    guard(|| {
        let inv = deref(inverse, "inverse")?;
        let point = [parse_rational(text(x, "x")?)?, parse_rational(text(y, "y")?)?];
        let tol = parse_rational(text(tol, "tol")?)?;
        let r = inv.exact.invert_point(&point, &tol)?;
        write_text(&format_rational(&r.best().u), buf, len, needed)
    })
}
