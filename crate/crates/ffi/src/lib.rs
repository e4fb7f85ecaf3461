//! C ABI for the `combing` library.
//!
//! All objects are opaque handles created by `combing_*_new`/`parse`/compute
//! functions and released by the matching `combing_*_free`. Every fallible
//! call returns a [`CombingStatus`]; the message of the last failure on the
//! calling thread is available from [`combing_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use combing::extract::{collinearity_links, ExtractionParams, LinkSet};
use combing::fields::{Field, FieldSpec};
use combing::invar::{distance, homotopy_number, InvariantReport};
use combing::linkdeg::gauss_linking;
use combing::quat::S3Point;
use combing::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombingStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ConfigError = 4,
    TransversalityFailure = 5,
    ResolutionTooCoarse = 6,
    UnreliableLinking = 7,
    NumericalFailure = 8,
    OutOfRange = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// Sign class selector for link sets.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombingSignClass {
    Positive = 0,
    Negative = 1,
}

/// A compiled vector field.
pub struct CombingField {
    field: Field,
}

/// Extraction parameters.
pub struct CombingParams {
    params: ExtractionParams,
}

/// An invariant report with its JSON text.
pub struct CombingReport {
    report: InvariantReport,
    json: CString,
}

/// The collinearity links `C₊`, `C₋` of two fields.
pub struct CombingLinks {
    plus: LinkSet,
    minus: LinkSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CombingStatus {
    match e {
        Error::Parse(..) | Error::InvalidSeifert { .. } => CombingStatus::ParseError,
        Error::Config(_) => CombingStatus::ConfigError,
        Error::TransversalityFailure { .. } => CombingStatus::TransversalityFailure,
        Error::ResolutionTooCoarse(_) => CombingStatus::ResolutionTooCoarse,
        Error::UnreliableLinking { .. } | Error::LoopsTooClose(_) => CombingStatus::UnreliableLinking,
        _ => CombingStatus::NumericalFailure,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (CombingStatus, String)>) -> CombingStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CombingStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            CombingStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (CombingStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CombingStatus, String) {
    (CombingStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (CombingStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (CombingStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn params_or_default(p: *const CombingParams) -> ExtractionParams {
    p.as_ref().map(|p| p.params).unwrap_or_default()
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn combing_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn combing_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a field spec such as `hopf+`, `seifert:3,2`, `R(ms:5)`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn combing_field_parse(spec: *const c_char, out: *mut *mut CombingField) -> CombingStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = str_arg(spec, "spec")?;
        let spec: FieldSpec = s.parse().map_err(lib_err)?;
        let field = spec.compile().map_err(lib_err)?;
        *out = Box::into_raw(Box::new(CombingField { field }));
        Ok(())
    })
}

/// Releases a field; null is ignored.
///
/// # Safety
/// `f` must come from [`combing_field_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn combing_field_free(f: *mut CombingField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Unit field vector (ℝ⁴ coordinates) at the normalization of `x`.
///
/// # Safety
/// `x` and `out` must point to 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn combing_field_eval(f: *const CombingField, x: *const f64, out: *mut f64) -> CombingStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("field"))?;
        if x.is_null() || out.is_null() {
            return Err(null("x/out"));
        }
        let p = std::slice::from_raw_parts(x, 4);
        let n = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n.is_finite() && n > 1e-12) {
            return Err((CombingStatus::OutOfRange, "point must be a nonzero vector of R^4".into()));
        }
        let v = f.field.eval(&S3Point::normalize([p[0], p[1], p[2], p[3]])).vec;
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&v);
        Ok(())
    })
}

/// Default extraction parameters.
#[no_mangle]
pub extern "C" fn combing_params_new() -> *mut CombingParams {
    Box::into_raw(Box::new(CombingParams { params: ExtractionParams::default() }))
}

/// # Safety
/// `p` must come from [`combing_params_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn combing_params_free(p: *mut CombingParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Sets the grid resolution (vertices per axis and chart, at least 2).
///
/// # Safety
/// `p` must be a valid params handle.
#[no_mangle]
pub unsafe extern "C" fn combing_params_set_resolution(p: *mut CombingParams, resolution: usize) -> CombingStatus {
    guard(|| {
        let p = p.as_mut().ok_or_else(|| null("params"))?;
        let next = ExtractionParams { resolution, ..p.params };
        next.validate().map_err(lib_err)?;
        p.params = next;
        Ok(())
    })
}

/// Sets the Newton residual tolerance (positive).
///
/// # Safety
/// `p` must be a valid params handle.
#[no_mangle]
pub unsafe extern "C" fn combing_params_set_eps(p: *mut CombingParams, eps: f64) -> CombingStatus {
    guard(|| {
        let p = p.as_mut().ok_or_else(|| null("params"))?;
        let next = ExtractionParams { eps, ..p.params };
        next.validate().map_err(lib_err)?;
        p.params = next;
        Ok(())
    })
}

fn make_report(report: InvariantReport) -> Result<*mut CombingReport, (CombingStatus, String)> {
    let text = serde_json::to_string(&report).map_err(|e| (CombingStatus::NumericalFailure, e.to_string()))?;
    let json = CString::new(text).map_err(|e| (CombingStatus::NumericalFailure, e.to_string()))?;
    Ok(Box::into_raw(Box::new(CombingReport { report, json })))
}

/// Homotopy distance `D(x, y)`; `params` may be null for defaults.
///
/// # Safety
/// Handles must be valid; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn combing_distance(
    x: *const CombingField,
    y: *const CombingField,
    params: *const CombingParams,
    out: *mut *mut CombingReport,
) -> CombingStatus {
    guard(|| {
        let (x, y) = (x.as_ref().ok_or_else(|| null("x"))?, y.as_ref().ok_or_else(|| null("y"))?);
        if out.is_null() {
            return Err(null("out"));
        }
        let r = distance(x.field.spec(), y.field.spec(), &params_or_default(params)).map_err(lib_err)?;
        *out = make_report(r)?;
        Ok(())
    })
}

/// Homotopy number `I(x)`; `params` may be null for defaults.
///
/// # Safety
/// Handles must be valid; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn combing_homotopy_number(
    x: *const CombingField,
    params: *const CombingParams,
    out: *mut *mut CombingReport,
) -> CombingStatus {
    guard(|| {
        let x = x.as_ref().ok_or_else(|| null("x"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = homotopy_number(x.field.spec(), &params_or_default(params)).map_err(lib_err)?;
        *out = make_report(r)?;
        Ok(())
    })
}

unsafe fn report_value(
    r: *const CombingReport,
    out: *mut i64,
    pick: impl FnOnce(&InvariantReport) -> Option<i64>,
    what: &str,
) -> CombingStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = pick(&r.report).ok_or_else(|| (CombingStatus::OutOfRange, format!("report has no {what}")))?;
        Ok(())
    })
}

/// `D` of a distance report.
///
/// # Safety
/// `r` must be a valid report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn combing_report_distance(r: *const CombingReport, out: *mut i64) -> CombingStatus {
    report_value(r, out, |r| r.d.map(|d| d as i64), "distance")
}

/// Signed `H_X(Y)` of a distance report.
///
/// # Safety
/// `r` must be a valid report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn combing_report_signed_h(r: *const CombingReport, out: *mut i64) -> CombingStatus {
    report_value(r, out, |r| r.h_signed, "signed invariant")
}

/// `I` of a homotopy-number report.
///
/// # Safety
/// `r` must be a valid report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn combing_report_homotopy_number(r: *const CombingReport, out: *mut i64) -> CombingStatus {
    report_value(r, out, |r| r.i.map(|i| i as i64), "homotopy number")
}

/// JSON text of the report, owned by the report.
///
/// # Safety
/// `r` must be a valid report handle or null.
#[no_mangle]
pub unsafe extern "C" fn combing_report_json(r: *const CombingReport) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `r` must come from a compute call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn combing_report_free(r: *mut CombingReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Collinearity links of `(x, y)`; `params` may be null for defaults.
///
/// # Safety
/// Handles must be valid; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn combing_extract(
    x: *const CombingField,
    y: *const CombingField,
    params: *const CombingParams,
    out: *mut *mut CombingLinks,
) -> CombingStatus {
    guard(|| {
        let (x, y) = (x.as_ref().ok_or_else(|| null("x"))?, y.as_ref().ok_or_else(|| null("y"))?);
        if out.is_null() {
            return Err(null("out"));
        }
        let (plus, minus) =
            collinearity_links(x.field.spec(), y.field.spec(), &params_or_default(params)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(CombingLinks { plus, minus }));
        Ok(())
    })
}

impl CombingLinks {
    /// Link set for a raw [`CombingSignClass`] value.
    fn set(&self, class: u32) -> Result<&LinkSet, (CombingStatus, String)> {
        match class {
            c if c == CombingSignClass::Positive as u32 => Ok(&self.plus),
            c if c == CombingSignClass::Negative as u32 => Ok(&self.minus),
            c => Err((CombingStatus::OutOfRange, format!("sign class {c}"))),
        }
    }
}

/// Number of loops in one sign class (a [`CombingSignClass`] value).
///
/// # Safety
/// `l` must be a valid links handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn combing_links_count(l: *const CombingLinks, class: u32, out: *mut usize) -> CombingStatus {
    guard(|| {
        let l = l.as_ref().ok_or_else(|| null("links"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = l.set(class)?.len();
        Ok(())
    })
}

/// Copies loop `index` as `4·len` doubles into `buf` (capacity `cap` doubles)
/// and stores its vertex count in `len`. With `buf` null only `len` is set.
///
/// # Safety
/// `l` must be a valid links handle, `len` a valid pointer, and `buf` null or
/// writable for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn combing_links_loop(
    l: *const CombingLinks,
    class: u32,
    index: usize,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> CombingStatus {
    guard(|| {
        let l = l.as_ref().ok_or_else(|| null("links"))?;
        if len.is_null() {
            return Err(null("len"));
        }
        let lp =
            l.set(class)?.loops.get(index).ok_or_else(|| (CombingStatus::OutOfRange, format!("no loop {index}")))?;
        *len = lp.len();
        if buf.is_null() {
            return Ok(());
        }
        if cap < 4 * lp.len() {
            return Err((CombingStatus::BufferTooSmall, format!("need {} doubles", 4 * lp.len())));
        }
        let dst = std::slice::from_raw_parts_mut(buf, 4 * lp.len());
        for (k, p) in lp.points.iter().enumerate() {
            dst[4 * k..4 * k + 4].copy_from_slice(&p.coords());
        }
        Ok(())
    })
}

/// # Safety
/// `l` must come from [`combing_extract`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn combing_links_free(l: *mut CombingLinks) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Linking number of two closed polylines on S³ given as `4·n` doubles each.
///
/// # Safety
/// `a` and `b` must be readable for `4·na` and `4·nb` doubles; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn combing_gauss_linking(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    out: *mut i64,
) -> CombingStatus {
    guard(|| {
        if a.is_null() || b.is_null() || out.is_null() {
            return Err(null("a/b/out"));
        }
        if na < 3 || nb < 3 {
            return Err((CombingStatus::OutOfRange, "loops need at least 3 points".into()));
        }
        let read = |p: *const f64, n: usize| {
            let s = std::slice::from_raw_parts(p, 4 * n);
            combing::extract::OrientedLoop::new(
                s.chunks_exact(4).map(|c| S3Point::normalize([c[0], c[1], c[2], c[3]])).collect(),
            )
        };
        let r = gauss_linking(&read(a, na), &read(b, nb)).map_err(lib_err)?;
        *out = r.rounded;
        Ok(())
    })
}
