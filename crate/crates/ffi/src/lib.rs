//! C ABI over `bnb-tsp`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every entry point returns a
//! [`BnbStatus`]; on failure `bnb_last_error` describes the cause. Strings
//! returned through out-parameters are NUL-terminated and must be released
//! with `bnb_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bnb_tsp::audit::{self, AuditReport, ChainVerdict};
use bnb_tsp::{CostMatrix, Error, Solution, Tour};

/// Version of this ABI; bumped on any incompatible change.
pub const BNB_ABI_VERSION: u32 = 1;

/// Cost sentinel for an infinite (forbidden) arc in `bnb_matrix_from_costs`.
pub const BNB_INFINITY: i64 = i64::MAX;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BnbStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    UnsupportedSize = 5,
    InvalidTour = 6,
    Arithmetic = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BnbChainVerdict {
    /// Not a chain audit, or no definite verdict.
    None = 0,
    Violates = 1,
    Satisfies = 2,
    Degenerate = 3,
}

/// Opaque cost matrix.
pub struct BnbMatrix(CostMatrix);

/// Opaque solver result with its comparison trace.
pub struct BnbSolution(Solution);

/// Opaque audit report.
pub struct BnbReport(AuditReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BnbStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) => BnbStatus::Parse,
        Error::UnsupportedSize { .. } => BnbStatus::UnsupportedSize,
        Error::InvalidTour(_) => BnbStatus::InvalidTour,
        Error::Overflow | Error::Undefined(_) => BnbStatus::Arithmetic,
        _ => BnbStatus::InvalidInput,
    }
}

fn fail(e: Error) -> BnbStatus {
    set_last_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> BnbStatus {
    set_last_error(&format!("{what} is null"));
    BnbStatus::NullArgument
}

fn guard<F: FnOnce() -> Result<(), BnbStatus>>(f: F) -> BnbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BnbStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_last_error("internal panic");
            BnbStatus::Panic
        }
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), BnbStatus> {
    let c = CString::new(s).map_err(|_| {
        set_last_error("string contains NUL");
        BnbStatus::InvalidUtf8
    })?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, BnbStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

#[no_mangle]
pub extern "C" fn bnb_abi_version() -> u32 {
    BNB_ABI_VERSION
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bnb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn bnb_status_name(status: BnbStatus) -> *const c_char {
    let s: &'static CStr = match status {
        BnbStatus::Ok => c"ok",
        BnbStatus::NullArgument => c"null argument",
        BnbStatus::InvalidUtf8 => c"invalid utf-8",
        BnbStatus::Parse => c"parse error",
        BnbStatus::InvalidInput => c"invalid input",
        BnbStatus::UnsupportedSize => c"unsupported size",
        BnbStatus::InvalidTour => c"invalid tour",
        BnbStatus::Arithmetic => c"arithmetic error",
        BnbStatus::BufferTooSmall => c"buffer too small",
        BnbStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bnb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a matrix in the text or structured format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_matrix_parse(
    text: *const c_char,
    out: *mut *mut BnbMatrix,
) -> BnbStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|_| {
            set_last_error("matrix text is not UTF-8");
            BnbStatus::InvalidUtf8
        })?;
        let m = CostMatrix::parse(s).map_err(fail)?;
        put(out, BnbMatrix(m));
        Ok(())
    })
}

/// Builds a matrix from `n * n` row-major costs. Diagonal entries are
/// ignored; `BNB_INFINITY` marks a forbidden arc.
///
/// # Safety
/// `costs` must point to `n * n` readable values and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn bnb_matrix_from_costs(
    n: usize,
    costs: *const i64,
    out: *mut *mut BnbMatrix,
) -> BnbStatus {
    guard(|| {
        if costs.is_null() {
            return Err(null("costs"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n.checked_mul(n).ok_or_else(|| fail(Error::Overflow))?;
        let flat = std::slice::from_raw_parts(costs, len);
        let rows: Vec<Vec<Option<i64>>> = flat
            .chunks(n.max(1))
            .take(n)
            .map(|r| {
                r.iter()
                    .map(|&v| (v != BNB_INFINITY).then_some(v))
                    .collect()
            })
            .collect();
        let m = CostMatrix::from_options(&rows).map_err(fail)?;
        put(out, BnbMatrix(m));
        Ok(())
    })
}

/// # Safety
/// `m` must be a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn bnb_matrix_n(m: *const BnbMatrix, n: *mut usize) -> BnbStatus {
    guard(|| {
        let m = borrow(m, "matrix")?;
        if n.is_null() {
            return Err(null("n"));
        }
        *n = m.0.n();
        Ok(())
    })
}

/// Canonical text form of the matrix.
///
/// # Safety
/// `m` must be a live matrix handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_matrix_to_text(
    m: *const BnbMatrix,
    out: *mut *mut c_char,
) -> BnbStatus {
    guard(|| {
        let m = borrow(m, "matrix")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, m.0.to_text())
    })
}

/// # Safety
/// `m` must be null or a matrix handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bnb_matrix_free(m: *mut BnbMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Runs the traced branch-and-bound solver.
///
/// # Safety
/// `m` must be a live matrix handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_solve(m: *const BnbMatrix, out: *mut *mut BnbSolution) -> BnbStatus {
    guard(|| {
        let m = borrow(m, "matrix")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = bnb_tsp::branch_bound(&m.0).map_err(fail)?;
        put(out, BnbSolution(s));
        Ok(())
    })
}

/// # Safety
/// `s` must be a live solution handle and `length` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_solution_length(s: *const BnbSolution, length: *mut i64) -> BnbStatus {
    guard(|| {
        let s = borrow(s, "solution")?;
        if length.is_null() {
            return Err(null("length"));
        }
        *length = s.0.length;
        Ok(())
    })
}

/// Writes the tour in cycle order starting at vertex 1. `*written` receives
/// the tour size; when `capacity` is smaller nothing else is written and
/// `BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `buf` must hold `capacity` values; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bnb_solution_tour(
    s: *const BnbSolution,
    buf: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> BnbStatus {
    guard(|| {
        let s = borrow(s, "solution")?;
        if written.is_null() {
            return Err(null("written"));
        }
        let cycle = s.0.tour.cycle();
        *written = cycle.len();
        if capacity < cycle.len() {
            set_last_error(&format!(
                "tour has {} vertices, buffer holds {capacity}",
                cycle.len()
            ));
            return Err(BnbStatus::BufferTooSmall);
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(cycle.as_ptr(), buf, cycle.len());
        Ok(())
    })
}

/// Number of comparison events, all or nontrivial only.
///
/// # Safety
/// `s` must be a live solution handle and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_solution_event_count(
    s: *const BnbSolution,
    nontrivial_only: bool,
    count: *mut usize,
) -> BnbStatus {
    guard(|| {
        let s = borrow(s, "solution")?;
        if count.is_null() {
            return Err(null("count"));
        }
        *count = if nontrivial_only {
            s.0.trace.nontrivial().count()
        } else {
            s.0.trace.events.len()
        };
        Ok(())
    })
}

/// The trace as JSON lines.
///
/// # Safety
/// `s` must be a live solution handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_solution_trace_jsonl(
    s: *const BnbSolution,
    filter_trivial: bool,
    out: *mut *mut c_char,
) -> BnbStatus {
    guard(|| {
        let s = borrow(s, "solution")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = if filter_trivial {
            s.0.trace.filter_nontrivial().to_jsonl()
        } else {
            s.0.trace.to_jsonl()
        };
        put_string(out, text)
    })
}

/// # Safety
/// `s` must be null or a solution handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bnb_solution_free(s: *mut BnbSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Built-in audit of the 5-vertex node counterexample.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_audit_section4(out: *mut *mut BnbReport) -> BnbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, BnbReport(audit::verify_section4()));
        Ok(())
    })
}

/// Built-in audit of the 4-vertex chain counterexample.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_audit_section5(out: *mut *mut BnbReport) -> BnbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, BnbReport(audit::verify_section5()));
        Ok(())
    })
}

/// Audits the chain of `m` against the tour given in cycle order.
///
/// # Safety
/// `tour` must hold `len` values; `m` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bnb_audit_chain(
    m: *const BnbMatrix,
    tour: *const usize,
    len: usize,
    out: *mut *mut BnbReport,
) -> BnbStatus {
    guard(|| {
        let m = borrow(m, "matrix")?;
        if tour.is_null() {
            return Err(null("tour"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let y = Tour::from_cycle(std::slice::from_raw_parts(tour, len)).map_err(fail)?;
        let r = audit::audit_chain(&m.0, &y).map_err(fail)?;
        put(out, BnbReport(r));
        Ok(())
    })
}

/// Randomized check of the fixed witness construction, `4 <= n <= 6`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_lemma1_suite(
    seed: u64,
    cases: usize,
    n: usize,
    out: *mut *mut BnbReport,
) -> BnbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let r = audit::lemma1_property_suite(seed, cases, n).map_err(fail)?;
        put(out, BnbReport(r));
        Ok(())
    })
}

/// # Safety
/// `r` must be a live report handle and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_report_passed(r: *const BnbReport, passed: *mut bool) -> BnbStatus {
    guard(|| {
        let r = borrow(r, "report")?;
        if passed.is_null() {
            return Err(null("passed"));
        }
        *passed = r.0.passed();
        Ok(())
    })
}

/// # Safety
/// `r` must be a live report handle and `verdict` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_report_chain_verdict(
    r: *const BnbReport,
    verdict: *mut BnbChainVerdict,
) -> BnbStatus {
    guard(|| {
        let r = borrow(r, "report")?;
        if verdict.is_null() {
            return Err(null("verdict"));
        }
        *verdict = match r.0.chain_verdict {
            None => BnbChainVerdict::None,
            Some(ChainVerdict::Violates) => BnbChainVerdict::Violates,
            Some(ChainVerdict::Satisfies) => BnbChainVerdict::Satisfies,
            Some(ChainVerdict::Degenerate) => BnbChainVerdict::Degenerate,
        };
        Ok(())
    })
}

/// The report as pretty-printed JSON.
///
/// # Safety
/// `r` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_report_json(r: *const BnbReport, out: *mut *mut c_char) -> BnbStatus {
    guard(|| {
        let r = borrow(r, "report")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, r.0.to_json())
    })
}

/// Human-readable summary, one line per item.
///
/// # Safety
/// `r` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bnb_report_summary(
    r: *const BnbReport,
    out: *mut *mut c_char,
) -> BnbStatus {
    guard(|| {
        let r = borrow(r, "report")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, r.0.summary())
    })
}

/// # Safety
/// `r` must be null or a report handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bnb_report_free(r: *mut BnbReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
