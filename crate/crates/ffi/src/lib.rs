//! C ABI over the entropik library.
//!
//! Every entry point returns an [`EntropikStatus`]; results go through out
//! pointers. Panics are caught at the boundary and reported as
//! `ENTROPIK_STATUS_PANIC`. The message of the last failure on the calling
//! thread is available from [`entropik_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entropik::degree_line::{line_degrees, DegreeRecord};
use entropik::genfun::{lambda_from_gf, pade_fit_u64, stabilize, RationalGF, Stabilized};
use entropik::patterns::{Pattern, PatternKind};
use entropik::recurrence::{conjecture_lambda, cs_prime_complexity, cs_prime_sequence, cyclic_complexity, q9_sequence};
use entropik::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropikStatus {
    Ok = 0,
    /// a required pointer was null
    NullPointer = 1,
    /// arguments violate a documented precondition
    Precondition = 2,
    /// computed values disagree with reference values
    GoldenMismatch = 3,
    /// a resource cap was reached
    ResourceCap = 4,
    /// the computation failed (degenerate data, singular system)
    Computation = 5,
    /// the sequence admits no stable generating function
    Unstable = 6,
    /// an index was out of range or a value does not fit the output type
    OutOfRange = 7,
    /// a panic was caught at the boundary
    Panic = 8,
}

/// Pattern selector for [`entropik_line_degrees`].
pub const ENTROPIK_PATTERN_GENERAL: u32 = 0;
pub const ENTROPIK_PATTERN_SYMMETRIC: u32 = 1;
pub const ENTROPIK_PATTERN_CYCLIC: u32 = 2;
pub const ENTROPIK_PATTERN_CYCLIC_SYMMETRIC: u32 = 3;

/// Opaque full-step degree sequence.
pub struct EntropikDegrees {
    record: DegreeRecord,
}

/// Opaque rational generating function.
pub struct EntropikGenfun {
    gf: RationalGF,
    lambda: f64,
    growth_order: Option<u32>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> EntropikStatus {
    match e {
        Error::Precondition(_) => EntropikStatus::Precondition,
        Error::GoldenMismatch(_) => EntropikStatus::GoldenMismatch,
        Error::ResourceCap(_) => EntropikStatus::ResourceCap,
        _ => EntropikStatus::Computation,
    }
}

fn fail(status: EntropikStatus, msg: &str) -> EntropikStatus {
    set_error(msg);
    status
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), EntropikStatus>) -> EntropikStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EntropikStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(EntropikStatus::Panic, &msg)
        }
    }
}

fn lib(e: Error) -> EntropikStatus {
    fail(status_of(&e), &e.to_string())
}

fn nonnull<T>(p: *const T, name: &str) -> Result<(), EntropikStatus> {
    if p.is_null() {
        Err(fail(EntropikStatus::NullPointer, &format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn pattern_kind(code: u32) -> Result<PatternKind, EntropikStatus> {
    match code {
        ENTROPIK_PATTERN_GENERAL => Ok(PatternKind::General),
        ENTROPIK_PATTERN_SYMMETRIC => Ok(PatternKind::Symmetric),
        ENTROPIK_PATTERN_CYCLIC => Ok(PatternKind::Cyclic),
        ENTROPIK_PATTERN_CYCLIC_SYMMETRIC => Ok(PatternKind::CyclicSymmetric),
        _ => Err(fail(EntropikStatus::Precondition, &format!("unknown pattern code {code}"))),
    }
}

/// Message of the last failure on this thread; empty after a success. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn entropik_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn entropik_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn write_lambda(
    out: *mut f64,
    f: impl FnOnce() -> entropik::Result<entropik::recurrence::ComplexityEstimate>,
) -> EntropikStatus {
    guard(|| {
        nonnull(out, "out")?;
        let est = f().map_err(lib)?;
        // SAFETY: checked non-null; the caller provides a writable double.
        unsafe { *out = est.lambda };
        Ok(())
    })
}

/// Complexity of the cyclic symmetric pattern for prime `q ≥ 5`.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn entropik_cs_prime_complexity(q: usize, out: *mut f64) -> EntropikStatus {
    write_lambda(out, || cs_prime_complexity(q))
}

/// Analytic complexity of the cyclic pattern for `q ≥ 4`.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn entropik_cyclic_complexity(q: usize, out: *mut f64) -> EntropikStatus {
    write_lambda(out, || cyclic_complexity(q))
}

/// Conjectured common complexity of general, symmetric and cyclic matrices.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn entropik_conjecture_lambda(q: usize, out: *mut f64) -> EntropikStatus {
    write_lambda(out, || conjecture_lambda(q))
}

/// Full-step degrees `d_0..=d_{n_max}` on a generic line.
///
/// # Safety
/// `out` must point to a writable handle pointer. On success it receives a
/// handle to release with [`entropik_degrees_free`].
#[no_mangle]
pub unsafe extern "C" fn entropik_line_degrees(
    pattern: u32,
    q: usize,
    n_max: usize,
    trials: usize,
    seed: u64,
    out: *mut *mut EntropikDegrees,
) -> EntropikStatus {
    guard(|| {
        nonnull(out, "out")?;
        let pat = Pattern::build(q, pattern_kind(pattern)?).map_err(lib)?;
        let record = line_degrees(&pat, n_max, trials, seed).map_err(lib)?.full_step();
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(EntropikDegrees { record })) };
        Ok(())
    })
}

/// Number of degrees held by the handle (0 for a null handle).
///
/// # Safety
/// `h` must be null or a live handle from [`entropik_line_degrees`].
#[no_mangle]
pub unsafe extern "C" fn entropik_degrees_len(h: *const EntropikDegrees) -> usize {
    // SAFETY: the caller guarantees a live handle or null.
    unsafe { h.as_ref() }.map_or(0, |d| d.record.values.len())
}

/// Copies up to `cap` degrees into `buf`; `written` receives the count.
///
/// # Safety
/// `h` must be a live handle, `buf` must hold `cap` values and `written`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn entropik_degrees_copy(
    h: *const EntropikDegrees,
    buf: *mut u64,
    cap: usize,
    written: *mut usize,
) -> EntropikStatus {
    guard(|| {
        nonnull(h, "handle")?;
        nonnull(buf, "buf")?;
        nonnull(written, "written")?;
        // SAFETY: all pointers checked; sizes are the caller's contract.
        let d = unsafe { &*h };
        let n = d.record.values.len().min(cap);
        unsafe {
            ptr::copy_nonoverlapping(d.record.values.as_ptr(), buf, n);
            *written = n;
        }
        Ok(())
    })
}

/// Releases a degree handle; null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn entropik_degrees_free(h: *mut EntropikDegrees) {
    if !h.is_null() {
        // SAFETY: the handle came from Box::into_raw and is freed once.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Fits a rational generating function to `len` full-step degrees.
/// Returns `ENTROPIK_STATUS_UNSTABLE` when no fraction stabilizes.
///
/// # Safety
/// `terms` must point to `len` readable values and `out` must be writable.
/// A handle stored in `out` is released with [`entropik_genfun_free`].
#[no_mangle]
pub unsafe extern "C" fn entropik_genfun_fit(
    terms: *const u64,
    len: usize,
    out: *mut *mut EntropikGenfun,
) -> EntropikStatus {
    guard(|| {
        nonnull(terms, "terms")?;
        nonnull(out, "out")?;
        // SAFETY: caller provides `len` readable values.
        let t = unsafe { std::slice::from_raw_parts(terms, len) };
        let table = pade_fit_u64(t, None).map_err(lib)?;
        match stabilize(&table) {
            Stabilized::Stable { gf, .. } => {
                let lam = lambda_from_gf(&gf).map_err(lib)?;
                let h = EntropikGenfun { gf, lambda: lam.estimate.lambda, growth_order: lam.growth_order };
                // SAFETY: checked non-null.
                unsafe { *out = Box::into_raw(Box::new(h)) };
                Ok(())
            }
            Stabilized::Unstable { diagnostics } => Err(fail(EntropikStatus::Unstable, &diagnostics.join("; "))),
        }
    })
}

/// `λ` of a fitted generating function, and the polynomial growth order
/// (or `-1` when `λ > 1`).
///
/// # Safety
/// `h` must be a live handle; `lambda` and `growth_order` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entropik_genfun_lambda(
    h: *const EntropikGenfun,
    lambda: *mut f64,
    growth_order: *mut i32,
) -> EntropikStatus {
    guard(|| {
        nonnull(h, "handle")?;
        nonnull(lambda, "lambda")?;
        nonnull(growth_order, "growth_order")?;
        // SAFETY: pointers checked.
        unsafe {
            let g = &*h;
            *lambda = g.lambda;
            *growth_order = g.growth_order.map_or(-1, |k| k as i32);
        }
        Ok(())
    })
}

/// Copies the numerator (`which = 0`) or denominator (`which = 1`),
/// lowest degree first. `len` always receives the full length; coefficients
/// are written only when `cap` suffices.
///
/// # Safety
/// `h` must be a live handle, `buf` must hold `cap` values (or be null with
/// `cap = 0`) and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entropik_genfun_coefficients(
    h: *const EntropikGenfun,
    which: u32,
    buf: *mut i64,
    cap: usize,
    len: *mut usize,
) -> EntropikStatus {
    guard(|| {
        nonnull(h, "handle")?;
        nonnull(len, "len")?;
        // SAFETY: handle checked.
        let g = unsafe { &*h };
        let poly = match which {
            0 => &g.gf.numerator,
            1 => &g.gf.denominator,
            _ => return Err(fail(EntropikStatus::Precondition, "which must be 0 or 1")),
        };
        // SAFETY: checked non-null.
        unsafe { *len = poly.len() };
        if cap < poly.len() {
            return Ok(());
        }
        nonnull(buf, "buf")?;
        for (i, c) in poly.iter().enumerate() {
            let v = c.to_i64().ok_or_else(|| fail(EntropikStatus::OutOfRange, "coefficient exceeds 64 bits"))?;
            // SAFETY: i < poly.len() <= cap.
            unsafe { *buf.add(i) = v };
        }
        Ok(())
    })
}

/// Releases a generating-function handle; null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn entropik_genfun_free(h: *mut EntropikGenfun) {
    if !h.is_null() {
        // SAFETY: the handle came from Box::into_raw and is freed once.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Exact recurrence sequences for cyclic symmetric `q` (prime or 9) as JSON
/// with decimal-string integers. Release the string with
/// [`entropik_string_free`].
///
/// # Safety
/// `out` must point to a writable `char *`.
#[no_mangle]
pub unsafe extern "C" fn entropik_recurrence_json(q: usize, n_max: usize, out: *mut *mut c_char) -> EntropikStatus {
    guard(|| {
        nonnull(out, "out")?;
        let s = if q == 9 { q9_sequence(n_max) } else { cs_prime_sequence(q, n_max) }.map_err(lib)?;
        let text = CString::new(s.to_json().to_string()).map_err(|e| fail(EntropikStatus::Computation, &e.to_string()))?;
        // SAFETY: checked non-null.
        unsafe { *out = text.into_raw() };
        Ok(())
    })
}

/// Runs the command line with a NUL-terminated argument vector (without the
/// program name) and returns its exit code. Output goes to stdout, or to the
/// file named by `--output`.
///
/// # Safety
/// `argv` must point to `argc` valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn entropik_run(argc: usize, argv: *const *const c_char, exit_code: *mut i32) -> EntropikStatus {
    guard(|| {
        nonnull(exit_code, "exit_code")?;
        if argc > 0 {
            nonnull(argv, "argv")?;
        }
        let mut args = vec!["entropik".to_string()];
        for i in 0..argc {
            // SAFETY: caller provides argc valid pointers.
            let p = unsafe { *argv.add(i) };
            nonnull(p, "argument")?;
            let s = unsafe { CStr::from_ptr(p) }
                .to_str()
                .map_err(|_| fail(EntropikStatus::Precondition, "argument is not UTF-8"))?;
            args.push(s.to_string());
        }
        let code = entropik::cli::main_with_args(args);
        // SAFETY: checked non-null.
        unsafe { *exit_code = code };
        Ok(())
    })
}

/// Releases a string returned by the library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn entropik_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: created by CString::into_raw in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status_codes() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, EntropikStatus::Panic);
        let msg = unsafe { CStr::from_ptr(entropik_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "boom");
        assert_eq!(guard(|| Ok(())), EntropikStatus::Ok);
        assert!(unsafe { CStr::from_ptr(entropik_last_error()) }.is_empty());
    }
}
