//! C ABI over the `qcs` engine.
//!
//! Every function returns a [`QcsStatus`]; results come back through out
//! parameters. Handles and strings returned by the library must be released
//! with the matching `*_free` function. The message for the most recent
//! failure on the calling thread is available from [`qcs_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qcs::curvespec::{parse_spec, SpecFile};
use qcs::mpath::{chi, Mode};
use qcs::snakeband::{build_graph, enumerate_matchings, graph_matrix_formula, matching_enumerator};
use qcs::{Error, LaurentPoly};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Domain = 5,
    Sign = 6,
    Input = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcsMode {
    Standard = 0,
    Sqrt = 1,
    Y1 = 2,
}

/// Parsed `.qcs` document.
pub struct QcsSpec(SpecFile);

/// Laurent polynomial.
pub struct QcsPoly(LaurentPoly);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QcsStatus {
    match e {
        Error::Input(_) => QcsStatus::Input,
        Error::Domain(_) => QcsStatus::Domain,
        Error::Sign(_) => QcsStatus::Sign,
        Error::Parse { .. } => QcsStatus::Parse,
        Error::Validation { .. } => QcsStatus::Validation,
    }
}

fn guard(f: impl FnOnce() -> Result<(), QcsStatus>) -> QcsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QcsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            QcsStatus::Panic
        }
    }
}

fn fail(e: Error) -> QcsStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, QcsStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(QcsStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8".into());
        QcsStatus::InvalidUtf8
    })
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, QcsStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle".into());
        QcsStatus::NullPointer
    })
}

fn out_arg<T>(p: *mut T) -> Result<(), QcsStatus> {
    if p.is_null() {
        set_error("null output pointer".into());
        Err(QcsStatus::NullPointer)
    } else {
        Ok(())
    }
}

fn mode_of(m: QcsMode) -> Mode {
    match m {
        QcsMode::Standard => Mode::Standard,
        QcsMode::Sqrt => Mode::Sqrt,
        QcsMode::Y1 => Mode::Y1,
    }
}

/// Message of the last failure on this thread, or NULL. Owned by the library;
/// valid until the next call that fails on the same thread.
#[no_mangle]
pub extern "C" fn qcs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse a `.qcs` document.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcs_spec_parse(text: *const c_char, out: *mut *mut QcsSpec) -> QcsStatus {
    guard(|| {
        out_arg(out)?;
        let t = str_arg(text)?;
        let f = parse_spec(t).map_err(fail)?;
        *out = Box::into_raw(Box::new(QcsSpec(f)));
        Ok(())
    })
}

/// # Safety
/// `spec` must come from [`qcs_spec_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qcs_spec_free(spec: *mut QcsSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Number of curves declared in the document.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qcs_spec_curve_count(spec: *const QcsSpec, out: *mut usize) -> QcsStatus {
    guard(|| {
        out_arg(out)?;
        *out = ref_arg(spec)?.0.curves.len();
        Ok(())
    })
}

/// Laurent expansion of a named curve (boundary units set to 1).
///
/// # Safety
/// Pointers must be valid; `curve` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qcs_expand(
    spec: *const QcsSpec,
    curve: *const c_char,
    mode: QcsMode,
    out: *mut *mut QcsPoly,
) -> QcsStatus {
    guard(|| {
        out_arg(out)?;
        let f = &ref_arg(spec)?.0;
        let c = f.curve(str_arg(curve)?).map_err(fail)?;
        let p = chi(c, &f.signs, mode_of(mode)).map_err(fail)?.set_to_one(f.units.iter());
        *out = Box::into_raw(Box::new(QcsPoly(p)));
        Ok(())
    })
}

/// Number of (good) perfect matchings of the curve's snake or band graph.
///
/// # Safety
/// Pointers must be valid; `curve` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qcs_matching_count(
    spec: *const QcsSpec,
    curve: *const c_char,
    out: *mut usize,
) -> QcsStatus {
    guard(|| {
        out_arg(out)?;
        let f = &ref_arg(spec)?.0;
        let c = f.curve(str_arg(curve)?).map_err(fail)?;
        let g = build_graph(c).map_err(fail)?;
        *out = enumerate_matchings(&g).len();
        Ok(())
    })
}

/// Whether the matching enumerator, tile formula and M-path agree.
///
/// # Safety
/// Pointers must be valid; `curve` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qcs_verify(spec: *const QcsSpec, curve: *const c_char, out: *mut bool) -> QcsStatus {
    guard(|| {
        out_arg(out)?;
        let f = &ref_arg(spec)?.0;
        let c = f.curve(str_arg(curve)?).map_err(fail)?;
        let g = build_graph(c).map_err(fail)?;
        let e = matching_enumerator(&g, &f.signs).map_err(fail)?;
        let m = graph_matrix_formula(&g, &f.signs).map_err(fail)?;
        let p = chi(c, &f.signs, Mode::Standard).map_err(fail)?;
        *out = e == m && m == p;
        Ok(())
    })
}

/// Parse a polynomial in canonical syntax.
///
/// # Safety
/// `text` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcs_poly_parse(text: *const c_char, out: *mut *mut QcsPoly) -> QcsStatus {
    guard(|| {
        out_arg(out)?;
        let p = LaurentPoly::parse(str_arg(text)?).map_err(fail)?;
        *out = Box::into_raw(Box::new(QcsPoly(p)));
        Ok(())
    })
}

/// Product of two polynomials as a new handle.
///
/// # Safety
/// Handles must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcs_poly_mul(a: *const QcsPoly, b: *const QcsPoly, out: *mut *mut QcsPoly) -> QcsStatus {
    guard(|| {
        out_arg(out)?;
        let p = &ref_arg(a)?.0 * &ref_arg(b)?.0;
        *out = Box::into_raw(Box::new(QcsPoly(p)));
        Ok(())
    })
}

/// # Safety
/// Handles must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcs_poly_equal(a: *const QcsPoly, b: *const QcsPoly, out: *mut bool) -> QcsStatus {
    guard(|| {
        out_arg(out)?;
        *out = ref_arg(a)?.0 == ref_arg(b)?.0;
        Ok(())
    })
}

/// Canonical string of a polynomial; release with [`qcs_string_free`].
///
/// # Safety
/// Handle must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcs_poly_to_string(p: *const QcsPoly, out: *mut *mut c_char) -> QcsStatus {
    guard(|| {
        out_arg(out)?;
        let s = ref_arg(p)?.0.canonical_string();
        *out = CString::new(s).expect("no interior NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qcs_poly_free(p: *mut QcsPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qcs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
