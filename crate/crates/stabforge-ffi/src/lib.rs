//! C ABI for stabforge.
//!
//! Every fallible function returns an [`SfStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be fetched with [`sf_last_error`]. Handles are opaque and must be released
//! with their `_free` function; strings returned to the caller must be
//! released with [`sf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use stabforge::classifier::{self, ClassificationInput, ClassificationReport};
use stabforge::cohomology::{cohomology, CycModule, Matrix};
use stabforge::division_order::{hasse_embeds, parse_script, run_script};
use stabforge::padic::PadicInt;
use stabforge::tower::{epsilon_alpha, FieldElem, FieldTower};
use stabforge::unit_classes::{epsilon_test, r1_max, StabilizerParams};
use stabforge::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Parse = 4,
    NonUnit = 5,
    NotASquare = 6,
    InsufficientPrecision = 7,
    Indeterminate = 8,
    Unsupported = 9,
    NotApplicable = 10,
    BadAction = 11,
    UnknownName = 12,
    OutOfRange = 13,
    Panic = 99,
}

impl From<&Error> for SfStatus {
    fn from(e: &Error) -> SfStatus {
        match e {
            Error::NonUnit => SfStatus::NonUnit,
            Error::NotASquare => SfStatus::NotASquare,
            Error::InsufficientPrecision { .. } | Error::PrecisionTooLow(_) | Error::DepthTooSmall { .. } => {
                SfStatus::InsufficientPrecision
            }
            Error::IndeterminateAtPrecision => SfStatus::Indeterminate,
            Error::UnsupportedParameters(_) => SfStatus::Unsupported,
            Error::NotApplicable(_) => SfStatus::NotApplicable,
            Error::BadAction(_) => SfStatus::BadAction,
            Error::UnknownName(_) => SfStatus::UnknownName,
            Error::Parse(_) => SfStatus::Parse,
            Error::InvalidInput(_) => SfStatus::InvalidInput,
        }
    }
}

/// An element of Z_p known modulo p^N.
pub struct SfPadic(PadicInt);

/// The field Q_p(ζ_{p^α}, ζ_{p^f−1}) at a fixed maximal π-adic precision.
pub struct SfTower(Arc<FieldTower>);

/// An element of an [`SfTower`].
pub struct SfFieldElem(FieldElem);

/// A classification report.
pub struct SfReport(ClassificationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure(SfStatus::from(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

/// Run `f`, record any failure and convert panics to [`SfStatus::Panic`].
fn guard(f: impl FnOnce() -> FfiResult<()>) -> SfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SfStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SfStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    // SAFETY: the caller passes either NULL or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> FfiResult<&'a str> {
    if s.is_null() {
        return Err(null(what));
    }
    // SAFETY: the caller passes a NUL-terminated string.
    unsafe { CStr::from_ptr(s) }.to_str().map_err(|_| Failure(SfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-NULL out-pointers must be valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    let c = CString::new(s).map_err(|_| Failure(SfStatus::InvalidInput, "string contains NUL".into()))?;
    // SAFETY: forwarded from the caller's contract.
    unsafe { write(out, c.into_raw(), "out") }
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    // SAFETY: forwarded from the caller's contract.
    unsafe { write(out, Box::into_raw(Box::new(value)), "out") }
}

fn to_json<T: serde::Serialize>(v: &T) -> FfiResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| Failure(SfStatus::InvalidInput, e.to_string()))
}

/// The message of the last failed call on this thread, or NULL.
/// Free the result with [`sf_string_free`].
#[no_mangle]
pub extern "C" fn sf_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` came from CString::into_raw in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// `z mod p^prec` as a new handle.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_padic_from_integer(z: i64, p: u32, prec: u32, out: *mut *mut SfPadic) -> SfStatus {
    guard(|| unsafe { write_handle(out, SfPadic(PadicInt::from_integer(z, p, prec)?)) })
}

/// Parse a digit literal `p:P [d0,d1,...]`.
///
/// # Safety
/// `literal` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_padic_parse(literal: *const c_char, out: *mut *mut SfPadic) -> SfStatus {
    guard(|| unsafe {
        let x: PadicInt = text(literal, "literal")?.parse()?;
        write_handle(out, SfPadic(x))
    })
}

unsafe fn padic_binop(
    a: *const SfPadic,
    b: *const SfPadic,
    out: *mut *mut SfPadic,
    op: fn(&PadicInt, &PadicInt) -> stabforge::Result<PadicInt>,
) -> SfStatus {
    guard(|| unsafe {
        let (a, b) = (borrow(a, "a")?, borrow(b, "b")?);
        write_handle(out, SfPadic(op(&a.0, &b.0)?))
    })
}

/// a + b at the smaller precision.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_padic_add(a: *const SfPadic, b: *const SfPadic, out: *mut *mut SfPadic) -> SfStatus {
    unsafe { padic_binop(a, b, out, PadicInt::add) }
}

/// a − b at the smaller precision.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_padic_sub(a: *const SfPadic, b: *const SfPadic, out: *mut *mut SfPadic) -> SfStatus {
    unsafe { padic_binop(a, b, out, PadicInt::sub) }
}

/// a · b at the smaller precision.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_padic_mul(a: *const SfPadic, b: *const SfPadic, out: *mut *mut SfPadic) -> SfStatus {
    unsafe { padic_binop(a, b, out, PadicInt::mul) }
}

/// a^{-1}; fails with `NonUnit` when p divides a.
///
/// # Safety
/// `a` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_padic_invert(a: *const SfPadic, out: *mut *mut SfPadic) -> SfStatus {
    guard(|| unsafe {
        let a = borrow(a, "a")?;
        write_handle(out, SfPadic(a.0.invert()?.into_int()))
    })
}

/// Whether a and b are equal (same prime, precision and value).
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_padic_equal(a: *const SfPadic, b: *const SfPadic, out: *mut bool) -> SfStatus {
    guard(|| unsafe {
        let (a, b) = (borrow(a, "a")?, borrow(b, "b")?);
        write(out, a.0 == b.0, "out")
    })
}

/// Copy up to `cap` base-p digits (least significant first) into `digits`
/// and store the precision in `len`. Fails with `OutOfRange` if `cap` is too small.
///
/// # Safety
/// `a` must be a live handle; `digits` must hold `cap` values; `len` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_padic_digits(a: *const SfPadic, digits: *mut u32, cap: usize, len: *mut usize) -> SfStatus {
    guard(|| unsafe {
        let d = borrow(a, "a")?.0.digits();
        write(len, d.len(), "len")?;
        if d.len() > cap {
            return Err(Failure(SfStatus::OutOfRange, format!("need {} digits, buffer holds {cap}", d.len())));
        }
        if digits.is_null() {
            return Err(null("digits"));
        }
        // SAFETY: `digits` holds at least `cap >= d.len()` values.
        ptr::copy_nonoverlapping(d.as_ptr(), digits, d.len());
        Ok(())
    })
}

/// The digit literal `p:P [d0,...]`.
///
/// # Safety
/// `a` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_padic_to_string(a: *const SfPadic, out: *mut *mut c_char) -> SfStatus {
    guard(|| unsafe { write_string(out, borrow(a, "a")?.0.to_string()) })
}

/// Release a p-adic handle. NULL is ignored.
///
/// # Safety
/// `a` must be NULL or a handle from this library that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_padic_free(a: *mut SfPadic) {
    if !a.is_null() {
        // SAFETY: handles are created by Box::into_raw.
        drop(unsafe { Box::from_raw(a) });
    }
}

/// Build Q_p(ζ_{p^α}, ζ_{p^f−1}) supporting π-adic precision up to `max_prec`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_tower_new(p: u32, f: usize, alpha: u32, max_prec: u32, out: *mut *mut SfTower) -> SfStatus {
    guard(|| unsafe { write_handle(out, SfTower(FieldTower::new(p, f, alpha, max_prec)?)) })
}

/// Release a tower handle. Elements keep their own reference to the tower.
///
/// # Safety
/// `t` must be NULL or a handle from this library that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_tower_free(t: *mut SfTower) {
    if !t.is_null() {
        // SAFETY: handles are created by Box::into_raw.
        drop(unsafe { Box::from_raw(t) });
    }
}

/// ε_α = π^{φ(p^α)}/p at π-adic precision `prec`.
///
/// # Safety
/// `t` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_epsilon(t: *const SfTower, prec: u32, out: *mut *mut SfFieldElem) -> SfStatus {
    guard(|| unsafe {
        let t = borrow(t, "tower")?;
        write_handle(out, SfFieldElem(epsilon_alpha(&t.0, prec)?))
    })
}

/// Parse `pi^i * [c0,c1,...] + ...` at π-adic precision `prec`.
///
/// # Safety
/// `t` must be a live handle; `literal` a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_elem_parse(
    t: *const SfTower,
    literal: *const c_char,
    prec: u32,
    out: *mut *mut SfFieldElem,
) -> SfStatus {
    guard(|| unsafe {
        let t = borrow(t, "tower")?;
        write_handle(out, SfFieldElem(FieldElem::parse(&t.0, text(literal, "literal")?, prec)?))
    })
}

/// x · y.
///
/// # Safety
/// `x` and `y` must be live handles over the same tower; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_elem_mul(
    x: *const SfFieldElem,
    y: *const SfFieldElem,
    out: *mut *mut SfFieldElem,
) -> SfStatus {
    guard(|| unsafe {
        let (x, y) = (borrow(x, "x")?, borrow(y, "y")?);
        if !Arc::ptr_eq(x.0.tower(), y.0.tower()) {
            return Err(Failure(SfStatus::InvalidInput, "elements belong to different towers".into()));
        }
        write_handle(out, SfFieldElem(x.0.mul(&y.0)))
    })
}

/// −x.
///
/// # Safety
/// `x` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_elem_neg(x: *const SfFieldElem, out: *mut *mut SfFieldElem) -> SfStatus {
    guard(|| unsafe { write_handle(out, SfFieldElem(borrow(x, "x")?.0.neg())) })
}

/// JSON `{"digits": [...], "precision": n}` of the first `n` π-adic digits,
/// each digit a residue vector over F_{p^f}.
///
/// # Safety
/// `x` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_elem_digits_json(x: *const SfFieldElem, n: u32, out: *mut *mut c_char) -> SfStatus {
    guard(|| unsafe {
        let digits = borrow(x, "x")?.0.pi_digits(n)?;
        write_string(out, to_json(&serde_json::json!({ "digits": digits, "precision": n }))?)
    })
}

/// The element literal of x.
///
/// # Safety
/// `x` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_elem_to_string(x: *const SfFieldElem, out: *mut *mut c_char) -> SfStatus {
    guard(|| unsafe { write_string(out, borrow(x, "x")?.0.to_string()) })
}

/// Release a field element. NULL is ignored.
///
/// # Safety
/// `x` must be NULL or a handle from this library that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_elem_free(x: *mut SfFieldElem) {
    if !x.is_null() {
        // SAFETY: handles are created by Box::into_raw.
        drop(unsafe { Box::from_raw(x) });
    }
}

/// Maximal finite subgroups of G_n(u); u is any integer prime to p.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_classify_gn(p: u32, n: u32, u: i64, out: *mut *mut SfReport) -> SfStatus {
    guard(|| unsafe {
        let report = classifier::maximal_in_gn(&ClassificationInput::new(p, n, u)?)?;
        write_handle(out, SfReport(report))
    })
}

/// Maximal finite subgroups of S_n.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_classify_sn(p: u32, n: u32, out: *mut *mut SfReport) -> SfStatus {
    guard(|| unsafe { write_handle(out, SfReport(classifier::maximal_in_sn(p, n)?)) })
}

/// Number of maximal classes in the report.
///
/// # Safety
/// `r` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_report_class_count(r: *const SfReport, out: *mut usize) -> SfStatus {
    guard(|| unsafe { write(out, borrow(r, "report")?.0.classes.len(), "out") })
}

/// Label and order of class `i`. Either out-pointer may be NULL.
///
/// # Safety
/// `r` must be a live handle; non-NULL out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_report_class(
    r: *const SfReport,
    i: usize,
    label: *mut *mut c_char,
    order: *mut u64,
) -> SfStatus {
    guard(|| unsafe {
        let r = borrow(r, "report")?;
        let c =
            r.0.classes
                .get(i)
                .ok_or_else(|| Failure(SfStatus::OutOfRange, format!("class {i} of {}", r.0.classes.len())))?;
        if !label.is_null() {
            write_string(label, c.label.clone())?;
        }
        if !order.is_null() {
            write(order, c.order, "order")?;
        }
        Ok(())
    })
}

/// The full report as pretty JSON, identical to the CLI output without the trailing newline.
///
/// # Safety
/// `r` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_report_json(r: *const SfReport, out: *mut *mut c_char) -> SfStatus {
    guard(|| unsafe { write_string(out, borrow(r, "report")?.0.to_json()) })
}

/// Release a report. NULL is ignored.
///
/// # Safety
/// `r` must be NULL or a handle from this library that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_report_free(r: *mut SfReport) {
    if !r.is_null() {
        // SAFETY: handles are created by Box::into_raw.
        drop(unsafe { Box::from_raw(r) });
    }
}

/// Existence, order and label of the extension of T_24 × C_{2^m−1} in G_{2m}(u) at p = 2, as JSON.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_quaternionic_json(n: u32, u: i64, out: *mut *mut c_char) -> SfStatus {
    guard(|| unsafe { write_string(out, to_json(&classifier::quaternionic_extension(2, n, u)?)?) })
}

/// Maximal r_1 for F_0 = C_{p^α} × C_d in D_n with S^n = pu.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_r1_max(p: u32, n: u32, alpha: u32, d: u64, u: i64, out: *mut u64) -> SfStatus {
    guard(|| unsafe { write(out, r1_max(StabilizerParams { p, n, alpha, d, u })?.maximal, "out") })
}

/// Whether ε_α/u is trivial in Z_p(F_0)^×/⟨F_0, (Z_p(F_0)^×)^{r1}⟩.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_epsilon_test(
    p: u32,
    n: u32,
    alpha: u32,
    d: u64,
    u: i64,
    r1: u64,
    out: *mut bool,
) -> SfStatus {
    guard(|| unsafe { write(out, epsilon_test(StabilizerParams { p, n, alpha, d, u }, r1)?, "out") })
}

/// Whether D_m embeds in D_n.
#[no_mangle]
pub extern "C" fn sf_hasse_embeds(m: u64, n: u64) -> bool {
    hasse_embeds(m, n)
}

/// Cohomology of C_order acting on Z^rank ⊕ ⊕ Z/torsion[i] as JSON.
/// `action` is the k×k matrix in row-major order with k = rank + n_torsion;
/// column j is the image of generator j. NULL `action` means the trivial action.
///
/// # Safety
/// `torsion` must hold `n_torsion` values (or be NULL when it is 0); `action`
/// must be NULL or hold k·k values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_cohomology_json(
    rank: usize,
    torsion: *const u64,
    n_torsion: usize,
    action: *const i64,
    order: u64,
    out: *mut *mut c_char,
) -> SfStatus {
    guard(|| unsafe {
        let torsion: &[u64] = match n_torsion {
            0 => &[],
            _ if torsion.is_null() => return Err(null("torsion")),
            // SAFETY: the caller guarantees n_torsion readable values.
            k => std::slice::from_raw_parts(torsion, k),
        };
        let k = rank + torsion.len();
        let matrix = if action.is_null() {
            Matrix::identity(k)
        } else {
            // SAFETY: the caller guarantees k·k readable values.
            let flat = std::slice::from_raw_parts(action, k * k);
            let rows: Vec<Vec<i64>> = flat.chunks(k.max(1)).map(<[i64]>::to_vec).collect();
            if k == 0 {
                Matrix::identity(0)
            } else {
                Matrix::from_rows(&rows)?
            }
        };
        let module = CycModule::new(rank, torsion, matrix, order)?;
        write_string(out, to_json(&cohomology(&module))?)
    })
}

/// Run a relation script; `all_hold` receives the overall verdict and
/// `report` (may be NULL) the per-check JSON report.
///
/// # Safety
/// `script` must be a NUL-terminated string; `all_hold` must be valid for
/// writes; `report` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sf_verify_script(
    script: *const c_char,
    all_hold: *mut bool,
    report: *mut *mut c_char,
) -> SfStatus {
    guard(|| unsafe {
        let parsed = parse_script(text(script, "script")?)?;
        let r = run_script(&parsed)?;
        write(all_hold, r.all_hold, "all_hold")?;
        if !report.is_null() {
            write_string(report, to_json(&r)?)?;
        }
        Ok(())
    })
}
