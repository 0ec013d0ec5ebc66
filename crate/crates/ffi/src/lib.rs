//! C ABI over the `hydra` library.
//!
//! Maps and finitely supported functions live behind opaque handles created by
//! the `*_from_*` and `hydra_qz_indicator` calls and released with the
//! matching `*_free`. Every fallible call returns a [`HydraStatus`]; on
//! failure the message is available from [`hydra_last_error`] on the same
//! thread. Structured results come back as JSON strings owned by the caller
//! and released with [`hydra_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use hydra::dreamcatcher::{
    qh_apply, qh_apply_basis, qh_check_profinite, saul_walk, truncated_kernel, KernelConfig, QZFunction,
};
use hydra::exact::RatMod1;
use hydra::hydra::HydraMap;
use hydra::orbit::iterate_orbit;
use hydra::series::{default_schedule, eval_series, virtual_residue, Diagnostic, SeriesKind, SetSpec};
use hydra::HydraError;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HydraStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Capability = 5,
    Resource = 6,
    Precondition = 7,
    Tolerance = 8,
    Pole = 9,
    Io = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HydraSeriesKind {
    Ordinary = 0,
    Fourier = 1,
    Exponential = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HydraDiagnostic {
    Converged = 0,
    Oscillatory = 1,
    Divergent = 2,
}

/// Opaque hydra map.
pub struct HydraMapHandle {
    map: HydraMap,
}

/// Opaque finitely supported function on Q/Z.
pub struct HydraQzHandle {
    f: QZFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &HydraError) -> HydraStatus {
    match err {
        HydraError::Parse(_) | HydraError::Malformed(_) | HydraError::Lookup(_) | HydraError::Validation { .. } => {
            HydraStatus::Parse
        }
        HydraError::Domain(_) => HydraStatus::Domain,
        HydraError::Capability(_) => HydraStatus::Capability,
        HydraError::Resource(_) => HydraStatus::Resource,
        HydraError::Precondition(_) => HydraStatus::Precondition,
        HydraError::Tolerance { .. } => HydraStatus::Tolerance,
        HydraError::Pole(_) => HydraStatus::Pole,
        HydraError::Io(_) => HydraStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Utf8,
    Hydra(HydraError),
}

impl From<HydraError> for Fail {
    fn from(e: HydraError) -> Self {
        Fail::Hydra(e)
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail::Hydra(e.into())
    }
}

/// Runs `body`, converting errors and panics into a status plus last-error message.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> HydraStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            HydraStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            HydraStatus::NullPointer
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("argument is not valid UTF-8");
            HydraStatus::InvalidUtf8
        }
        Ok(Err(Fail::Hydra(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            HydraStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8)
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail::Utf8)?;
    write(out, c.into_raw(), "out")
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn hydra_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hydra_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hydra_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a map from a catalog name (`H3`, `T+1`, ...) or a JSON config path.
#[no_mangle]
pub unsafe extern "C" fn hydra_map_from_source(source: *const c_char, out: *mut *mut HydraMapHandle) -> HydraStatus {
    guard(|| {
        let map = HydraMap::resolve(text(source, "source")?)?;
        write(out, Box::into_raw(Box::new(HydraMapHandle { map })), "out")
    })
}

/// Creates a map from JSON text `{"rho": .., "branches": [{"a":..,"b":..,"d":..}, ..]}`.
#[no_mangle]
pub unsafe extern "C" fn hydra_map_from_json(json: *const c_char, out: *mut *mut HydraMapHandle) -> HydraStatus {
    guard(|| {
        let map = HydraMap::from_json(text(json, "json")?)?;
        write(out, Box::into_raw(Box::new(HydraMapHandle { map })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hydra_map_free(map: *mut HydraMapHandle) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// `rho` of the map, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn hydra_map_rho(map: *const HydraMapHandle) -> u64 {
    map.as_ref().map_or(0, |m| m.map.rho())
}

/// `H(n)`; `Domain` when the image overflows 64 bits.
#[no_mangle]
pub unsafe extern "C" fn hydra_map_apply(map: *const HydraMapHandle, n: u64, out: *mut u64) -> HydraStatus {
    guard(|| {
        let m = handle(map, "map")?;
        let v = m.map.checked_apply(n).ok_or_else(|| HydraError::Domain(format!("H({n}) overflows")))?;
        write(out, v, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hydra_map_digest(map: *const HydraMapHandle, out: *mut *mut c_char) -> HydraStatus {
    guard(|| write_string(out, handle(map, "map")?.map.digest()))
}

/// Validation report as JSON.
#[no_mangle]
pub unsafe extern "C" fn hydra_map_validate(map: *const HydraMapHandle, out: *mut *mut c_char) -> HydraStatus {
    guard(|| write_string(out, serde_json::to_string(&handle(map, "map")?.map.validate())?))
}

/// Trajectory of `n` as JSON.
#[no_mangle]
pub unsafe extern "C" fn hydra_orbit(
    map: *const HydraMapHandle,
    n: u64,
    max_steps: u64,
    max_value: u64,
    out: *mut *mut c_char,
) -> HydraStatus {
    guard(|| {
        let t = iterate_orbit(&handle(map, "map")?.map, n, max_steps as usize, max_value);
        write_string(out, serde_json::to_string(&t)?)
    })
}

/// Parses a function from `{"points": [{"t": "1/5", "value": [["1/2", "E(1,0)"]]}]}`.
#[no_mangle]
pub unsafe extern "C" fn hydra_qz_from_json(json: *const c_char, out: *mut *mut HydraQzHandle) -> HydraStatus {
    guard(|| {
        let f = QZFunction::from_json(text(json, "json")?)?;
        write(out, Box::into_raw(Box::new(HydraQzHandle { f })), "out")
    })
}

/// The indicator `1_t` of the class of `t` (text such as `"1/5"`).
#[no_mangle]
pub unsafe extern "C" fn hydra_qz_indicator(t: *const c_char, out: *mut *mut HydraQzHandle) -> HydraStatus {
    guard(|| {
        let t: RatMod1 = text(t, "t")?.parse()?;
        write(out, Box::into_raw(Box::new(HydraQzHandle { f: QZFunction::indicator(t) })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hydra_qz_free(f: *mut HydraQzHandle) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of support points, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn hydra_qz_len(f: *const HydraQzHandle) -> u64 {
    f.as_ref().map_or(0, |h| h.f.len() as u64)
}

#[no_mangle]
pub unsafe extern "C" fn hydra_qz_to_json(f: *const HydraQzHandle, out: *mut *mut c_char) -> HydraStatus {
    guard(|| write_string(out, handle(f, "f")?.f.to_json()?))
}

/// Exact equality of two functions.
#[no_mangle]
pub unsafe extern "C" fn hydra_qz_equal(
    a: *const HydraQzHandle,
    b: *const HydraQzHandle,
    out: *mut bool,
) -> HydraStatus {
    guard(|| write(out, handle(a, "a")?.f == handle(b, "b")?.f, "out"))
}

/// Applies the dreamcatcher operator of `map` to `f`, producing a new handle.
#[no_mangle]
pub unsafe extern "C" fn hydra_qh_apply(
    map: *const HydraMapHandle,
    f: *const HydraQzHandle,
    out: *mut *mut HydraQzHandle,
) -> HydraStatus {
    guard(|| {
        let g = qh_apply(&handle(map, "map")?.map, &handle(f, "f")?.f)?;
        write(out, Box::into_raw(Box::new(HydraQzHandle { f: g })), "out")
    })
}

/// Image set of `1_t` as JSON.
#[no_mangle]
pub unsafe extern "C" fn hydra_qh_apply_basis(
    map: *const HydraMapHandle,
    t: *const c_char,
    out: *mut *mut c_char,
) -> HydraStatus {
    guard(|| {
        let t: RatMod1 = text(t, "t")?.parse()?;
        write_string(out, serde_json::to_string(&qh_apply_basis(&handle(map, "map")?.map, &t)?)?)
    })
}

/// Exact comparison of the two basis formulas at class `t` and integer `n`.
#[no_mangle]
pub unsafe extern "C" fn hydra_qh_check_profinite(
    map: *const HydraMapHandle,
    t: *const c_char,
    n: i64,
    out: *mut bool,
) -> HydraStatus {
    guard(|| {
        let t: RatMod1 = text(t, "t")?.parse()?;
        write(out, qh_check_profinite(&handle(map, "map")?.map, &t, n)?.equal, "out")
    })
}

/// Support-growth walk from `tau` as JSON.
#[no_mangle]
pub unsafe extern "C" fn hydra_walk(
    map: *const HydraMapHandle,
    tau: *const c_char,
    steps: u64,
    out: *mut *mut c_char,
) -> HydraStatus {
    guard(|| {
        let tau: RatMod1 = text(tau, "tau")?.parse()?;
        let w = saul_walk(&handle(map, "map")?.map, &tau, steps as usize)?;
        write_string(out, serde_json::to_string(&w)?)
    })
}

/// Truncated fixed-point kernel as JSON; `conductor_cap = 0` keeps the default cap.
#[no_mangle]
pub unsafe extern "C" fn hydra_kernel(
    map: *const HydraMapHandle,
    denom_bound: u64,
    off_rho_only: bool,
    conductor_cap: u64,
    out: *mut *mut c_char,
) -> HydraStatus {
    guard(|| {
        let mut cfg = KernelConfig::default();
        if conductor_cap > 0 {
            cfg.conductor_cap = conductor_cap;
        }
        let k = truncated_kernel(&handle(map, "map")?.map, denom_bound, off_rho_only, &cfg)?;
        write_string(out, serde_json::to_string(&k)?)
    })
}

/// Evaluates the set-series of `set` (mini-language text) at `re + i im`.
#[no_mangle]
pub unsafe extern "C" fn hydra_eval_series(
    set: *const c_char,
    kind: HydraSeriesKind,
    re: f64,
    im: f64,
    n_max: u64,
    tail_tol: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    out_tail: *mut f64,
) -> HydraStatus {
    guard(|| {
        let set: SetSpec = text(set, "set")?.parse()?;
        let kind = match kind {
            HydraSeriesKind::Ordinary => SeriesKind::Ordinary,
            HydraSeriesKind::Fourier => SeriesKind::Fourier,
            HydraSeriesKind::Exponential => SeriesKind::Exponential,
        };
        let v = eval_series(&set, kind, Complex64::new(re, im), n_max, tail_tol)?;
        write(out_re, v.value.re, "out_re")?;
        write(out_im, v.value.im, "out_im")?;
        write(out_tail, v.tail_bound, "out_tail")
    })
}

/// Virtual residue of `set` at the class `x` over the default schedule.
#[no_mangle]
pub unsafe extern "C" fn hydra_virtual_residue(
    set: *const c_char,
    x: *const c_char,
    out_re: *mut f64,
    out_im: *mut f64,
    out_diagnostic: *mut HydraDiagnostic,
) -> HydraStatus {
    guard(|| {
        let set: SetSpec = text(set, "set")?.parse()?;
        let x: RatMod1 = text(x, "x")?.parse()?;
        let r = virtual_residue(&set, &x, &default_schedule())?;
        let diag = match r.diagnostic {
            Diagnostic::Converged => HydraDiagnostic::Converged,
            Diagnostic::Oscillatory => HydraDiagnostic::Oscillatory,
            Diagnostic::Divergent => HydraDiagnostic::Divergent,
        };
        write(out_re, r.value.re, "out_re")?;
        write(out_im, r.value.im, "out_im")?;
        write(out_diagnostic, diag, "out_diagnostic")
    })
}
