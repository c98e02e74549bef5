//! C ABI over the `apollonian` crate.
//!
//! Every fallible entry point returns an [`ApoStatus`]; on failure the
//! message is available from [`apo_last_error_message`] on the same thread.
//! Quadruples cross the boundary as `int64_t[4]`. Orbits are opaque handles
//! released with [`apo_orbit_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use apollonian::congruence::{build_cayley, reduce_group_mod, spectrum, SpectrumOptions, DEFAULT_GROUP_CAP};
use apollonian::counting::{count_curve_from_sorted, fit_exponent, log_grid};
use apollonian::geometry::Rect;
use apollonian::quad::{
    descartes_form, enumerate_orbit_with, is_primitive, orbit_curvatures, reduce_to_root, DescartesQuadruple,
    Embedding, EnumerateOptions, PackingOrbit,
};
use apollonian::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotDescartes = 3,
    Overflow = 4,
    SizeCap = 5,
    NoConvergence = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// Enumerated packing; opaque to C.
pub struct ApoOrbit {
    inner: PackingOrbit,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct ApoRect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct ApoFit {
    pub alpha_hat: f64,
    pub std_error: f64,
    pub c_hat: f64,
    pub points: usize,
}

/// Spectral summary of the Cayley graph modulo `q`. Quantities that are
/// undefined (a single vertex) are NaN.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct ApoSpectrum {
    pub group_order: usize,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda_min: f64,
    pub cheeger_lower: f64,
    pub cheeger_upper: f64,
    pub components: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ApoStatus {
    match e {
        Error::NotDescartes { .. } => ApoStatus::NotDescartes,
        Error::Overflow(_) => ApoStatus::Overflow,
        Error::SizeCap { .. } => ApoStatus::SizeCap,
        Error::NoConvergence { .. } | Error::ReductionDiverged { .. } => ApoStatus::NoConvergence,
        _ => ApoStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (ApoStatus, String)>) -> ApoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ApoStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ApoStatus::Internal
        }
    }
}

fn lift(e: Error) -> (ApoStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (ApoStatus, String) {
    (ApoStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_quad(v: *const i64) -> Result<[i128; 4], (ApoStatus, String)> {
    if v.is_null() {
        return Err(null("quadruple"));
    }
    // SAFETY: caller passes four readable int64_t.
    let s = unsafe { std::slice::from_raw_parts(v, 4) };
    Ok([s[0], s[1], s[2], s[3]].map(i128::from))
}

fn quad(v: [i128; 4]) -> Result<DescartesQuadruple, (ApoStatus, String)> {
    DescartesQuadruple::new(v).map_err(lift)
}

fn to_i64(x: i128) -> Result<i64, (ApoStatus, String)> {
    i64::try_from(x).map_err(|_| (ApoStatus::Overflow, format!("{x} does not fit in int64_t")))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn apo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `Q(v) = 2Σv² − (Σv)²`.
///
/// # Safety
/// `v` points to four `int64_t`; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn apo_descartes_form(v: *const i64, out: *mut i64) -> ApoStatus {
    guard(|| {
        let v = unsafe { read_quad(v) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let q = to_i64(descartes_form(&v).map_err(lift)?)?;
        unsafe { *out = q };
        Ok(())
    })
}

/// Root quadruple of the packing through `v`.
///
/// # Safety
/// `v` points to four readable and `out` to four writable `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn apo_reduce_to_root(v: *const i64, out: *mut i64) -> ApoStatus {
    guard(|| {
        let v = unsafe { read_quad(v) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let root = reduce_to_root(&quad(v)?).map_err(lift)?.entries();
        let root = [to_i64(root[0])?, to_i64(root[1])?, to_i64(root[2])?, to_i64(root[3])?];
        unsafe { ptr::copy_nonoverlapping(root.as_ptr(), out, 4) };
        Ok(())
    })
}

/// Whether the curvatures of `v` have gcd 1.
///
/// # Safety
/// `v` points to four `int64_t`; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn apo_is_primitive(v: *const i64, out: *mut bool) -> ApoStatus {
    guard(|| {
        let v = unsafe { read_quad(v) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = is_primitive(&quad(v)?);
        unsafe { *out = p };
        Ok(())
    })
}

/// Enumerates every circle with unsigned curvature at most `bound`.
/// `region` may be null; unbounded packings require it and a known
/// placement, currently the strip root `(0, 0, 1, 1)`.
///
/// # Safety
/// `root` points to four `int64_t`, `region` is null or valid, `out` is
/// writable. Free the handle with [`apo_orbit_free`].
#[no_mangle]
pub unsafe extern "C" fn apo_orbit_enumerate(
    root: *const i64,
    bound: i64,
    region: *const ApoRect,
    out: *mut *mut ApoOrbit,
) -> ApoStatus {
    guard(|| {
        let v = unsafe { read_quad(root) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let root = quad(v)?;
        let region = if region.is_null() {
            None
        } else {
            let r = unsafe { *region };
            Some(Rect::new(r.x_min, r.x_max, r.y_min, r.y_max).map_err(lift)?)
        };
        let opts = EnumerateOptions { embedding: Embedding::standard_for(&root), region, ..Default::default() };
        let inner = enumerate_orbit_with(&root, bound.into(), &opts).map_err(lift)?;
        unsafe { *out = Box::into_raw(Box::new(ApoOrbit { inner })) };
        Ok(())
    })
}

/// # Safety
/// `orbit` is null or a handle from [`apo_orbit_enumerate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn apo_orbit_free(orbit: *mut ApoOrbit) {
    if !orbit.is_null() {
        drop(unsafe { Box::from_raw(orbit) });
    }
}

/// Number of circles in the orbit; 0 for a null handle.
///
/// # Safety
/// `orbit` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn apo_orbit_circle_count(orbit: *const ApoOrbit) -> usize {
    unsafe { orbit.as_ref() }.map_or(0, |o| o.inner.circle_count())
}

/// Number of quadruples visited; 0 for a null handle.
///
/// # Safety
/// `orbit` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn apo_orbit_quad_count(orbit: *const ApoOrbit) -> u64 {
    unsafe { orbit.as_ref() }.map_or(0, |o| o.inner.quad_count)
}

/// Copies the sorted unsigned curvatures into `buf`. `written` receives the
/// full count; when `len` is too small nothing is copied and the status is
/// `BufferTooSmall`.
///
/// # Safety
/// `orbit` is a live handle, `buf` has room for `len` values (or is null
/// with `len == 0`), `written` is writable.
#[no_mangle]
pub unsafe extern "C" fn apo_orbit_curvatures(
    orbit: *const ApoOrbit,
    buf: *mut u64,
    len: usize,
    written: *mut usize,
) -> ApoStatus {
    guard(|| {
        let o = unsafe { orbit.as_ref() }.ok_or_else(|| null("orbit"))?;
        if written.is_null() {
            return Err(null("written"));
        }
        let ks = o.inner.sorted_curvatures();
        unsafe { *written = ks.len() };
        if len < ks.len() {
            return Err((ApoStatus::BufferTooSmall, format!("need room for {} curvatures", ks.len())));
        }
        if buf.is_null() && !ks.is_empty() {
            return Err(null("buf"));
        }
        let ks: Vec<u64> = ks.into_iter().map(|k| k as u64).collect();
        unsafe { ptr::copy_nonoverlapping(ks.as_ptr(), buf, ks.len()) };
        Ok(())
    })
}

/// Least-squares exponent of `N(T)` over `points` log-spaced bounds in
/// `[t_min, t_max]` for a bounded root quadruple.
///
/// # Safety
/// `root` points to four `int64_t`; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn apo_fit_exponent(
    root: *const i64,
    t_min: f64,
    t_max: f64,
    points: usize,
    out: *mut ApoFit,
) -> ApoStatus {
    guard(|| {
        let v = unsafe { read_quad(root) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(t_max.is_finite() && t_max >= 1.0 && t_max <= i64::MAX as f64) {
            return Err((ApoStatus::InvalidArgument, format!("t_max out of range: {t_max}")));
        }
        let bound = t_max.floor() as i128;
        let (sorted, _) = orbit_curvatures(&quad(v)?, bound).map_err(lift)?;
        let grid = log_grid(t_min, t_max, points).map_err(lift)?;
        let curve = count_curve_from_sorted(&sorted, t_max, &grid, "ffi").map_err(lift)?;
        let f = fit_exponent(&curve, (t_min, t_max)).map_err(lift)?;
        unsafe { *out = ApoFit { alpha_hat: f.alpha_hat, std_error: f.stderr, c_hat: f.c_hat, points: f.points } };
        Ok(())
    })
}

/// Adjacency spectrum of the Cayley graph of the group reduced modulo `q`
/// (`1 ≤ q ≤ 255`).
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn apo_spectrum_mod(q: u32, out: *mut ApoSpectrum) -> ApoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let img = reduce_group_mod(q, DEFAULT_GROUP_CAP).map_err(lift)?;
        let rep = spectrum(&build_cayley(&img), &SpectrumOptions::default()).map_err(lift)?;
        unsafe {
            *out = ApoSpectrum {
                group_order: img.order(),
                lambda0: rep.lambda0,
                lambda1: rep.lambda1.unwrap_or(f64::NAN),
                lambda_min: rep.lambda_min,
                cheeger_lower: rep.cheeger_lower.unwrap_or(f64::NAN),
                cheeger_upper: rep.cheeger_upper.unwrap_or(f64::NAN),
                components: rep.components,
            }
        };
        Ok(())
    })
}
