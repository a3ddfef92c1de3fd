//! C ABI over `dmkdv`.
//!
//! Every call returns a `DmkdvStatus`; results come back through out-pointers.
//! Handles are opaque and must be released with the matching `_free`.
//! The message for the most recent failure on the calling thread is
//! available from `dmkdv_last_error`.

use dmkdv::asymptotics::{q_asym, AsymOptions, Convention, LeftField};
use dmkdv::phase::{saddle_points, theta};
use dmkdv::scattering::{analyze, GridSpec, InitialDatum, JostOptions, ScatteringData};
use dmkdv::Error;
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmkdvStatus {
    Ok = 0,
    Domain = 1,
    NearBoundary = 2,
    LensInfeasible = 3,
    NonConvergence = 4,
    Quadrature = 5,
    SingularNu = 6,
    Precondition = 7,
    BoundaryMismatch = 8,
    Instability = 9,
    StepUnderflow = 10,
    IllConditioned = 11,
    Io = 12,
    Config = 13,
    NullPointer = 100,
    InvalidString = 101,
    Panic = 102,
}

/// Branch convention for the outer saddle constants.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmkdvConvention {
    Normalized = 0,
    Printed = 1,
}

impl From<DmkdvConvention> for Convention {
    fn from(c: DmkdvConvention) -> Self {
        match c {
            DmkdvConvention::Normalized => Convention::Normalized,
            DmkdvConvention::Printed => Convention::Printed,
        }
    }
}

/// Opaque scattering data.
pub struct DmkdvScattering(ScatteringData);

/// Opaque left-field evaluator bound to one ray.
pub struct DmkdvLeftField(LeftField);

thread_local! {
    static LAST: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST.with(|l| *l.borrow_mut() = c);
}

fn code(e: &Error) -> DmkdvStatus {
    use DmkdvStatus as S;
    match e {
        Error::Domain(_) => S::Domain,
        Error::NearBoundary { .. } => S::NearBoundary,
        Error::LensInfeasible { .. } => S::LensInfeasible,
        Error::NonConvergence(_) => S::NonConvergence,
        Error::Quadrature(_) => S::Quadrature,
        Error::SingularNu { .. } => S::SingularNu,
        Error::Precondition(_) => S::Precondition,
        Error::BoundaryMismatch(_) => S::BoundaryMismatch,
        Error::Instability { .. } => S::Instability,
        Error::StepUnderflow { .. } => S::StepUnderflow,
        Error::IllConditioned(_) => S::IllConditioned,
        Error::Io(_) => S::Io,
        Error::Config(_) => S::Config,
    }
}

enum Fail {
    Lib(Error),
    Null,
    Str,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> DmkdvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last("");
            DmkdvStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last(&e.to_string());
            code(&e)
        }
        Ok(Err(Fail::Null)) => {
            set_last("null pointer argument");
            DmkdvStatus::NullPointer
        }
        Ok(Err(Fail::Str)) => {
            set_last("string argument is not valid UTF-8");
            DmkdvStatus::InvalidString
        }
        Err(_) => {
            set_last("internal panic");
            DmkdvStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null)
}

unsafe fn inp<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn dmkdv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn dmkdv_last_error() -> *const c_char {
    LAST.with(|l| l.borrow().as_ptr())
}

/// theta(z; xi).
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmkdv_theta(re: f64, im: f64, xi: f64, out_re: *mut f64, out_im: *mut f64) -> DmkdvStatus {
    guard(|| {
        let (or, oi) = (out(out_re)?, out(out_im)?);
        let v = theta(Complex64::new(re, im), xi)?;
        *or = v.re;
        *oi = v.im;
        Ok(())
    })
}

/// The four saddle points and their signs eps_j.
///
/// # Safety
/// Each out array must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn dmkdv_saddles(xi: f64, out_re: *mut f64, out_im: *mut f64, out_eps: *mut f64) -> DmkdvStatus {
    guard(|| {
        if out_re.is_null() || out_im.is_null() || out_eps.is_null() {
            return Err(Fail::Null);
        }
        let ctx = saddle_points(xi)?;
        for j in 0..4 {
            *out_re.add(j) = ctx.saddles[j].re;
            *out_im.add(j) = ctx.saddles[j].im;
            *out_eps.add(j) = ctx.epsilons[j];
        }
        Ok(())
    })
}

/// Scattering data for a datum given as "tanh", "tanh+gaussian(a,x0,w)" or a CSV path.
///
/// # Safety
/// `datum` must be a NUL-terminated string; `out_handle` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmkdv_scattering_new(datum: *const c_char, half_width: f64, out_handle: *mut *mut DmkdvScattering) -> DmkdvStatus {
    guard(|| {
        let o = out(out_handle)?;
        *o = std::ptr::null_mut();
        if datum.is_null() {
            return Err(Fail::Null);
        }
        let s = CStr::from_ptr(datum).to_str().map_err(|_| Fail::Str)?;
        let q0 = InitialDatum::parse(s, half_width)?;
        let sd = analyze(&q0, &GridSpec::default(), 200, JostOptions::default())?;
        *o = Box::into_raw(Box::new(DmkdvScattering(sd)));
        Ok(())
    })
}

/// Release scattering data. Null is ignored.
///
/// # Safety
/// `h` must come from `dmkdv_scattering_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dmkdv_scattering_free(h: *mut DmkdvScattering) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Interpolated reflection coefficient at real z.
///
/// # Safety
/// `h` must be a live handle; out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmkdv_scattering_r(h: *const DmkdvScattering, z: f64, out_re: *mut f64, out_im: *mut f64) -> DmkdvStatus {
    guard(|| {
        let sd = &inp(h)?.0;
        let (or, oi) = (out(out_re)?, out(out_im)?);
        let r = sd.r_at(z);
        *or = r.re;
        *oi = r.im;
        Ok(())
    })
}

/// Number of discrete eigenvalues (the fixed zero at i excluded).
///
/// # Safety
/// `h` must be a live handle; `out_n` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmkdv_scattering_eigenvalue_count(h: *const DmkdvScattering, out_n: *mut usize) -> DmkdvStatus {
    guard(|| {
        *out(out_n)? = inp(h)?.0.eta.len();
        Ok(())
    })
}

/// Eigenvalue `k` and its norming constant.
///
/// # Safety
/// `h` must be a live handle; out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmkdv_scattering_eigenvalue(
    h: *const DmkdvScattering,
    k: usize,
    eta_re: *mut f64,
    eta_im: *mut f64,
    c_re: *mut f64,
    c_im: *mut f64,
) -> DmkdvStatus {
    guard(|| {
        let sd = &inp(h)?.0;
        let (er, ei, cr, ci) = (out(eta_re)?, out(eta_im)?, out(c_re)?, out(c_im)?);
        if k >= sd.eta.len() {
            return Err(Error::Domain(format!("eigenvalue index {k} out of range")).into());
        }
        *er = sd.eta[k].re;
        *ei = sd.eta[k].im;
        *cr = sd.c[k].re;
        *ci = sd.c[k].im;
        Ok(())
    })
}

/// Leading-order field q(x, t); rays in the transition zones fail with NEAR_BOUNDARY.
///
/// # Safety
/// `h` must be a live handle; `out_q` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmkdv_q_asym(h: *const DmkdvScattering, x: f64, t: f64, conv: DmkdvConvention, out_q: *mut f64) -> DmkdvStatus {
    guard(|| {
        let sd = &inp(h)?.0;
        let o = out(out_q)?;
        let solitons = if sd.fixed_zero.is_some() { vec![0.0] } else { Vec::new() };
        let opts = AsymOptions { convention: conv.into(), solitons, margin: None };
        *o = q_asym(sd, x, t, &opts)?.q_asym;
        Ok(())
    })
}

/// Precompute the left-field amplitude for ray `xi` < -6.
///
/// # Safety
/// `h` must be a live handle; `out_handle` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmkdv_left_field_new(h: *const DmkdvScattering, xi: f64, out_handle: *mut *mut DmkdvLeftField) -> DmkdvStatus {
    guard(|| {
        let o = out(out_handle)?;
        *o = std::ptr::null_mut();
        let lf = LeftField::new(&inp(h)?.0, xi)?;
        *o = Box::into_raw(Box::new(DmkdvLeftField(lf)));
        Ok(())
    })
}

/// Release a left-field handle. Null is ignored.
///
/// # Safety
/// `h` must come from `dmkdv_left_field_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dmkdv_left_field_free(h: *mut DmkdvLeftField) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Amplitude f at time t: q ~ -1 + Re f / sqrt(t).
///
/// # Safety
/// `h` must be a live handle; out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmkdv_left_field_f(h: *const DmkdvLeftField, t: f64, conv: DmkdvConvention, out_re: *mut f64, out_im: *mut f64) -> DmkdvStatus {
    guard(|| {
        let lf = &inp(h)?.0;
        let (or, oi) = (out(out_re)?, out(out_im)?);
        let f = lf.f(t, conv.into())?;
        *or = f.re;
        *oi = f.im;
        Ok(())
    })
}
