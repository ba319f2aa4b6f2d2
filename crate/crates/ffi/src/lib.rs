//! C interface to the projent library.
//!
//! States and cones are opaque handles created by `projent_*_new` style
//! constructors and released with the matching `*_free` function. Every
//! fallible call returns a [`ProjentStatus`]; on failure the message is
//! available from [`projent_last_error`] until the next failing call on the
//! same thread. Results in bits are written through out-pointers, with
//! `+INFINITY` for unbounded values. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use projent::divergences::{self, DivergenceValue, SetMeasure, SmoothingRadius};
use projent::freesets::FreeCone;
use projent::models::{self, IsotropicParams};
use projent::qlinalg::{CMatrix, DensityMatrix, HermitianOperator};
use projent::Error;

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjentStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotDensity = 3,
    CapacityExceeded = 4,
    SolverFailure = 5,
    WrongRegime = 6,
    Panic = 7,
}

/// Opaque density matrix.
pub struct ProjentState(DensityMatrix);

/// Opaque free cone.
pub struct ProjentCone(FreeCone);

/// Which set-optimized measure [`projent_set_measure`] evaluates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjentMeasure {
    Dproj = 0,
    Dmax = 1,
    Robustness = 2,
    DprojS = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> ProjentStatus {
    match e {
        Error::NotHermitian(_) | Error::NotDensity(_) => ProjentStatus::NotDensity,
        Error::CapacityExceeded { .. } => ProjentStatus::CapacityExceeded,
        Error::SolverFailure(_) | Error::BracketError(_) | Error::DegenerateWitness(_) => ProjentStatus::SolverFailure,
        Error::WrongRegime(_) | Error::DenominatorUnresolved { .. } => ProjentStatus::WrongRegime,
        _ => ProjentStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (ProjentStatus, String)>) -> ProjentStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ProjentStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ProjentStatus::Panic
        }
    }
}

fn lift<T>(r: projent::Result<T>) -> Result<T, (ProjentStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (ProjentStatus, String) {
    (ProjentStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (ProjentStatus, String)> {
    // SAFETY: the caller promises `p` is null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (ProjentStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn projent_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn projent_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a state from a row-major `dim × dim` matrix.
///
/// `im` may be null for a real matrix. `subsystem_dims` may be null when
/// `n_subsystems` is 0.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `dim * dim` doubles,
/// `subsystem_dims` to `n_subsystems` sizes, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projent_state_new(
    re: *const f64,
    im: *const f64,
    dim: usize,
    subsystem_dims: *const usize,
    n_subsystems: usize,
    out: *mut *mut ProjentState,
) -> ProjentStatus {
    guard(|| {
        if re.is_null() {
            return Err(null("re"));
        }
        if dim == 0 {
            return Err((ProjentStatus::InvalidArgument, "dimension must be positive".into()));
        }
        let len = dim.checked_mul(dim).ok_or((ProjentStatus::InvalidArgument, "dimension overflow".into()))?;
        // SAFETY: lengths are part of the documented contract.
        let re = unsafe { std::slice::from_raw_parts(re, len) };
        let im = (!im.is_null()).then(|| unsafe { std::slice::from_raw_parts(im, len) });
        let dims = if n_subsystems == 0 {
            Vec::new()
        } else if subsystem_dims.is_null() {
            return Err(null("subsystem_dims"));
        } else {
            unsafe { std::slice::from_raw_parts(subsystem_dims, n_subsystems) }.to_vec()
        };
        let mat = CMatrix::from_fn(dim, dim, |i, j| {
            let k = i * dim + j;
            projent::qlinalg::Complex64::new(re[k], im.map_or(0.0, |v| v[k]))
        });
        let state = lift(HermitianOperator::new(mat, dims).and_then(DensityMatrix::new))?;
        unsafe { write(out, Box::into_raw(Box::new(ProjentState(state))), "out") }
    })
}

/// Creates the isotropic state of local dimension `d` and fidelity `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projent_state_isotropic(d: usize, p: f64, out: *mut *mut ProjentState) -> ProjentStatus {
    guard(|| {
        let state = lift(IsotropicParams::new(d, p).and_then(models::isotropic))?;
        unsafe { write(out, Box::into_raw(Box::new(ProjentState(state))), "out") }
    })
}

/// Dimension of a state, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn projent_state_dim(state: *const ProjentState) -> usize {
    unsafe { state.as_ref() }.map_or(0, |s| s.0.dim())
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn projent_state_free(state: *mut ProjentState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

fn new_cone(out: *mut *mut ProjentCone, make: impl FnOnce() -> projent::Result<FreeCone>) -> ProjentStatus {
    guard(|| {
        let cone = lift(make())?;
        unsafe { write(out, Box::into_raw(Box::new(ProjentCone(cone))), "out") }
    })
}

/// PPT cone on `d_a ⊗ d_b`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projent_cone_ppt(d_a: usize, d_b: usize, out: *mut *mut ProjentCone) -> ProjentStatus {
    new_cone(out, || FreeCone::ppt(d_a, d_b))
}

/// Diagonal (incoherent) cone of dimension `d`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projent_cone_diagonal(d: usize, out: *mut *mut ProjentCone) -> ProjentStatus {
    new_cone(out, || FreeCone::diagonal(d))
}

/// Cone generated by a single state (copied).
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn projent_cone_singleton(state: *const ProjentState, out: *mut *mut ProjentCone) -> ProjentStatus {
    match unsafe { state.as_ref() } {
        Some(s) => new_cone(out, || FreeCone::singleton(s.0.clone())),
        None => guard(|| Err(null("state"))),
    }
}

/// Cone from its JSON descriptor.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn projent_cone_from_json(json: *const c_char, out: *mut *mut ProjentCone) -> ProjentStatus {
    if json.is_null() {
        return guard(|| Err(null("json")));
    }
    let text = unsafe { CStr::from_ptr(json) }.to_string_lossy().into_owned();
    new_cone(out, || FreeCone::from_json(&text))
}

/// Releases a cone. Null is ignored.
///
/// # Safety
/// `cone` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn projent_cone_free(cone: *mut ProjentCone) {
    if !cone.is_null() {
        drop(unsafe { Box::from_raw(cone) });
    }
}

fn write_value(v: DivergenceValue, bits: *mut f64, lower: *mut f64) -> Result<(), (ProjentStatus, String)> {
    let lo = v.lower();
    unsafe { write(bits, v.bits, "bits")? };
    if !lower.is_null() {
        unsafe { lower.write(lo) };
    }
    Ok(())
}

/// Evaluates a set-optimized measure, optionally smoothed with radius `eps`.
///
/// `bits` receives the value (an upper bound when bracketed); `lower`, if
/// non-null, receives the certified lower bound.
///
/// # Safety
/// Handles must be live; `bits` writable; `lower` null or writable.
#[no_mangle]
pub unsafe extern "C" fn projent_set_measure(
    measure: ProjentMeasure,
    state: *const ProjentState,
    cone: *const ProjentCone,
    eps: f64,
    bits: *mut f64,
    lower: *mut f64,
) -> ProjentStatus {
    guard(|| {
        let rho = &unsafe { deref(state, "state") }?.0;
        let cone = &unsafe { deref(cone, "cone") }?.0;
        let m = match measure {
            ProjentMeasure::Dproj => SetMeasure::DprojSet,
            ProjentMeasure::Dmax => SetMeasure::DmaxSet,
            ProjentMeasure::Robustness => SetMeasure::RobustnessStandard,
            ProjentMeasure::DprojS => SetMeasure::DprojSSet,
        };
        let v = lift(SmoothingRadius::new(eps).and_then(|e| divergences::smoothed(m, rho, cone, e)))?;
        write_value(v, bits, lower)
    })
}

/// Relative entropy distance to the cone's unit-trace members.
///
/// # Safety
/// Handles must be live; `bits` writable; `lower` null or writable.
#[no_mangle]
pub unsafe extern "C" fn projent_rel_entropy_set(
    state: *const ProjentState,
    cone: *const ProjentCone,
    bits: *mut f64,
    lower: *mut f64,
) -> ProjentStatus {
    guard(|| {
        let rho = &unsafe { deref(state, "state") }?.0;
        let cone = &unsafe { deref(cone, "cone") }?.0;
        write_value(lift(divergences::rel_entropy_set(rho, cone))?, bits, lower)
    })
}

/// Projective relative entropy between two states.
///
/// # Safety
/// Handles must be live and `bits` writable.
#[no_mangle]
pub unsafe extern "C" fn projent_dproj(
    rho: *const ProjentState,
    sigma: *const ProjentState,
    bits: *mut f64,
) -> ProjentStatus {
    guard(|| {
        let rho = &unsafe { deref(rho, "rho") }?.0;
        let sigma = &unsafe { deref(sigma, "sigma") }?.0;
        write_value(lift(divergences::dproj(rho, sigma))?, bits, ptr::null_mut())
    })
}

/// Closed-form projective divergence of an isotropic state from PPT.
///
/// # Safety
/// `bits` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projent_isotropic_dproj(d: usize, p: f64, bits: *mut f64) -> ProjentStatus {
    guard(|| {
        let params = lift(IsotropicParams::new(d, p))?;
        unsafe { write(bits, models::isotropic_dproj_bits(params), "bits") }
    })
}

/// Closed-form regularized relative entropy of entanglement bound for an
/// isotropic state.
///
/// # Safety
/// `bits` must be writable.
#[no_mangle]
pub unsafe extern "C" fn projent_isotropic_dsep_inf(d: usize, p: f64, bits: *mut f64) -> ProjentStatus {
    guard(|| {
        let params = lift(IsotropicParams::new(d, p))?;
        unsafe { write(bits, models::isotropic_dsep_inf_bits(params), "bits") }
    })
}
