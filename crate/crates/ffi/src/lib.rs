//! C interface to `spc-core`.
//!
//! Objects cross the boundary as opaque handles created by `spc_*_new`/
//! `spc_critical_find` and released by the matching `spc_*_free`. Every
//! fallible call returns an [`SpcStatus`]; on failure the message is kept per
//! thread and can be read with [`spc_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use spc_core::scattering::{resonance_k_grid, scan_resonance, ResonanceConstants};
use spc_core::statics::{find_critical_coupling, solve_bound_state, CriticalData};
use spc_core::studies::fixed_point_sd;
use spc_core::{assemble_operator, PotentialModel, RadialGrid, Sign, SpcError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpcStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Usage = 3,
    Numerical = 4,
    Study = 5,
    Panic = 6,
}

/// Potential model handle.
pub struct SpcModel {
    inner: PotentialModel,
}

/// Radial grid handle.
pub struct SpcGrid {
    inner: RadialGrid,
}

/// Critical coupling and threshold state handle.
pub struct SpcCritical {
    inner: CriticalData,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpcCriticalSummary {
    pub lambda_c: f64,
    pub c0: f64,
    pub identity_residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpcResonancePeak {
    pub sigma: f64,
    pub k_peak: f64,
    pub delta_width: f64,
    pub peak_value: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &SpcError) -> SpcStatus {
    match e {
        SpcError::Config(_) | SpcError::Io { .. } => SpcStatus::Config,
        SpcError::Usage(_) => SpcStatus::Usage,
        SpcError::Study(_) => SpcStatus::Study,
        _ => SpcStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), SpcStatus>) -> SpcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SpcStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside spc-core");
            SpcStatus::Panic
        }
    }
}

fn fail(e: SpcError) -> SpcStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null() -> SpcStatus {
    set_error("null pointer argument");
    SpcStatus::NullPointer
}

/// Message of the last failed call on this thread (empty after a success).
/// The pointer stays valid until the next `spc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn spc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Square well of radius `radius`; `sign` is +1 or -1, `kappa` is +1 or -1.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn spc_model_well(
    radius: f64,
    lambda_c: f64,
    lambda_slope: f64,
    sign: i32,
    kappa: i32,
    out: *mut *mut SpcModel,
) -> SpcStatus {
    if out.is_null() {
        return null();
    }
    guard(|| {
        let sign = match sign {
            1 => Sign::Plus,
            -1 => Sign::Minus,
            s => return Err(fail(SpcError::Config(format!("sign must be +1 or -1, got {s}")))),
        };
        let mut model = PotentialModel::well(radius, lambda_c, lambda_slope);
        model.sign = sign;
        model.kappa = kappa;
        model.validate().map_err(fail)?;
        *out = Box::into_raw(Box::new(SpcModel { inner: model }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from [`spc_model_well`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spc_model_free(model: *mut SpcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn spc_grid_new(r_max: f64, n: usize, out: *mut *mut SpcGrid) -> SpcStatus {
    if out.is_null() {
        return null();
    }
    guard(|| {
        let grid = RadialGrid::new(r_max, n).map_err(fail)?;
        *out = Box::into_raw(Box::new(SpcGrid { inner: grid }));
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or a handle from [`spc_grid_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spc_grid_free(grid: *mut SpcGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Searches the critical coupling in `[search_lo, search_hi]`.
///
/// # Safety
/// `model` and `grid` must be live handles, `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn spc_critical_find(
    model: *const SpcModel,
    grid: *const SpcGrid,
    search_lo: f64,
    search_hi: f64,
    out: *mut *mut SpcCritical,
) -> SpcStatus {
    if model.is_null() || grid.is_null() || out.is_null() {
        return null();
    }
    guard(|| {
        let c = find_critical_coupling(&(*model).inner, &(*grid).inner, (search_lo, search_hi)).map_err(fail)?;
        *out = Box::into_raw(Box::new(SpcCritical { inner: c }));
        Ok(())
    })
}

/// # Safety
/// `critical` must be null or a handle from [`spc_critical_find`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spc_critical_free(critical: *mut SpcCritical) {
    if !critical.is_null() {
        drop(Box::from_raw(critical));
    }
}

/// # Safety
/// `critical` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spc_critical_summary(critical: *const SpcCritical, out: *mut SpcCriticalSummary) -> SpcStatus {
    if critical.is_null() || out.is_null() {
        return null();
    }
    guard(|| {
        let s = (*critical).inner.summary();
        *out = SpcCriticalSummary { lambda_c: s.lambda_c, c0: s.c0, identity_residual: s.identity_residual };
        Ok(())
    })
}

/// Energy of the gap eigenstate of the model at `sigma`.
///
/// # Safety
/// `model` and `grid` must be live handles and `energy` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spc_bound_state_energy(
    model: *const SpcModel,
    grid: *const SpcGrid,
    sigma: f64,
    energy: *mut f64,
) -> SpcStatus {
    if model.is_null() || grid.is_null() || energy.is_null() {
        return null();
    }
    guard(|| {
        let op = assemble_operator(&(*grid).inner, &(*model).inner, sigma).map_err(fail)?;
        let b = solve_bound_state(&op, (-1.0, 1.0)).map_err(fail)?;
        *energy = b.energy;
        Ok(())
    })
}

/// Scans the outgoing resonance profile at `sigma` on the default momentum
/// window and reports its peak and half width.
///
/// # Safety
/// `critical` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spc_scan_resonance(
    critical: *const SpcCritical,
    sigma: f64,
    out: *mut SpcResonancePeak,
) -> SpcStatus {
    if critical.is_null() || out.is_null() {
        return null();
    }
    guard(|| {
        let p = scan_resonance(&(*critical).inner, sigma, &resonance_k_grid(sigma)).map_err(fail)?;
        *out = SpcResonancePeak { sigma, k_peak: p.k_peak, delta_width: p.delta_width, peak_value: p.peak_value };
        Ok(())
    })
}

/// Self-consistent static decay time for the given profile constants.
///
/// # Safety
/// `s_d` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spc_fixed_point_sd(c0: f64, abs_c2: f64, abs_c3: f64, epsilon: f64, s_d: *mut f64) -> SpcStatus {
    if s_d.is_null() {
        return null();
    }
    guard(|| {
        if !(c0 > 0.0 && abs_c2 > 0.0 && abs_c3 > 0.0 && epsilon > 0.0) {
            return Err(fail(SpcError::Usage("constants and epsilon must be positive".into())));
        }
        let constants = ResonanceConstants {
            c: 0.0,
            c0,
            abs_c2,
            abs_c3,
            fit_residual: 0.0,
            kpeak_slope: 0.0,
            width_ratio: 0.0,
        };
        *s_d = fixed_point_sd(&constants, epsilon);
        Ok(())
    })
}

/// Version of this C interface.
#[no_mangle]
pub extern "C" fn spc_abi_version() -> u32 {
    1
}
