//! C ABI over `becom-core`.
//!
//! Every fallible entry point returns a [`BecomStatus`]; on failure a
//! description is available from [`becom_last_error_message`] on the same
//! thread. Handles returned by `*_new`/`becom_spectrum` must be released
//! with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use becom_core::dynamics::{self, Integrator, MeanFieldState};
use becom_core::fluctuations;
use becom_core::num_complex::Complex64;
use becom_core::spectrum::{self, SpectrumResult};
use becom_core::{Error, PhysicalParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BecomStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    Nonconvergence = 4,
    ResonanceNotBracketed = 5,
    Unstable = 6,
    Singular = 7,
    Nonphysical = 8,
    SingularResponse = 9,
    Divergence = 10,
    OutOfRange = 11,
    Panic = 12,
}

impl From<&Error> for BecomStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => BecomStatus::InvalidParameter,
            Error::Domain(_) => BecomStatus::Domain,
            Error::NonConvergence { .. } => BecomStatus::Nonconvergence,
            Error::ResonanceNotBracketed(_) => BecomStatus::ResonanceNotBracketed,
            Error::Unstable { .. } => BecomStatus::Unstable,
            Error::SingularSystem => BecomStatus::Singular,
            Error::NonPhysical(_) => BecomStatus::Nonphysical,
            Error::SingularResponse { .. } => BecomStatus::SingularResponse,
            Error::Divergence { .. } => BecomStatus::Divergence,
        }
    }
}

/// Parameter selector for [`becom_params_set`] and [`becom_params_get`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BecomParam {
    NAtoms = 0,
    U0 = 1,
    Kappa = 2,
    Gamma = 3,
    Eta = 4,
    DeltaC = 5,
    OmegaSw = 6,
    Temperature = 7,
    OmegaRHz = 8,
    NPeriods = 9,
    NPhThermal = 10,
}

/// Opaque parameter set.
pub struct BecomParams {
    inner: PhysicalParams,
}

/// Opaque spectrum result.
pub struct BecomSpectrum {
    inner: SpectrumResult,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BecomSteadyState {
    pub alpha: f64,
    pub beta_1: f64,
    pub beta_0: f64,
    pub delta_d: f64,
    pub omega_10_tilde: f64,
    pub omega_01_tilde: f64,
    pub omega_m: f64,
    pub coupling_g: f64,
    pub residual: f64,
    pub iterations: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BecomFluctuations {
    pub delta_n_ph: f64,
    pub delta_n_b: f64,
    pub log_negativity: f64,
    pub max_real_part: f64,
    /// Covariance matrix of (X, Y, P, Q), row-major.
    pub covariance: [f64; 16],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BecomSpectrumPoint {
    pub omega: f64,
    pub omega_eff: f64,
    pub gamma_eff: f64,
    pub chi_abs2: f64,
    pub s_x: f64,
}

/// Mean-field amplitudes in rectangular form.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BecomMeanField {
    pub a_re: f64,
    pub a_im: f64,
    pub c10_re: f64,
    pub c10_im: f64,
    pub c01_re: f64,
    pub c01_im: f64,
    pub t: f64,
}

impl From<MeanFieldState> for BecomMeanField {
    fn from(s: MeanFieldState) -> Self {
        Self {
            a_re: s.a.re,
            a_im: s.a.im,
            c10_re: s.c10.re,
            c10_im: s.c10.im,
            c01_re: s.c01.re,
            c01_im: s.c01.im,
            t: s.t,
        }
    }
}

impl From<BecomMeanField> for MeanFieldState {
    fn from(s: BecomMeanField) -> Self {
        Self {
            a: Complex64::new(s.a_re, s.a_im),
            c10: Complex64::new(s.c10_re, s.c10_im),
            c01: Complex64::new(s.c01_re, s.c01_im),
            t: s.t,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: BecomStatus, message: impl Into<String>) -> BecomStatus {
    set_last_error(message.into());
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), BecomStatus>) -> BecomStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BecomStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(BecomStatus::Panic, format!("internal panic: {message}"))
        }
    }
}

fn core_error(e: Error) -> BecomStatus {
    let status = BecomStatus::from(&e);
    fail(status, e.to_string())
}

unsafe fn params_ref<'a>(p: *const BecomParams) -> Result<&'a PhysicalParams, BecomStatus> {
    // SAFETY: the caller passes a handle from `becom_params_new` or null.
    unsafe { p.as_ref() }
        .map(|h| &h.inner)
        .ok_or_else(|| fail(BecomStatus::NullPointer, "params handle is null"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, BecomStatus> {
    // SAFETY: the caller passes a valid, writable pointer or null.
    unsafe { p.as_mut() }.ok_or_else(|| fail(BecomStatus::NullPointer, format!("{what} is null")))
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn becom_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn becom_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New parameter set holding the default experimental values.
#[no_mangle]
pub extern "C" fn becom_params_new() -> *mut BecomParams {
    Box::into_raw(Box::new(BecomParams {
        inner: PhysicalParams::default(),
    }))
}

/// # Safety
/// `params` must be null or a handle from [`becom_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn becom_params_free(params: *mut BecomParams) {
    if !params.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(params) });
    }
}

/// Sets one parameter. Values are not validated until a solver runs or
/// [`becom_params_validate`] is called.
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn becom_params_set(
    params: *mut BecomParams,
    key: BecomParam,
    value: f64,
) -> BecomStatus {
    guard(|| {
        // SAFETY: see function contract.
        let p = &mut unsafe { out_ref(params, "params handle") }?.inner;
        match key {
            BecomParam::NAtoms => p.n_atoms = value,
            BecomParam::U0 => p.u0 = value,
            BecomParam::Kappa => p.kappa = value,
            BecomParam::Gamma => p.gamma = value,
            BecomParam::Eta => p.eta = value,
            BecomParam::DeltaC => p.delta_c = value,
            BecomParam::OmegaSw => p.omega_sw = value,
            BecomParam::Temperature => p.temperature = value,
            BecomParam::OmegaRHz => p.omega_r_hz = value,
            BecomParam::NPhThermal => p.n_ph_thermal = value,
            BecomParam::NPeriods => {
                if !(value.fract() == 0.0 && value >= 0.0 && value <= f64::from(u32::MAX)) {
                    return Err(fail(
                        BecomStatus::InvalidParameter,
                        "n_periods must be a non-negative integer",
                    ));
                }
                p.n_periods = value as u32;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn becom_params_get(
    params: *const BecomParams,
    key: BecomParam,
    out: *mut f64,
) -> BecomStatus {
    guard(|| {
        // SAFETY: see function contract.
        let p = unsafe { params_ref(params) }?;
        let out = unsafe { out_ref(out, "out") }?;
        *out = match key {
            BecomParam::NAtoms => p.n_atoms,
            BecomParam::U0 => p.u0,
            BecomParam::Kappa => p.kappa,
            BecomParam::Gamma => p.gamma,
            BecomParam::Eta => p.eta,
            BecomParam::DeltaC => p.delta_c,
            BecomParam::OmegaSw => p.omega_sw,
            BecomParam::Temperature => p.temperature,
            BecomParam::OmegaRHz => p.omega_r_hz,
            BecomParam::NPeriods => f64::from(p.n_periods),
            BecomParam::NPhThermal => p.n_ph_thermal,
        };
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn becom_params_validate(params: *const BecomParams) -> BecomStatus {
    guard(|| {
        // SAFETY: see function contract.
        unsafe { params_ref(params) }?
            .validate()
            .map_err(core_error)
    })
}

/// # Safety
/// `params` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn becom_steady_state(
    params: *const BecomParams,
    out: *mut BecomSteadyState,
) -> BecomStatus {
    guard(|| {
        // SAFETY: see function contract.
        let p = unsafe { params_ref(params) }?;
        let out = unsafe { out_ref(out, "out") }?;
        let s = becom_core::solve_steady_state(p).map_err(core_error)?;
        *out = BecomSteadyState {
            alpha: s.alpha,
            beta_1: s.beta_1,
            beta_0: s.beta_0,
            delta_d: s.delta_d,
            omega_10_tilde: s.omega_10_tilde,
            omega_01_tilde: s.omega_01_tilde,
            omega_m: s.omega_m,
            coupling_g: s.coupling_g,
            residual: s.residual,
            iterations: s.iterations as u64,
        };
        Ok(())
    })
}

/// Cavity detuning at which the effective detuning vanishes.
///
/// # Safety
/// `params` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn becom_resonance_detuning(
    params: *const BecomParams,
    out: *mut f64,
) -> BecomStatus {
    guard(|| {
        // SAFETY: see function contract.
        let p = unsafe { params_ref(params) }?;
        let out = unsafe { out_ref(out, "out") }?;
        *out = becom_core::resonance_detuning(p).map_err(core_error)?;
        Ok(())
    })
}

/// Steady-state covariance and derived observables.
///
/// # Safety
/// `params` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn becom_fluctuations(
    params: *const BecomParams,
    out: *mut BecomFluctuations,
) -> BecomStatus {
    guard(|| {
        // SAFETY: see function contract.
        let p = unsafe { params_ref(params) }?;
        let out = unsafe { out_ref(out, "out") }?;
        let a = fluctuations::analyze(p).map_err(core_error)?;
        let mut covariance = [0.0; 16];
        for (i, slot) in covariance.iter_mut().enumerate() {
            *slot = a.covariance.v[(i / 4, i % 4)];
        }
        *out = BecomFluctuations {
            delta_n_ph: a.report.delta_n_ph,
            delta_n_b: a.report.delta_n_b,
            log_negativity: a.report.log_negativity,
            max_real_part: a.drift.max_real_part,
            covariance,
        };
        Ok(())
    })
}

/// Displacement spectrum on `grid` (ω in units of ω_R, strictly increasing).
/// A null `grid` selects the default grid over [0, 2ω_m].
///
/// # Safety
/// `params` must be null or a live handle; `grid` must be null or point to
/// `len` readable doubles; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn becom_spectrum(
    params: *const BecomParams,
    grid: *const f64,
    len: usize,
    out: *mut *mut BecomSpectrum,
) -> BecomStatus {
    guard(|| {
        // SAFETY: see function contract.
        let p = unsafe { params_ref(params) }?;
        let out = unsafe { out_ref(out, "out") }?;
        *out = ptr::null_mut();
        let state = becom_core::solve_steady_state(p).map_err(core_error)?;
        let grid = if grid.is_null() {
            spectrum::default_grid(&state)
        } else {
            // SAFETY: see function contract.
            unsafe { std::slice::from_raw_parts(grid, len) }.to_vec()
        };
        let inner = spectrum::power_spectrum(&grid, &state, p).map_err(core_error)?;
        *out = Box::into_raw(Box::new(BecomSpectrum { inner }));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn becom_spectrum_len(s: *const BecomSpectrum) -> usize {
    // SAFETY: see function contract.
    unsafe { s.as_ref() }.map_or(0, |s| s.inner.points.len())
}

/// # Safety
/// `s` must be null or a live spectrum handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn becom_spectrum_point(
    s: *const BecomSpectrum,
    index: usize,
    out: *mut BecomSpectrumPoint,
) -> BecomStatus {
    guard(|| {
        // SAFETY: see function contract.
        let s = unsafe { s.as_ref() }
            .ok_or_else(|| fail(BecomStatus::NullPointer, "spectrum handle is null"))?;
        let out = unsafe { out_ref(out, "out") }?;
        let p = s.inner.points.get(index).ok_or_else(|| {
            fail(
                BecomStatus::OutOfRange,
                format!("index {index} out of range"),
            )
        })?;
        *out = BecomSpectrumPoint {
            omega: p.omega,
            omega_eff: p.omega_eff,
            gamma_eff: p.gamma_eff,
            chi_abs2: p.chi_abs2,
            s_x: p.s_x,
        };
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn becom_spectrum_peak_count(s: *const BecomSpectrum) -> usize {
    // SAFETY: see function contract.
    unsafe { s.as_ref() }.map_or(0, |s| s.inner.peak_frequencies.len())
}

/// # Safety
/// `s` must be null or a live spectrum handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn becom_spectrum_peak(
    s: *const BecomSpectrum,
    index: usize,
    out: *mut f64,
) -> BecomStatus {
    guard(|| {
        // SAFETY: see function contract.
        let s = unsafe { s.as_ref() }
            .ok_or_else(|| fail(BecomStatus::NullPointer, "spectrum handle is null"))?;
        let out = unsafe { out_ref(out, "out") }?;
        *out = *s.inner.peak_frequencies.get(index).ok_or_else(|| {
            fail(
                BecomStatus::OutOfRange,
                format!("peak {index} out of range"),
            )
        })?;
        Ok(())
    })
}

/// Whether the spectrum shows normal-mode splitting (two or more peaks).
///
/// # Safety
/// `s` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn becom_spectrum_nms_detected(s: *const BecomSpectrum) -> bool {
    // SAFETY: see function contract.
    unsafe { s.as_ref() }.is_some_and(|s| s.inner.nms_detected)
}

/// # Safety
/// `s` must be null or a handle from [`becom_spectrum`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn becom_spectrum_free(s: *mut BecomSpectrum) {
    if !s.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(s) });
    }
}

/// Integrates the mean-field equations for a duration `t_end` (units of
/// 1/ω_R), replacing `state` with the final amplitudes. A `step` of zero or
/// less selects the default step.
///
/// # Safety
/// `params` must be null or a live handle; `state` must be null or point to
/// a readable and writable struct.
#[no_mangle]
pub unsafe extern "C" fn becom_dynamics_integrate(
    params: *const BecomParams,
    state: *mut BecomMeanField,
    t_end: f64,
    step: f64,
) -> BecomStatus {
    guard(|| {
        // SAFETY: see function contract.
        let p = unsafe { params_ref(params) }?;
        let state = unsafe { out_ref(state, "state") }?;
        let integrator = Integrator {
            step: (step > 0.0).then_some(step),
            sample_every: usize::MAX,
        };
        let run = integrator
            .integrate((*state).into(), t_end, p)
            .map_err(core_error)?;
        *state = run.final_state.into();
        Ok(())
    })
}

/// Largest mean-field rate |d/dt| at `state`; a trajectory is considered
/// settled below 1e-8.
///
/// # Safety
/// `params` must be null or a live handle; `state` must be null or readable;
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn becom_dynamics_rate(
    params: *const BecomParams,
    state: *const BecomMeanField,
    out: *mut f64,
) -> BecomStatus {
    guard(|| {
        // SAFETY: see function contract.
        let p = unsafe { params_ref(params) }?;
        let state = unsafe { state.as_ref() }
            .ok_or_else(|| fail(BecomStatus::NullPointer, "state is null"))?;
        let out = unsafe { out_ref(out, "out") }?;
        *out = dynamics::mean_field_rhs(&(*state).into(), p).max_norm();
        Ok(())
    })
}
