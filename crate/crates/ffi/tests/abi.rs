use std::ffi::CStr;
use std::ptr;

use becom::*;

fn last_error() -> String {
    let p = becom_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Params(*mut BecomParams);

impl Params {
    fn new() -> Self {
        Params(becom_params_new())
    }

    fn set(&self, key: BecomParam, value: f64) {
        assert_eq!(
            unsafe { becom_params_set(self.0, key, value) },
            BecomStatus::Ok
        );
    }
}

impl Drop for Params {
    fn drop(&mut self) {
        unsafe { becom_params_free(self.0) };
    }
}

#[test]
fn parameters_round_trip() {
    let p = Params::new();
    let mut value = 0.0;
    assert_eq!(
        unsafe { becom_params_get(p.0, BecomParam::Kappa, &mut value) },
        BecomStatus::Ok
    );
    assert_eq!(value, 363.9);
    p.set(BecomParam::Kappa, 72.8);
    p.set(BecomParam::NPeriods, 100.0);
    unsafe { becom_params_get(p.0, BecomParam::Kappa, &mut value) };
    assert_eq!(value, 72.8);
    unsafe { becom_params_get(p.0, BecomParam::NPeriods, &mut value) };
    assert_eq!(value, 100.0);
    assert_eq!(
        unsafe { becom_params_set(p.0, BecomParam::NPeriods, 2.5) },
        BecomStatus::InvalidParameter
    );
}

#[test]
fn validation_names_the_field() {
    let p = Params::new();
    p.set(BecomParam::Kappa, -1.0);
    assert_eq!(
        unsafe { becom_params_validate(p.0) },
        BecomStatus::InvalidParameter
    );
    assert!(last_error().contains("kappa"));
    let mut out = BecomSteadyState::default();
    assert_eq!(
        unsafe { becom_steady_state(p.0, &mut out) },
        BecomStatus::InvalidParameter
    );
}

#[test]
fn null_handles_are_rejected() {
    let mut out = BecomSteadyState::default();
    assert_eq!(
        unsafe { becom_steady_state(ptr::null(), &mut out) },
        BecomStatus::NullPointer
    );
    let p = Params::new();
    assert_eq!(
        unsafe { becom_steady_state(p.0, ptr::null_mut()) },
        BecomStatus::NullPointer
    );
    assert_eq!(unsafe { becom_spectrum_len(ptr::null()) }, 0);
    unsafe {
        becom_params_free(ptr::null_mut());
        becom_spectrum_free(ptr::null_mut());
    }
}

#[test]
fn steady_state_and_resonance_match_core() {
    let p = Params::new();
    let mut s = BecomSteadyState::default();
    assert_eq!(unsafe { becom_steady_state(p.0, &mut s) }, BecomStatus::Ok);
    assert!(becom_last_error_message().is_null());
    let core = becom_core::solve_steady_state(&becom_core::PhysicalParams::default()).unwrap();
    assert_eq!(s.alpha, core.alpha);
    assert_eq!(s.beta_1, core.beta_1);
    assert_eq!(s.coupling_g, core.coupling_g);

    let mut res = 0.0;
    assert_eq!(
        unsafe { becom_resonance_detuning(p.0, &mut res) },
        BecomStatus::Ok
    );
    assert!((res - 28966.0).abs() < 2.0);
}

#[test]
fn covariance_is_symmetric_and_physical() {
    let p = Params::new();
    p.set(BecomParam::DeltaC, 28900.0);
    p.set(BecomParam::OmegaSw, 1.0);
    let mut f = BecomFluctuations::default();
    assert_eq!(unsafe { becom_fluctuations(p.0, &mut f) }, BecomStatus::Ok);
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(f.covariance[4 * i + j], f.covariance[4 * j + i]);
        }
    }
    assert!(f.max_real_part < 0.0);
    assert!(f.delta_n_ph > 0.0 && f.delta_n_b > 0.0 && f.log_negativity > 0.0);
    assert!((f.delta_n_ph - 0.5 * (f.covariance[0] + f.covariance[5] - 1.0)).abs() < 1e-15);
}

#[test]
fn spectrum_handle_lifecycle() {
    let p = Params::new();
    p.set(BecomParam::Kappa, 24.3);
    p.set(BecomParam::Gamma, 0.0243);
    p.set(BecomParam::DeltaC, 28700.0);
    p.set(BecomParam::OmegaSw, 140.0);
    let mut s: *mut BecomSpectrum = ptr::null_mut();
    assert_eq!(
        unsafe { becom_spectrum(p.0, ptr::null(), 0, &mut s) },
        BecomStatus::Ok
    );
    let len = unsafe { becom_spectrum_len(s) };
    assert_eq!(len, becom_core::spectrum::DEFAULT_GRID_POINTS);
    let mut point = BecomSpectrumPoint::default();
    assert_eq!(
        unsafe { becom_spectrum_point(s, len - 1, &mut point) },
        BecomStatus::Ok
    );
    assert!(point.omega > 0.0 && point.s_x > 0.0);
    assert_eq!(
        unsafe { becom_spectrum_point(s, len, &mut point) },
        BecomStatus::OutOfRange
    );
    assert!(unsafe { becom_spectrum_nms_detected(s) });
    assert!(unsafe { becom_spectrum_peak_count(s) } >= 2);
    let mut peak = 0.0;
    assert_eq!(
        unsafe { becom_spectrum_peak(s, 0, &mut peak) },
        BecomStatus::Ok
    );
    unsafe { becom_spectrum_free(s) };
}

#[test]
fn spectrum_rejects_bad_grid() {
    let p = Params::new();
    let grid = [1.0, 3.0, 2.0];
    let mut s: *mut BecomSpectrum = ptr::null_mut();
    assert_eq!(
        unsafe { becom_spectrum(p.0, grid.as_ptr(), grid.len(), &mut s) },
        BecomStatus::Domain
    );
    assert!(s.is_null());
    assert!(last_error().contains("increasing"));
}

#[test]
fn dynamics_from_vacuum() {
    let p = Params::new();
    p.set(BecomParam::Eta, 0.0);
    let mut state = BecomMeanField {
        a_re: 1.0,
        ..Default::default()
    };
    let t = 1.0 / 363.9;
    assert_eq!(
        unsafe { becom_dynamics_integrate(p.0, &mut state, t, 0.0) },
        BecomStatus::Ok
    );
    let modulus = state.a_re.hypot(state.a_im);
    assert!((modulus - (-1.0f64).exp()).abs() < 1e-9);
    assert!((state.t - t).abs() < 1e-15);
    let mut rate = 0.0;
    assert_eq!(
        unsafe { becom_dynamics_rate(p.0, &state, &mut rate) },
        BecomStatus::Ok
    );
    assert!(rate > 0.0);
    assert_eq!(
        unsafe { becom_dynamics_integrate(p.0, &mut state, -1.0, 0.0) },
        BecomStatus::InvalidParameter
    );
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(becom_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
