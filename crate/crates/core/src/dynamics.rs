//! Noise-free mean-field dynamics of the cavity field and both side modes.
//!
//! Operators in the nonlinear Langevin equations are replaced by c-numbers
//! and the noise inputs dropped:
//!
//! ```text
//! ȧ   = (iΔ̃c − κ)a − (iU0/2)·a·[√(2N)/2·(c10 + c10*) + |c10|² + |c01|²] − η
//! ċ10 = −(iω10 + γ)c10 − i(√(2N)/4)·U0|a|² − (iU0/2)|a|²c10 − (i/2)ω_sw c10*
//! ċ01 = −(iω01 + γ)c01 − (iU0/2)|a|²c01 − (i/2)ω_sw c01*
//! ```
//!
//! `c10` and `c01` are stored unscaled (of order √N).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::PhysicalParams;

/// Magnitude beyond which a trajectory is declared divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// A trajectory is settled once every time derivative is below this.
pub const SETTLED_RATE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldState {
    pub a: Complex64,
    pub c10: Complex64,
    pub c01: Complex64,
    /// Time in units of 1/ω_R.
    pub t: f64,
}

impl MeanFieldState {
    pub fn zero() -> Self {
        Self::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }

    pub fn new(a: Complex64, c10: Complex64, c01: Complex64) -> Self {
        Self {
            a,
            c10,
            c01,
            t: 0.0,
        }
    }

    /// |c10|/√N, comparable with the steady-state β1.
    pub fn beta_1(&self, params: &PhysicalParams) -> f64 {
        self.c10.norm() / params.n_atoms.sqrt()
    }

    fn is_bounded(&self) -> bool {
        [self.a, self.c10, self.c01]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite() && z.norm() <= DIVERGENCE_LIMIT)
    }

    fn advance(&self, rates: &MeanFieldRates, h: f64) -> Self {
        Self {
            a: self.a + rates.a * h,
            c10: self.c10 + rates.c10 * h,
            c01: self.c01 + rates.c01 * h,
            t: self.t + h,
        }
    }
}

/// Time derivatives of the three mean-field amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldRates {
    pub a: Complex64,
    pub c10: Complex64,
    pub c01: Complex64,
}

impl MeanFieldRates {
    pub fn max_norm(&self) -> f64 {
        self.a.norm().max(self.c10.norm()).max(self.c01.norm())
    }
}

pub fn mean_field_rhs(state: &MeanFieldState, params: &PhysicalParams) -> MeanFieldRates {
    let i = Complex64::i();
    let n = params.n_atoms;
    let l = f64::from(params.n_periods);
    let delta_c_tilde = params.delta_c - params.dispersive_shift();
    let omega_10 = 4.0 + params.omega_sw;
    let omega_01 = 4.0 / (l * l) + params.omega_sw;
    let (a, c10, c01) = (state.a, state.c10, state.c01);
    let photons = a.norm_sqr();
    let half_u0 = 0.5 * params.u0;

    let grating = (2.0 * n).sqrt() * c10.re + c10.norm_sqr() + c01.norm_sqr();
    let da = (i * delta_c_tilde - params.kappa) * a - i * half_u0 * grating * a - params.eta;
    let dc10 = -(i * omega_10 + params.gamma) * c10
        - i * ((2.0 * n).sqrt() / 4.0 * params.u0 * photons)
        - i * half_u0 * photons * c10
        - i * (0.5 * params.omega_sw) * c10.conj();
    let dc01 = -(i * omega_01 + params.gamma) * c01
        - i * half_u0 * photons * c01
        - i * (0.5 * params.omega_sw) * c01.conj();
    MeanFieldRates {
        a: da,
        c10: dc10,
        c01: dc01,
    }
}

/// Fixed-step fourth-order Runge–Kutta integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    /// Step size; `None` picks min(10⁻³/κ, 10⁻³/ω̃10).
    pub step: Option<f64>,
    /// Keep every n-th state in the returned trajectory.
    pub sample_every: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            step: None,
            sample_every: 1000,
        }
    }
}

/// Default step bound. ω̃10 is evaluated at the largest reachable photon
/// number η²/κ².
pub fn default_step(params: &PhysicalParams) -> f64 {
    let alpha_max = params.eta / params.kappa;
    let omega_10_tilde = 4.0 + params.omega_sw + 0.5 * params.u0.abs() * alpha_max * alpha_max;
    (1e-3 / params.kappa).min(1e-3 / omega_10_tilde)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<MeanFieldState>,
    pub final_state: MeanFieldState,
    pub final_rates: MeanFieldRates,
    pub step: f64,
    /// Every derivative at the final state is below [`SETTLED_RATE`].
    pub settled: bool,
}

impl Integrator {
    pub fn with_step(step: f64) -> Self {
        Self {
            step: Some(step),
            ..Default::default()
        }
    }

    fn step_size(&self, params: &PhysicalParams) -> f64 {
        self.step.unwrap_or_else(|| default_step(params))
    }

    /// Integrates from `initial` over a duration `t_end`.
    pub fn integrate(
        &self,
        initial: MeanFieldState,
        t_end: f64,
        params: &PhysicalParams,
    ) -> Result<Trajectory> {
        params.validate()?;
        if t_end.is_nan() || t_end <= 0.0 {
            return Err(Error::invalid("t_end", "must be positive"));
        }
        let h_max = self.step_size(params);
        if h_max.is_nan() || h_max <= 0.0 {
            return Err(Error::invalid("step", "must be positive"));
        }
        let steps = (t_end / h_max).ceil().max(1.0) as usize;
        let h = t_end / steps as f64;
        let every = self.sample_every.max(1);

        let mut state = initial;
        let mut samples = vec![state];
        for k in 1..=steps {
            state = rk4_step(&state, params, h);
            if !state.is_bounded() {
                return Err(Error::Divergence { t: state.t });
            }
            if k % every == 0 || k == steps {
                samples.push(state);
            }
        }
        let final_rates = mean_field_rhs(&state, params);
        Ok(Trajectory {
            samples,
            final_state: state,
            final_rates,
            step: h,
            settled: final_rates.max_norm() < SETTLED_RATE,
        })
    }

    /// Integrates in chunks of `chunk` until the trajectory settles or
    /// `t_max` is reached. Only the final state is kept.
    pub fn settle(
        &self,
        initial: MeanFieldState,
        chunk: f64,
        t_max: f64,
        params: &PhysicalParams,
    ) -> Result<Trajectory> {
        let coarse = Integrator {
            sample_every: usize::MAX,
            ..*self
        };
        let mut state = initial;
        let start = initial.t;
        loop {
            let run = coarse.integrate(state, chunk, params)?;
            state = run.final_state;
            if run.settled || state.t - start >= t_max {
                return Ok(Trajectory {
                    samples: vec![initial, state],
                    ..run
                });
            }
        }
    }
}

fn rk4_step(state: &MeanFieldState, params: &PhysicalParams, h: f64) -> MeanFieldState {
    let k1 = mean_field_rhs(state, params);
    let k2 = mean_field_rhs(&state.advance(&k1, 0.5 * h), params);
    let k3 = mean_field_rhs(&state.advance(&k2, 0.5 * h), params);
    let k4 = mean_field_rhs(&state.advance(&k3, h), params);
    let sixth = h / 6.0;
    MeanFieldState {
        a: state.a + (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a) * sixth,
        c10: state.c10 + (k1.c10 + 2.0 * k2.c10 + 2.0 * k3.c10 + k4.c10) * sixth,
        c01: state.c01 + (k1.c01 + 2.0 * k2.c01 + 2.0 * k3.c01 + k4.c01) * sixth,
        t: state.t + h,
    }
}

pub fn integrate(
    initial: MeanFieldState,
    t_end: f64,
    params: &PhysicalParams,
) -> Result<Trajectory> {
    Integrator::default().integrate(initial, t_end, params)
}

/// Effective detuning seen by the cavity for a given complex side-mode
/// amplitude, Δ̃c − (U0/2)·[√(2N)·Re c10 + |c10|²].
pub fn instantaneous_detuning(state: &MeanFieldState, params: &PhysicalParams) -> f64 {
    let grating =
        (2.0 * params.n_atoms).sqrt() * state.c10.re + state.c10.norm_sqr() + state.c01.norm_sqr();
    params.delta_c - params.dispersive_shift() - 0.5 * params.u0 * grating
}
