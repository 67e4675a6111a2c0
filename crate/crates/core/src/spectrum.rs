//! Response of the Bogoliubov displacement quadrature δX_10.
//!
//! Eliminating the cavity field from the linearized equations leaves a
//! damped oscillator whose frequency and damping are dressed by the light
//! (optical spring). Two resolved peaks in the displacement spectrum signal
//! normal-mode splitting.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fluctuations;
use crate::model::PhysicalParams;
use crate::steadystate::SteadyState;

/// |Ω_eff² − ω² − iωΓ_eff| below this is treated as an undamped resonance.
pub const SINGULAR_RESPONSE_THRESHOLD: f64 = 1e-14;

/// Peaks lower than this fraction of the global maximum (by prominence) are ignored.
pub const PEAK_PROMINENCE_FRACTION: f64 = 1e-3;

pub const DEFAULT_GRID_POINTS: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    /// Signed square root of Ω_eff²; negative when the dressed stiffness is negative.
    pub omega_eff: f64,
    pub omega_eff_sq: f64,
    pub gamma_eff: f64,
    pub s_x: f64,
    pub chi_abs2: f64,
}

impl SpectrumPoint {
    pub fn negative_stiffness(&self) -> bool {
        self.omega_eff_sq < 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub points: Vec<SpectrumPoint>,
    /// Frequencies of the detected peaks, ascending.
    pub peak_frequencies: Vec<f64>,
    /// Two or more peaks at positive frequency.
    pub nms_detected: bool,
}

/// (Δd² + κ² − ω²)² + 4ω²κ², the squared modulus of the cavity response denominator.
fn cavity_denominator(omega: f64, state: &SteadyState, kappa: f64) -> f64 {
    let x = state.delta_d * state.delta_d + kappa * kappa - omega * omega;
    x * x + 4.0 * omega * omega * kappa * kappa
}

/// Light-dressed squared frequency Ω_eff²(ω) of the Bogoliubov mode.
pub fn effective_frequency_sq(omega: f64, state: &SteadyState, params: &PhysicalParams) -> f64 {
    let kappa = params.kappa;
    let dd = state.delta_d;
    let g2 = state.coupling_g * state.coupling_g;
    let spring = dd * g2 * state.omega_minus_10 * (dd * dd + kappa * kappa - omega * omega)
        / cavity_denominator(omega, state, kappa);
    params.gamma * params.gamma + state.omega_m * state.omega_m + spring
}

/// Light-dressed damping rate Γ_eff(ω) of the Bogoliubov mode.
pub fn effective_damping(omega: f64, state: &SteadyState, params: &PhysicalParams) -> f64 {
    let kappa = params.kappa;
    let g2 = state.coupling_g * state.coupling_g;
    2.0 * params.gamma
        - 2.0 * kappa * state.delta_d * g2 * state.omega_minus_10
            / cavity_denominator(omega, state, kappa)
}

/// χ(ω) = Ω10⁻ / (Ω_eff² − ω² − iωΓ_eff).
pub fn susceptibility(
    omega: f64,
    state: &SteadyState,
    params: &PhysicalParams,
) -> Result<Complex64> {
    let denom = Complex64::new(
        effective_frequency_sq(omega, state, params) - omega * omega,
        -omega * effective_damping(omega, state, params),
    );
    if denom.norm() < SINGULAR_RESPONSE_THRESHOLD {
        return Err(Error::SingularResponse { omega });
    }
    Ok(Complex64::new(state.omega_minus_10, 0.0) / denom)
}

/// Coefficients of the total force on δX_10 in terms of the noise inputs
/// (ξ_x, ξ_p, f_x10, f_p10), so that δX_10(ω) = χ(ω)·Σ cᵢ nᵢ(ω).
pub fn force_noise_coefficients(
    omega: f64,
    state: &SteadyState,
    params: &PhysicalParams,
) -> [Complex64; 4] {
    let g = state.coupling_g;
    let dd = state.delta_d;
    let k = Complex64::new(params.kappa, -omega);
    let cavity = dd * dd + k * k;
    [
        -g * k / cavity,
        Complex64::new(g * dd, 0.0) / cavity,
        Complex64::new(params.gamma, -omega) / state.omega_minus_10,
        Complex64::new(1.0, 0.0),
    ]
}

/// Displacement spectrum S_x at a single frequency, with the side-mode bath
/// occupation `n_b` supplied by the caller.
pub fn spectrum_point(
    omega: f64,
    state: &SteadyState,
    params: &PhysicalParams,
    n_b: f64,
) -> Result<SpectrumPoint> {
    let kappa = params.kappa;
    let gamma = params.gamma;
    let om = state.omega_minus_10;
    let dd = state.delta_d;
    let chi_abs2 = susceptibility(omega, state, params)?.norm_sqr();
    let w2 = omega * omega;
    let thermal = 4.0 * gamma * (n_b + 0.5) * (gamma * gamma + w2 + om * om) / (om * om);
    let radiation =
        2.0 * kappa * state.coupling_g * state.coupling_g * (dd * dd + w2 + kappa * kappa)
            / cavity_denominator(omega, state, kappa);
    let omega_eff_sq = effective_frequency_sq(omega, state, params);
    Ok(SpectrumPoint {
        omega,
        omega_eff: omega_eff_sq.signum() * omega_eff_sq.abs().sqrt(),
        omega_eff_sq,
        gamma_eff: effective_damping(omega, state, params),
        s_x: chi_abs2 * (thermal + radiation) / (4.0 * std::f64::consts::PI),
        chi_abs2,
    })
}

/// Uniform grid over [0, 2ω_m].
pub fn default_grid(state: &SteadyState) -> Vec<f64> {
    uniform_grid(0.0, 2.0 * state.omega_m, DEFAULT_GRID_POINTS)
}

pub fn uniform_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|i| start + step * i as f64).collect()
        }
    }
}

pub fn power_spectrum(
    grid: &[f64],
    state: &SteadyState,
    params: &PhysicalParams,
) -> Result<SpectrumResult> {
    if !state.converged {
        return Err(Error::Domain("steady state is not converged".into()));
    }
    if grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::Domain(
            "frequency grid must be strictly increasing".into(),
        ));
    }
    let drift = fluctuations::build_drift(state, params);
    if !drift.stable {
        return Err(Error::Unstable {
            max_real_part: drift.max_real_part,
        });
    }
    let points = grid
        .iter()
        .map(|&w| spectrum_point(w, state, params, drift.n_b))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = points.iter().map(|p| p.s_x).collect();
    let peak_frequencies: Vec<f64> = find_peaks(&values, PEAK_PROMINENCE_FRACTION)
        .into_iter()
        .map(|i| grid[i])
        .collect();
    let nms_detected = peak_frequencies.iter().filter(|&&w| w > 0.0).count() >= 2;
    Ok(SpectrumResult {
        points,
        peak_frequencies,
        nms_detected,
    })
}

/// Indices of strict local maxima whose topographic prominence is at least
/// `min_fraction` of the global maximum.
pub fn find_peaks(values: &[f64], min_fraction: f64) -> Vec<usize> {
    let Some(global) = values.iter().copied().reduce(f64::max) else {
        return Vec::new();
    };
    let threshold = min_fraction * global;
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .filter(|&i| prominence(values, i) >= threshold)
        .collect()
}

fn prominence(values: &[f64], peak: usize) -> f64 {
    let height = values[peak];
    let left_base = values[..peak]
        .iter()
        .rev()
        .take_while(|&&v| v <= height)
        .copied()
        .fold(height, f64::min);
    let right_base = values[peak + 1..]
        .iter()
        .take_while(|&&v| v <= height)
        .copied()
        .fold(height, f64::min);
    height - left_base.max(right_base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steadystate::solve_steady_state;

    fn decoupled(omega_sw: f64) -> (SteadyState, PhysicalParams) {
        let p = PhysicalParams {
            eta: 0.0,
            omega_sw,
            gamma: 0.2,
            ..Default::default()
        };
        (solve_steady_state(&p).unwrap(), p)
    }

    fn driven(kappa: f64, omega_sw: f64) -> (SteadyState, PhysicalParams) {
        let p = PhysicalParams {
            delta_c: 28700.0,
            kappa,
            gamma: 1e-3 * kappa,
            omega_sw,
            ..Default::default()
        };
        (solve_steady_state(&p).unwrap(), p)
    }

    #[test]
    fn decoupled_limits() {
        let (s, p) = decoupled(6.0);
        for w in [0.0, 1.0, 7.3, 100.0] {
            assert_eq!(
                effective_frequency_sq(w, &s, &p),
                p.gamma.powi(2) + s.omega_m.powi(2)
            );
            assert_eq!(effective_damping(w, &s, &p), 2.0 * p.gamma);
        }
        let chi = susceptibility(0.0, &s, &p).unwrap();
        assert_eq!(chi.im, 0.0);
        assert!((chi.re - s.omega_minus_10 / (p.gamma.powi(2) + s.omega_m.powi(2))).abs() < 1e-15);
        let f = force_noise_coefficients(3.0, &s, &p);
        assert_eq!(f[0].norm(), 0.0);
        assert_eq!(f[1].norm(), 0.0);
    }

    #[test]
    fn spring_term_vanishes_on_cavity_shell() {
        let (s, p) = driven(72.8, 80.0);
        let w = s.delta_d.hypot(p.kappa);
        let expected = p.gamma.powi(2) + s.omega_m.powi(2);
        assert!((effective_frequency_sq(w, &s, &p) - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn red_detuning_adds_damping() {
        let (s, p) = driven(72.8, 80.0);
        assert!(s.delta_d < 0.0);
        for w in uniform_grid(0.0, 300.0, 301) {
            assert!(effective_damping(w, &s, &p) > 2.0 * p.gamma);
        }
    }

    #[test]
    fn susceptibility_high_frequency_tail() {
        let (s, p) = driven(72.8, 80.0);
        let w = 1e6;
        let chi = susceptibility(w, &s, &p).unwrap();
        let asymptote = -s.omega_minus_10 / (w * w);
        assert!((chi.re - asymptote).abs() < 1e-6 * asymptote.abs());
    }

    #[test]
    fn susceptibility_is_hermitian_in_frequency() {
        let (s, p) = driven(24.3, 140.0);
        for w in uniform_grid(0.5, 400.0, 200) {
            let plus = susceptibility(w, &s, &p).unwrap();
            let minus = susceptibility(-w, &s, &p).unwrap();
            assert!((plus - minus.conj()).norm() < 1e-12 * plus.norm());
        }
    }

    #[test]
    fn singular_response_is_reported() {
        let p = PhysicalParams {
            eta: 0.0,
            gamma: 0.0,
            ..Default::default()
        };
        let s = solve_steady_state(&p).unwrap();
        assert!(matches!(
            susceptibility(s.omega_m, &s, &p),
            Err(Error::SingularResponse { .. })
        ));
    }

    #[test]
    fn bare_mode_has_single_peak() {
        let (s, p) = decoupled(6.0);
        let grid = default_grid(&s);
        let r = power_spectrum(&grid, &s, &p).unwrap();
        assert!(!r.nms_detected);
        assert_eq!(r.peak_frequencies.len(), 1);
        let step = grid[1] - grid[0];
        let expected = (s.omega_m.powi(2) - p.gamma.powi(2)).max(0.0).sqrt();
        assert!((r.peak_frequencies[0] - expected).abs() <= step);
        assert!(r.points.iter().all(|pt| pt.s_x >= 0.0));
    }

    #[test]
    fn grid_must_increase() {
        let (s, p) = decoupled(0.0);
        assert!(matches!(
            power_spectrum(&[1.0, 1.0], &s, &p),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            power_spectrum(&[2.0, 1.0], &s, &p),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn symmetric_grid_gives_even_spectrum() {
        let (s, p) = driven(24.3, 140.0);
        let grid = uniform_grid(-300.0, 300.0, 1201);
        let r = power_spectrum(&grid, &s, &p).unwrap();
        let n = r.points.len();
        for i in 0..n / 2 {
            let (a, b) = (r.points[i].s_x, r.points[n - 1 - i].s_x);
            assert!((a - b).abs() <= 1e-12 * a.max(b));
        }
    }

    #[test]
    fn peak_finder() {
        // A ripple on the rising flank has prominence 1e-4 only.
        let v = [0.0, 1.0, 2.0, 1.9999, 2.0001, 3.0, 0.0];
        assert_eq!(find_peaks(&v, 0.1), vec![5]);
        assert_eq!(find_peaks(&v, 1e-6), vec![2, 5]);
        // Twin maxima of equal height are both kept.
        assert_eq!(find_peaks(&[0.0, 3.0, 1.0, 3.0, 0.0], 0.1), vec![1, 3]);
        assert!(find_peaks(&[], 0.1).is_empty());
        assert!(find_peaks(&[1.0, 2.0], 0.1).is_empty());
    }
}
