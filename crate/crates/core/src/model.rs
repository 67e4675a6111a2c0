//! Physical inputs and the static quantities of the reduced Hamiltonian.
//!
//! Every frequency is measured in units of the recoil frequency ω_R, so the
//! bare Bogoliubov side mode sits at 4. The physical value of ω_R is only
//! used to convert temperatures into thermal occupations.

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant in J/K (CODATA 2018, exact).
pub const K_B: f64 = 1.380_649e-23;

/// Recoil frequency of rubidium at 780 nm, 2π × 3.57 kHz, in rad/s.
pub const RB87_RECOIL_RAD_PER_S: f64 = 2.0 * std::f64::consts::PI * 3570.0;

/// Lattice periods in a 178 µm cavity at 780 nm (l = 2L/λ).
pub const DEFAULT_PERIODS: u32 = 456;

/// Experiment-level inputs. Frequencies are in units of ω_R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Number of condensed atoms N.
    pub n_atoms: f64,
    /// One-atom light shift U0.
    pub u0: f64,
    /// Cavity amplitude decay rate κ.
    pub kappa: f64,
    /// Side-mode decay rate γ.
    pub gamma: f64,
    /// Pump rate η.
    pub eta: f64,
    /// Cavity-pump detuning Δc.
    pub delta_c: f64,
    /// s-wave scattering frequency ω_sw.
    pub omega_sw: f64,
    /// Temperature in kelvin.
    pub temperature: f64,
    /// ω_R in rad/s.
    pub omega_r_hz: f64,
    /// Number of lattice periods l inside the cavity.
    pub n_periods: u32,
    /// Thermal photon occupancy of the optical bath.
    pub n_ph_thermal: f64,
}

impl Default for PhysicalParams {
    /// Rubidium condensate in a high-finesse cavity: N = 6·10⁴,
    /// U0 = 0.96, κ = 363.9, γ = 0.001κ, η = 80.06, T = 0.1 µK, parked at
    /// the collisionless resonance Δc = 28966.
    fn default() -> Self {
        let kappa = 363.9;
        Self {
            n_atoms: 6.0e4,
            u0: 0.96,
            kappa,
            gamma: 1.0e-3 * kappa,
            eta: 80.06,
            delta_c: 28966.0,
            omega_sw: 0.0,
            temperature: 1.0e-7,
            omega_r_hz: RB87_RECOIL_RAD_PER_S,
            n_periods: DEFAULT_PERIODS,
            n_ph_thermal: 0.0,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        fn finite(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must be finite, got {v}")))
            }
        }
        for (field, v) in [
            ("n_atoms", self.n_atoms),
            ("u0", self.u0),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("eta", self.eta),
            ("delta_c", self.delta_c),
            ("omega_sw", self.omega_sw),
            ("temperature", self.temperature),
            ("omega_r_hz", self.omega_r_hz),
            ("n_ph_thermal", self.n_ph_thermal),
        ] {
            finite(field, v)?;
        }
        if self.n_atoms < 1.0 {
            return Err(Error::invalid("n_atoms", "must be at least 1"));
        }
        if self.kappa <= 0.0 {
            return Err(Error::invalid("kappa", "must be positive"));
        }
        for (field, v) in [
            ("gamma", self.gamma),
            ("eta", self.eta),
            ("omega_sw", self.omega_sw),
            ("temperature", self.temperature),
            ("n_ph_thermal", self.n_ph_thermal),
        ] {
            if v < 0.0 {
                return Err(Error::invalid(field, "must be non-negative"));
            }
        }
        if self.n_periods < 2 {
            return Err(Error::invalid("n_periods", "must be at least 2"));
        }
        if self.omega_r_hz <= 0.0 {
            return Err(Error::invalid("omega_r_hz", "must be positive"));
        }
        Ok(())
    }

    /// Dispersive shift of the homogeneous condensate, N·U0/2.
    pub fn dispersive_shift(&self) -> f64 {
        0.5 * self.n_atoms * self.u0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// Stark-shifted detuning Δ̃c = Δc − N·U0/2.
    pub delta_c_tilde: f64,
    /// Collision-shifted side-mode frequency ω10 = 4 + ω_sw.
    pub omega_10: f64,
    /// Collision-shifted quasimomentum mode frequency ω01 = 4/l² + ω_sw.
    pub omega_01: f64,
    /// ħω_R/k_B in kelvin.
    pub hbar_omega_r_over_kb: f64,
}

pub fn derive(params: &PhysicalParams) -> Result<DerivedParams> {
    params.validate()?;
    let l = f64::from(params.n_periods);
    Ok(DerivedParams {
        delta_c_tilde: params.delta_c - params.dispersive_shift(),
        omega_10: 4.0 + params.omega_sw,
        omega_01: 4.0 / (l * l) + params.omega_sw,
        hbar_omega_r_over_kb: HBAR * params.omega_r_hz / K_B,
    })
}

/// Free-particle band energy 4(n + m/l)² in units of E_R.
pub fn mode_energy(n: i64, m: i64, l: u32) -> Result<f64> {
    if l == 0 {
        return Err(Error::Domain(
            "lattice period count must be positive".into(),
        ));
    }
    if 2 * m.unsigned_abs() > u64::from(l) {
        return Err(Error::Domain(format!(
            "quasimomentum index {m} outside the first Brillouin zone for l = {l}"
        )));
    }
    let k = n as f64 + m as f64 / f64::from(l);
    Ok(4.0 * k * k)
}

/// Bose–Einstein occupation of a mode at `omega_m` (units of ω_R).
///
/// Zero at T = 0. A non-positive frequency at finite temperature has no
/// stationary thermal state and yields infinity.
pub fn thermal_occupancy(omega_m: f64, params: &PhysicalParams) -> f64 {
    if params.temperature <= 0.0 {
        return 0.0;
    }
    if omega_m <= 0.0 {
        return f64::INFINITY;
    }
    let x = HBAR * omega_m * params.omega_r_hz / (K_B * params.temperature);
    1.0 / x.exp_m1()
}
