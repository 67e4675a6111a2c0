//! Linearized quantum fluctuations around the mean-field steady state.
//!
//! Quadratures are ordered [δX_a, δP_a, δX_10, δP_10, δX_01, δP_01] with
//! X = (c + c†)/√2, so the vacuum variance of each quadrature is 1/2. Only the
//! optical mode and the c10 side mode enter the covariance matrix; c01 is
//! decoupled from the light at linear order.

use nalgebra::{Matrix2, Matrix4, Matrix6, SMatrix, SVector};

use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::steadystate::{self, SteadyState};

/// Eigenvalues with real part above this are treated as not decaying.
pub const STABILITY_MARGIN: f64 = 1e-12;

/// Slack on the physicality bounds of a covariance matrix.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DriftModel {
    pub a_full: Matrix6<f64>,
    /// Optical + c10 block of the drift matrix.
    pub a_upper: Matrix4<f64>,
    /// diag[κ(2n_ph+1), κ(2n_ph+1), γ(2n_B+1), γ(2n_B+1)].
    pub d_upper: Matrix4<f64>,
    /// Thermal occupation of the side mode used in `d_upper`.
    pub n_b: f64,
    /// Largest real part among the eigenvalues of `a_upper`.
    pub max_real_part: f64,
    pub stable: bool,
}

pub fn build_drift(state: &SteadyState, params: &PhysicalParams) -> DriftModel {
    let kappa = params.kappa;
    let gamma = params.gamma;
    let dd = state.delta_d;
    let g = state.coupling_g;
    #[rustfmt::skip]
    let a_full = Matrix6::new(
        -kappa, -dd,    0.0,                   0.0,                  0.0,                   0.0,
        dd,     -kappa, -g,                    0.0,                  0.0,                   0.0,
        0.0,    0.0,    -gamma,                state.omega_minus_10, 0.0,                   0.0,
        -g,     0.0,    -state.omega_plus_10,  -gamma,               0.0,                   0.0,
        0.0,    0.0,    0.0,                   0.0,                  -gamma,                state.omega_minus_01,
        0.0,    0.0,    0.0,                   0.0,                  -state.omega_plus_01,  -gamma,
    );
    let a_upper: Matrix4<f64> = a_full.fixed_view::<4, 4>(0, 0).into_owned();

    let n_b = steadystate::side_mode_occupancy(state, params);
    let optical = kappa * (2.0 * params.n_ph_thermal + 1.0);
    let atomic = gamma * (2.0 * n_b + 1.0);
    let d_upper = Matrix4::from_diagonal(&nalgebra::Vector4::new(optical, optical, atomic, atomic));

    let max_real_part = spectral_abscissa(&a_upper);
    DriftModel {
        a_full,
        a_upper,
        d_upper,
        n_b,
        max_real_part,
        stable: max_real_part < -STABILITY_MARGIN,
    }
}

/// Largest real part of the eigenvalues of `a`.
pub fn spectral_abscissa(a: &Matrix4<f64>) -> f64 {
    a.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Every eigenvalue of the optical + c10 drift block decays strictly.
pub fn is_stable(model: &DriftModel) -> bool {
    spectral_abscissa(&model.a_upper) < -STABILITY_MARGIN
}

/// Stationary symmetrized covariance matrix of the optical and c10 quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    pub v: Matrix4<f64>,
}

impl CovarianceMatrix {
    /// Wraps `v` after symmetrizing it.
    pub fn new(v: Matrix4<f64>) -> Self {
        Self {
            v: (v + v.transpose()) * 0.5,
        }
    }

    /// Photonic block 𝒜.
    pub fn a_block(&self) -> Matrix2<f64> {
        self.v.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Atomic block ℬ.
    pub fn b_block(&self) -> Matrix2<f64> {
        self.v.fixed_view::<2, 2>(2, 2).into_owned()
    }

    /// Cross-correlation block 𝒞.
    pub fn c_block(&self) -> Matrix2<f64> {
        self.v.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Symplectic eigenvalues (ν₋, ν₊) of the two-mode covariance matrix.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let delta = self.a_block().determinant()
            + self.b_block().determinant()
            + 2.0 * self.c_block().determinant();
        symplectic_pair(delta, self.v.determinant())
    }

    /// Smallest symplectic eigenvalue of the partially transposed matrix.
    pub fn partial_transpose_min_eigenvalue(&self) -> Result<f64> {
        let sigma = self.sigma_partial_transpose();
        let det = self.v.determinant();
        let disc = sigma * sigma - 4.0 * det;
        if disc < -PHYSICALITY_TOLERANCE * sigma * sigma {
            return Err(Error::NonPhysical(format!(
                "Σ² − 4 det V = {disc:e} is negative"
            )));
        }
        let inner = (sigma - disc.max(0.0).sqrt()).max(0.0);
        Ok((0.5 * inner).sqrt())
    }

    fn sigma_partial_transpose(&self) -> f64 {
        self.a_block().determinant() + self.b_block().determinant()
            - 2.0 * self.c_block().determinant()
    }
}

fn symplectic_pair(delta: f64, det: f64) -> (f64, f64) {
    let root = (delta * delta - 4.0 * det).max(0.0).sqrt();
    let minus = (0.5 * (delta - root).max(0.0)).sqrt();
    let plus = (0.5 * (delta + root)).sqrt();
    (minus, plus)
}

/// Solves A·V + V·Aᵀ = −D through the 16×16 Kronecker form
/// (I⊗A + A⊗I)·vec(V) = −vec(D).
pub fn solve_lyapunov(model: &DriftModel) -> Result<CovarianceMatrix> {
    if !is_stable(model) {
        return Err(Error::Unstable {
            max_real_part: spectral_abscissa(&model.a_upper),
        });
    }
    if model.d_upper.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonPhysical("diffusion matrix is not finite".into()));
    }
    lyapunov_kronecker(&model.a_upper, &model.d_upper)
        .map(CovarianceMatrix::new)
        .ok_or(Error::SingularSystem)
}

fn lyapunov_kronecker(a: &Matrix4<f64>, d: &Matrix4<f64>) -> Option<Matrix4<f64>> {
    // Column-major vec: V[(i, j)] ↦ i + 4j.
    let mut system = SMatrix::<f64, 16, 16>::zeros();
    for j in 0..4 {
        for i in 0..4 {
            let row = i + 4 * j;
            for k in 0..4 {
                system[(row, k + 4 * j)] += a[(i, k)];
                system[(row, i + 4 * k)] += a[(j, k)];
            }
        }
    }
    let rhs = SVector::<f64, 16>::from_iterator(d.iter().map(|x| -x));
    let solution = system.lu().solve(&rhs)?;
    if solution.iter().any(|x| !x.is_finite()) {
        return None;
    }
    Some(Matrix4::from_iterator(solution.iter().copied()))
}

/// max |A·V + V·Aᵀ + D|.
pub fn lyapunov_residual(a: &Matrix4<f64>, v: &Matrix4<f64>, d: &Matrix4<f64>) -> f64 {
    (a * v + v * a.transpose() + d).amax()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationReport {
    /// Incoherent photon number ⟨δa†δa⟩.
    pub delta_n_ph: f64,
    /// Incoherent side-mode excitation number ⟨δc10†δc10⟩.
    pub delta_n_b: f64,
    /// Logarithmic negativity between the light and the c10 mode.
    pub log_negativity: f64,
    pub stable: bool,
}

pub fn fluctuation_report(cov: &CovarianceMatrix) -> Result<FluctuationReport> {
    let v = &cov.v;
    let delta_n_ph = 0.5 * (v[(0, 0)] + v[(1, 1)] - 1.0);
    let delta_n_b = 0.5 * (v[(2, 2)] + v[(3, 3)] - 1.0);
    let eta_minus = cov.partial_transpose_min_eigenvalue()?;
    // A two-mode Gaussian state with det 𝒞 ≥ 0 is separable.
    let log_negativity = if cov.c_block().determinant() >= 0.0 {
        0.0
    } else {
        (-(2.0 * eta_minus).ln()).max(0.0)
    };
    Ok(FluctuationReport {
        delta_n_ph,
        delta_n_b,
        log_negativity,
        stable: true,
    })
}

/// Steady state, drift model, covariance and observables for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub state: SteadyState,
    pub drift: DriftModel,
    pub covariance: CovarianceMatrix,
    pub report: FluctuationReport,
}

pub fn analyze(params: &PhysicalParams) -> Result<Analysis> {
    let state = steadystate::solve_steady_state(params)?;
    let drift = build_drift(&state, params);
    let covariance = solve_lyapunov(&drift)?;
    let report = fluctuation_report(&covariance)?;
    Ok(Analysis {
        state,
        drift,
        covariance,
        report,
    })
}
