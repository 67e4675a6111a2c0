#![allow(dead_code)]

use becom_core::fluctuations::{self, DriftModel};
use becom_core::model::PhysicalParams;
use becom_core::steadystate::solve_steady_state;
use nalgebra::Matrix4;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// V = ∫₀^∞ e^{At} D e^{Aᵀt} dt by Gauss–Legendre panels of width ~1/max|λ|.
///
/// One panel integral P is computed once; panel k contributes Φᵏ P Φᵏᵀ with
/// Φ = e^{Ah}. The series is summed by doubling, S₂ₙ = Sₙ + Φⁿ Sₙ Φⁿᵀ, so no
/// Kronecker system is involved.
pub fn covariance_by_quadrature(a: &Matrix4<f64>, d: &Matrix4<f64>) -> Matrix4<f64> {
    let scale = a
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let h = 0.5 / scale;
    let mut panel = Matrix4::zeros();
    for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
        let e = (a * (0.5 * h * (x + 1.0))).exp();
        panel += e * d * e.transpose() * (0.5 * h * w);
    }
    let mut phi = (a * h).exp();
    let mut v = panel;
    while phi.amax() > 1e-12 {
        v += phi * v * phi.transpose();
        phi *= phi;
    }
    v
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random parameter set whose steady state converges and is stable.
pub fn random_stable(rng: &mut ChaCha8Rng) -> (PhysicalParams, DriftModel) {
    loop {
        let kappa = rng.random_range(20.0..400.0);
        let p = PhysicalParams {
            delta_c: rng.random_range(28_500.0..29_500.0),
            omega_sw: rng.random_range(0.0..150.0),
            kappa,
            gamma: kappa * 10f64.powf(rng.random_range(-3.0..-1.5)),
            eta: rng.random_range(5.0..100.0),
            temperature: rng.random_range(0.0..1e-6),
            ..Default::default()
        };
        let Ok(state) = solve_steady_state(&p) else {
            continue;
        };
        let drift = fluctuations::build_drift(&state, &p);
        if drift.stable {
            return (p, drift);
        }
    }
}

/// ∫ f over a uniform grid by the trapezoidal rule.
pub fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
        .sum()
}

pub fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
            if v > best.1 {
                (i, v)
            } else {
                best
            }
        })
        .0
}
