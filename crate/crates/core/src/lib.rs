//! Optomechanics of a one-dimensional Bose–Einstein condensate in a driven
//! optical cavity with s-wave collisions.
//!
//! The pipeline runs [`steadystate`] → [`fluctuations`] → [`spectrum`]:
//! solve the nonlinear mean fields, linearize around them, and read off
//! incoherent excitations, atom–photon entanglement and the Bogoliubov
//! displacement spectrum. [`dynamics`] integrates the noise-free mean-field
//! equations as an independent check, and [`config`]/[`run`] drive parameter
//! sweeps from the command line.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod fluctuations;
pub mod model;
pub mod run;
pub mod spectrum;
pub mod steadystate;

pub use error::{Error, Result};
pub use model::{derive, mode_energy, thermal_occupancy, DerivedParams, PhysicalParams};
pub use steadystate::{effective_coupling, resonance_detuning, solve_steady_state, SteadyState};

pub use nalgebra;
pub use num_complex;
