//! Single-photon transport through a one-dimensional waveguide coupled to a
//! cavity-emitter loop.
//!
//! A single-mode cavity at `x = 0` (waveguide coupling `f`) and a two-level
//! emitter at `x = x0` (coupling `g`) are coupled to each other with a complex
//! amplitude `lambda e^{i phi}`, closing an interference loop whose phase
//! `phi` steers the scattering of photons travelling in the waveguide.
//!
//! Four independent computational routes are provided and cross-checked:
//!
//! * [`analytic`] — closed-form amplitudes for the degenerate case, including
//!   the swapped-sites right-incidence form behind the isolation benchmarks;
//! * [`solver`] — a first-principles boundary-condition solve valid for
//!   detuned nodes, unequal decays, and complex coupling phases;
//! * [`oracle`] — two schemes that use none of the closed-form algebra: a
//!   regularized-coupling quadrature and a time-domain wavepacket simulator;
//! * [`sweep`] — gridded spectra, isolation maps, and feature extraction.
//!
//! A note on directionality: for any Hermitian parameter set the scattering
//! matrix of this two-port is unitary, so the lossless transmission rate is
//! the same from either side; the widely quoted isolation figures for this
//! geometry refer to the swapped-sites convention (see [`analytic::t_right`]
//! and [`solver::solve_right_swapped`]). Physical direction asymmetry appears
//! once the nodes decay (`gamma > 0`), and the solver, the quadrature oracle,
//! and the wavepacket simulator all reproduce it.

pub mod analytic;
pub mod cli;
mod linalg;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod sweep;

pub use num_complex::Complex64;
