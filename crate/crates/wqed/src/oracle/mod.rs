//! Independent numerical verification of the analytic and solver results.
//!
//! Two schemes, neither of which touches the closed-form algebra or the
//! jump-condition assembly:
//!
//! * [`regularized_scatter`] replaces each delta coupling by a normalized
//!   Gaussian of width `sigma` and integrates the stationary field equations
//!   by direct quadrature, converging to the sharp-coupling solution as
//!   `sigma -> 0` (empirically first order, so two widths plus Richardson
//!   extrapolation give a sharp estimate);
//! * [`wavepacket_run`] evolves a photon wavepacket in the time domain with
//!   exact one-cell advection and exact local coupling unitaries.
//!
//! [`cross_validate`] drives all routes over an energy grid and reports the
//! deviations as a serializable verdict.

mod regularized;
mod validate;
mod wavepacket;

pub use regularized::{
    regularized_scatter, regularized_scatter_extrapolated, RegularizationConfig,
};
pub use validate::{
    cross_validate, CrossValidateOptions, PointRecord, ValidationReport, ValidationSummary,
    ValidationTolerances,
};
pub use wavepacket::{wavepacket_run, FieldSnapshot, TransportResult, WavepacketConfig};

use thiserror::Error;

use crate::model::ParamError;
use crate::solver::SolveError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("configuration violates a resolution guard: {0}")]
    ConfigViolation(String),
    #[error("sigma-halving disagreement {disagreement:.3e} exceeds tolerance {tol:.3e}")]
    NonConvergent { disagreement: f64, tol: f64 },
    #[error("wavepacket has not cleared the coupling region (residual norm {residual:.3e})")]
    PacketNotCleared { residual: f64 },
    #[error("carrier or packet bandwidth outside the resolved band: {0}")]
    BandViolation(String),
    #[error("empty energy grid")]
    EmptyGrid,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Param(#[from] ParamError),
}
