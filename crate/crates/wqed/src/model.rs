//! Physical parameters and unit conventions shared by every engine.
//!
//! All frequencies (including the couplings `f`, `g` and the decay rates) are
//! expressed in units of the group velocity `v_g`; the waveguide length is the
//! length unit, so positions such as `x0` are dimensionless. Canonicalizing a
//! parameter set with [`validate_params`] rescales every frequency so that
//! `v_g = 1` and records the scale factor for de-normalization.
//!
//! No upper bound is imposed on the couplings, but the linearized-dispersion,
//! rotating-wave treatment is physically trustworthy only while the induced
//! linewidths stay far below the carrier, `f^2, g^2 << v_g * omega`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used to decide whether two frequencies are degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("group velocity must be positive, got {0}")]
    NonPositiveGroupVelocity(f64),
    #[error("coupling magnitude must be non-negative, got {0}")]
    NegativeCoupling(f64),
    #[error("decay rate must be non-negative, got {0}")]
    NegativeDecay(f64),
    #[error("photon energy must be positive in the linear-dispersion regime, got {0}")]
    NonPositiveEnergy(f64),
}

/// Parameters of the cavity-emitter-waveguide system.
///
/// The cavity sits at `x = 0` with waveguide coupling `f`; the emitter sits at
/// `x = x0` with coupling `g`. The two nodes are coupled to each other with
/// magnitude `lambda_mag` and phase `phi`. The couplings `f` and `g` are real
/// here; independent coupling phases live in [`GeneralizedCouplings`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cavity frequency.
    pub omega_a: f64,
    /// Emitter transition frequency.
    pub omega_e: f64,
    /// Cavity-emitter coupling magnitude (>= 0).
    pub lambda_mag: f64,
    /// Cavity-emitter coupling phase in radians.
    pub phi: f64,
    /// Cavity-waveguide coupling.
    pub f: f64,
    /// Emitter-waveguide coupling.
    pub g: f64,
    /// Waveguide group velocity (> 0).
    pub v_g: f64,
    /// Emitter connection point; the cavity is fixed at x = 0.
    pub x0: f64,
    /// Cavity decay rate (>= 0).
    pub gamma_a: f64,
    /// Emitter spontaneous-emission rate (>= 0).
    pub gamma_e: f64,
}

impl Default for SystemParams {
    /// The colocated benchmark set: `(lambda, f, g) = (0.1, 0.3, 0.2) v_g`,
    /// both node frequencies at `v_g`, no decay.
    fn default() -> Self {
        Self {
            omega_a: 1.0,
            omega_e: 1.0,
            lambda_mag: 0.1,
            phi: 0.0,
            f: 0.3,
            g: 0.2,
            v_g: 1.0,
            x0: 0.0,
            gamma_a: 0.0,
            gamma_e: 0.0,
        }
    }
}

impl SystemParams {
    /// True when the closed forms apply: equal node frequencies and equal
    /// decay rates.
    pub fn is_degenerate(&self) -> bool {
        (self.omega_a - self.omega_e).abs() <= DEGENERACY_TOL
            && (self.gamma_a - self.gamma_e).abs() <= DEGENERACY_TOL
    }

    /// True when neither node decays.
    pub fn is_lossless(&self) -> bool {
        self.gamma_a == 0.0 && self.gamma_e == 0.0
    }

    /// Common node frequency in the degenerate case.
    pub fn omega(&self) -> f64 {
        0.5 * (self.omega_a + self.omega_e)
    }
}

/// [`SystemParams`] extended with independent phases on the two waveguide
/// couplings: `f -> f e^{i theta_f}`, `g -> g e^{i theta_g}`. With both
/// phases zero this reduces to the plain real-coupling model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedCouplings {
    pub base: SystemParams,
    /// Extra phase on the cavity-waveguide coupling.
    pub theta_f: f64,
    /// Extra phase on the emitter-waveguide coupling.
    pub theta_g: f64,
}

impl GeneralizedCouplings {
    pub fn plain(base: SystemParams) -> Self {
        Self { base, theta_f: 0.0, theta_g: 0.0 }
    }

    /// The gauge-invariant loop phase `phi + theta_g - theta_f`. Every
    /// scattering probability depends on the three phases only through this
    /// combination.
    pub fn loop_phase(&self) -> f64 {
        self.base.phi + self.theta_g - self.theta_f
    }
}

impl From<SystemParams> for GeneralizedCouplings {
    fn from(base: SystemParams) -> Self {
        Self::plain(base)
    }
}

/// Result of canonicalizing a raw parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalized {
    /// Parameters rescaled to `v_g = 1`, with `x0 >= 0`.
    pub params: SystemParams,
    /// Factor by which every frequency was divided (the original `v_g`).
    /// Multiply frequencies by this to recover the caller's units.
    pub frequency_scale: f64,
    /// Set when a negative `x0` was normalized by mirroring the waveguide;
    /// incidence directions of the original problem map to the opposite
    /// directions of the normalized one.
    pub direction_flipped: bool,
}

impl Normalized {
    /// Undo the frequency rescaling (the mirror flip only relabels
    /// directions and has no effect on the stored parameters).
    pub fn denormalize(&self) -> SystemParams {
        let s = self.frequency_scale;
        let p = self.params;
        SystemParams {
            omega_a: p.omega_a * s,
            omega_e: p.omega_e * s,
            lambda_mag: p.lambda_mag * s,
            phi: p.phi,
            f: p.f * s,
            g: p.g * s,
            v_g: p.v_g * s,
            x0: if self.direction_flipped { -p.x0 } else { p.x0 },
            gamma_a: p.gamma_a * s,
            gamma_e: p.gamma_e * s,
        }
    }
}

/// Check a raw parameter set and canonicalize it: frequencies rescaled so
/// `v_g = 1`, a negative emitter position folded back to `|x0|` by mirroring
/// (recorded as a direction flip).
pub fn validate_params(raw: &SystemParams) -> Result<Normalized, ParamError> {
    if !raw.v_g.is_finite() || raw.v_g <= 0.0 {
        return Err(ParamError::NonPositiveGroupVelocity(raw.v_g));
    }
    if raw.lambda_mag < 0.0 {
        return Err(ParamError::NegativeCoupling(raw.lambda_mag));
    }
    if raw.gamma_a < 0.0 {
        return Err(ParamError::NegativeDecay(raw.gamma_a));
    }
    if raw.gamma_e < 0.0 {
        return Err(ParamError::NegativeDecay(raw.gamma_e));
    }
    let s = raw.v_g;
    let direction_flipped = raw.x0 < 0.0;
    let params = SystemParams {
        omega_a: raw.omega_a / s,
        omega_e: raw.omega_e / s,
        lambda_mag: raw.lambda_mag / s,
        phi: raw.phi,
        f: raw.f / s,
        g: raw.g / s,
        v_g: 1.0,
        x0: raw.x0.abs(),
        gamma_a: raw.gamma_a / s,
        gamma_e: raw.gamma_e / s,
    };
    Ok(Normalized { params, frequency_scale: s, direction_flipped })
}

/// Wavenumber of a photon of energy `e` under the linearized dispersion
/// `E = v_g k`. Energies at or below zero sit outside the linearization's
/// validity and are rejected.
pub fn wavevector(e: f64, params: &SystemParams) -> Result<f64, ParamError> {
    if e.is_nan() || e <= 0.0 {
        return Err(ParamError::NonPositiveEnergy(e));
    }
    Ok(e / params.v_g)
}
