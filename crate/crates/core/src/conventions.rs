//! Normalisations shared by every module.
//!
//! The root of `(g, a)` is normalised to 1, so `ρ = 1/2`, the curvature is
//! `-1`, and the Casimir offset is `ρ² = 1/4` for both characters of `M`.
//! User-facing spectral parameters are always `λ`; the determinant variable
//! is `s = λ + ρ`. All conversions go through this module.

use num_complex::Complex64;

/// Fixed geometric constants of `SL(2, ℝ)` acting on the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryConventions {
    pub rho: f64,
    pub curvature: f64,
    pub casimir_offset: f64,
}

pub const RHO: f64 = 0.5;

pub const CONVENTIONS: GeometryConventions = GeometryConventions {
    rho: RHO,
    curvature: -1.0,
    casimir_offset: RHO * RHO,
};

/// `s = λ + ρ`.
#[inline]
pub fn to_determinant_variable(lambda: Complex64) -> Complex64 {
    lambda + RHO
}

/// `λ = s − ρ`.
#[inline]
pub fn to_spectral_parameter(s: Complex64) -> Complex64 {
    s - RHO
}

/// Resolvent parameter `z_σ(λ) = c_σ − λ²`.
#[inline]
pub fn casimir_value(lambda: Complex64) -> Complex64 {
    CONVENTIONS.casimir_offset - lambda * lambda
}

/// `δ_Γ = δ − ρ`: the exponent in the normalisation where the tempered
/// axis is `Re λ = 0`.
#[inline]
pub fn shifted_exponent(delta_classical: f64) -> f64 {
    delta_classical - RHO
}
