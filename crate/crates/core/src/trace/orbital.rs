//! Orbital integrals of hyperbolic elements.
//!
//! For translation length `ℓ`, Fermi coordinates about the axis give
//! `sinh(d/2) = sinh(ℓ/2) cosh v` for the displacement at signed distance
//! `v`, and the cross-section integral `∫ k(d(v)) cosh v dv` equals
//! `g(ℓ) / (2 sinh(ℓ/2))`. The primitive-length weight is applied by callers.

use super::kernel::ln_kernel;
use super::RadialTestFunction;
use crate::error::TraceError;
use crate::numerics::tanh_sinh;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitalMethod {
    Closed,
    Quadrature,
}

/// `θ(ℓ)` for a hyperbolic class of length `ℓ > 0`.
pub fn orbital_integral(
    length: f64,
    f: &RadialTestFunction,
    method: OrbitalMethod,
) -> Result<f64, TraceError> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(TraceError::InvalidTestFunction(format!(
            "class length must be positive, got {length}"
        )));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    match method {
        OrbitalMethod::Closed => Ok(closed(length, f)),
        OrbitalMethod::Quadrature => quadrature(length, f),
    }
}

/// `g(ℓ) / (2 sinh(ℓ/2))`, formed in log space.
pub(crate) fn closed(length: f64, f: &RadialTestFunction) -> f64 {
    // 2 sinh(ℓ/2) = e^{ℓ/2} (1 − e^{−ℓ})
    let ln_den = 0.5 * length + (-(-length).exp_m1()).ln();
    f.scale * (f.ln_g(length) - ln_den).exp()
}

fn quadrature(length: f64, f: &RadialTestFunction) -> Result<f64, TraceError> {
    let sh = (0.5 * length).sinh();
    let displacement = |v: f64| 2.0 * (sh * v.cosh()).asinh();
    let log_term = |v: f64| -> Result<f64, TraceError> {
        Ok(ln_kernel(f.kind, displacement(v))? + v.cosh().ln())
    };
    // the integrand is log-concave in the tail; stop 45 e-folds below v = 0
    let top = log_term(0.0)?;
    let mut upper = 1.0;
    while log_term(upper)? > top - 45.0 {
        upper *= 1.5;
        if upper > 1e3 {
            return Err(TraceError::QuadratureStall {
                value: f64::NAN,
                error: f64::INFINITY,
            });
        }
    }
    let mut failure = None;
    let q = tanh_sinh(0.0, upper, 1e-12, 9, |v| match log_term(v) {
        Ok(x) => (x - top).exp(),
        Err(e) => {
            failure = Some(e);
            0.0
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let q = q.map_err(|s| TraceError::QuadratureStall {
        value: s.value,
        error: s.error,
    })?;
    Ok(f.scale * 2.0 * q.value * top.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_examples() {
        let heat = RadialTestFunction::heat(1.0).unwrap();
        let want = (-0.25f64).exp() * (-1.0f64).exp() / ((4.0 * PI).sqrt() * 2.0 * 1f64.sinh());
        let got = orbital_integral(2.0, &heat, OrbitalMethod::Closed).unwrap();
        assert!((got - want).abs() < 1e-15 * want);

        let res = RadialTestFunction::resolvent(1.0).unwrap();
        let want = (-2.0f64).exp() / (2.0 * 2.0 * 1f64.sinh());
        let got = orbital_integral(2.0, &res, OrbitalMethod::Closed).unwrap();
        assert!((got - want).abs() < 1e-15 * want);
    }

    #[test]
    fn closed_and_quadrature_agree() {
        for t in [0.5, 1.0, 2.0] {
            let f = RadialTestFunction::heat(t).unwrap();
            for l in [1.0, 2.0, 3.0] {
                let a = orbital_integral(l, &f, OrbitalMethod::Closed).unwrap();
                let b = orbital_integral(l, &f, OrbitalMethod::Quadrature).unwrap();
                assert!((a - b).abs() <= 1e-8 * a, "t={t} ℓ={l}: {a} vs {b}");
            }
        }
        for lambda in [0.75, 1.0] {
            let f = RadialTestFunction::resolvent(lambda).unwrap();
            for l in [1.0, 2.0, 7.4] {
                let a = orbital_integral(l, &f, OrbitalMethod::Closed).unwrap();
                let b = orbital_integral(l, &f, OrbitalMethod::Quadrature).unwrap();
                assert!((a - b).abs() <= 1e-8 * a, "λ={lambda} ℓ={l}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn rejects_degenerate_lengths() {
        let f = RadialTestFunction::heat(1.0).unwrap();
        assert!(orbital_integral(0.0, &f, OrbitalMethod::Closed).is_err());
    }
}
