//! Radial test functions and the computable sides of the trace identities:
//! the geodesic sum, the fundamental-domain integral of the kernel
//! difference, the spectral integral of `L_Γ`, and the regularised
//! resolvent trace.
//!
//! A radial test function is described by three equivalent objects: the
//! point-pair kernel `k(d)`, its geodesic transform `g(u)` and the spectral
//! transform `h(ξ) = ∫ g(u) e^{−iξu} du`, normalised so that the operator
//! with kernel `k` acts on eigenfunctions of eigenvalue `¼ + ξ²` by `h(ξ)`.

pub mod kernel;
pub mod orbital;
pub mod resolvent;
pub mod sides;

pub use kernel::{kernel_eval, TabulatedKernel};
pub use orbital::{orbital_integral, OrbitalMethod};
pub use resolvent::{resolvent_regularized_trace, ResolventOptions, ResolventTrace};
pub use sides::{
    discrete_term_bound, geometric_side, kernel_difference_trace, spectral_side,
    KernelTraceOptions, Side, SpectralOptions, TraceResult, Truncation,
};
use crate::error::TraceError;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestKind {
    /// `h(ξ) = e^{−t(¼ + ξ²)}`.
    Heat { t: f64 },
    /// `h(ξ) = 1/(λ² + ξ²)`, the resolvent at spectral parameter `λ > 0`.
    Resolvent { lambda: f64 },
}

/// `scale · f` for a heat or resolvent test function. A zero scale gives
/// the degenerate function with `k = g = h = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialTestFunction {
    pub kind: TestKind,
    pub scale: f64,
}

impl RadialTestFunction {
    pub fn heat(t: f64) -> Result<Self, TraceError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(TraceError::InvalidTestFunction(format!(
                "heat time must be positive, got {t}"
            )));
        }
        Ok(Self {
            kind: TestKind::Heat { t },
            scale: 1.0,
        })
    }

    pub fn resolvent(lambda: f64) -> Result<Self, TraceError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(TraceError::InvalidTestFunction(format!(
                "resolvent parameter must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            kind: TestKind::Resolvent { lambda },
            scale: 1.0,
        })
    }

    pub fn scaled(self, c: f64) -> Result<Self, TraceError> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(TraceError::InvalidTestFunction(format!(
                "scale must be finite and non-negative, got {c}"
            )));
        }
        Ok(Self {
            scale: self.scale * c,
            ..self
        })
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0
    }

    /// Geodesic transform `g(u)`, even in `u`.
    pub fn g(&self, u: f64) -> f64 {
        self.scale * self.ln_g(u).exp()
    }

    /// `ln g(u)` of the unscaled function.
    pub(crate) fn ln_g(&self, u: f64) -> f64 {
        let u = u.abs();
        match self.kind {
            TestKind::Heat { t } => -0.25 * t - u * u / (4.0 * t) - 0.5 * (4.0 * PI * t).ln(),
            TestKind::Resolvent { lambda } => -lambda * u - (2.0 * lambda).ln(),
        }
    }

    /// Spectral transform `h(ξ)`.
    pub fn h(&self, xi: f64) -> f64 {
        self.scale
            * match self.kind {
                TestKind::Heat { t } => (-t * (0.25 + xi * xi)).exp(),
                TestKind::Resolvent { lambda } => 1.0 / (lambda * lambda + xi * xi),
            }
    }

    /// `∫_X^∞ h(ξ) dξ` bounded from above.
    pub fn h_tail(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        self.scale
            * match self.kind {
                TestKind::Heat { t } => {
                    if x == 0.0 {
                        0.5 * (PI / t).sqrt() * (-0.25 * t).exp()
                    } else {
                        (-t * (0.25 + x * x)).exp() / (2.0 * t * x)
                    }
                }
                TestKind::Resolvent { lambda } => (0.5 * PI - (x / lambda).atan()) / lambda,
            }
    }

    /// Point-pair kernel `k(d)`.
    pub fn kernel(&self, d: f64) -> Result<f64, TraceError> {
        kernel_eval(self, d)
    }

    /// Parameter shown in reports: `t` or `λ`.
    pub fn parameter(&self) -> f64 {
        match self.kind {
            TestKind::Heat { t } => t,
            TestKind::Resolvent { lambda } => lambda,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::GaussLegendre;

    /// `2 ∫_0^U g(u) cos(ξu) du` on panels of width 1/4.
    fn cosine_transform(f: &RadialTestFunction, xi: f64, upper: f64) -> f64 {
        let gl = GaussLegendre::new(20);
        let panels = (upper * 4.0).ceil() as usize;
        2.0 * gl.integrate_composite(0.0, upper, panels, |u| f.g(u) * (xi * u).cos())
    }

    #[test]
    fn transform_pair_heat() {
        for t in [0.5, 1.0, 2.0] {
            let f = RadialTestFunction::heat(t).unwrap();
            for xi in [0.0, 0.5, 1.0, 2.0] {
                let got = cosine_transform(&f, xi, 20.0 * t.sqrt() + 10.0);
                assert!((got - f.h(xi)).abs() < 1e-8, "t={t} ξ={xi}: {got} vs {}", f.h(xi));
            }
        }
    }

    #[test]
    fn transform_pair_resolvent() {
        for lambda in [0.75, 1.0] {
            let f = RadialTestFunction::resolvent(lambda).unwrap();
            for xi in [0.0, 0.5, 1.0, 2.0] {
                let got = cosine_transform(&f, xi, 45.0 / lambda);
                assert!((got - f.h(xi)).abs() < 1e-8, "λ={lambda} ξ={xi}");
            }
        }
    }

    #[test]
    fn positivity_and_parity() {
        for f in [
            RadialTestFunction::heat(1.0).unwrap(),
            RadialTestFunction::resolvent(0.75).unwrap(),
        ] {
            for u in [0.0, 0.3, 2.0, 7.0] {
                assert!(f.g(u) > 0.0 && f.h(u) > 0.0);
                assert_eq!(f.g(u), f.g(-u));
                assert!(f.kernel(u + 0.1).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn h_tail_bounds_the_integral() {
        let gl = GaussLegendre::new(20);
        for f in [
            RadialTestFunction::heat(0.5).unwrap(),
            RadialTestFunction::resolvent(1.0).unwrap(),
        ] {
            let x = 3.0;
            let got = gl.integrate_composite(x, 400.0, 4000, |xi| f.h(xi));
            assert!(f.h_tail(x) >= got * (1.0 - 1e-6), "{} < {got}", f.h_tail(x));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RadialTestFunction::heat(0.0).is_err());
        assert!(RadialTestFunction::resolvent(-1.0).is_err());
        assert!(RadialTestFunction::heat(1.0).unwrap().scaled(-2.0).is_err());
    }
}
