//! Metric geometry of the upper half-plane.

use crate::error::GeomError;
use num_complex::Complex64;

/// Hyperbolic distance, checking that both points are interior.
///
/// `cosh d = 1 + |x − y|² / (2 Im x Im y)`.
pub fn hyperbolic_distance(x: Complex64, y: Complex64) -> Result<f64, GeomError> {
    for p in [x, y] {
        if !(p.im > 0.0) {
            return Err(GeomError::NonInteriorPoint { re: p.re, im: p.im });
        }
    }
    Ok(distance(x, y))
}

/// Hyperbolic distance without validation.
///
/// Uses `sinh(d/2) = |x − y| / (2 √(Im x Im y))`, which stays accurate both
/// for nearby points and for points exponentially close to the boundary.
#[inline]
pub fn distance(x: Complex64, y: Complex64) -> f64 {
    let half = (x - y).norm() / (2.0 * (x.im * y.im).sqrt());
    2.0 * half.asinh()
}

/// Distance from `z` to the geodesic that is the semicircle of the given
/// centre and radius on the real axis.
#[inline]
pub fn distance_to_semicircle(z: Complex64, center: f64, radius: f64) -> f64 {
    let dx = z.re - center;
    let power = dx * dx + z.im * z.im - radius * radius;
    (power.abs() / (2.0 * radius * z.im)).asinh()
}

/// Geodesic polar coordinates `(ρ, θ)` centred at an interior base point.
///
/// The frame is the disk model pulled back by
/// `w ↦ x₀ + y₀ · i(1 + w)/(1 − w)`, with `w = tanh(ρ/2) e^{iθ}`; the area
/// element is `sinh ρ dρ dθ`.
#[derive(Clone, Copy, Debug)]
pub struct PolarFrame {
    base: Complex64,
}

/// A boundary interval seen from the base point: the arc of directions
/// `|θ − center| < half_width` whose rays cross its geodesic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcShadow {
    pub center: f64,
    pub half_width: f64,
}

impl PolarFrame {
    pub fn new(base: Complex64) -> Result<Self, GeomError> {
        if !(base.im > 0.0) {
            return Err(GeomError::NonInteriorPoint {
                re: base.re,
                im: base.im,
            });
        }
        Ok(Self { base })
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    /// Point at distance `rho` in direction `theta`.
    pub fn point(&self, rho: f64, theta: f64) -> Complex64 {
        let t = (0.5 * rho).tanh();
        // i(1 + w)/(1 − w) = (−2 Im w + i(1 − |w|²)) / |1 − w|², with
        // 1 − t, 1 − t² and |1 − w|² formed without cancellation
        let one_minus_t = 2.0 / (rho.exp() + 1.0);
        let half_sin = (0.5 * theta).sin();
        let den = one_minus_t * one_minus_t + 4.0 * t * half_sin * half_sin;
        let one_minus = (0.5 * rho).cosh().powi(-2);
        let zeta = Complex64::new(-2.0 * t * theta.sin() / den, one_minus / den);
        Complex64::new(self.base.re + self.base.im * zeta.re, self.base.im * zeta.im)
    }

    /// Direction of a boundary point of `ℝ`.
    pub fn boundary_angle(&self, x: f64) -> f64 {
        let zeta = Complex64::new((x - self.base.re) / self.base.im, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let w = (zeta - i) / (zeta + i);
        w.arg()
    }

    /// Shadow of the geodesic over `[lo, hi]` (an interval not containing ∞).
    pub fn shadow(&self, lo: f64, hi: f64) -> ArcShadow {
        // ∞ sits at angle 0 and the angle, taken in (0, 2π), increases along
        // ℝ, so the image of [lo, hi] is the arc between the endpoint angles
        let wrap = |a: f64| if a < 0.0 { a + 2.0 * std::f64::consts::PI } else { a };
        let a1 = wrap(self.boundary_angle(lo));
        let a2 = wrap(self.boundary_angle(hi));
        let (from, to) = (a1.min(a2), a1.max(a2));
        ArcShadow {
            center: 0.5 * (from + to),
            half_width: 0.5 * (to - from),
        }
    }

    /// Distance along the ray `theta` to the geodesic casting `shadow`, or
    /// `None` when the ray misses it.
    pub fn exit_distance(&self, shadow: &ArcShadow, theta: f64) -> Option<f64> {
        let c = (theta - shadow.center).cos();
        let ca = shadow.half_width.cos();
        if c <= ca {
            return None;
        }
        let beta = c / ca;
        // t = β − √(β² − 1) = 1/(β + √(β² − 1))
        let t = 1.0 / (beta + (beta * beta - 1.0).sqrt());
        Some(2.0 * t.atanh())
    }

    /// Half-angle of the sub-arc of `shadow` whose exit distance is below
    /// `rho`; `None` when the whole geodesic is farther than `rho`.
    pub fn angle_within(&self, shadow: &ArcShadow, rho: f64) -> Option<f64> {
        let t = (0.5 * rho).tanh();
        let beta = 0.5 * (t + t.recip());
        let c = beta * shadow.half_width.cos();
        if c >= 1.0 {
            None
        } else {
            Some(c.acos())
        }
    }
}
