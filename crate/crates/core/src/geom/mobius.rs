//! Real unimodular Möbius maps acting on the upper half-plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Renormalisation threshold for the determinant after composition.
const DET_DRIFT: f64 = 1e-13;

/// `z ↦ (az + b) / (cz + d)` with `ad − bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MobiusMap {
    pub const IDENTITY: MobiusMap = MobiusMap {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds a map from entries with positive determinant, scaled to
    /// determinant one.
    pub fn normalized(a: f64, b: f64, c: f64, d: f64) -> Option<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return None;
        }
        let k = det.sqrt().recip();
        Some(Self {
            a: a * k,
            b: b * k,
            c: c * k,
            d: d * k,
        })
    }

    /// Diagonal map `diag(e^{ℓ/2}, e^{-ℓ/2})`, translation length `ℓ`.
    pub fn translation(length: f64) -> Self {
        let h = (0.5 * length).exp();
        Self {
            a: h,
            b: 0.0,
            c: 0.0,
            d: h.recip(),
        }
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    #[inline]
    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Matrix product `self · other` (apply `other` first).
    ///
    /// The determinant is pulled back to one only when its drift is larger
    /// than the rounding noise of `ad − bc`. That noise scales with the
    /// operands, not the result: when the product cancels (`u·m·u⁻¹`) the
    /// computed determinant is noise and a "correction" would corrupt it.
    #[inline]
    pub fn compose(&self, other: &MobiusMap) -> Self {
        let m = Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        };
        let det = m.det();
        let scale = self.norm() * other.norm();
        let noise = 8.0 * f64::EPSILON * scale * scale;
        if (det - 1.0).abs() > DET_DRIFT.max(noise) && det > 0.0 {
            let k = det.sqrt().recip();
            Self {
                a: m.a * k,
                b: m.b * k,
                c: m.c * k,
                d: m.d * k,
            }
        } else {
            m
        }
    }

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    /// Image of an interior point, with the imaginary part computed as
    /// `Im z / |cz + d|²` so that it keeps full relative precision.
    #[inline]
    pub fn apply_interior(&self, z: Complex64) -> Complex64 {
        let den = z * self.c + self.d;
        let n2 = den.norm_sqr();
        let num = z * self.a + self.b;
        let re = (num * den.conj()).re / n2;
        Complex64::new(re, z.im / n2)
    }

    /// Image of a boundary point; `None` means the point goes to `∞`.
    pub fn apply_real(&self, x: f64) -> Option<f64> {
        let den = self.c * x + self.d;
        if den == 0.0 {
            None
        } else {
            Some((self.a * x + self.b) / den)
        }
    }

    /// Image of `∞`; `None` when it is fixed.
    pub fn image_of_infinity(&self) -> Option<f64> {
        if self.c == 0.0 {
            None
        } else {
            Some(self.a / self.c)
        }
    }

    /// `|tr| > 2`.
    pub fn is_hyperbolic(&self) -> bool {
        self.trace().abs() > 2.0
    }

    /// Translation length `2·arccosh(|tr|/2)`, with the argument clamped to
    /// 1 when it falls at most 1e-14 below it.
    pub fn translation_length(&self) -> f64 {
        translation_length_from_trace(self.trace())
    }

    /// Fixed points on `ℝ ∪ {∞}` ordered `(attracting, repelling)` for a
    /// hyperbolic map. Infinite fixed points are reported as `None`.
    pub fn fixed_points(&self) -> (Option<f64>, Option<f64>) {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        if c == 0.0 {
            // z ↦ (a z + b)/d, fixed points b/(d-a) and ∞
            let finite = b / (d - a);
            return if a.abs() > d.abs() {
                (None, Some(finite))
            } else {
                (Some(finite), None)
            };
        }
        let tr = a + d;
        let disc = (tr * tr - 4.0).max(0.0).sqrt();
        // roots of c z² + (d − a) z − b = 0
        let z1 = (a - d + disc) / (2.0 * c);
        let z2 = (a - d - disc) / (2.0 * c);
        if self.derivative_at(z1).abs() < 1.0 {
            (Some(z1), Some(z2))
        } else {
            (Some(z2), Some(z1))
        }
    }

    /// Derivative of the map at a real point.
    pub fn derivative_at(&self, x: f64) -> f64 {
        let den = self.c * x + self.d;
        1.0 / (den * den)
    }

    /// `ℓ = −log g'(x₊)` at the attracting fixed point `x₊`.
    pub fn multiplier_length(&self) -> f64 {
        match self.fixed_points().0 {
            Some(x) => -self.derivative_at(x).abs().ln(),
            // attracting point at ∞: the finite one repels with g' = e^{ℓ}
            None => {
                let x = self.fixed_points().1.unwrap_or(0.0);
                self.derivative_at(x).abs().ln()
            }
        }
    }

    pub fn max_abs_diff(&self, other: &MobiusMap) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }

    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }
}

/// `2·arccosh(|tr|/2)` with the guarded argument.
pub fn translation_length_from_trace(trace: f64) -> f64 {
    let mut x = 0.5 * trace.abs();
    if x < 1.0 && x > 1.0 - 1e-14 {
        x = 1.0;
    }
    2.0 * x.acosh()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_map(seed: u64) -> MobiusMap {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        };
        let (a, b, c) = (next(), next(), next());
        let a = if a.abs() < 0.1 { 1.3 } else { a };
        // choose d so that ad - bc = 1
        MobiusMap::normalized(a, b, c, (1.0 + b * c) / a)
            .or_else(|| MobiusMap::normalized(-a, -b, c, (1.0 + b * c) / a))
            .unwrap_or(MobiusMap::translation(0.7))
    }

    #[test]
    fn trace_is_conjugation_invariant() {
        let g = MobiusMap::normalized(3.0, 1.0, 2.0, 1.0).unwrap();
        for seed in 0..50 {
            let m = rand_map(seed);
            let c = m.compose(&g).compose(&m.inverse());
            assert!((c.trace() - g.trace()).abs() < 1e-10, "seed {seed}");
            assert!((c.det() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_length_and_multiplier() {
        let g = MobiusMap::translation(2.0);
        assert!((g.trace() - 2.0 * 1f64.cosh()).abs() < 1e-15);
        assert!((g.translation_length() - 2.0).abs() < 1e-12);
        assert!((g.multiplier_length() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn multiplier_matches_trace_length_for_circle_pairing() {
        // z ↦ b − r²/(z − a) pairing circles at a and b
        let (a, b, r) = (-1.0f64, 3.0f64, 0.1f64);
        let g = MobiusMap::normalized(b, -a * b - r * r, 1.0, -a).unwrap();
        assert!((g.translation_length() - g.multiplier_length()).abs() < 1e-9);
        let (attr, _) = g.fixed_points();
        let x = attr.unwrap();
        assert!((g.apply_real(x).unwrap() - x).abs() < 1e-12);
        assert!((x - b).abs() < r);
    }

    #[test]
    fn guarded_length_near_parabolic() {
        assert_eq!(translation_length_from_trace(2.0 - 1e-15), 0.0);
        assert!(translation_length_from_trace(1.0).is_nan());
    }

    #[test]
    fn interior_action_preserves_imaginary_precision() {
        let g = MobiusMap::normalized(1e6, 0.0, 0.0, 1.0).unwrap().inverse();
        let z = Complex64::new(0.5, 1.0);
        let w = g.apply_interior(z);
        assert!((w.im - 1e-6).abs() < 1e-20);
        assert!((w - g.apply(z)).norm() < 1e-15);
    }
}
