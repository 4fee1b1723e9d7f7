//! Second-order jets: a value together with its first two derivatives.

use num_complex::Complex64;
use serde::Serialize;
use std::ops::{Add, Mul, Neg, Sub};

/// `(f, f', f'')` at a point. Arithmetic follows the Leibniz rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Jet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        value: Complex64::new(0.0, 0.0),
        d1: Complex64::new(0.0, 0.0),
        d2: Complex64::new(0.0, 0.0),
    };
    pub const ONE: Jet = Jet {
        value: Complex64::new(1.0, 0.0),
        d1: Complex64::new(0.0, 0.0),
        d2: Complex64::new(0.0, 0.0),
    };

    pub fn new(value: Complex64, d1: Complex64, d2: Complex64) -> Self {
        Self { value, d1, d2 }
    }

    pub fn scale(self, k: Complex64) -> Self {
        Self::new(self.value * k, self.d1 * k, self.d2 * k)
    }

    /// Logarithmic derivative f'/f.
    pub fn log_derivative(&self) -> Complex64 {
        self.d1 / self.value
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.value, -self.d1, -self.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet_of_exp(a: f64, s: f64) -> Jet {
        // e^{a s}
        let v = Complex64::new((a * s).exp(), 0.0);
        Jet::new(v, v * a, v * a * a)
    }

    #[test]
    fn product_rule() {
        let s = 0.3;
        let p = jet_of_exp(2.0, s) * jet_of_exp(-0.5, s);
        let q = jet_of_exp(1.5, s);
        assert!((p.value - q.value).norm() < 1e-14);
        assert!((p.d1 - q.d1).norm() < 1e-14);
        assert!((p.d2 - q.d2).norm() < 1e-13);
    }
}
