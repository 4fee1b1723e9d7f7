//! Defect of `Z(λ)/Z(−λ) = exp ∫₀^λ L_Γ(u) du`, all by class sums.

use super::{Sigma, ZetaEngine};
use crate::conventions::RHO;
use crate::error::ZetaError;
use crate::numerics::GaussLegendre;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FunctionalEquation {
    pub lambda: Complex64,
    /// `Z(λ)/Z(−λ)` from the product.
    pub ratio: Complex64,
    /// `exp(λ ∫₀¹ L_Γ(τλ) dτ)`.
    pub exp_integral: Complex64,
    pub defect: f64,
    /// Difference between 20- and 30-node Gauss–Legendre integrals.
    pub quadrature_error: f64,
    /// Class-table truncation bound on `log Z(λ) − log Z(−λ)`.
    pub tail_bound: f64,
}

impl ZetaEngine {
    pub fn functional_equation_defect(&self, sigma: Sigma, lambda: Complex64) -> Result<FunctionalEquation, ZetaError> {
        let delta = self.critical_exponent()?.delta;
        let half_width = RHO - delta;
        if !(lambda.re.abs() < half_width) {
            return Err(ZetaError::StripViolation {
                re_abs: lambda.re.abs(),
                half_width,
            });
        }
        let (zp, tp, _) = self.log_zeta_product_unchecked(sigma, lambda, None);
        let (zm, tm, _) = self.log_zeta_product_unchecked(sigma, -lambda, None);
        let ratio = (zp - zm).exp();

        let segment = |nodes: usize| -> Complex64 {
            GaussLegendre::new(nodes)
                .mapped(0.0, 1.0)
                .map(|(t, w)| {
                    let u = lambda * t;
                    let (a, _) = self.log_deriv_unchecked(sigma, u);
                    let (b, _) = self.log_deriv_unchecked(sigma, -u);
                    (a + b) * w
                })
                .sum::<Complex64>()
                * lambda
        };
        let coarse = segment(20);
        let fine = segment(30);
        let exp_integral = fine.exp();
        Ok(FunctionalEquation {
            lambda,
            ratio,
            exp_integral,
            defect: (ratio - exp_integral).norm(),
            quadrature_error: (fine - coarse).norm() * exp_integral.norm(),
            tail_bound: tp + tm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;

    #[test]
    fn zero_has_no_defect() {
        let (_, e) = fixtures::thin2(6);
        let f = e.functional_equation_defect(Sigma::Trivial, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(f.defect, 0.0);
    }

    #[test]
    fn cylinder_defect_is_tiny() {
        let (_, e) = fixtures::cylinder(80);
        let f = e.functional_equation_defect(Sigma::Trivial, Complex64::new(0.3, 0.0)).unwrap();
        assert!(f.defect <= 1e-8, "{f:?}");
    }

    #[test]
    fn strip_is_enforced() {
        let (_, e) = fixtures::cylinder(20);
        assert!(matches!(
            e.functional_equation_defect(Sigma::Trivial, Complex64::new(0.6, 0.0)),
            Err(ZetaError::StripViolation { .. })
        ));
    }
}
