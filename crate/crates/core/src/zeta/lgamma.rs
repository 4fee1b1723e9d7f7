//! `L_Γ(λ) = Z′/Z(λ) + Z′/Z(−λ)`.

use super::{Sigma, ZetaEngine};
use crate::conventions::{to_determinant_variable, RHO};
use crate::error::ZetaError;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Product,
    Determinant,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Product => "product",
            Method::Determinant => "determinant",
        })
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "product" => Ok(Method::Product),
            "determinant" => Ok(Method::Determinant),
            other => Err(format!("unknown method '{other}' (product|determinant)")),
        }
    }
}

/// A value of `L_Γ` with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LValue {
    pub lambda: Complex64,
    pub value: Complex64,
    pub method: Method,
    pub error: f64,
}

/// Distance below which a determinant logarithmic derivative is refused.
pub const NEAR_ZERO: f64 = 1e-6;

impl ZetaEngine {
    /// `d_N′/d_N` at `s` with an error estimate from the last coefficient.
    pub fn log_deriv_determinant(
        &self,
        sigma: Sigma,
        s: Complex64,
        order: usize,
    ) -> Result<(Complex64, f64), ZetaError> {
        let d = self.determinant(sigma, s, order)?;
        let v = d.value;
        // Newton step |d/d′| estimates the distance to the nearest zero
        if v.d1.norm() > 0.0 && (v.value / v.d1).norm() < NEAR_ZERO || v.value.norm() == 0.0 {
            return Err(ZetaError::NearZeroOfZ {
                re: s.re - RHO,
                im: s.im,
                distance: (v.value / v.d1).norm(),
            });
        }
        let ld = v.d1 / v.value;
        let last = d.coefficients[d.order];
        let err = (last.d1.norm() + ld.norm() * last.value.norm()) / v.value.norm();
        Ok((ld, err))
    }

    /// `L_Γ(λ)`. The product method sums classes at `s = ½ ± λ` and needs
    /// `|Re λ| < ρ − δ`; the determinant method uses `d_N′/d_N` at both
    /// points.
    pub fn l_gamma(
        &self,
        sigma: Sigma,
        lambda: Complex64,
        method: Method,
        order: usize,
    ) -> Result<LValue, ZetaError> {
        let plus = to_determinant_variable(lambda);
        let minus = to_determinant_variable(-lambda);
        let (a, b, error) = match method {
            Method::Product => {
                let delta = self.critical_exponent()?.delta;
                let half_width = RHO - delta;
                if !(lambda.re.abs() < half_width) {
                    return Err(ZetaError::StripViolation {
                        re_abs: lambda.re.abs(),
                        half_width,
                    });
                }
                let (a, ta) = self.log_deriv_unchecked(sigma, lambda);
                let (b, tb) = self.log_deriv_unchecked(sigma, -lambda);
                (a, b, ta + tb)
            }
            Method::Determinant => {
                let (a, ea) = self.log_deriv_determinant(sigma, plus, order)?;
                let (b, eb) = self.log_deriv_determinant(sigma, minus, order)?;
                (a, b, ea + eb)
            }
        };
        // IEEE addition commutes, so L(−λ) = b + a = a + b bit for bit
        let value = a + b;
        Ok(LValue {
            lambda,
            value,
            method,
            error,
        })
    }
}
