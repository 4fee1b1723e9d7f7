//! Euler product over primitive classes and its logarithmic derivative.

use super::lgamma::Method;
use super::{Sigma, ZetaEngine};
use crate::conventions::to_determinant_variable;
use crate::error::ZetaError;
use crate::numerics::ComplexSum;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaOptions {
    /// Largest `k` in `Π_k (1 − σ e^{−(s+k)ℓ})`; chosen from `ℓ_min` when unset.
    pub k_max: Option<usize>,
    /// Largest admissible tail bound.
    pub tail_tol: f64,
    /// Required distance of `Re s` beyond `δ`.
    pub margin: f64,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        Self {
            k_max: None,
            tail_tol: 1e-6,
            margin: 0.02,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Truncation {
    Product { n_max: usize, k_max: usize },
    Determinant { order: usize },
}

/// A zeta value (or logarithmic derivative) with its truncation data.
///
/// `tail_bound` bounds the error of `log Z` (absolute), hence the relative
/// error of `value`; for logarithmic derivatives it bounds the absolute
/// error of `value`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZetaEval {
    pub lambda: Complex64,
    pub value: Complex64,
    pub method: Method,
    pub truncation: Truncation,
    pub tail_bound: f64,
}

/// `log(1 − z)` accurate for small `|z|`.
#[inline]
pub(crate) fn log_one_minus(z: Complex64) -> Complex64 {
    if z.norm_sqr() < 1e-10 {
        -z * (1.0 + z * (0.5 + z / 3.0))
    } else {
        (Complex64::new(1.0, 0.0) - z).ln()
    }
}

impl ZetaEngine {
    pub(crate) fn check_convergence(&self, s_re: f64, margin: f64) -> Result<f64, ZetaError> {
        let delta = self.critical_exponent()?.delta;
        if s_re <= delta + margin {
            return Err(ZetaError::OutsideConvergence {
                re_s: s_re,
                delta,
                margin,
            });
        }
        Ok(delta)
    }

    fn default_k_max(&self) -> usize {
        // e^{−(K+1)ℓ_min} below 1e-17
        ((39.2 / self.min_length()).ceil() as usize).max(1)
    }

    /// `log Z(λ)` truncated to the table and to `k ≤ k_max`, with the
    /// tail bound and the `k_max` used. No convergence check.
    pub fn log_zeta_product_unchecked(
        &self,
        sigma: Sigma,
        lambda: Complex64,
        k_max: Option<usize>,
    ) -> (Complex64, f64, usize) {
        let s = to_determinant_variable(lambda);
        let k_max = k_max.unwrap_or_else(|| self.default_k_max());
        let p = &self.primitive;
        let mut acc = ComplexSum::new();
        let mut dominant = 0.0;
        for i in 0..p.len() {
            let l = p.lengths[i];
            let sg = sigma.value(p.signs[i]);
            let base = (-s * l).exp() * sg;
            let step = (-l).exp();
            let mut term = base;
            for _ in 0..=k_max {
                acc.add(log_one_minus(term));
                term *= step;
            }
            dominant += base.norm() * p.inv_gap[i];
        }
        let k_tail = dominant * (-((k_max + 1) as f64) * self.min_length()).exp();
        let tail = self.class_tail(s.re, 0) + k_tail;
        (acc.value(), tail, k_max)
    }

    /// Product over primitive classes; requires `Re s > δ + margin`.
    pub fn zeta_product(
        &self,
        sigma: Sigma,
        lambda: Complex64,
        opts: &ZetaOptions,
    ) -> Result<ZetaEval, ZetaError> {
        let s = to_determinant_variable(lambda);
        self.check_convergence(s.re, opts.margin)?;
        let (log, tail, k_max) = self.log_zeta_product_unchecked(sigma, lambda, opts.k_max);
        if tail > opts.tail_tol {
            return Err(ZetaError::TailTooLarge {
                tail,
                tolerance: opts.tail_tol,
            });
        }
        Ok(ZetaEval {
            lambda,
            value: log.exp(),
            method: Method::Product,
            truncation: Truncation::Product {
                n_max: self.n_max(),
                k_max,
            },
            tail_bound: tail,
        })
    }

    /// `Σ_c ℓ₀(c) σ_c e^{−sℓ_c} / (1 − e^{−ℓ_c})` over every class in the
    /// table, with tail bound. No convergence check.
    pub fn log_deriv_unchecked(&self, sigma: Sigma, lambda: Complex64) -> (Complex64, f64) {
        let s = to_determinant_variable(lambda);
        let mut acc = ComplexSum::new();
        for sh in &self.shells {
            for i in 0..sh.len() {
                let w = sh.primitive_lengths[i] * sigma.value(sh.signs[i]) * sh.inv_gap[i];
                acc.add((-s * sh.lengths[i]).exp() * w);
            }
        }
        (acc.value(), self.class_tail(s.re, 1))
    }

    /// `Z′/Z(λ)` by the class sum; requires `Re s > δ + margin`.
    pub fn log_deriv_zeta(
        &self,
        sigma: Sigma,
        lambda: Complex64,
        opts: &ZetaOptions,
    ) -> Result<ZetaEval, ZetaError> {
        let s = to_determinant_variable(lambda);
        self.check_convergence(s.re, opts.margin)?;
        let (value, tail) = self.log_deriv_unchecked(sigma, lambda);
        if tail > opts.tail_tol {
            return Err(ZetaError::TailTooLarge {
                tail,
                tolerance: opts.tail_tol,
            });
        }
        Ok(ZetaEval {
            lambda,
            value,
            method: Method::Product,
            truncation: Truncation::Product {
                n_max: self.n_max(),
                k_max: 0,
            },
            tail_bound: tail,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cylinder_product_closed_form() {
        let (_, e) = fixtures::cylinder(40);
        let z = e
            .zeta_product(Sigma::Trivial, c(0.5, 0.0), &ZetaOptions::default())
            .unwrap();
        let direct: f64 = (0..60).map(|k| (1.0 - (-2.0 * (1.0 + k as f64)).exp()).powi(2)).product();
        assert!((z.value.re - direct).abs() < 1e-12 * direct);
        assert!(z.value.im.abs() < 1e-15);
    }

    #[test]
    fn cylinder_log_derivative_series() {
        let (_, e) = fixtures::cylinder(40);
        let v = e
            .log_deriv_zeta(Sigma::Trivial, c(1.0, 0.0), &ZetaOptions::default())
            .unwrap();
        let series: f64 = (1..60)
            .map(|m| {
                let m = m as f64;
                4.0 * (-1.5 * 2.0 * m).exp() / (1.0 - (-2.0 * m).exp())
            })
            .sum();
        assert!((v.value.re - series).abs() < 1e-13);
    }

    #[test]
    fn product_approaches_one() {
        let (_, e) = fixtures::thin2(6);
        let z = e
            .zeta_product(Sigma::Trivial, c(8.0, 0.0), &ZetaOptions::default())
            .unwrap();
        assert!((z.value - 1.0).norm() < 1e-20f64.max(1e-15));
    }

    #[test]
    fn conjugation_symmetry() {
        let (_, e) = fixtures::thin2(8);
        let o = ZetaOptions::default();
        for sigma in [Sigma::Trivial, Sigma::Sign] {
            let a = e.zeta_product(sigma, c(0.4, 1.3), &o).unwrap().value;
            let b = e.zeta_product(sigma, c(0.4, -1.3), &o).unwrap().value;
            assert!((a - b.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn outside_convergence_is_rejected() {
        let (_, e) = fixtures::cylinder(20);
        let err = e
            .zeta_product(Sigma::Trivial, c(-0.49, 0.0), &ZetaOptions::default())
            .unwrap_err();
        assert!(matches!(err, ZetaError::OutsideConvergence { .. }));
    }
}
