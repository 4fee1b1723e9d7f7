//! Fredholm expansion `d(s) = exp(−Σ t_n/n)` truncated at order `N`.

use super::product::{Truncation, ZetaEval};
use super::traces::TraceTable;
use super::{Method, Sigma, ZetaEngine};
use crate::conventions::to_determinant_variable;
use crate::error::ZetaError;
use crate::numerics::Jet;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetExpansion {
    pub s: Complex64,
    pub order: usize,
    /// `c_0 = 1, c_1, …, c_N` as jets in `s`.
    pub coefficients: Vec<Jet>,
    /// `d_N = Σ c_n`.
    pub value: Jet,
    /// `|c_N|`, the last increment.
    pub error: f64,
    /// `|c_N| / |c_{N−1}|`.
    pub ratio: f64,
}

impl DetExpansion {
    /// `c_n = −(1/n) Σ_{k=1}^{n} t_k c_{n−k}` without decay diagnostics.
    pub fn from_traces(table: &TraceTable) -> Self {
        let n_max = table.order;
        let mut c = Vec::with_capacity(n_max + 1);
        c.push(Jet::ONE);
        for n in 1..=n_max {
            let mut acc = Jet::ZERO;
            for k in 1..=n {
                acc = acc + table.traces[k - 1] * c[n - k];
            }
            c.push(acc.scale(Complex64::new(-1.0 / n as f64, 0.0)));
        }
        let value = c.iter().fold(Jet::ZERO, |a, &b| a + b);
        let last = c[n_max].value.norm();
        let prev = c[n_max - 1].value.norm();
        Self {
            s: table.s,
            order: n_max,
            error: last,
            ratio: if prev > 0.0 { last / prev } else { 0.0 },
            value,
            coefficients: c,
        }
    }

    /// Coefficients are decaying when `|c_N| < |c_{N−3}|` (or vanish).
    pub fn check_decay(&self) -> Result<(), ZetaError> {
        if self.order < 4 {
            return Ok(());
        }
        let last = self.coefficients[self.order].value.norm();
        let earlier = self.coefficients[self.order - 3].value.norm();
        let peak = self
            .coefficients
            .iter()
            .map(|c| c.value.norm())
            .fold(0.0, f64::max);
        // below the floor the tail is cancellation noise, not growth
        if last > NOISE_FLOOR * peak && last >= earlier {
            return Err(ZetaError::NonDecaying {
                s_re: self.s.re,
                s_im: self.s.im,
                last,
                earlier,
            });
        }
        Ok(())
    }
}

/// Relative size under which a coefficient is indistinguishable from rounding.
pub const NOISE_FLOOR: f64 = 1e-10;

/// Expansion with the decay check applied.
pub fn dynamical_determinant(table: &TraceTable) -> Result<DetExpansion, ZetaError> {
    let d = DetExpansion::from_traces(table);
    d.check_decay()?;
    Ok(d)
}

impl ZetaEngine {
    /// `d_N(s)` with jets; no decay check.
    pub fn determinant(&self, sigma: Sigma, s: Complex64, order: usize) -> Result<DetExpansion, ZetaError> {
        Ok(DetExpansion::from_traces(
            &self.transfer_trace_table(sigma, s, order)?,
        ))
    }

    /// `Z(λ) ≈ d_N(λ + ρ)`, checked for coefficient decay.
    pub fn zeta_determinant(
        &self,
        sigma: Sigma,
        lambda: Complex64,
        order: usize,
    ) -> Result<ZetaEval, ZetaError> {
        let d = dynamical_determinant(&self.transfer_trace_table(
            sigma,
            to_determinant_variable(lambda),
            order,
        )?)?;
        Ok(ZetaEval {
            lambda,
            value: d.value.value,
            method: Method::Determinant,
            truncation: Truncation::Determinant { order },
            tail_bound: d.error,
        })
    }
}
