//! Transfer-operator traces `t_n(s)` as class sums.

use super::{Sigma, ZetaEngine};
use crate::error::ZetaError;
use crate::numerics::{ComplexSum, Jet};
use crate::parallel;
use num_complex::Complex64;
use serde::Serialize;

/// `t_n(s)` for `n = 1..=order` as jets in `s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceTable {
    pub sigma: Sigma,
    pub s: Complex64,
    pub order: usize,
    /// `traces[n − 1] = (t_n, t_n′, t_n″)`.
    pub traces: Vec<Jet>,
}

impl TraceTable {
    /// Table with prescribed values and vanishing derivatives.
    pub fn from_values(sigma: Sigma, s: Complex64, values: &[Complex64]) -> Self {
        Self {
            sigma,
            s,
            order: values.len(),
            traces: values
                .iter()
                .map(|&v| Jet::new(v, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)))
                .collect(),
        }
    }

    pub fn value(&self, n: usize) -> Complex64 {
        self.traces[n - 1].value
    }
}

impl ZetaEngine {
    /// `t_n = Σ_{|c| = n} p_c σ_c e^{−sℓ_c}/(1 − e^{−ℓ_c})`: each class of
    /// primitive period `p` stands for its `p` rotations.
    pub fn transfer_trace_table(
        &self,
        sigma: Sigma,
        s: Complex64,
        order: usize,
    ) -> Result<TraceTable, ZetaError> {
        if order == 0 || order > self.n_max() {
            return Err(ZetaError::TableTooShort {
                order,
                n_max: self.n_max(),
            });
        }
        let traces = parallel::map_range(order, |i| {
            let sh = &self.shells[i];
            let (mut v, mut d1, mut d2) = (ComplexSum::new(), ComplexSum::new(), ComplexSum::new());
            for k in 0..sh.len() {
                let l = sh.lengths[k];
                let a = sh.periods[k] * sigma.value(sh.signs[k]) * sh.inv_gap[k];
                let e = (-s * l).exp() * a;
                v.add(e);
                d1.add(-e * l);
                d2.add(e * (l * l));
            }
            Jet::new(v.value(), d1.value(), d2.value())
        });
        Ok(TraceTable {
            sigma,
            s,
            order,
            traces,
        })
    }
}
