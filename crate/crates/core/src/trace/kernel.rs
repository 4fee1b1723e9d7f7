//! Point-pair kernels on the hyperbolic plane.
//!
//! Both kernels are integrals over `u ∈ (d, ∞)` with an inverse square-root
//! singularity at `u = d`. The substitution `u = d + v²` removes it, and
//! `cosh u − cosh d = 2 sinh(d + v²/2) sinh(v²/2)` avoids cancellation. The
//! leading exponential factor is pulled out analytically, so the kernels
//! are produced as logarithms and stay representable far into the tail.

use super::{RadialTestFunction, TestKind};
use crate::error::TraceError;
use crate::numerics::{tanh_sinh, ChebyshevPanel};
use crate::parallel;
use std::f64::consts::PI;

const REL_TOL: f64 = 1e-12;
const MAX_LEVEL: u32 = 9;
/// Exponent at which the transformed integrands are cut off.
const CUTOFF: f64 = 50.0;

/// `k(d)` for `d ≥ 0`; the resolvent kernel is infinite at `d = 0`.
pub fn kernel_eval(f: &RadialTestFunction, d: f64) -> Result<f64, TraceError> {
    if f.is_zero() {
        return Ok(0.0);
    }
    Ok(f.scale * ln_kernel(f.kind, d)?.exp())
}

/// `ln k(d)` of the unscaled kernel.
pub(crate) fn ln_kernel(kind: TestKind, d: f64) -> Result<f64, TraceError> {
    if !(d >= 0.0) {
        return Err(TraceError::InvalidTestFunction(format!(
            "kernel distance must be non-negative, got {d}"
        )));
    }
    match kind {
        TestKind::Heat { t } => {
            // k = √2 e^{−t/4} (4πt)^{−3/2} e^{−d²/4t − d/2} ∫_0^V I(v) dv
            let a = 0.25 / t;
            let b = d / (2.0 * t) + 0.5;
            let w = (-b + (b * b + 4.0 * a * CUTOFF).sqrt()) / (2.0 * a);
            let integrand = |v: f64| {
                let v2 = v * v;
                let shrink = (-(2.0 * d * v2 + v2 * v2) / (4.0 * t) - 0.25 * v2).exp();
                let root = (-(-2.0 * d - v2).exp_m1() * (0.5 * v2).sinh()).sqrt();
                if root == 0.0 {
                    return 0.0;
                }
                (d + v2) * shrink * 2.0 * v / root
            };
            let q = integrate(w.sqrt(), integrand)?;
            Ok(0.5 * 2f64.ln() - 0.25 * t - 1.5 * (4.0 * PI * t).ln() - d * d / (4.0 * t) - 0.5 * d
                + q.ln())
        }
        TestKind::Resolvent { lambda } => {
            if d == 0.0 {
                return Ok(f64::INFINITY);
            }
            // r = (2π)^{−1} e^{−(λ+½)d} ∫_0^V J(v) dv
            let w = CUTOFF / (lambda + 0.5);
            let integrand = |v: f64| {
                let v2 = v * v;
                let shrink = (-(lambda + 0.25) * v2).exp();
                let root = (-2.0 * (-2.0 * d - v2).exp_m1() * (0.5 * v2).sinh()).sqrt();
                if root == 0.0 {
                    return 0.0;
                }
                shrink * 2.0 * v / root
            };
            let q = integrate(w.sqrt(), integrand)?;
            Ok(-(2.0 * PI).ln() - (lambda + 0.5) * d + q.ln())
        }
    }
}

fn integrate<F: FnMut(f64) -> f64>(upper: f64, f: F) -> Result<f64, TraceError> {
    tanh_sinh(0.0, upper, REL_TOL, MAX_LEVEL, f)
        .map(|q| q.value)
        .map_err(|s| TraceError::QuadratureStall {
            value: s.value,
            error: s.error,
        })
}

const PANEL_WIDTH: f64 = 0.5;
const PANEL_NODES: usize = 20;

/// `k` on `[lo, hi]` by piecewise Chebyshev interpolation of `ln k`.
/// Outside the range the kernel is evaluated directly.
#[derive(Clone, Debug)]
pub struct TabulatedKernel {
    f: RadialTestFunction,
    lo: f64,
    hi: f64,
    panels: Vec<ChebyshevPanel>,
}

impl TabulatedKernel {
    pub fn new(f: RadialTestFunction, lo: f64, hi: f64) -> Result<Self, TraceError> {
        if !(lo > 0.0 && hi > lo) {
            return Err(TraceError::InvalidTestFunction(format!(
                "table range [{lo}, {hi}] must be positive and non-empty"
            )));
        }
        let count = ((hi - lo) / PANEL_WIDTH).ceil() as usize;
        let width = (hi - lo) / count as f64;
        let panels = parallel::map_range(count, |i| {
            let a = lo + width * i as f64;
            let mut failure = None;
            let p = ChebyshevPanel::sample(a, a + width, PANEL_NODES, |d| {
                ln_kernel(f.kind, d).unwrap_or_else(|e| {
                    failure = Some(e);
                    f64::NAN
                })
            });
            failure.map_or(Ok(p), Err)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { f, lo, hi, panels })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// `k(d)`; NaN when a direct evaluation outside the table fails.
    pub fn eval(&self, d: f64) -> f64 {
        if self.f.is_zero() {
            return 0.0;
        }
        if d < self.lo || d > self.hi {
            return kernel_eval(&self.f, d).unwrap_or(f64::NAN);
        }
        let width = (self.hi - self.lo) / self.panels.len() as f64;
        let i = (((d - self.lo) / width) as usize).min(self.panels.len() - 1);
        self.f.scale * self.panels[i].eval(d).exp()
    }
}
