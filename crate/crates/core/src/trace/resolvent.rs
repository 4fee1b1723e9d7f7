//! Regularised resolvent trace `Q(λ) = ∫_F Σ_{γ≠1} r_λ(d(x, γx)) dA(x)` and
//! its comparison with `(1/2λ) Z′/Z(λ)`.

use super::sides::{integrate_orbit_sums, KernelTraceOptions, Side, TraceResult, Truncation};
use super::RadialTestFunction;
use crate::conventions::RHO;
use crate::error::TraceError;
use crate::geom::SchottkyData;
use crate::zeta::{Sigma, ZetaEngine, ZetaOptions};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ResolventOptions {
    pub kernel: KernelTraceOptions,
    pub zeta: ZetaOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResolventTrace {
    pub lambda: f64,
    pub q: TraceResult,
    /// `(1/2λ) Z′/Z(λ)` by the class sum.
    pub zeta_side: f64,
    /// Class-table truncation bound on `zeta_side`.
    pub zeta_tail: f64,
    /// `|Q − (1/2λ) Z′/Z(λ)| / |Q|`.
    pub t5_defect: f64,
}

/// `Q(λ)` for real `λ > max(0, δ − ρ)`, where the lattice sum converges.
pub fn resolvent_regularized_trace(
    group: &SchottkyData,
    engine: &ZetaEngine,
    lambda: f64,
    opts: &ResolventOptions,
) -> Result<ResolventTrace, TraceError> {
    let delta = engine.critical_exponent()?.delta;
    let floor = (delta - RHO).max(0.0);
    if !(lambda > floor) {
        return Err(TraceError::RegimeViolation(format!(
            "resolvent trace needs λ > {floor}, got {lambda}"
        )));
    }
    let f = RadialTestFunction::resolvent(lambda)?;
    let (value, tail, error, cut, evaluations) = integrate_orbit_sums(group, &f, &opts.kernel)?;
    let z = engine.log_deriv_zeta(Sigma::Trivial, Complex64::new(lambda, 0.0), &opts.zeta)?;
    let zeta_side = z.value.re / (2.0 * lambda);
    Ok(ResolventTrace {
        lambda,
        q: TraceResult {
            side: Side::ResolventQ,
            value,
            tail,
            error,
            truncation: Truncation::Domain {
                radius: opts.kernel.domain.radius,
                tail_cut: cut,
                evaluations,
            },
        },
        zeta_side,
        zeta_tail: z.tail_bound / (2.0 * lambda),
        t5_defect: (value - zeta_side).abs() / value.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_lambda_outside_convergence() {
        let g = SchottkyData::cylinder(2.0).unwrap();
        let e = ZetaEngine::for_group(&g, 8).unwrap();
        let err = resolvent_regularized_trace(&g, &e, 0.0, &ResolventOptions::default()).unwrap_err();
        assert!(matches!(err, TraceError::RegimeViolation(_)));
    }
}
