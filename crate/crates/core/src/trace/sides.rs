//! Geometric, kernel-difference and spectral sides of the trace identity.

use super::kernel::{ln_kernel, TabulatedKernel};
use super::orbital;
use super::RadialTestFunction;
use crate::error::{GeomError, TraceError};
use crate::geom::classes::cyclically_reduced_count;
use crate::geom::{domain_quadrature, orbit_sum, DomainOptions, SchottkyData};
use crate::numerics::NeumaierSum;
use crate::parallel;
use crate::zeta::{Method, Sigma, ZetaEngine};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Geometric,
    KernelDifference,
    Spectral,
    ResolventQ,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Geometric => "geometric",
            Side::KernelDifference => "kernel_difference",
            Side::Spectral => "spectral",
            Side::ResolventQ => "resolvent_q",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Truncation {
    Classes {
        n_max: usize,
    },
    Domain {
        radius: f64,
        tail_cut: f64,
        evaluations: usize,
    },
    Spectral {
        xi_max: f64,
        step: f64,
        order: usize,
        method: Method,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceResult {
    pub side: Side,
    pub value: f64,
    /// Bound on the truncated remainder.
    pub tail: f64,
    /// Quadrature error estimate.
    pub error: f64,
    pub truncation: Truncation,
}

impl TraceResult {
    /// `|a − b| / |a|`.
    pub fn relative_defect(&self, other: &TraceResult) -> f64 {
        (self.value - other.value).abs() / self.value.abs()
    }
}

/// `Σ_c ℓ₀(c) θ(ℓ_c)` over every class of the engine's table.
pub fn geometric_side(engine: &ZetaEngine, f: &RadialTestFunction) -> Result<TraceResult, TraceError> {
    let shells: Vec<f64> = parallel::map_ordered(&engine.shells, |sh| {
        let mut acc = NeumaierSum::new();
        for (l, l0) in sh.lengths.iter().zip(&sh.primitive_lengths) {
            acc.add(l0 * orbital::closed(*l, f));
        }
        acc.value()
    });
    let mut acc = NeumaierSum::new();
    for v in shells {
        acc.add(v);
    }
    Ok(TraceResult {
        side: Side::Geometric,
        value: acc.value(),
        tail: class_tail(engine, f),
        error: 0.0,
        truncation: Truncation::Classes {
            n_max: engine.n_max(),
        },
    })
}

/// `Σ_{n > n_max} CR(n) · c_max n · θ(c_min n)`; `θ` is decreasing in `ℓ`.
fn class_tail(engine: &ZetaEngine, f: &RadialTestFunction) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let (c_min, c_max) = engine.per_letter();
    let mut total = 0.0;
    for n in engine.n_max() + 1..engine.n_max() + 10_000 {
        let x = n as f64;
        let term = cyclically_reduced_count(engine.rank(), n) * c_max * x * orbital::closed(c_min * x, f);
        if !term.is_finite() {
            return f64::INFINITY;
        }
        total += term;
        if term <= 1e-30 * total || term == 0.0 {
            break;
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelTraceOptions {
    pub domain: DomainOptions,
    /// Orbit elements with `k(d) < cut_rel · k(ℓ_min)` are dropped.
    pub cut_rel: f64,
}

impl Default for KernelTraceOptions {
    fn default() -> Self {
        Self {
            domain: DomainOptions {
                radius: 12.0,
                ..DomainOptions::default()
            },
            cut_rel: 1e-14,
        }
    }
}

/// Smallest grid distance beyond `start` where `ln k` has dropped by
/// `−ln cut_rel`.
fn tail_cut(f: &RadialTestFunction, start: f64, cut_rel: f64) -> Result<f64, TraceError> {
    let top = ln_kernel(f.kind, start)?;
    let target = top + cut_rel.ln();
    let mut d = start;
    while ln_kernel(f.kind, d)? > target {
        d += 0.25;
        if d > start + 2000.0 {
            return Err(TraceError::InvalidTestFunction(
                "kernel does not decay".into(),
            ));
        }
    }
    Ok(d)
}

/// `∫_F Σ_{γ≠1} k(d(x, γx)) dA(x)` over the fundamental domain.
pub fn kernel_difference_trace(
    group: &SchottkyData,
    f: &RadialTestFunction,
    opts: &KernelTraceOptions,
) -> Result<TraceResult, TraceError> {
    let (value, tail, error, cut, evaluations) = integrate_orbit_sums(group, f, opts)?;
    Ok(TraceResult {
        side: Side::KernelDifference,
        value,
        tail,
        error,
        truncation: Truncation::Domain {
            radius: opts.domain.radius,
            tail_cut: cut,
            evaluations,
        },
    })
}

pub(crate) fn integrate_orbit_sums(
    group: &SchottkyData,
    f: &RadialTestFunction,
    opts: &KernelTraceOptions,
) -> Result<(f64, f64, f64, f64, usize), TraceError> {
    if f.is_zero() {
        return Ok((0.0, 0.0, 0.0, 0.0, 0));
    }
    if !(opts.cut_rel > 0.0 && opts.cut_rel < 1.0) {
        return Err(TraceError::InvalidTestFunction(format!(
            "cut_rel must lie in (0, 1), got {}",
            opts.cut_rel
        )));
    }
    let shortest = group.min_generator_length();
    let cut = tail_cut(f, shortest, opts.cut_rel)?;
    let table = TabulatedKernel::new(*f, 0.5 * shortest, cut)?;
    let kernel = |d: f64| table.eval(d);
    let failure: OnceLock<GeomError> = OnceLock::new();
    let integrand = |x: Complex64| match orbit_sum(group, x, &kernel, cut) {
        Ok(s) => s.value,
        Err(e) => {
            let _ = failure.set(e);
            0.0
        }
    };
    let dom = domain_quadrature(group, &integrand, opts.domain)?;
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    if !dom.value.is_finite() {
        return Err(TraceError::QuadratureStall {
            value: dom.value,
            error: dom.error,
        });
    }
    // dropped orbit terms are below cut_rel · k(ℓ_min) on an area of at most
    // 2π(cosh R − 1) < π e^R
    let k0 = super::kernel::kernel_eval(f, shortest)?;
    let tail = dom.tail + opts.cut_rel * k0 * PI * opts.domain.radius.exp();
    Ok((dom.value, tail, dom.error, cut, dom.evaluations))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralOptions {
    /// Upper limit of `|ξ|`; chosen from the decay of `h` when absent.
    pub xi_max: Option<f64>,
    pub step: f64,
    pub order: usize,
    pub method: Method,
    /// Largest admissible `tail / |value|`.
    pub tail_tol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            xi_max: None,
            step: 0.05,
            order: 12,
            method: Method::Determinant,
            tail_tol: 1e-8,
        }
    }
}

/// `(1/4π) ∫_ℝ L_Γ(iξ) h(ξ) dξ` for the trivial character. Requires
/// `δ_Γ < 0`, where no discrete terms contribute.
pub fn spectral_side(
    engine: &ZetaEngine,
    f: &RadialTestFunction,
    opts: &SpectralOptions,
) -> Result<TraceResult, TraceError> {
    let ce = engine.critical_exponent()?;
    if ce.delta_gamma >= 0.0 {
        return Err(TraceError::RegimeViolation(format!(
            "spectral side needs δ_Γ < 0, got δ_Γ = {}",
            ce.delta_gamma
        )));
    }
    if !(opts.step > 0.0) {
        return Err(TraceError::InvalidTestFunction(format!(
            "ξ step must be positive, got {}",
            opts.step
        )));
    }
    let mut xi_max = match (opts.xi_max, f.kind) {
        (Some(x), _) => x,
        (None, super::TestKind::Heat { t }) => (40.0 / t).sqrt(),
        (None, super::TestKind::Resolvent { lambda }) => 40.0 * lambda,
    };
    if f.is_zero() {
        return Ok(TraceResult {
            side: Side::Spectral,
            value: 0.0,
            tail: 0.0,
            error: 0.0,
            truncation: spectral_truncation(xi_max, opts),
        });
    }
    // |L(iξ)| ≤ 2 Σ ℓ₀ e^{−ℓ/2} / (1 − e^{−ℓ}) on the whole axis
    let (d_half, d_tail) = engine.log_deriv_unchecked(Sigma::Trivial, Complex64::new(0.0, 0.0));
    let l_bound = 2.0 * (d_half.re + d_tail);
    let scale = 2.0 / (4.0 * PI);
    let tail_at = |x: f64| scale * l_bound * f.h_tail(x);

    // without an explicit ξ_max the range grows until the tail bound fits
    for _ in 0..4 {
        let (fine, coarse, eval_error) = axis_integral(engine, f, xi_max, opts)?;
        let value = scale * fine;
        let tail = tail_at(xi_max);
        let allowed = opts.tail_tol * value.abs();
        if tail <= allowed {
            return Ok(TraceResult {
                side: Side::Spectral,
                value,
                tail,
                error: scale * ((fine - coarse).abs() + eval_error),
                truncation: spectral_truncation(xi_max, opts),
            });
        }
        let limit = 64.0 * xi_max;
        match (opts.xi_max, (1..=1000).map(|k| xi_max + 0.25 * k as f64).find(|&x| tail_at(x) <= 0.5 * allowed)) {
            (None, Some(x)) if x <= limit => xi_max = x,
            _ => {
                return Err(TraceError::TailTooLarge {
                    tail,
                    tolerance: allowed,
                })
            }
        }
    }
    Err(TraceError::TailTooLarge {
        tail: tail_at(xi_max),
        tolerance: f64::NAN,
    })
}

fn spectral_truncation(xi_max: f64, opts: &SpectralOptions) -> Truncation {
    Truncation::Spectral {
        xi_max,
        step: opts.step,
        order: opts.order,
        method: opts.method,
    }
}

/// Trapezoid sums of `∫_0^X L(iξ) h(ξ) dξ` at steps `h` and `2h`, plus the
/// accumulated evaluation error of `L`.
fn axis_integral(
    engine: &ZetaEngine,
    f: &RadialTestFunction,
    xi_max: f64,
    opts: &SpectralOptions,
) -> Result<(f64, f64, f64), TraceError> {
    let mut steps = (xi_max / opts.step).ceil() as usize;
    steps += steps % 2;
    let h = xi_max / steps as f64;
    let samples = parallel::map_range(steps + 1, |j| {
        let xi = h * j as f64;
        engine
            .l_gamma(Sigma::Trivial, Complex64::new(0.0, xi), opts.method, opts.order)
            .map(|l| (l.value.re * f.h(xi), l.error * f.h(xi)))
    });
    let samples: Vec<(f64, f64)> = samples.into_iter().collect::<Result<_, _>>()?;
    let trapezoid = |stride: usize| {
        let mut acc = NeumaierSum::new();
        let last = steps / stride;
        for i in 0..=last {
            let w = if i == 0 || i == last { 0.5 } else { 1.0 };
            acc.add(w * samples[i * stride].0);
        }
        acc.value() * h * stride as f64
    };
    let eval_error: f64 = samples.iter().map(|s| s.1).sum::<f64>() * h;
    Ok((trapezoid(1), trapezoid(2), eval_error))
}

/// Residual of the spectral side against the geometric side divided by
/// `h(0)`: an empirical bound on the coefficient of a discrete `h(0)` term.
pub fn discrete_term_bound(geometric: &TraceResult, spectral: &TraceResult, f: &RadialTestFunction) -> f64 {
    (geometric.value - spectral.value).abs() / f.h(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::ZetaEngine;

    fn cylinder_geometric(t: f64) -> f64 {
        // Σ_{m≠0} ℓ g(mℓ) / (2 sinh(|m|ℓ/2)), ℓ = 2
        (1..40)
            .map(|m| {
                let u = 2.0 * m as f64;
                2.0 * 2.0 * (-t / 4.0).exp() * (-u * u / (4.0 * t)).exp()
                    / ((4.0 * PI * t).sqrt() * 2.0 * (u / 2.0).sinh())
            })
            .sum()
    }

    #[test]
    fn cylinder_geometric_series() {
        let g = SchottkyData::cylinder(2.0).unwrap();
        let e = ZetaEngine::for_group(&g, 12).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let f = RadialTestFunction::heat(t).unwrap();
            let r = geometric_side(&e, &f).unwrap();
            let want = cylinder_geometric(t);
            assert!((r.value - want).abs() < 1e-14 * want, "t={t}");
            assert!(r.tail < 1e-12 * want);
        }
    }

    #[test]
    fn degenerate_function_gives_zero() {
        let g = SchottkyData::cylinder(2.0).unwrap();
        let e = ZetaEngine::for_group(&g, 8).unwrap();
        let f = RadialTestFunction::heat(1.0).unwrap().scaled(0.0).unwrap();
        assert_eq!(geometric_side(&e, &f).unwrap().value, 0.0);
        assert_eq!(spectral_side(&e, &f, &SpectralOptions::default()).unwrap().value, 0.0);
        let k = kernel_difference_trace(&g, &f, &KernelTraceOptions::default()).unwrap();
        assert_eq!(k.value, 0.0);
    }

    #[test]
    fn cylinder_spectral_equals_geometric() {
        let g = SchottkyData::cylinder(2.0).unwrap();
        let e = ZetaEngine::for_group(&g, 12).unwrap();
        let f = RadialTestFunction::heat(1.0).unwrap();
        let s = spectral_side(&e, &f, &SpectralOptions::default()).unwrap();
        let want = cylinder_geometric(1.0);
        assert!((s.value - want).abs() < 1e-9 * want, "{} vs {want}", s.value);
    }
}
