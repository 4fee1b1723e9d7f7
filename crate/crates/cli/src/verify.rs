//! `verify-all`: every check of the laboratory on one group.
//!
//! Rank-one groups satisfy the identities in closed form and are held to
//! the tight tier of tolerances; all other groups to the loose tier.

use crate::args::{ResolventArgs, TableArgs, TraceArgs, VerifyArgs, ZerosArgs};
use crate::commands::{self, cylinder_closed_form, cylinder_length, rel, Context};
use crate::record::{Quantity, ResultRecord};
use crate::CliError;
use num_complex::Complex64;
use schottky_core::geom::classes::projected_records;
use schottky_core::geom::{build_schottky, GroupSpec, GroupTemplate};
use schottky_core::zeta::{Sigma, ZetaEngine, ZetaOptions};
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub closed_form: f64,
    pub continuation: f64,
    pub delta_exact: f64,
    pub poincare: f64,
    pub trace: f64,
    pub functional: f64,
}

pub const TIGHT: Tolerances = Tolerances {
    closed_form: 1e-9,
    continuation: 1e-8,
    delta_exact: 1e-10,
    poincare: 1e-6,
    trace: 1e-6,
    functional: 1e-8,
};

pub const LOOSE: Tolerances = Tolerances {
    trace: 1e-3,
    functional: 1e-6,
    ..TIGHT
};

/// Trace order used by every determinant evaluation here.
pub const ORDER: usize = 12;

/// Largest projected class-table size reached by n_max escalation.
pub const ESCALATION_BUDGET: f64 = 2e6;

/// Twenty points `λ` with `Re λ + ½ ≥ s_min`, where the product is resolved.
pub fn continuation_points(s_min: f64) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(20);
    for a in [0.0, 0.2, 0.4, 0.7] {
        for b in [0.0, 0.5, 1.0, 2.0, 4.0] {
            v.push(Complex64::new(s_min + a - 0.5, b));
        }
    }
    v
}

/// Smallest `s = δ + 0.05k` at which the truncated product meets `opts`.
pub fn resolved_abscissa(engine: &ZetaEngine, delta: f64, opts: &ZetaOptions) -> Option<f64> {
    (1..=60).map(|k| delta + 0.05 * k as f64).find(|&s| {
        engine
            .zeta_product(Sigma::Trivial, Complex64::new(s - 0.5, 0.0), opts)
            .is_ok()
    })
}

/// The same template with every interval radius scaled by `factor`.
pub fn shrunk(spec: &GroupSpec, factor: f64) -> Option<GroupSpec> {
    match &spec.template {
        Some(GroupTemplate::Symmetric {
            rank,
            spacing,
            radius,
        }) => {
            let spacing: f64 = spacing.parse().ok()?;
            let radius: f64 = radius.parse().ok()?;
            Some(GroupSpec::symmetric(*rank, spacing, radius * factor))
        }
        _ => None,
    }
}

struct Builder {
    hash: String,
    records: Vec<ResultRecord>,
}

impl Builder {
    fn record(&mut self, check: &str, f: impl FnOnce(&mut ResultRecord) -> Result<(), CliError>) -> Result<(), CliError> {
        let start = Instant::now();
        let mut r = ResultRecord::new(&self.hash, "verify-all").input("check", check);
        f(&mut r)?;
        r.wall_time_s = start.elapsed().as_secs_f64();
        self.records.push(r);
        Ok(())
    }
}

pub fn verify_all(ctx: &Context, a: &VerifyArgs) -> Result<Vec<ResultRecord>, CliError> {
    let mut records = commands::group_validate(ctx);
    let Ok(group) = ctx.group.as_ref() else {
        return Ok(records);
    };
    let tol = if group.rank() == 1 { TIGHT } else { LOOSE };
    let engine = ctx.engine(a.n_max)?;
    let mut b = Builder {
        hash: ctx.hash(),
        records: Vec::new(),
    };
    let module = |flag| move |e: schottky_core::ZetaError| CliError::module(flag, e.into());
    let delta = engine.critical_exponent().map_err(module("--n-max"))?;

    if let Some(length) = cylinder_length(group.spec()) {
        b.record("zeta_closed_form", |r| {
            let lambda = Complex64::new(0.5, 0.0);
            let z = engine
                .zeta_product(Sigma::Trivial, lambda, &ZetaOptions::default())
                .map_err(module("--n-max"))?;
            let exact = cylinder_closed_form(length, lambda);
            r.push(Quantity::complex("zeta", z.value, z.tail_bound * z.value.norm()));
            r.push(Quantity::complex("closed_form", exact, 1e-16 * exact.norm()));
            r.push(Quantity::check("relative_defect", rel(z.value, exact), z.tail_bound, tol.closed_form));
            Ok(())
        })?;
    }

    b.record("continuation", |r| {
        let opts = ZetaOptions {
            tail_tol: 1e-10,
            ..ZetaOptions::default()
        };
        let s_min = resolved_abscissa(&engine, delta.delta, &opts).ok_or_else(|| {
            CliError::input("--n-max", "class table too short to resolve the product".into())
        })?;
        let mut worst: f64 = 0.0;
        let mut bound: f64 = 0.0;
        for lambda in continuation_points(s_min) {
            let p = engine.zeta_product(Sigma::Trivial, lambda, &opts).map_err(module("--n-max"))?;
            let d = engine
                .zeta_determinant(Sigma::Trivial, lambda, ORDER)
                .map_err(module("--n-max"))?;
            worst = worst.max(rel(d.value, p.value));
            bound = bound.max(p.tail_bound + d.tail_bound / p.value.norm());
        }
        r.push(Quantity::real("s_min", s_min, 0.0));
        r.push(Quantity::exact("points", 20.0));
        r.push(Quantity::check("max_relative_defect", worst, bound, tol.continuation));
        Ok(())
    })?;

    b.record("critical_exponent", |r| {
        let p = engine.poincare_exponent(a.n_max).map_err(module("--n-max"))?;
        r.push(Quantity::real("delta", delta.delta, 1e-12));
        r.push(Quantity::real("poincare_exponent", p, (p - delta.delta).abs()));
        r.push(Quantity::check("poincare_gap", (p - delta.delta).abs(), 1e-12, tol.poincare));
        if cylinder_length(group.spec()).is_some() {
            r.push(Quantity::check("delta_vs_zero", delta.delta.abs(), 1e-12, tol.delta_exact));
        }
        if let Some(spec) = shrunk(group.spec(), 0.8) {
            let g = build_schottky(&spec).map_err(|e| CliError::module("--group", e.into()))?.0;
            let e = ZetaEngine::for_group(&g, a.n_max).map_err(module("--n-max"))?;
            let d2 = e.critical_exponent().map_err(module("--n-max"))?.delta;
            r.push(Quantity::real("delta_shrunk", d2, 1e-12));
            r.push(Quantity {
                passed: Some(d2 < delta.delta),
                ..Quantity::real("delta_decrease", delta.delta - d2, 2e-12)
            });
        }
        Ok(())
    })?;

    let zeros = ZerosArgs {
        table: TableArgs {
            n_max: a.n_max,
            sigma: Sigma::Trivial,
        },
        rect: vec![-0.52, 0.0, -1.2, 1.2],
        nx: 9,
        ny: 15,
        order: ORDER,
        residues: 3,
    };
    b.records.extend(commands::zeta_zeros(ctx, &zeros)?);

    b.record("functional_equation", |r| {
        let points: Vec<Complex64> = if group.rank() == 1 {
            vec![Complex64::new(0.3, 0.0)]
        } else {
            vec![Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.1)]
        };
        // double n_max until the truncation bound is a tenth of the tolerance
        let mut n = a.n_max;
        let mut wider: Option<ZetaEngine> = None;
        let results = loop {
            let e = wider.as_ref().unwrap_or(&engine);
            let results = points
                .iter()
                .map(|&l| e.functional_equation_defect(Sigma::Trivial, l))
                .collect::<Result<Vec<_>, _>>()
                .map_err(module("--n-max"))?;
            let resolved = results
                .iter()
                .all(|fe| fe.tail_bound * fe.ratio.norm() <= 0.1 * tol.functional);
            if resolved || projected_records(group.rank(), 2 * n) > ESCALATION_BUDGET {
                break results;
            }
            n *= 2;
            wider = Some(ctx.engine(n)?);
        };
        r.push(Quantity::exact("n_max_used", n as f64));
        for fe in results {
            let err = fe.quadrature_error + fe.tail_bound * fe.ratio.norm();
            r.push(Quantity::check(
                format!("defect_at_{}", fmt_complex(fe.lambda)),
                fe.defect,
                err,
                tol.functional,
            ));
        }
        Ok(())
    })?;

    if !a.quick {
        let trace = TraceArgs {
            n_max: a.n_max,
            t: vec![0.5, 1.0, 2.0],
            radius: 12.0,
            tol: tol.trace,
        };
        b.records.extend(commands::trace_compare(ctx, &trace)?);
        let resolvent = ResolventArgs {
            n_max: a.n_max,
            lambda: vec![0.75, 1.0],
            radius: 12.0,
            tol: tol.trace,
        };
        b.records.extend(commands::resolvent_t5(ctx, &resolvent)?);
    }

    let mut summary = ResultRecord::new(&ctx.hash(), "verify-all").input("check", "summary");
    let failed = b.records.iter().chain(&records).filter(|r| r.failed()).count();
    summary.push(Quantity::exact("records", (b.records.len() + records.len()) as f64));
    summary.push(Quantity::exact("failed_records", failed as f64));
    records.extend(b.records);
    records.push(summary);
    Ok(records)
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuation_points_lie_right_of_delta() {
        let pts = continuation_points(0.4);
        assert_eq!(pts.len(), 20);
        assert!(pts.iter().all(|l| l.re + 0.5 >= 0.4));
    }

    #[test]
    fn shrinking_scales_the_radius_only() {
        let spec = GroupSpec::symmetric(2, 2.0, 0.1);
        let small = shrunk(&spec, 0.8).unwrap();
        assert_eq!(small, GroupSpec::symmetric(2, 2.0, 0.1 * 0.8));
        assert!(shrunk(&GroupSpec::cylinder(2.0), 0.8).is_none());
    }

    #[test]
    fn tiers() {
        assert!(TIGHT.trace < LOOSE.trace);
        assert_eq!(TIGHT.closed_form, LOOSE.closed_form);
    }
}
