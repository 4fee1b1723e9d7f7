//! One function per subcommand. Each returns its records in a fixed order;
//! printing and exit codes are handled by the caller.

use crate::args::{
    ClassesArgs, DeltaArgs, LGammaArgs, ResolventArgs, TraceArgs, ZerosArgs, ZetaEvalArgs,
};
use crate::cache::Cache;
use crate::record::{Quantity, ResultRecord};
use crate::CliError;
use num_complex::Complex64;
use schottky_core::geom::{GroupSpec, GroupTemplate, SchottkyData, ValidationReport, Word};
use schottky_core::trace::{
    discrete_term_bound, geometric_side, kernel_difference_trace, resolvent_regularized_trace,
    spectral_side, KernelTraceOptions, RadialTestFunction, ResolventOptions, SpectralOptions,
    TraceResult,
};
use schottky_core::zeta::{
    isolating_radius, Method, Rect, ZeroSearchOptions, ZetaEngine, ZetaOptions,
};
use schottky_core::{Error, TraceError};
use std::path::Path;
use std::time::Instant;

/// Validated group, the outcome of validation, and the cache in use.
pub struct Context {
    pub group: Result<SchottkyData, Error>,
    pub report: Option<ValidationReport>,
    pub spec_hash: String,
    pub cache: Cache,
}

impl Context {
    pub fn load(path: &Path, cache: Cache) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::input("--group", format!("cannot read {}: {e}", path.display()))
        })?;
        let spec = GroupSpec::from_json(&text)
            .map_err(|e| CliError::input("--group", format!("{}: {e}", path.display())))?;
        let spec_hash = crate::digest(text.as_bytes());
        let (group, report) = match schottky_core::geom::build_schottky(&spec) {
            Ok((g, r)) => (Ok(g), Some(r)),
            Err(e) => (Err(Error::from(e)), None),
        };
        Ok(Self {
            group,
            report,
            spec_hash,
            cache,
        })
    }

    pub fn group(&self) -> Result<&SchottkyData, CliError> {
        self.group
            .as_ref()
            .map_err(|e| CliError::input("--group", format!("group failed validation: {e}")))
    }

    pub fn hash(&self) -> String {
        match &self.group {
            Ok(g) => g.content_hash().to_string(),
            Err(_) => self.spec_hash.clone(),
        }
    }

    pub fn engine(&self, n_max: usize) -> Result<ZetaEngine, CliError> {
        if n_max == 0 {
            return Err(CliError::input("--n-max", "must be at least 1".into()));
        }
        let group = self.group()?;
        let (table, status) = self
            .cache
            .class_table(group, n_max)
            .map_err(|e| CliError::module("--n-max", e.into()))?;
        eprintln!("cache {}: classes n_max={n_max}", status.as_str());
        ZetaEngine::new(group, &table).map_err(|e| CliError::module("--n-max", e.into()))
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed().as_secs_f64())
}

fn finish(mut r: ResultRecord, wall: f64) -> ResultRecord {
    r.wall_time_s = wall;
    r
}

/// Defect that stays comparable when either value is not finite.
pub(crate) fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm() / b.norm();
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

pub fn group_validate(ctx: &Context) -> Vec<ResultRecord> {
    let (rec, wall) = timed(|| {
        let mut r = ResultRecord::new(&ctx.hash(), "group-validate");
        match &ctx.group {
            Ok(g) => {
                let report = ctx.report.as_ref().expect("a built group has a report");
                r = r.input("rank", g.rank());
                for c in &report.checks {
                    r.push(Quantity {
                        passed: Some(c.passed),
                        ..Quantity::exact(format!("check:{}", c.name), f64::from(u8::from(c.passed)))
                    });
                }
                r.push(Quantity::real("min_generator_length", g.min_generator_length(), 1e-12));
            }
            Err(e) => {
                r.push(Quantity {
                    passed: Some(false),
                    ..Quantity::exact("check:schottky", 0.0)
                });
                r.note = Some(e.to_string());
            }
        }
        r
    });
    vec![finish(rec, wall)]
}

fn word_string(w: &[i32]) -> String {
    Word::new(w.to_vec()).map(|w| w.to_string()).unwrap_or_default()
}

pub fn classes(ctx: &Context, a: &ClassesArgs) -> Result<Vec<ResultRecord>, CliError> {
    if a.n_max == 0 {
        return Err(CliError::input("--n-max", "must be at least 1".into()));
    }
    let group = ctx.group()?;
    let (res, wall) = timed(|| ctx.cache.class_table(group, a.n_max));
    let (table, status) = res.map_err(|e| CliError::module("--n-max", e.into()))?;
    eprintln!("cache {}: classes n_max={}", status.as_str(), a.n_max);
    let mut out = Vec::new();
    let mut r = ResultRecord::new(&ctx.hash(), "classes").input("n_max", a.n_max);
    r.push(Quantity::exact("classes", table.len() as f64));
    r.push(Quantity::exact("primitive", table.primitive().count() as f64));
    for n in 1..=table.n_max {
        r.push(Quantity::exact(format!("classes_len_{n}"), table.counts[n] as f64));
    }
    if let Some(shortest) = table.records.first() {
        r.push(Quantity::real("shortest_length", shortest.length, 1e-12 * shortest.length));
    }
    out.push(finish(r, wall));
    if a.list {
        for c in &table.records {
            let mut r = ResultRecord::new(&ctx.hash(), "classes")
                .input("n_max", a.n_max)
                .input("word", word_string(&c.canonical_word));
            r.push(Quantity::real("length", c.length, 1e-12 * c.length));
            r.push(Quantity::real("trace", c.trace, 1e-12 * c.trace.abs()));
            r.push(Quantity::exact("power", c.power as f64));
            r.push(Quantity::exact("sign", f64::from(c.sign)));
            out.push(r);
        }
    }
    Ok(out)
}

pub fn zeta_eval(ctx: &Context, a: &ZetaEvalArgs) -> Result<Vec<ResultRecord>, CliError> {
    let engine = ctx.engine(a.table.n_max)?;
    let mut out = Vec::new();
    for &lambda in &a.lambda {
        let (res, wall) = timed(|| match a.method {
            Method::Product => engine.zeta_product(a.table.sigma, lambda, &ZetaOptions::default()),
            Method::Determinant => engine.zeta_determinant(a.table.sigma, lambda, a.order),
        });
        let z = res.map_err(|e| CliError::module("--lambda", e.into()))?;
        // the product bound is on log Z, hence relative
        let error = match a.method {
            Method::Product => z.tail_bound * z.value.norm(),
            Method::Determinant => z.tail_bound,
        };
        let mut r = ResultRecord::new(&ctx.hash(), "zeta-eval")
            .input("lambda", lambda)
            .input("sigma", a.table.sigma)
            .input("method", a.method)
            .input("truncation", z.truncation);
        r.push(Quantity::complex("zeta", z.value, error));
        out.push(finish(r, wall));
    }
    Ok(out)
}

pub fn zeta_zeros(ctx: &Context, a: &ZerosArgs) -> Result<Vec<ResultRecord>, CliError> {
    let [re_min, re_max, im_min, im_max] = a.rect[..] else {
        return Err(CliError::input("--rect", "expects re_min,re_max,im_min,im_max".into()));
    };
    if !(re_min < re_max && im_min < im_max) {
        return Err(CliError::input("--rect", "empty rectangle".into()));
    }
    if a.nx == 0 || a.ny == 0 {
        return Err(CliError::input("--nx/--ny", "grid must be non-empty".into()));
    }
    let engine = ctx.engine(a.table.n_max)?;
    let rect = Rect::new(re_min, re_max, im_min, im_max);
    let opts = ZeroSearchOptions {
        nx: a.nx,
        ny: a.ny,
        order: a.order,
        ..ZeroSearchOptions::default()
    };
    let (search, wall) = timed(|| engine.zero_search(a.table.sigma, rect, &opts));
    let search = search.map_err(|e| CliError::module("--rect/--nx/--ny/--order", e.into()))?;

    let base = |name: &str| {
        ResultRecord::new(&ctx.hash(), name)
            .input("sigma", a.table.sigma)
            .input("rect", &a.rect)
            .input("order", a.order)
            .input("n_max", a.table.n_max)
    };
    let mut out = Vec::new();
    let mut summary = base("zeta-zeros");
    summary.push(Quantity::exact("zeros", search.zeros.len() as f64));
    summary.push(Quantity::exact("total_winding", search.total_winding as f64));
    let counted: i64 = search.zeros.iter().map(|z| i64::from(z.order)).sum();
    summary.push(Quantity::check(
        "winding_mismatch",
        (search.total_winding - counted).unsigned_abs() as f64,
        0.0,
        0.0,
    ));
    out.push(finish(summary, wall));
    for z in &search.zeros {
        let mut r = base("zeta-zeros");
        r.push(Quantity::complex("mu", z.location, opts.tol));
        r.push(Quantity::exact("order", f64::from(z.order)));
        r.push(Quantity::real("residual", z.residual, 0.0));
        out.push(r);
    }
    if a.residues > 0 {
        let locations: Vec<Complex64> = search.zeros.iter().map(|z| z.location).collect();
        for mu in smallest(&locations, a.residues) {
            let radius = isolating_radius(mu, &locations);
            let (check, wall) = timed(|| engine.residue_check(a.table.sigma, mu, radius, a.order));
            let c = check.map_err(|e| CliError::module("--order", e.into()))?;
            let mut r = base("zeta-residue").input("mu", mu).input("radius", radius);
            r.push(Quantity::complex("residue", c.residue, c.quadrature_error()));
            r.push(Quantity::check("integer_defect", c.defect, c.quadrature_error(), 1e-3));
            r.push(Quantity::exact("ord_mu", c.order_at_mu as f64));
            r.push(Quantity::exact("ord_minus_mu", c.order_at_minus_mu as f64));
            r.push(Quantity::check(
                "order_mismatch",
                (c.nearest_integer - c.order_difference()).unsigned_abs() as f64,
                0.0,
                0.0,
            ));
            out.push(finish(r, wall));
        }
    }
    Ok(out)
}

/// The `k` smallest-modulus points, extended by any ties at the cutoff.
pub fn smallest(points: &[Complex64], k: usize) -> Vec<Complex64> {
    let mut v = points.to_vec();
    v.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
    if v.len() <= k {
        return v;
    }
    let cutoff = v[k - 1].norm();
    let keep = v.iter().take_while(|z| z.norm() <= cutoff * (1.0 + 1e-9)).count();
    v.truncate(keep.max(k));
    v
}

pub fn delta(ctx: &Context, a: &DeltaArgs) -> Result<Vec<ResultRecord>, CliError> {
    if !(a.tol > 0.0) {
        return Err(CliError::input("--tol", "must be positive".into()));
    }
    let engine = ctx.engine(a.n_max)?;
    let (res, wall) = timed(|| -> Result<_, Error> {
        let ce = engine.critical_exponent()?;
        let p = engine.poincare_exponent(a.n_max)?;
        Ok((ce, p))
    });
    let (ce, p) = res.map_err(|e| CliError::module("--n-max", e))?;
    let mut r = ResultRecord::new(&ctx.hash(), "delta")
        .input("n_max", a.n_max)
        .input("order", ce.order);
    r.push(Quantity::real("delta", ce.delta, 1e-12));
    r.push(Quantity::real("delta_gamma", ce.delta_gamma, 1e-12));
    r.push(Quantity::exact("multiplicity", f64::from(ce.multiplicity)));
    r.push(Quantity::real("poincare_exponent", p, (p - ce.delta).abs()));
    r.push(Quantity::check("poincare_gap", (p - ce.delta).abs(), 1e-12, a.tol));
    Ok(vec![finish(r, wall)])
}

pub fn l_gamma(ctx: &Context, a: &LGammaArgs) -> Result<Vec<ResultRecord>, CliError> {
    let engine = ctx.engine(a.table.n_max)?;
    let mut out = Vec::new();
    for &lambda in &a.lambda {
        let (v, wall) = timed(|| engine.l_gamma(a.table.sigma, lambda, a.method, a.order));
        let v = v.map_err(|e| CliError::module("--lambda", e.into()))?;
        let mut r = ResultRecord::new(&ctx.hash(), "l-gamma")
            .input("lambda", lambda)
            .input("sigma", a.table.sigma)
            .input("method", a.method)
            .input("order", a.order);
        r.push(Quantity::complex("l_gamma", v.value, v.error));
        out.push(finish(r, wall));
    }
    Ok(out)
}

fn push_side(r: &mut ResultRecord, s: &TraceResult) {
    r.push(Quantity::real(s.side.to_string(), s.value, s.tail + s.error));
}

fn kernel_options(radius: f64, tol: f64) -> KernelTraceOptions {
    let mut k = KernelTraceOptions::default();
    k.domain.radius = radius;
    k.domain.tail_tol = tol;
    k
}

fn check_positive(flag: &'static str, xs: &[f64]) -> Result<(), CliError> {
    if xs.is_empty() {
        return Err(CliError::input(flag, "needs at least one value".into()));
    }
    if let Some(x) = xs.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(CliError::input(flag, format!("values must be positive, got {x}")));
    }
    Ok(())
}

pub fn trace_compare(ctx: &Context, a: &TraceArgs) -> Result<Vec<ResultRecord>, CliError> {
    check_positive("--t", &a.t)?;
    check_positive("--tol", &[a.tol])?;
    check_positive("--radius", &[a.radius])?;
    let engine = ctx.engine(a.n_max)?;
    let group = ctx.group()?;
    let mut out = Vec::new();
    for &t in &a.t {
        let (rec, wall) = timed(|| -> Result<ResultRecord, CliError> {
            let f = RadialTestFunction::heat(t).map_err(|e| CliError::module("--t", e.into()))?;
            let geo = geometric_side(&engine, &f).map_err(|e| CliError::module("--n-max", e.into()))?;
            let kd = kernel_difference_trace(group, &f, &kernel_options(a.radius, a.tol))
                .map_err(|e| CliError::module("--radius", e.into()))?;
            let mut r = ResultRecord::new(&ctx.hash(), "trace-compare")
                .input("t", t)
                .input("n_max", a.n_max)
                .input("radius", a.radius);
            push_side(&mut r, &geo);
            push_side(&mut r, &kd);
            let bound = (geo.tail + kd.tail + kd.error) / geo.value.abs();
            r.push(Quantity::check("kernel_difference_defect", geo.relative_defect(&kd), bound, a.tol));
            let spectral = SpectralOptions {
                order: engine.default_order(),
                ..SpectralOptions::default()
            };
            match spectral_side(&engine, &f, &spectral) {
                Ok(sp) => {
                    push_side(&mut r, &sp);
                    let bound = (geo.tail + sp.tail + sp.error) / geo.value.abs();
                    r.push(Quantity::check("spectral_defect", geo.relative_defect(&sp), bound, a.tol));
                    r.push(Quantity::real(
                        "discrete_term_bound",
                        discrete_term_bound(&geo, &sp, &f),
                        (geo.tail + sp.tail + sp.error) / f.h(0.0),
                    ));
                }
                Err(TraceError::RegimeViolation(msg)) => r.note = Some(format!("spectral side skipped: {msg}")),
                Err(e) => return Err(CliError::module("--n-max", e.into())),
            }
            Ok(r)
        });
        out.push(finish(rec?, wall));
    }
    Ok(out)
}

pub fn resolvent_t5(ctx: &Context, a: &ResolventArgs) -> Result<Vec<ResultRecord>, CliError> {
    check_positive("--lambda", &a.lambda)?;
    check_positive("--tol", &[a.tol])?;
    check_positive("--radius", &[a.radius])?;
    let engine = ctx.engine(a.n_max)?;
    let group = ctx.group()?;
    let opts = ResolventOptions {
        kernel: kernel_options(a.radius, a.tol),
        ..ResolventOptions::default()
    };
    let mut out = Vec::new();
    for &lambda in &a.lambda {
        let (res, wall) = timed(|| resolvent_regularized_trace(group, &engine, lambda, &opts));
        let q = res.map_err(|e| CliError::module("--lambda/--radius", e.into()))?;
        let mut r = ResultRecord::new(&ctx.hash(), "resolvent-t5")
            .input("lambda", lambda)
            .input("n_max", a.n_max)
            .input("radius", a.radius);
        push_side(&mut r, &q.q);
        r.push(Quantity::real("zeta_side", q.zeta_side, q.zeta_tail));
        let bound = (q.q.tail + q.q.error + q.zeta_tail) / q.q.value.abs();
        r.push(Quantity::check("t5_defect", q.t5_defect, bound, a.tol));
        out.push(finish(r, wall));
    }
    Ok(out)
}

/// Direct product `Π_k (1 − e^{−(λ + ½ + k)ℓ})²` for a cylinder of length `ℓ`.
pub fn cylinder_closed_form(length: f64, lambda: Complex64) -> Complex64 {
    let s = lambda + 0.5;
    let mut z = Complex64::new(1.0, 0.0);
    let mut k = 0.0;
    loop {
        let q = (-(s + k) * length).exp();
        z *= (1.0 - q) * (1.0 - q);
        if q.norm() < 1e-18 {
            return z;
        }
        k += 1.0;
    }
}

/// Cylinder length when the group file uses the cylinder template.
pub fn cylinder_length(spec: &GroupSpec) -> Option<f64> {
    match &spec.template {
        Some(GroupTemplate::Cylinder { length }) => length.parse().ok(),
        _ => None,
    }
}
