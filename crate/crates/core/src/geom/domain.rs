//! Quadrature over the Schottky fundamental domain `F`, the exterior of the
//! `2r` geodesic half-disks.
//!
//! `F` is star-shaped about any interior base point: a geodesic ray meets
//! each boundary geodesic at most once, and the half-disks are convex. In
//! geodesic polar coordinates the domain is therefore `ρ < ρ_exit(θ)`, with
//! `ρ_exit` finite only on the shadows of the intervals. The angular range is
//! split where a shadow starts or ends and where `ρ_exit = R`, so every
//! piece has a smooth radial upper limit.

use super::group::SchottkyData;
use super::hyperbolic::{ArcShadow, PolarFrame};
use crate::error::GeomError;
use crate::numerics::GaussLegendre;
use crate::parallel;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainOptions {
    /// Truncation radius `R` about the base point.
    pub radius: f64,
    /// Radial panels per unit distance.
    pub resolution: f64,
    /// Relative tolerance of the adaptive angular integration.
    pub rel_tol: f64,
    /// Largest admissible `tail / |value|`.
    pub tail_tol: f64,
    pub max_depth: u32,
}

impl Default for DomainOptions {
    fn default() -> Self {
        Self {
            radius: 8.0,
            resolution: 2.0,
            rel_tol: 1e-9,
            tail_tol: 1e-6,
            max_depth: 14,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainIntegral {
    pub value: f64,
    /// Angular refinement error estimate.
    pub error: f64,
    /// Funnel tail beyond `R`: `max_θ |f(R, θ)| · e^R · (open angle)/2`.
    pub tail: f64,
    pub evaluations: usize,
}

const RADIAL_NODES: usize = 12;
const ANGULAR_NODES: usize = 10;

struct Setup<'a, F> {
    frame: PolarFrame,
    shadows: Vec<ArcShadow>,
    radial: GaussLegendre,
    angular: GaussLegendre,
    opts: DomainOptions,
    f: &'a F,
}

/// One angular sample: `∫_0^{min(ρ_exit, R)} f sinh ρ dρ`, the evaluation
/// count, and `|f|` at `R` when the ray reaches it.
#[derive(Clone, Copy, Default)]
struct RaySample {
    value: f64,
    evaluations: usize,
    at_radius: Option<f64>,
}

#[derive(Clone, Copy, Default)]
struct Piece {
    value: f64,
    error: f64,
    evaluations: usize,
    max_at_radius: f64,
}

impl Piece {
    fn merge(self, other: Piece) -> Piece {
        Piece {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
            max_at_radius: self.max_at_radius.max(other.max_at_radius),
        }
    }
}

impl<F: Fn(Complex64) -> f64 + Sync> Setup<'_, F> {
    fn exit(&self, theta: f64) -> f64 {
        self.shadows
            .iter()
            .filter_map(|s| self.frame.exit_distance(s, theta))
            .fold(f64::INFINITY, f64::min)
    }

    fn ray(&self, theta: f64) -> RaySample {
        let exit = self.exit(theta);
        let top = exit.min(self.opts.radius);
        let panels = ((top * self.opts.resolution).ceil() as usize).max(1);
        let value = self.radial.integrate_composite(0.0, top, panels, |rho| {
            (self.f)(self.frame.point(rho, theta)) * rho.sinh()
        });
        let at_radius = (exit >= self.opts.radius)
            .then(|| (self.f)(self.frame.point(self.opts.radius, theta)).abs());
        RaySample {
            value,
            evaluations: panels * self.radial.len() + usize::from(at_radius.is_some()),
            at_radius,
        }
    }

    fn rule(&self, a: f64, b: f64) -> Piece {
        let mut p = Piece::default();
        for (theta, w) in self.angular.mapped(a, b) {
            let s = self.ray(theta);
            p.value += w * s.value;
            p.evaluations += s.evaluations;
            if let Some(m) = s.at_radius {
                p.max_at_radius = p.max_at_radius.max(m);
            }
        }
        p
    }

    fn adapt(&self, a: f64, b: f64, whole: Piece, abs_tol: f64, depth: u32) -> Piece {
        let m = 0.5 * (a + b);
        let (left, right) = parallel::join(|| self.rule(a, m), || self.rule(m, b));
        let halves = left.merge(right);
        let diff = (halves.value - whole.value).abs();
        let evaluations = whole.evaluations + halves.evaluations;
        if diff <= abs_tol || depth >= self.opts.max_depth {
            return Piece {
                value: halves.value,
                error: diff,
                evaluations,
                max_at_radius: halves.max_at_radius,
            };
        }
        let (l, r) = parallel::join(
            || self.adapt(a, m, left, 0.5 * abs_tol, depth + 1),
            || self.adapt(m, b, right, 0.5 * abs_tol, depth + 1),
        );
        let mut out = l.merge(r);
        out.evaluations += whole.evaluations;
        out
    }
}

/// Angular breakpoints in `[0, 2π]`, sorted and deduplicated.
fn breakpoints(frame: &PolarFrame, shadows: &[ArcShadow], radius: f64) -> Vec<f64> {
    let two_pi = 2.0 * PI;
    let mut pts = vec![0.0, two_pi];
    let wrap = |a: f64| a.rem_euclid(two_pi);
    for s in shadows {
        pts.push(wrap(s.center - s.half_width));
        pts.push(wrap(s.center + s.half_width));
        if let Some(h) = frame.angle_within(s, radius) {
            pts.push(wrap(s.center - h));
            pts.push(wrap(s.center + h));
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    pts
}

/// `∫_{F ∩ B(base, R)} f dA` with an empirical funnel tail.
pub fn domain_quadrature<F>(
    group: &SchottkyData,
    f: &F,
    opts: DomainOptions,
) -> Result<DomainIntegral, GeomError>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    if !(opts.radius > 0.0 && opts.resolution > 0.0 && opts.rel_tol > 0.0) {
        return Err(GeomError::InvalidSpec(
            "radius, resolution and tolerance must be positive".into(),
        ));
    }
    let frame = PolarFrame::new(group.base_point())?;
    let shadows: Vec<ArcShadow> = group
        .letters()
        .iter()
        .map(|l| frame.shadow(l.disk.lo, l.disk.hi))
        .collect();
    let setup = Setup {
        frame,
        shadows,
        radial: GaussLegendre::new(RADIAL_NODES),
        angular: GaussLegendre::new(ANGULAR_NODES),
        opts,
        f,
    };
    let pts = breakpoints(&setup.frame, &setup.shadows, opts.radius);
    let segments: Vec<(f64, f64)> = pts.windows(2).map(|w| (w[0], w[1])).collect();

    // coarse pass fixes the absolute tolerance
    let coarse: Vec<Piece> = parallel::map_ordered(&segments, |&(a, b)| setup.rule(a, b));
    let scale: f64 = coarse.iter().map(|p| p.value.abs()).sum();
    let abs_tol = opts.rel_tol * scale.max(f64::MIN_POSITIVE);
    let total_len = 2.0 * PI;
    let pieces: Vec<Piece> = parallel::map_range(segments.len(), |i| {
        let (a, b) = segments[i];
        setup.adapt(a, b, coarse[i], abs_tol * (b - a) / total_len, 0)
    });
    let total = pieces.into_iter().fold(Piece::default(), Piece::merge);

    let open_angle: f64 = segments
        .iter()
        .filter(|(a, b)| setup.exit(0.5 * (a + b)) >= opts.radius)
        .map(|(a, b)| b - a)
        .sum();
    let tail = total.max_at_radius * opts.radius.exp() * 0.5 * open_angle;
    if tail > opts.tail_tol * total.value.abs() && tail > 0.0 {
        return Err(GeomError::TailDominates {
            tail,
            value: total.value,
            tolerance: opts.tail_tol,
        });
    }
    Ok(DomainIntegral {
        value: total.value,
        error: total.error,
        tail,
        evaluations: total.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_integrand() {
        let g = SchottkyData::cylinder(2.0).unwrap();
        let r = domain_quadrature(&g, &|_| 0.0, DomainOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.tail, 0.0);
    }

    #[test]
    fn small_ball_inside_domain_has_disk_area() {
        // radius 0.5 about i stays inside F for the cylinder
        let g = SchottkyData::cylinder(2.0).unwrap();
        let opts = DomainOptions {
            radius: 0.5,
            tail_tol: f64::INFINITY,
            ..DomainOptions::default()
        };
        let r = domain_quadrature(&g, &|_| 1.0, opts).unwrap();
        let exact = 2.0 * PI * (0.5f64.cosh() - 1.0);
        assert!((r.value - exact).abs() < 1e-12 * exact, "{} vs {exact}", r.value);
    }
}
