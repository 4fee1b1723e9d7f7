//! Resonances: zeros of `λ ↦ d_N(λ + ρ)` by the argument principle, and
//! contour residues of `L_Γ`.

use super::lgamma::Method;
use super::{Sigma, ZetaEngine};
use crate::conventions::to_determinant_variable;
use crate::error::ZetaError;
use crate::numerics::Jet;
use crate::parallel;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

/// Below this modulus a contour sample is taken to sit on a zero.
pub const CONTOUR_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    fn diameter(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    fn grown(&self, f: f64) -> Rect {
        let dx = f * (self.re_max - self.re_min);
        let dy = f * (self.im_max - self.im_min);
        Rect::new(self.re_min - dx, self.re_max + dx, self.im_min - dy, self.im_max + dy)
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroSearchOptions {
    /// Grid cells along `Re λ`.
    pub nx: usize,
    /// Grid cells along `Im λ`; odd keeps the real axis inside a cell row.
    pub ny: usize,
    /// Newton step size at which a zero is accepted.
    pub tol: f64,
    /// Trace order `N`.
    pub order: usize,
    pub max_depth: u32,
    pub seed: u64,
    pub max_retries: u32,
}

impl Default for ZeroSearchOptions {
    fn default() -> Self {
        Self {
            nx: 8,
            ny: 9,
            tol: 1e-12,
            order: 12,
            max_depth: 10,
            seed: 0x5eed,
            max_retries: 4,
        }
    }
}

/// A zero `μ` of the continued zeta function and its argument-principle order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Resonance {
    pub location: Complex64,
    pub order: u32,
    /// `|d_N(μ + ρ)|`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSearch {
    pub rect: Rect,
    pub zeros: Vec<Resonance>,
    /// Winding of `d_N` around the outer boundary.
    pub total_winding: i64,
    /// Grids rebuilt after a contour met a zero.
    pub retries: u32,
}

impl ZeroSearch {
    /// Argument-principle bookkeeping: boundary winding equals the sum of
    /// returned orders.
    pub fn is_consistent(&self) -> bool {
        self.total_winding == self.zeros.iter().map(|z| i64::from(z.order)).sum::<i64>()
    }
}

/// `λ ↦ d_N(λ + ρ)` for one engine, character and order.
struct Det<'a> {
    engine: &'a ZetaEngine,
    sigma: Sigma,
    order: usize,
}

impl Det<'_> {
    fn jet(&self, lambda: Complex64) -> Result<Jet, ZetaError> {
        Ok(self
            .engine
            .determinant(self.sigma, to_determinant_variable(lambda), self.order)?
            .value)
    }

    fn on_contour(&self, lambda: Complex64) -> Result<Complex64, ZetaError> {
        let v = self.jet(lambda)?.value;
        if v.norm() < CONTOUR_FLOOR {
            return Err(ZetaError::ContourThroughZero {
                re: lambda.re,
                im: lambda.im,
                modulus: v.norm(),
            });
        }
        Ok(v)
    }

    /// Continuous change of `arg d` along the segment, refined until
    /// consecutive samples differ by less than π/4.
    fn phase_change(&self, p: Complex64, fp: Complex64, q: Complex64, fq: Complex64, depth: u32) -> Result<f64, ZetaError> {
        let dphi = (fq / fp).arg();
        if dphi.abs() <= FRAC_PI_4 && depth > 0 {
            return Ok(dphi);
        }
        if depth > 48 {
            return Err(ZetaError::WindingUnreliable { winding: dphi / (2.0 * PI) });
        }
        let m = 0.5 * (p + q);
        let fm = self.on_contour(m)?;
        Ok(self.phase_change(p, fp, m, fm, depth + 1)? + self.phase_change(m, fm, q, fq, depth + 1)?)
    }

    fn segment(&self, p: Complex64, q: Complex64) -> Result<f64, ZetaError> {
        let (fp, fq) = (self.on_contour(p)?, self.on_contour(q)?);
        self.phase_change(p, fp, q, fq, 0)
    }

    fn polygon(&self, pts: &[Complex64]) -> Result<i64, ZetaError> {
        let mut total = 0.0;
        for i in 0..pts.len() {
            total += self.segment(pts[i], pts[(i + 1) % pts.len()])?;
        }
        to_winding(total)
    }

    fn circle(&self, center: Complex64, radius: f64) -> Result<i64, ZetaError> {
        let pts: Vec<Complex64> = (0..16)
            .map(|k| center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / 16.0))
            .collect();
        self.polygon(&pts)
    }

    /// Value jet and its rounding floor `1e-14 Σ|c_n|`.
    fn jet_with_floor(&self, lambda: Complex64) -> Result<(Jet, f64), ZetaError> {
        let d = self
            .engine
            .determinant(self.sigma, to_determinant_variable(lambda), self.order)?;
        let floor = 1e-14 * d.coefficients.iter().map(|c| c.value.norm()).sum::<f64>();
        Ok((d.value, floor))
    }

    /// Newton iteration with multiplicity `m`, confined to `cell`. Rounding
    /// splits a multiple zero into a cluster, so iteration also stops at the
    /// noise floor, and a double zero is then polished as a simple zero of
    /// `d′`.
    fn newton(&self, start: Complex64, m: i64, cell: &Rect, tol: f64) -> Result<Option<Complex64>, ZetaError> {
        let fence = cell.grown(0.05);
        let mut z = start;
        let mut converged = false;
        for _ in 0..80 {
            let (j, floor) = self.jet_with_floor(z)?;
            if j.value.norm() <= floor {
                converged = true;
                break;
            }
            if j.d1.norm() == 0.0 {
                return Ok(None);
            }
            let step = j.value / j.d1 * m as f64;
            z -= step;
            if !fence.contains(z) {
                return Ok(None);
            }
            if step.norm() <= tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Ok(None);
        }
        if m == 2 {
            for _ in 0..50 {
                let j = self.jet(z)?;
                if j.d2.norm() == 0.0 {
                    break;
                }
                let step = j.d1 / j.d2;
                z -= step;
                if !fence.contains(z) {
                    return Ok(None);
                }
                if step.norm() <= tol {
                    break;
                }
            }
        }
        Ok(Some(z))
    }
}

fn to_winding(total_phase: f64) -> Result<i64, ZetaError> {
    let w = total_phase / (2.0 * PI);
    let r = w.round();
    if (w - r).abs() > 0.1 {
        return Err(ZetaError::WindingUnreliable { winding: w });
    }
    Ok(r as i64)
}

impl ZetaEngine {
    /// Zeros of `d_N(λ + ρ)` inside `rect`, each with its order.
    pub fn zero_search(&self, sigma: Sigma, rect: Rect, opts: &ZeroSearchOptions) -> Result<ZeroSearch, ZetaError> {
        if !(rect.re_min < rect.re_max && rect.im_min < rect.im_max) || opts.nx == 0 || opts.ny == 0 {
            return Err(ZetaError::Geometry(crate::error::GeomError::InvalidSpec(
                "zero-search rectangle and grid must be non-empty".into(),
            )));
        }
        let det = Det {
            engine: self,
            sigma,
            order: opts.order,
        };
        for c in rect.corners() {
            self.determinant(sigma, to_determinant_variable(c), opts.order)?
                .check_decay()?;
        }
        let mut rng = StdRng::seed_from_u64(opts.seed);
        let mut retries = 0;
        loop {
            let jitter = retries > 0;
            match self.search_grid(&det, rect, opts, jitter.then_some(&mut rng)) {
                Err(ZetaError::ContourThroughZero { .. }) if retries < opts.max_retries => {
                    retries += 1;
                }
                Err(e) => return Err(e),
                Ok((mut zeros, total_winding)) => {
                    zeros.sort_by(|a, b| {
                        a.location
                            .im
                            .total_cmp(&b.location.im)
                            .then(a.location.re.total_cmp(&b.location.re))
                    });
                    return Ok(ZeroSearch {
                        rect,
                        zeros,
                        total_winding,
                        retries,
                    });
                }
            }
        }
    }

    fn search_grid(
        &self,
        det: &Det,
        rect: Rect,
        opts: &ZeroSearchOptions,
        rng: Option<&mut StdRng>,
    ) -> Result<(Vec<Resonance>, i64), ZetaError> {
        let (nx, ny) = (opts.nx, opts.ny);
        let hx = (rect.re_max - rect.re_min) / nx as f64;
        let hy = (rect.im_max - rect.im_min) / ny as f64;
        let mut xs: Vec<f64> = (0..=nx).map(|i| rect.re_min + hx * i as f64).collect();
        let mut ys: Vec<f64> = (0..=ny).map(|j| rect.im_min + hy * j as f64).collect();
        xs[nx] = rect.re_max;
        ys[ny] = rect.im_max;
        if let Some(rng) = rng {
            for x in &mut xs[1..nx] {
                *x += hx * rng.gen_range(-0.2..0.2);
            }
            for y in &mut ys[1..ny] {
                *y += hy * rng.gen_range(-0.2..0.2);
            }
        }
        let node = |i: usize, j: usize| Complex64::new(xs[i], ys[j]);
        // horizontal edges (i, j) → (i + 1, j), then vertical (i, j) → (i, j + 1)
        let h_edges: Vec<(usize, usize)> = (0..=ny).flat_map(|j| (0..nx).map(move |i| (i, j))).collect();
        let v_edges: Vec<(usize, usize)> = (0..=nx).flat_map(|i| (0..ny).map(move |j| (i, j))).collect();
        let h: Vec<f64> = parallel::map_ordered(&h_edges, |&(i, j)| det.segment(node(i, j), node(i + 1, j)))
            .into_iter()
            .collect::<Result<_, _>>()?;
        let v: Vec<f64> = parallel::map_ordered(&v_edges, |&(i, j)| det.segment(node(i, j), node(i, j + 1)))
            .into_iter()
            .collect::<Result<_, _>>()?;
        let hi = |i: usize, j: usize| h[j * nx + i];
        let vi = |i: usize, j: usize| v[i * ny + j];

        let mut boundary = 0.0;
        for i in 0..nx {
            boundary += hi(i, 0) - hi(i, ny);
        }
        for j in 0..ny {
            boundary += vi(nx, j) - vi(0, j);
        }
        let total = to_winding(boundary)?;

        let cells: Vec<(Rect, i64)> = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| {
                let phase = hi(i, j) + vi(i + 1, j) - hi(i, j + 1) - vi(i, j);
                to_winding(phase).map(|w| (Rect::new(xs[i], xs[i + 1], ys[j], ys[j + 1]), w))
            })
            .collect::<Result<_, _>>()?;
        let found = parallel::map_ordered(&cells, |&(cell, w)| self.resolve_cell(det, cell, w, opts, 0));
        let mut zeros = Vec::new();
        for f in found {
            zeros.extend(f?);
        }
        Ok((zeros, total))
    }

    fn resolve_cell(
        &self,
        det: &Det,
        cell: Rect,
        winding: i64,
        opts: &ZeroSearchOptions,
        depth: u32,
    ) -> Result<Vec<Resonance>, ZetaError> {
        if winding <= 0 {
            if winding < 0 {
                return Err(ZetaError::WindingUnreliable { winding: winding as f64 });
            }
            return Ok(Vec::new());
        }
        if let Some(z) = det.newton(cell.center(), winding, &cell, opts.tol)? {
            if cell.contains(z) {
                let r = (1e-4f64).min(0.1 * cell.diameter()).max(1e3 * opts.tol);
                if det.circle(z, r)? == winding {
                    return Ok(vec![Resonance {
                        location: z,
                        order: winding as u32,
                        residual: det.jet(z)?.value.norm(),
                    }]);
                }
            }
        }
        if depth >= opts.max_depth {
            return Err(ZetaError::WindingUnreliable { winding: winding as f64 });
        }
        let mut split = 0.5;
        for attempt in 0..=opts.max_retries {
            if attempt > 0 {
                split = 0.5 + 0.08 * ((attempt as f64 * 1.618_033_988_75).fract() - 0.5);
            }
            match self.split_cell(det, cell, split, opts, depth) {
                Err(ZetaError::ContourThroughZero { .. }) if attempt < opts.max_retries => continue,
                other => return other,
            }
        }
        unreachable!("loop returns on its last attempt")
    }

    fn split_cell(
        &self,
        det: &Det,
        cell: Rect,
        split: f64,
        opts: &ZeroSearchOptions,
        depth: u32,
    ) -> Result<Vec<Resonance>, ZetaError> {
        let xm = cell.re_min + split * (cell.re_max - cell.re_min);
        let ym = cell.im_min + split * (cell.im_max - cell.im_min);
        let subs = [
            Rect::new(cell.re_min, xm, cell.im_min, ym),
            Rect::new(xm, cell.re_max, cell.im_min, ym),
            Rect::new(cell.re_min, xm, ym, cell.im_max),
            Rect::new(xm, cell.re_max, ym, cell.im_max),
        ];
        let mut out = Vec::new();
        for sub in subs {
            let w = det.polygon(&sub.corners())?;
            out.extend(self.resolve_cell(det, sub, w, opts, depth + 1)?);
        }
        Ok(out)
    }

    /// Argument-principle order of `Z` at `λ` on a circle of radius `r`.
    pub fn order_at(&self, sigma: Sigma, lambda: Complex64, radius: f64, order: usize) -> Result<i64, ZetaError> {
        Det {
            engine: self,
            sigma,
            order,
        }
        .circle(lambda, radius)
    }

    /// `(1/2πi)∮ L_Γ dλ` on the circle `|λ − μ| = radius` by the determinant
    /// method, with the integer checks.
    pub fn residue_check(&self, sigma: Sigma, mu: Complex64, radius: f64, order: usize) -> Result<ResidueCheck, ZetaError> {
        const NODES: usize = 128;
        let samples: Vec<Complex64> = parallel::map_range(NODES, |j| {
            let e = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / NODES as f64);
            self.l_gamma(sigma, mu + e * radius, Method::Determinant, order)
                .map(|l| l.value * e * radius)
        })
        .into_iter()
        .collect::<Result<_, _>>()?;
        let fine = samples.iter().sum::<Complex64>() / NODES as f64;
        let coarse = samples.iter().step_by(2).sum::<Complex64>() / (NODES / 2) as f64;
        let at_mu = self.order_at(sigma, mu, radius, order)?;
        let at_minus_mu = self.order_at(sigma, -mu, radius, order)?;
        let nearest = fine.re.round();
        Ok(ResidueCheck {
            mu,
            radius,
            residue: fine,
            residue_coarse: coarse,
            nearest_integer: nearest as i64,
            defect: (fine - nearest).norm(),
            order_at_mu: at_mu,
            order_at_minus_mu: at_minus_mu,
        })
    }
}

/// Residue of `L_Γ` at a resonance with the two argument-principle counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidueCheck {
    pub mu: Complex64,
    pub radius: f64,
    /// 128-node trapezoid value.
    pub residue: Complex64,
    /// 64-node value on the same circle.
    pub residue_coarse: Complex64,
    pub nearest_integer: i64,
    /// `|residue − nearest_integer|`.
    pub defect: f64,
    pub order_at_mu: i64,
    pub order_at_minus_mu: i64,
}

impl ResidueCheck {
    /// `ord_μ Z − ord_{−μ} Z`: the residue of `Z′/Z(λ) + Z′/Z(−λ)` at `μ`,
    /// since `λ ↦ Z′/Z(−λ)` has residue `−ord_{−μ}` there.
    pub fn order_difference(&self) -> i64 {
        self.order_at_mu - self.order_at_minus_mu
    }

    pub fn order_sum(&self) -> i64 {
        self.order_at_mu + self.order_at_minus_mu
    }

    pub fn quadrature_error(&self) -> f64 {
        (self.residue - self.residue_coarse).norm()
    }
}

/// Radius isolating `μ` from the other poles of `L_Γ` (the zeros `μ′` and
/// their reflections `−μ′`): a quarter of the nearest distance, at most 0.1.
pub fn isolating_radius(mu: Complex64, zeros: &[Complex64]) -> f64 {
    zeros
        .iter()
        .flat_map(|&z| [z, -z])
        .map(|p| (p - mu).norm())
        .filter(|&d| d > 1e-9)
        .fold(0.4, f64::min)
        * 0.25
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;

    #[test]
    fn cylinder_double_zeros() {
        let (_, e) = fixtures::cylinder(12);
        let rect = Rect::new(-0.8, -0.2, -0.5, 3.5);
        let opts = ZeroSearchOptions {
            nx: 3,
            ny: 9,
            ..ZeroSearchOptions::default()
        };
        let res = e.zero_search(Sigma::Trivial, rect, &opts).unwrap();
        assert!(res.is_consistent());
        let expect = [0.0, PI];
        assert_eq!(res.zeros.len(), expect.len(), "{res:?}");
        for (z, im) in res.zeros.iter().zip(expect) {
            assert_eq!(z.order, 2);
            assert!((z.location - Complex64::new(-0.5, im)).norm() < 1e-7, "{z:?}");
        }
    }

    #[test]
    fn no_zeros_far_right() {
        let (_, e) = fixtures::thin2(8);
        let res = e
            .zero_search(Sigma::Trivial, Rect::new(1.0, 2.0, -1.0, 1.0), &ZeroSearchOptions { order: 8, nx: 2, ny: 3, ..Default::default() })
            .unwrap();
        assert!(res.zeros.is_empty());
        assert_eq!(res.total_winding, 0);
    }

    #[test]
    fn empty_circle_has_zero_residue() {
        let (_, e) = fixtures::cylinder(12);
        let r = e.residue_check(Sigma::Trivial, Complex64::new(0.2, 0.7), 0.1, 12).unwrap();
        assert!(r.residue.norm() < 1e-6);
        assert_eq!(r.order_difference(), 0);
    }

    #[test]
    fn cylinder_residue_at_double_zero() {
        let (_, e) = fixtures::cylinder(12);
        let r = e.residue_check(Sigma::Trivial, Complex64::new(-0.5, 0.0), 0.1, 12).unwrap();
        assert_eq!(r.nearest_integer, 2);
        assert!(r.defect < 1e-6, "{r:?}");
        assert_eq!(r.order_difference(), 2);
    }
}
