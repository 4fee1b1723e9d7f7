//! Critical exponent `δ`: largest real zero of the dynamical determinant,
//! cross-checked by the growth rate of Poincaré-type shell sums.

use super::{Sigma, ZetaEngine};
use crate::conventions::shifted_exponent;
use crate::error::ZetaError;
use crate::numerics::ComplexSum;
use num_complex::Complex64;
use serde::Serialize;

/// Largest real zero of `d_N` and its normalised shift `δ_Γ = δ − ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalExponent {
    pub delta: f64,
    pub delta_gamma: f64,
    /// Trace order `N` used.
    pub order: usize,
    /// Multiplicity of the zero (1 for a sign change, 2 for a touching zero).
    pub multiplicity: u32,
    /// `|d_N(δ)|`.
    pub residual: f64,
}

const SCAN_TOP: f64 = 1.0;
const SCAN_BOTTOM: f64 = -0.05;
const SCAN_STEP: f64 = 0.005;

impl ZetaEngine {
    /// Default trace order for real scans.
    pub fn default_order(&self) -> usize {
        self.n_max().min(12)
    }

    /// `δ` at the default order, computed once per engine.
    pub fn critical_exponent(&self) -> Result<CriticalExponent, ZetaError> {
        self.delta
            .get_or_init(|| self.critical_exponent_with(self.default_order(), 1e-13))
            .clone()
    }

    fn det_real(&self, s: f64, order: usize) -> Result<[f64; 3], ZetaError> {
        let d = self.determinant(Sigma::Trivial, Complex64::new(s, 0.0), order)?;
        Ok([d.value.value.re, d.value.d1.re, d.value.d2.re])
    }

    /// Scan `d_N` downward from `s = 1`; the first odd zero (sign change) or
    /// even zero (vanishing local extremum) is refined to `tol`.
    pub fn critical_exponent_with(&self, order: usize, tol: f64) -> Result<CriticalExponent, ZetaError> {
        let steps = ((SCAN_TOP - SCAN_BOTTOM) / SCAN_STEP).round() as usize;
        let grid: Vec<f64> = (0..=steps).map(|i| SCAN_TOP - SCAN_STEP * i as f64).collect();
        let vals = crate::parallel::map_ordered(&grid, |&s| self.det_real(s, order));
        let vals: Vec<[f64; 3]> = vals.into_iter().collect::<Result<_, _>>()?;
        let scale = vals.iter().map(|v| v[0].abs()).fold(0.0, f64::max).max(1e-300);

        for i in 0..steps {
            let (hi, lo) = (grid[i], grid[i + 1]);
            let (fh, fl) = (vals[i], vals[i + 1]);
            if fh[0] == 0.0 {
                return self.finish(hi, order, tol, scale);
            }
            if fh[0].signum() != fl[0].signum() || fl[0] == 0.0 {
                let root = bisect(lo, hi, tol.max(1e-15), |s| Ok(self.det_real(s, order)?[0]))?;
                return self.finish(root, order, tol, scale);
            }
            // interior extremum of d with a tiny value: touching zero
            if fh[1].signum() != fl[1].signum() {
                let crit = bisect(lo, hi, 1e-15, |s| Ok(self.det_real(s, order)?[1]))?;
                let v = self.det_real(crit, order)?;
                if v[0].abs() <= 1e-10 * scale {
                    return self.finish(crit, order, tol, scale);
                }
            }
        }
        Err(ZetaError::NoZeroInBracket {
            lo: SCAN_BOTTOM,
            hi: SCAN_TOP,
        })
    }

    /// Newton polish; a zero where `d′` is negligible is treated as double
    /// and polished as a root of `d′` instead.
    fn finish(&self, s0: f64, order: usize, tol: f64, scale: f64) -> Result<CriticalExponent, ZetaError> {
        let mut s = s0;
        let v = self.det_real(s, order)?;
        let double = v[1].abs() < 1e-4 * v[2].abs() && v[0].abs() <= 1e-10 * scale;
        let k = if double { 1 } else { 0 };
        for _ in 0..60 {
            let v = self.det_real(s, order)?;
            if v[k + 1] == 0.0 {
                break;
            }
            let step = v[k] / v[k + 1];
            s -= step;
            if step.abs() <= tol * 1e-3 {
                break;
            }
        }
        let v = self.det_real(s, order)?;
        Ok(CriticalExponent {
            delta: s,
            delta_gamma: shifted_exponent(s),
            order,
            multiplicity: if double { 2 } else { 1 },
            residual: v[0].abs(),
        })
    }

    /// `A_n(s) = Σ_{|c| = n} ℓ₀ e^{−sℓ}/(1 − e^{−ℓ})`.
    pub fn poincare_shell(&self, n: usize, s: f64) -> f64 {
        let sh = &self.shells[n - 1];
        let mut acc = ComplexSum::new();
        for i in 0..sh.len() {
            acc.add(Complex64::new(
                sh.primitive_lengths[i] * (-s * sh.lengths[i]).exp() * sh.inv_gap[i],
                0.0,
            ));
        }
        acc.value().re
    }

    /// Abscissa where the shell ratio `A_N(s)/A_{N−1}(s)` crosses 1; the
    /// Poincaré series diverges below it.
    pub fn poincare_abscissa(&self, order: usize) -> Result<f64, ZetaError> {
        if order < 2 || order > self.n_max() {
            return Err(ZetaError::TableTooShort {
                order,
                n_max: self.n_max(),
            });
        }
        let f = |s: f64| -> Result<f64, ZetaError> {
            Ok((self.poincare_shell(order, s) / self.poincare_shell(order - 1, s)).ln())
        };
        let (mut lo, mut hi) = (-0.5, 1.0);
        if f(lo)? <= 0.0 || f(hi)? >= 0.0 {
            return Err(ZetaError::NoZeroInBracket { lo, hi });
        }
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if f(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Aitken-accelerated limit of the shell-ratio abscissae at orders
    /// `N − 4, N − 2, N`. Subleading eigenvalues of either sign make even
    /// and odd orders approach from opposite sides, so the extrapolation
    /// runs over one parity class.
    pub fn poincare_exponent(&self, order: usize) -> Result<f64, ZetaError> {
        if order < 6 {
            return self.poincare_abscissa(order);
        }
        let a = self.poincare_abscissa(order - 4)?;
        let b = self.poincare_abscissa(order - 2)?;
        let c = self.poincare_abscissa(order)?;
        let den = c - 2.0 * b + a;
        if den.abs() < 1e-300 || (c - b).abs() < 1e-15 {
            return Ok(c);
        }
        Ok(c - (c - b) * (c - b) / den)
    }
}

fn bisect<F>(mut lo: f64, mut hi: f64, tol: f64, f: F) -> Result<f64, ZetaError>
where
    F: Fn(f64) -> Result<f64, ZetaError>,
{
    let mut flo = f(lo)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;

    #[test]
    fn cylinder_exponent_is_zero() {
        let (_, e) = fixtures::cylinder(12);
        let d = e.critical_exponent().unwrap();
        assert!(d.delta.abs() <= 1e-10, "{d:?}");
        assert_eq!(d.multiplicity, 2);
        assert_eq!(d.delta_gamma, d.delta - 0.5);
    }

    #[test]
    fn thin_group_exponent_is_small() {
        let (_, e) = fixtures::thin2(10);
        let d = e.critical_exponent().unwrap();
        assert!(d.delta > 0.1 && d.delta < 0.3, "{d:?}");
        assert_eq!(d.multiplicity, 1);
    }
}
