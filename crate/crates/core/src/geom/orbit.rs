//! Lattice sums `Σ_{γ≠1} k(d(x, γx))` by pruned depth-first word expansion.
//!
//! Prune test. For a reduced word `w` with last letter `l`, every extension
//! `wv` (including `v = 1`) sends `x ∈ F` into `w(H ∖ D_{l⁻¹})`, because
//! `vx` lies in `D_{v₁}` with `v₁ ≠ l⁻¹` or in `F`. Hence
//!
//! `d(x, wvx) = d(w⁻¹x, vx) ≥ dist(w⁻¹x, ∂D_{l⁻¹})`,
//!
//! and `w⁻¹x ∈ D_{l⁻¹}`. The right side is exact per node (distance to a
//! fixed semicircle), so the subtree is skipped once it exceeds `tail_cut`.
//! The pulled-back point `w⁻¹x` is carried down the tree, so only level-one
//! disks ever enter the bound and no deep disk radii are formed.

use super::group::SchottkyData;
use super::hyperbolic::{distance, distance_to_semicircle};
use crate::error::GeomError;
use crate::numerics::NeumaierSum;
use crate::parallel;
use num_complex::Complex64;

/// Hard cap on visited nodes per first letter.
const MAX_NODES: usize = 50_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OrbitSum {
    pub value: f64,
    /// Elements with `d(x, γx) ≤ tail_cut`.
    pub terms: usize,
    pub visited: usize,
    pub pruned: usize,
}

/// Sum over `γ ≠ 1` with `d(x, γx) ≤ tail_cut`, in depth-first lexicographic
/// word order with compensated summation.
pub fn orbit_sum<K>(
    group: &SchottkyData,
    x: Complex64,
    kernel: &K,
    tail_cut: f64,
) -> Result<OrbitSum, GeomError>
where
    K: Fn(f64) -> f64 + Sync,
{
    let mut acc = NeumaierSum::new();
    let mut out = OrbitSum::default();
    for part in orbit_parts(group, x, tail_cut, |d, s: &mut NeumaierSum| s.add(kernel(d)))? {
        let (s, stats) = part?;
        acc.add(s.value());
        out.terms += stats.terms;
        out.visited += stats.visited;
        out.pruned += stats.pruned;
    }
    out.value = acc.value();
    Ok(out)
}

/// Displacements `d(x, γx) ≤ tail_cut` in the same order as [`orbit_sum`].
pub fn orbit_distances(
    group: &SchottkyData,
    x: Complex64,
    tail_cut: f64,
) -> Result<Vec<f64>, GeomError> {
    let mut out = Vec::new();
    for part in orbit_parts(group, x, tail_cut, |d, v: &mut Vec<f64>| v.push(d))? {
        out.extend(part?.0);
    }
    Ok(out)
}

type Part<A> = Result<(A, OrbitSum), GeomError>;

fn orbit_parts<A, V>(
    group: &SchottkyData,
    x: Complex64,
    tail_cut: f64,
    visit: V,
) -> Result<Vec<Part<A>>, GeomError>
where
    A: Default + Send,
    V: Fn(f64, &mut A) + Sync,
{
    let (x0, _) = group.reduce_to_domain(x)?;
    let alphabet = group.alphabet();
    Ok(parallel::map_ordered(&alphabet, |&first| {
        let mut walker = Walker {
            group,
            alphabet: &alphabet,
            x0,
            tail_cut,
            stats: OrbitSum::default(),
            acc: A::default(),
            visit: &visit,
            #[cfg(debug_assertions)]
            audit: audit::Audit::new(first),
        };
        let y = group.letter(-first).map.apply_interior(x0);
        walker.descend(&mut vec![first], y)?;
        Ok((walker.acc, walker.stats))
    }))
}

struct Walker<'a, A, V> {
    group: &'a SchottkyData,
    alphabet: &'a [i32],
    x0: Complex64,
    tail_cut: f64,
    stats: OrbitSum,
    acc: A,
    visit: &'a V,
    #[cfg(debug_assertions)]
    audit: audit::Audit,
}

impl<A, V: Fn(f64, &mut A)> Walker<'_, A, V> {
    /// `y = w⁻¹x₀` for the current word `w`.
    fn descend(&mut self, word: &mut Vec<i32>, y: Complex64) -> Result<(), GeomError> {
        self.stats.visited += 1;
        if self.stats.visited > MAX_NODES {
            return Err(GeomError::InvalidSpec(format!(
                "orbit expansion exceeded {MAX_NODES} nodes; lower tail_cut"
            )));
        }
        let last = *word.last().expect("nonempty word");
        let disk = self.group.letter(-last).disk;
        let bound = distance_to_semicircle(y, disk.center(), disk.radius());
        if bound > self.tail_cut {
            self.stats.pruned += 1;
            #[cfg(debug_assertions)]
            self.audit.check(self.group, self.x0, word, y, bound)?;
            return Ok(());
        }
        let d = distance(self.x0, y);
        if d <= self.tail_cut {
            self.stats.terms += 1;
            (self.visit)(d, &mut self.acc);
        }
        for &l in self.alphabet {
            if l == -last {
                continue;
            }
            let next = self.group.letter(-l).map.apply_interior(y);
            word.push(l);
            let r = self.descend(word, next);
            word.pop();
            r?;
        }
        Ok(())
    }
}

#[cfg(debug_assertions)]
mod audit {
    //! Randomised re-check of pruned subtrees in debug builds.

    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    pub(super) struct Audit {
        rng: StdRng,
    }

    impl Audit {
        pub(super) fn new(first: i32) -> Self {
            Self {
                rng: StdRng::seed_from_u64(0x9e37_79b9 ^ first as u64),
            }
        }

        pub(super) fn check(
            &mut self,
            group: &SchottkyData,
            x0: Complex64,
            word: &[i32],
            y: Complex64,
            bound: f64,
        ) -> Result<(), GeomError> {
            if !self.rng.gen_ratio(1, 8) {
                return Ok(());
            }
            let alphabet = group.alphabet();
            let mut last = *word.last().unwrap();
            let mut z = y;
            for _ in 0..self.rng.gen_range(0..4) {
                let choices: Vec<i32> = alphabet.iter().copied().filter(|&l| l != -last).collect();
                let l = choices[self.rng.gen_range(0..choices.len())];
                z = group.letter(-l).map.apply_interior(z);
                last = l;
            }
            let d = distance(x0, z);
            if d < bound - 1e-9 * (1.0 + bound) {
                return Err(GeomError::PruneBoundViolated {
                    word: word.to_vec(),
                    bound,
                    distance: d,
                });
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kernel_gives_zero() {
        let g = SchottkyData::symmetric(2, 2.0, 0.1).unwrap();
        let s = orbit_sum(&g, Complex64::new(0.0, 1.0), &|_| 0.0, 20.0).unwrap();
        assert_eq!(s.value, 0.0);
        assert!(s.terms > 0);
    }

    #[test]
    fn cylinder_axis_displacements() {
        let g = SchottkyData::cylinder(2.0).unwrap();
        // the axis is the semicircle of radius sinh 1 about 0
        let x = Complex64::new(0.0, 1f64.sinh());
        let mut d = orbit_distances(&g, x, 9.0).unwrap();
        d.sort_by(f64::total_cmp);
        let expect = [2.0, 2.0, 4.0, 4.0, 6.0, 6.0, 8.0, 8.0];
        assert_eq!(d.len(), expect.len());
        for (a, b) in d.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn larger_cut_never_loses_terms() {
        let g = SchottkyData::symmetric(2, 2.0, 0.3).unwrap();
        let x = Complex64::new(0.3, 0.7);
        let a = orbit_sum(&g, x, &|d: f64| (-d).exp(), 6.0).unwrap();
        let b = orbit_sum(&g, x, &|d: f64| (-d).exp(), 12.0).unwrap();
        assert!(b.value >= a.value);
        assert!(b.terms > a.terms, "{a:?} {b:?}");
    }
}
