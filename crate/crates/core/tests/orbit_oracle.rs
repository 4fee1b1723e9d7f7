use num_complex::Complex64;
use schottky_core::geom::word::{reduced_words, word_matrix};
use schottky_core::geom::{distance, orbit_sum, SchottkyData};

/// Every element with `d(x, γx) ≤ cut` has word length at most 8 here:
/// each letter adds at least `ℓ_min − 2 diam(F ∩ hull)` to the displacement.
#[test]
fn pruned_orbit_sum_matches_exhaustive_words() {
    let g = SchottkyData::symmetric(2, 2.0, 0.3).unwrap();
    let cut = 14.0;
    let k = |d: f64| (-0.7 * d).exp() / (1.0 + d);
    for x in [g.base_point(), Complex64::new(0.4, 0.9), Complex64::new(-1.3, 0.35)] {
        assert!(g.domain_contains(x));
        let mut brute = 0.0;
        let mut count = 0;
        let mut longest = 0;
        for n in 1..=8 {
            for w in reduced_words(2, n) {
                let d = distance(x, word_matrix(&g, &w).apply(x));
                if d <= cut {
                    brute += k(d);
                    count += 1;
                    longest = n;
                }
            }
        }
        assert!(longest < 8, "cut reaches word length 8");
        let s = orbit_sum(&g, x, &k, cut).unwrap();
        assert_eq!(s.terms, count, "x={x}");
        assert!((s.value - brute).abs() <= 1e-8 * brute, "{} vs {brute}", s.value);
        assert!(s.visited < 4 * 3usize.pow(7), "pruning visited {} nodes", s.visited);
    }
}
