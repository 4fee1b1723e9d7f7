use proptest::prelude::*;
use schottky_core::geom::SchottkyData;
use schottky_core::trace::{
    geometric_side, kernel_difference_trace, orbital_integral, spectral_side, KernelTraceOptions,
    OrbitalMethod, RadialTestFunction, SpectralOptions,
};
use schottky_core::zeta::ZetaEngine;

/// `2∫_0^U g(u) cos(ξu) du` by composite Simpson with `m` panels.
fn cosine_transform(f: &RadialTestFunction, xi: f64, upper: f64, m: usize) -> f64 {
    let h = upper / m as f64;
    let mut acc = f.g(0.0) + f.g(upper) * (xi * upper).cos();
    for i in 1..m {
        let u = i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f.g(u) * (xi * u).cos();
    }
    2.0 * acc * h / 3.0
}

/// `∂_τ log g_τ(ℓ)` for the heat family.
fn heat_log_slope(l: f64, tau: f64) -> f64 {
    l * l / (4.0 * tau * tau) - 0.25 - 0.5 / tau
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn heat_transform_pair(t in 0.2f64..3.0) {
        let f = RadialTestFunction::heat(t).unwrap();
        let upper = (160.0 * t).sqrt();
        for xi in [0.0, 0.5, 1.0, 2.0] {
            prop_assert!((cosine_transform(&f, xi, upper, 40_000) - f.h(xi)).abs() <= 1e-8);
        }
    }

    #[test]
    fn resolvent_transform_pair(lambda in 0.3f64..2.0) {
        let f = RadialTestFunction::resolvent(lambda).unwrap();
        let upper = 45.0 / lambda;
        for xi in [0.0, 0.5, 1.0, 2.0] {
            let h = f.h(xi);
            prop_assert!((cosine_transform(&f, xi, upper, 200_000) - h).abs() <= 1e-8 * h.max(1.0));
        }
    }

    #[test]
    fn kernels_and_transforms_are_positive_and_g_even(t in 0.1f64..5.0, lambda in 0.1f64..3.0, u in 0.0f64..20.0, xi in 0.0f64..10.0) {
        // t·ξ² stays below the double-precision underflow of e^{−tξ²}
        for f in [RadialTestFunction::heat(t).unwrap(), RadialTestFunction::resolvent(lambda).unwrap()] {
            prop_assert_eq!(f.g(u), f.g(-u));
            prop_assert!(f.h(xi) > 0.0);
            if u < 8.0 {
                prop_assert!(f.g(u) > 0.0);
                prop_assert!(f.kernel(u + 0.05).unwrap() > 0.0);
            }
        }
    }

    /// Each geodesic term `θ_t(ℓ)` moves in t as `g_t(ℓ)` does: up where
    /// `ℓ²/(4t²) > ¼ + 1/(2t)` on the whole step, down where it is below.
    #[test]
    fn geodesic_terms_follow_the_heat_sign_structure(l in 0.5f64..10.0, t in 0.1f64..5.0) {
        let slopes: Vec<f64> = (0..=20).map(|k| heat_log_slope(l, t + 0.005 * k as f64)).collect();
        let before = orbital_integral(l, &RadialTestFunction::heat(t).unwrap(), OrbitalMethod::Closed).unwrap();
        let after = orbital_integral(l, &RadialTestFunction::heat(t + 0.1).unwrap(), OrbitalMethod::Closed).unwrap();
        if slopes.iter().all(|&s| s > 1e-3) {
            prop_assert!(after > before);
        } else if slopes.iter().all(|&s| s < -1e-3) {
            prop_assert!(after < before);
        }
    }
}

/// Geometric side and kernel-difference trace agree within their declared
/// error budgets, and every side is positive.
#[test]
fn heat_sides_agree_within_declared_tails() {
    let groups = [
        ("cylinder", SchottkyData::cylinder(2.0).unwrap()),
        ("thin2", SchottkyData::symmetric(2, 2.0, 0.1).unwrap()),
    ];
    for (name, g) in &groups {
        let e = ZetaEngine::for_group(g, 12).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let f = RadialTestFunction::heat(t).unwrap();
            let geo = geometric_side(&e, &f).unwrap();
            let kd = kernel_difference_trace(g, &f, &KernelTraceOptions::default()).unwrap();
            let sp = spectral_side(&e, &f, &SpectralOptions::default()).unwrap();
            for side in [&geo, &kd, &sp] {
                assert!(side.value > 0.0, "{name} t={t}: {side:?}");
            }
            let budget = geo.tail + geo.error + kd.tail + kd.error;
            let gap = (geo.value - kd.value).abs();
            assert!(gap <= budget, "{name} t={t}: gap {gap:e} exceeds budget {budget:e}");
        }
    }
}
