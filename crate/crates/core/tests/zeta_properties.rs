use num_complex::Complex64;
use proptest::prelude::*;
use schottky_core::geom::group::format_real;
use schottky_core::geom::word::word_matrix;
use schottky_core::geom::{build_schottky, GroupSpec, SchottkyData};
use schottky_core::zeta::{Method, Rect, Sigma, ZeroSearchOptions, ZetaEngine};
use std::sync::OnceLock;

const ELL: f64 = 2.0;

fn cylinder() -> &'static ZetaEngine {
    static E: OnceLock<ZetaEngine> = OnceLock::new();
    E.get_or_init(|| ZetaEngine::for_group(&SchottkyData::cylinder(ELL).unwrap(), 12).unwrap())
}

fn thin2() -> &'static ZetaEngine {
    static E: OnceLock<ZetaEngine> = OnceLock::new();
    E.get_or_init(|| ZetaEngine::for_group(&SchottkyData::symmetric(2, 2.0, 0.1).unwrap(), 12).unwrap())
}

/// The symmetric rank-2 group with the second generator replaced by its
/// negative: same action, but classes with negative trace.
fn signed_group() -> SchottkyData {
    let mut spec = GroupSpec::symmetric(2, 2.0, 0.3).materialize().unwrap();
    for e in spec.generators[1].iter_mut() {
        *e = format_real(-e.parse::<f64>().unwrap());
    }
    build_schottky(&spec).unwrap().0
}

fn sigma() -> impl Strategy<Value = Sigma> {
    prop_oneof![Just(Sigma::Trivial), Just(Sigma::Sign)]
}

fn reduced_word(max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(prop_oneof![Just(1), Just(-1), Just(2), Just(-2)], 1..=max_len).prop_map(|w| {
        let mut out: Vec<i32> = Vec::new();
        for l in w {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn product_equals_trace_series(re in 0.55f64..2.0, im in -5.0f64..5.0, sigma in sigma()) {
        let e = thin2();
        let lambda = Complex64::new(re - 0.5, im);
        let (log_product, tail, _) = e.log_zeta_product_unchecked(sigma, lambda, None);
        let table = e.transfer_trace_table(sigma, Complex64::new(re, im), 12).unwrap();
        let series: Complex64 = -(1..=12).map(|n| table.value(n) / n as f64).sum::<Complex64>();
        prop_assert!((log_product - series).norm() <= 2.0 * tail + 1e-13, "{} vs {} (tail {})", log_product, series, tail);
    }

    #[test]
    fn conjugate_argument_gives_conjugate_value(re in 0.6f64..2.0, im in 0.1f64..5.0, sigma in sigma()) {
        for e in [cylinder(), thin2()] {
            let s = Complex64::new(re, im);
            let d = e.zeta_determinant(sigma, s - 0.5, 12).unwrap().value;
            let dc = e.zeta_determinant(sigma, s.conj() - 0.5, 12).unwrap().value;
            prop_assert!((dc - d.conj()).norm() <= 1e-10 * d.norm());
            let (p, _, _) = e.log_zeta_product_unchecked(sigma, s - 0.5, None);
            let (pc, _, _) = e.log_zeta_product_unchecked(sigma, s.conj() - 0.5, None);
            prop_assert!((pc - p.conj()).norm() <= 1e-10 * (1.0 + p.norm()));
        }
    }

    #[test]
    fn l_is_real_on_the_imaginary_axis_and_even(xi in 0.05f64..8.0, re in -0.3f64..0.3) {
        for e in [cylinder(), thin2()] {
            let l = e.l_gamma(Sigma::Trivial, Complex64::new(0.0, xi), Method::Determinant, 12).unwrap();
            prop_assert!(l.value.im.abs() <= 1e-10 * (1.0 + l.value.norm()), "{}", l.value);
            let mu = Complex64::new(re, xi);
            let plus = e.l_gamma(Sigma::Trivial, mu, Method::Determinant, 12).unwrap().value;
            let minus = e.l_gamma(Sigma::Trivial, -mu, Method::Determinant, 12).unwrap().value;
            prop_assert_eq!(plus, minus);
        }
    }

    #[test]
    fn determinant_coefficients_decay_concavely(re in 0.6f64..2.0, im in -3.0f64..3.0) {
        for e in [cylinder(), thin2()] {
            let d = e.determinant(Sigma::Trivial, Complex64::new(re, im), 12).unwrap();
            let logs: Vec<f64> = d.coefficients.iter().map(|c| c.value.norm().ln()).collect();
            let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // beyond the middle of the expansion, above the rounding floor
            let tail: Vec<f64> = logs[6..].iter().copied().take_while(|&l| l > peak - 30.0).collect();
            for w in tail.windows(2) {
                prop_assert!(w[1] < w[0], "{:?}", logs);
            }
            for w in tail.windows(3) {
                prop_assert!(w[2] - 2.0 * w[1] + w[0] <= 1e-6, "{:?}", logs);
            }
        }
    }

    #[test]
    fn cylinder_traces_are_geometric(re in 0.3f64..3.0, im in -6.0f64..6.0, sigma in sigma()) {
        // the cylinder generator has positive trace, so σ is 1 on every class
        let s = Complex64::new(re, im);
        let table = cylinder().transfer_trace_table(sigma, s, 12).unwrap();
        for n in 1..=12 {
            let exact = 2.0 * (-s * n as f64 * ELL).exp() / (1.0 - (-(n as f64) * ELL).exp());
            prop_assert!((table.value(n) - exact).norm() <= 1e-12 * exact.norm(), "n = {}", n);
        }
    }

    #[test]
    fn character_is_inverse_and_power_compatible(w in reduced_word(6), m in 1u32..4) {
        let g = signed_group();
        prop_assume!(!w.is_empty());
        let inv: Vec<i32> = w.iter().rev().map(|l| -l).collect();
        let power: Vec<i32> = (0..m).flat_map(|_| w.iter().copied()).collect();
        let sign = |letters: &[i32]| Sigma::Sign.value(word_matrix(&g, letters).trace().signum() as i8);
        prop_assert_eq!(sign(&inv), sign(&w));
        prop_assert_eq!(sign(&power), sign(&w).powi(m as i32));
    }
}

#[test]
fn signed_group_has_negative_traces() {
    let g = signed_group();
    assert!(word_matrix(&g, &[2]).trace() < 0.0);
    assert!(word_matrix(&g, &[1, 2]).trace() < 0.0);
    assert!(word_matrix(&g, &[2, 2]).trace() > 0.0);
}

#[test]
fn resonances_are_symmetric_about_the_real_axis() {
    let opts = ZeroSearchOptions {
        nx: 9,
        ny: 15,
        order: 12,
        ..ZeroSearchOptions::default()
    };
    let search = thin2()
        .zero_search(Sigma::Trivial, Rect::new(-0.52, 0.0, -1.2, 1.2), &opts)
        .unwrap();
    assert!(search.zeros.len() >= 5);
    for z in &search.zeros {
        let partner = search
            .zeros
            .iter()
            .find(|w| (w.location - z.location.conj()).norm() <= 1e-8)
            .unwrap_or_else(|| panic!("no conjugate of {}", z.location));
        assert_eq!(partner.order, z.order);
    }
}

/// Growth on the imaginary axis is logged, not asserted beyond finiteness.
#[test]
fn l_grows_slowly_on_the_imaginary_axis() {
    for (name, e) in [("cylinder", cylinder()), ("thin2", thin2())] {
        let samples: Vec<(f64, f64)> = (1..=50)
            .map(|k| {
                let xi = k as f64;
                let l = e.l_gamma(Sigma::Trivial, Complex64::new(0.0, xi), Method::Determinant, 12).unwrap();
                (xi, l.value.norm())
            })
            .collect();
        assert!(samples.iter().all(|(_, v)| v.is_finite()));
        // least-squares slope of log(1 + |L|) against log ξ
        let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, v)| (x.ln(), (1.0 + v).ln())).collect();
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        let max = samples.iter().map(|s| s.1).fold(0.0, f64::max);
        eprintln!("{name}: max |L(iξ)| on ξ ≤ 50 is {max:.3e}, log-log slope {slope:.3}");
    }
}
