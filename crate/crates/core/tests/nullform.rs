use std::f64::consts::{FRAC_PI_8, PI, SQRT_2};

use cslab_core::norms::SpacetimeField;
use cslab_core::nullform::bilinear::{bilinear_b_gamma, bilinear_ratio, bilinear_ratio_estimate, ProductEstimate};
use cslab_core::nullform::quadrature::{delta_convolution_quadrature, log_uniform_samples, smeared_delta_monte_carlo};
use cslab_core::nullform::scan::{i_scan, leibniz_calibration};
use cslab_core::nullform::*;
use cslab_core::spectral::{ComplexField, Grid2D, Repr, SpectralPlan};
use cslab_core::{Error, Sign};
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn naive_b(sign: Sign, xi: [f64; 2], eta: [f64; 2]) -> f64 {
    let n = |v: [f64; 2]| (v[0] * v[0] + v[1] * v[1]).sqrt();
    let zeta = [xi[0] - eta[0], xi[1] - eta[1]];
    match sign {
        Sign::Plus => n(eta) + n(zeta) - n(xi),
        Sign::Minus => n(xi) - (n(eta) - n(zeta)).abs(),
    }
}

/// `b_pm` on lattice vectors `eta = dk ke`, `zeta = dk kz` from exact integer
/// dot and cross products, so near-degenerate pairs carry no cancellation.
fn lattice_b(sign: Sign, ke: [isize; 2], kz: [isize; 2], dk: f64) -> f64 {
    let ks = [ke[0] + kz[0], ke[1] + kz[1]];
    let len = |k: [isize; 2]| ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
    let dot = (ke[0] * kz[0] + ke[1] * kz[1]) as f64;
    let cross2 = ((ke[0] * kz[1] - ke[1] * kz[0]) as f64).powi(2);
    let p = len(ke) * len(kz);
    let (num, den) = match sign {
        Sign::Plus => (if dot > 0.0 { cross2 / (p + dot) } else { p - dot }, len(ke) + len(kz) + len(ks)),
        Sign::Minus => (if dot < 0.0 { cross2 / (p - dot) } else { p + dot }, len(ks) + (len(ke) - len(kz)).abs()),
    };
    if den == 0.0 {
        0.0
    } else {
        2.0 * dk * num / den
    }
}

fn vec2() -> impl Strategy<Value = [f64; 2]> {
    [-10.0..10.0f64, -10.0..10.0f64]
}

proptest! {
    #[test]
    fn b_weight_is_nonnegative_and_matches_definition(xi in vec2(), eta in vec2()) {
        for s in Sign::BOTH {
            let b = b_weight(s, xi, eta);
            prop_assert!(b >= 0.0);
            prop_assert!((b - naive_b(s, xi, eta)).abs() <= 1e-12 * (1.0 + 3.0 * 15.0));
        }
    }

    #[test]
    fn qlm_is_antisymmetric(x1 in vec2(), x2 in vec2(), l in 0usize..3, m in 0usize..3, s1 in any::<bool>(), s2 in any::<bool>()) {
        let sg = |b: bool| if b { Sign::Plus } else { Sign::Minus };
        let signs = (sg(s1), sg(s2));
        let a = nullform_symbol(NullForm::Qlm(l, m), signs, x1, x2).unwrap();
        let b = nullform_symbol(NullForm::Qlm(m, l), signs, x1, x2).unwrap();
        prop_assert!((a + b).norm() <= 1e-15);
    }

    #[test]
    fn symbol_ratio_stays_below_root_two(xi in vec2(), eta in vec2()) {
        let zeta = [xi[0] - eta[0], xi[1] - eta[1]];
        prop_assume!(eta[0].hypot(eta[1]) > 1e-6 && zeta[0].hypot(zeta[1]) > 1e-6);
        for case in [SignCase::Equal, SignCase::Unequal] {
            prop_assert!(symbol_bound_ratio(case, xi, eta).unwrap() <= SQRT_2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn hyperbolic_leibniz_holds_with_constant_one(tau in -20.0..20.0f64, rho in -20.0..20.0f64, xi in vec2(), eta in vec2()) {
        let r = hyperbolic_leibniz_ratio(tau, xi, rho, eta, quadrature_sign(tau, rho)).unwrap();
        prop_assert!(r <= 1.0 + 1e-12);
    }

    #[test]
    fn low_regime_exponents_sum(a1 in 0.0..0.74f64, a2 in 0.0..0.74f64) {
        for case in [DeltaCase::PlusPlus, DeltaCase::PlusMinusA] {
            let e = fk_exponents(a1, a2, 2.0, case).unwrap();
            prop_assert_eq!(e.regime, Regime::Low);
            prop_assert_eq!(e.a, 1.5 - (a1 + a2) * 2.0);
            prop_assert_eq!(e.b, -0.5);
            prop_assert!((e.a + e.b - (1.0 - (a1 + a2) * 2.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn delta_integral_is_isotropic(k in 0.1..5.0f64, th in 0.0..std::f64::consts::TAU, extra in 0.01..5.0f64, a1 in 0.0..1.2f64, a2 in 0.0..1.2f64) {
        let tau = k + extra;
        let base = delta_convolution_integral(tau, [k, 0.0], a1, a2, 2.0, DeltaCase::PlusPlus).unwrap();
        let rot = delta_convolution_integral(tau, [k * th.cos(), k * th.sin()], a1, a2, 2.0, DeltaCase::PlusPlus).unwrap();
        prop_assert!((base - rot).abs() <= 1e-8 * base);
    }
}

fn quadrature_sign(tau: f64, rho: f64) -> Sign {
    cslab_core::nullform::weights::convolution_sign(tau, rho)
}

#[test]
fn symbol_examples() {
    let v = nullform_symbol(NullForm::Q12, (Sign::Plus, Sign::Minus), [1.0, 2.0], [-2.0, -4.0]).unwrap();
    assert!(v.norm() < 1e-15);
    // Direct evaluation: R^0 R^0 - R^1 R^1 with R^1 = -1 for both.
    let v = nullform_symbol(NullForm::Q0, (Sign::Plus, Sign::Plus), [1.0, 0.0], [1.0, 0.0]).unwrap();
    assert!(v.norm() < 1e-15);
    let v = nullform_symbol(NullForm::Q0, (Sign::Plus, Sign::Minus), [1.0, 0.0], [1.0, 0.0]).unwrap();
    assert!((v.re - 2.0).abs() < 1e-15);
    assert_eq!(nullform_symbol(NullForm::Q0, (Sign::Plus, Sign::Plus), [0.0, 0.0], [1.0, 0.0]).unwrap().norm(), 0.0);
}

#[test]
fn symbol_bound_closed_form_point() {
    // |eta x zeta| = 2 against sqrt(16 - 8 sqrt 2): the quotient is cos(pi/8).
    let v = symbol_bound_ratio(SignCase::Equal, [2.0, 0.0], [1.0, 1.0]).unwrap();
    assert!((v - FRAC_PI_8.cos()).abs() < 1e-14, "{v}");
}

#[test]
fn angle_examples() {
    let x = [3.0, 4.0];
    let p1 = ConePoint::new(-5.0, x);
    let p0 = ConePoint::new(-10.0, [6.0, 8.0]);
    assert_eq!(angle_bound_ratio(p0, p1, p1, (Sign::Plus, Sign::Plus)).unwrap(), 0.0);
    let p1 = ConePoint::new(0.3, [1.0, 0.0]);
    let p2 = ConePoint::new(-0.1, [0.0, 1.0]);
    let p0 = ConePoint::new(0.2, [1.0, 1.0]);
    let expect = (PI / 2.0) / ((1f64.hypot(0.2 - SQRT_2) + 1f64.hypot(1.3) + 1f64.hypot(0.9)) / SQRT_2).sqrt();
    let got = angle_bound_ratio(p0, p1, p2, (Sign::Plus, Sign::Plus)).unwrap();
    assert!((got - expect).abs() < 1e-14);
}

#[test]
fn leibniz_trivial_point_and_calibration() {
    assert_eq!(leibniz_calibration().unwrap(), 1.0);
    // tau = rho, xi = eta: the first term alone equals the left side.
    let r = hyperbolic_leibniz_ratio(2.5, [1.0, 0.5], 2.5, [1.0, 0.5], Sign::Plus).unwrap();
    assert!(r <= 1.0);
}

#[test]
fn closed_forms_at_the_origin() {
    for tau in [0.5, 1.0, 7.0] {
        let q = delta_convolution_integral(tau, [0.0, 0.0], 0.0, 0.0, 2.0, DeltaCase::PlusPlus).unwrap();
        assert!((q - PI * tau / 2.0).abs() < 1e-12 * q);
        // Tiny xi goes through the quadrature, not the shortcut.
        for (a1, a2) in [(0.0, 0.0), (0.5, 0.5), (0.3, 0.9), (1.1, 0.2)] {
            let q = delta_convolution_integral(tau, [1e-7 * tau, 0.0], a1, a2, 2.0, DeltaCase::PlusPlus).unwrap();
            let exact = 2.0 * PI * (tau / 2.0).powf(1.0 - (a1 + a2) * 2.0) / 2.0;
            assert!((q - exact).abs() < 1e-8 * exact, "{tau} {a1} {a2}: {q} vs {exact}");
        }
    }
}

#[test]
fn exactly_integrable_weights() {
    for (tau, k) in [(3.0, 1.0), (1.001, 1.0), (50.0, 0.3)] {
        let v = delta_convolution_integral(tau, [0.0, k], 0.5, 0.5, 2.0, DeltaCase::PlusPlus).unwrap();
        let exact = 2.0 * PI / (tau * tau - k * k).sqrt();
        assert!((v - exact).abs() < 1e-10 * exact);
        let v = delta_convolution_integral(tau, [k, 0.0], 1.0, 0.5, 2.0, DeltaCase::PlusPlus).unwrap();
        let exact = 4.0 * PI / (tau * tau - k * k);
        assert!((v - exact).abs() < 1e-10 * exact);
    }
    // Near hyperbola part with unit weights: 2/(|xi| sqrt(1 - D^2)) acosh 2.
    let (tau, k) = (0.4, 2.0);
    let v = delta_convolution_integral(tau, [k, 0.0], 0.5, 0.5, 2.0, DeltaCase::PlusMinusA).unwrap();
    let exact = 2.0 / k / (1.0 - (tau / k) * (tau / k)).sqrt() * 2f64.acosh();
    assert!((v - exact).abs() < 1e-10 * exact);
    // Far part at tau = 0 with a = b = 3/2: c^{-2} int_2^inf dx / (x sqrt(x^2 - 1)) = c^{-2} pi/6.
    let v = delta_convolution_integral(0.0, [k, 0.0], 0.75, 0.75, 2.0, DeltaCase::PlusMinusB).unwrap();
    let exact = PI / 6.0 / (k / 2.0).powi(2);
    assert!((v - exact).abs() < 1e-10 * exact);
}

#[test]
fn smeared_delta_oracle_agrees() {
    for (xi, a1, a2) in [([1.0, 0.0], 0.5, 0.5), ([0.6, 0.8], 0.3, 0.7), ([0.6, 0.8], 1.0, 0.4)] {
        let q = delta_convolution_integral(3.0, xi, a1, a2, 2.0, DeltaCase::PlusPlus).unwrap();
        let wide = smeared_delta_monte_carlo(3.0, xi, a1, a2, 2.0, 0.04, 1000, 1).unwrap();
        let narrow = smeared_delta_monte_carlo(3.0, xi, a1, a2, 2.0, 0.02, 1000, 2).unwrap();
        let extrap = (4.0 * narrow - wide) / 3.0;
        assert!((extrap - q).abs() < 0.01 * q, "{xi:?}: {extrap} vs {q}");
    }
}

fn slope(f: impl Fn(f64) -> f64, x0: f64, x1: f64) -> f64 {
    (f(x1) / f(x0)).ln() / (x1 / x0).ln()
}

#[test]
fn power_laws_follow_exponents() {
    for (a1, a2) in [(0.5, 0.5), (1.0, 0.5), (0.5, 1.0)] {
        let e = fk_exponents(a1, a2, 2.0, DeltaCase::PlusPlus).unwrap();
        let pp =
            |tau: f64, k: f64| delta_convolution_integral(tau, [k, 0.0], a1, a2, 2.0, DeltaCase::PlusPlus).unwrap();
        assert!((slope(|t| pp(t, 1.0), 10.0, 100.0) - (e.a + e.b)).abs() < 0.1);
        assert!((slope(|t| pp(t, t - 1.0), 10.0, 100.0) - e.a).abs() < 0.1);
        assert!((slope(|d| pp(100.0, 100.0 - d), 0.01, 0.1) - e.b).abs() < 0.1);
        for case in [DeltaCase::PlusMinusA, DeltaCase::PlusMinusB] {
            if case == DeltaCase::PlusMinusB && (a1 + a2) * 2.0 <= 2.0 {
                continue;
            }
            let e = fk_exponents(a1, a2, 2.0, case).unwrap();
            let pm = |k: f64, d: f64| delta_convolution_integral(k - d, [k, 0.0], a1, a2, 2.0, case).unwrap();
            assert!((slope(|k| pm(k, 1.0), 10.0, 100.0) - e.a).abs() < 0.1, "{a1} {a2} {case:?}");
            assert!((slope(|d| pm(100.0, d), 0.01, 0.1) - e.b).abs() < 0.1, "{a1} {a2} {case:?}");
        }
    }
}

#[test]
fn quadrature_reports_its_error() {
    let q = delta_convolution_quadrature(1.0 + 1e-6, [1.0, 0.0], 0.3, 1.2, 2.0, DeltaCase::PlusPlus).unwrap();
    assert!(q.value.is_finite() && q.error <= 1e-10 * q.value);
}

#[test]
fn i_scan_far_field_and_stability() {
    let p = IsupParams::reference();
    for pt in [ConePoint::new(500.0, [1.0, 0.0]), ConePoint::new(-2000.0, [0.0, 3.0])] {
        let (v, pred) = (p.value(pt).unwrap(), p.far_field(pt));
        assert!((v - pred).abs() < 0.1 * pred, "{v} vs {pred}");
    }
    let a = i_scan(&p, 1000, 1).unwrap();
    let b = i_scan(&p, 1000, 2).unwrap();
    assert!(a.max.is_finite() && a.max > 0.0);
    assert!((a.max - b.max).abs() <= 0.02 * a.max, "{} vs {}", a.max, b.max);
    let spec_example = IsupParams { r: 2.0, alpha0: 0.0, alpha1: 0.375, alpha2: 0.375, gamma: 0.25 };
    assert!(matches!(i_sup_scan(&spec_example, &log_uniform_samples(3, 0.1, 1.0, 0)), Err(Error::Usage(_))));
}

fn random_spectral(g: Grid2D<f64>, seed: u64) -> ComplexField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..g.len()).map(|_| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    ComplexField::from_values(g, vals, Repr::Spectral).unwrap()
}

#[test]
fn b_gamma_zero_is_the_sampled_product() {
    let g = Grid2D::new(16, 9.0).unwrap();
    let plan = SpectralPlan::new(g);
    let (f, h) = (random_spectral(g, 1), random_spectral(g, 2));
    let pf = plan.physical(&f).unwrap();
    let ph = plan.physical(&h).unwrap();
    let prod =
        ComplexField::from_values(g, pf.values().iter().zip(ph.values()).map(|(a, b)| a * b).collect(), Repr::Physical)
            .unwrap();
    let direct = plan.forward(&prod).unwrap();
    let b = bilinear_b_gamma(0.0, Sign::Plus, &f, &h).unwrap();
    let scale = direct.max_abs();
    assert!(b.max_abs_diff(&direct) < 1e-12 * scale);
}

fn mode(g: Grid2D<f64>, k: [isize; 2]) -> ComplexField<f64> {
    let mut f = ComplexField::zeros(g, Repr::Spectral);
    f.values_mut()[g.index_of(k[0]).unwrap() * g.n() + g.index_of(k[1]).unwrap()] = Complex::new(1.0, 0.0);
    f
}

#[test]
fn b_gamma_single_modes() {
    let g = Grid2D::new(16, 2.0 * PI).unwrap();
    let b = bilinear_b_gamma(0.5, Sign::Minus, &mode(g, [2, 1]), &mode(g, [-1, 3])).unwrap();
    let w = b_weight(Sign::Minus, [1.0, 4.0], [2.0, 1.0]).sqrt() * g.spectral_cell() / (2.0 * PI);
    let expect = mode(g, [1, 4]).scale(Complex::new(w, 0.0));
    assert!(b.max_abs_diff(&expect) < 1e-15);
}

#[test]
fn b_gamma_matches_output_loop_oracle() {
    // Loop over the output mode and the first argument; the second is the remainder mod n.
    let g = Grid2D::new(16, 7.0).unwrap();
    let (f, h) = (random_spectral(g, 3), random_spectral(g, 4));
    let n = g.n() as isize;
    let dk = 2.0 * PI / 7.0;
    for sign in Sign::BOTH {
        let b = bilinear_b_gamma(0.5, sign, &f, &h).unwrap();
        let mut worst: f64 = 0.0;
        for out in 0..g.len() {
            let ko = g.wavevector(out);
            let mut acc = Complex::new(0.0, 0.0);
            for i in 0..g.len() {
                let ke = g.wavevector(i);
                let rem = [(ko[0] - ke[0]).rem_euclid(n), (ko[1] - ke[1]).rem_euclid(n)];
                let j = (rem[0] * n + rem[1]) as usize;
                let kz = g.wavevector(j);
                acc += f.values()[i] * h.values()[j] * lattice_b(sign, ke, kz, dk).sqrt();
            }
            acc *= dk * dk / (2.0 * PI);
            worst = worst.max((acc - b.values()[out]).norm());
        }
        assert!(worst < 1e-12, "{worst}");
    }
}

#[test]
fn ratio_of_single_modes_is_one_term() {
    let (n, nt, l, t) = (16usize, 16usize, 9.0, 6.0);
    let g = Grid2D::new(n, l).unwrap();
    let dk = 2.0 * PI / l;
    let dtau = 2.0 * PI / t;
    let wave = |m: f64, k: [f64; 2]| {
        SpacetimeField::from_fn(g, nt, t, 0.0, move |tt, x| {
            Complex::from_polar(1.0, m * dtau * tt + dk * (k[0] * x[0] + k[1] * x[1]))
        })
        .unwrap()
    };
    let (u, v) = (wave(2.0, [1.0, -2.0]), wave(-3.0, [2.0, 0.0]));
    let bracket = |x: f64| (1.0 + x * x).sqrt();
    let w = |s: f64, b: f64, m: f64, k: [f64; 2]| {
        let kk = dk * k[0].hypot(k[1]);
        bracket(kk).powf(s) * bracket((m * dtau).abs() - kk).powf(b)
    };
    for r in [2.0, 1.5] {
        let est = ProductEstimate::fourier_lebesgue(r, (0.8, 0.76), (0.7, 0.6));
        let rp = r / (r - 1.0);
        // One coefficient T L^2 / (2 pi)^{3/2} in a cell (2 pi)^3 / (T L^2).
        let c = t * l * l / (2.0 * PI).powf(1.5) * ((2.0 * PI).powi(3) / (t * l * l)).powf(1.0 / rp);
        let expect =
            w(0.0, 0.0, -1.0, [3.0, -2.0]) / (w(0.8, 0.76, 2.0, [1.0, -2.0]) * w(0.7, 0.6, -3.0, [2.0, 0.0]) * c);
        let got = bilinear_ratio(&u, &v, &est).unwrap();
        assert!((got - expect).abs() < 1e-10 * expect, "r = {r}: {got} vs {expect}");
    }
    let zero = SpacetimeField::new(g, nt, t, 0.0, vec![Complex::new(0.0, 0.0); nt * n * n]).unwrap();
    assert_eq!(bilinear_ratio(&u, &zero, &ProductEstimate::reference()).unwrap(), 0.0);
}

#[test]
fn ratio_estimate_checks_hypotheses_and_runs() {
    let bad = ProductEstimate::fourier_lebesgue(2.0, (0.2, 0.76), (0.2, 0.76));
    let err = bilinear_ratio_estimate(&bad, 4, 0, &[(16, 16)]).unwrap_err().to_string();
    assert!(err.contains("alpha_1 + alpha_2 > 3/(2r)"), "{err}");
    let rows = bilinear_ratio_estimate(&ProductEstimate::reference(), 6, 5, &[(16, 16), (32, 32)]).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.max_ratio > 0.0 && r.max_ratio >= r.mean_ratio));
}
