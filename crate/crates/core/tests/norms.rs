mod common;

use std::f64::consts::{PI, TAU};

use common::{band_limited, dx, rng};
use cslab_core::norms::*;
use cslab_core::spectral::{ComplexField, Grid2D, SpectralPlan};
use num_complex::Complex;
use proptest::prelude::*;

fn gaussian(g: Grid2D<f64>, sigma: f64) -> ComplexField<f64> {
    let c = g.length() / 2.0;
    let f = ComplexField::from_fn_physical(g, |x| {
        let d2 = (x[0] - c).powi(2) + (x[1] - c).powi(2);
        Complex::new((-d2 / (2.0 * sigma * sigma)).exp(), 0.0)
    });
    SpectralPlan::new(g).forward(&f).unwrap()
}

/// Continuum value of `|| <xi>^s sigma^2 e^{-sigma^2 |xi|^2 / 2} ||_{L^{r'}}` by
/// Simpson's rule in `u = |xi|^2`.
fn gaussian_fl(sigma: f64, s: f64, r: f64) -> f64 {
    let rp = r / (r - 1.0);
    let rate = rp * sigma * sigma / 2.0;
    let upper = 60.0 / rate;
    let n = 20_000;
    let h = upper / n as f64;
    let f = |u: f64| (1.0 + u).powf(s * rp / 2.0) * (-rate * u).exp();
    let mut acc = f(0.0) + f(upper);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    (PI * sigma.powf(2.0 * rp) * acc * h / 3.0).powf(1.0 / rp)
}

#[test]
fn gaussian_matches_continuum() {
    let g = Grid2D::new(128, 40.0).unwrap();
    let sigma = 2.0;
    let f = gaussian(g, sigma);
    for (s, r) in [(0.0, 2.0), (0.0, 1.5), (0.7, 1.5), (1.0, 1.2), (-0.5, 1.8)] {
        let got = fl_norm(&f, s, r).unwrap();
        let want = gaussian_fl(sigma, s, r);
        assert!((got / want - 1.0).abs() < 1e-3, "s={s} r={r}: {got} vs {want}");
    }
    // closed form at s = 0
    let rp: f64 = 3.0;
    let exact = (sigma.powf(2.0 * rp - 2.0) * TAU / rp).powf(1.0 / rp);
    assert!((fl_norm(&f, 0.0, 1.5).unwrap() / exact - 1.0).abs() < 1e-10);
}

#[test]
fn r_two_is_sobolev_one() {
    let g = Grid2D::new(32, 9.0).unwrap();
    let f = band_limited(g, 12, 1.0, false, &mut rng(2));
    let l2 = |h: &ComplexField<f64>| {
        let p = SpectralPlan::new(g).inverse(h).unwrap();
        p.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.physical_cell()
    };
    let h1 = (l2(&f) + l2(&dx(&f, 0)) + l2(&dx(&f, 1))).sqrt();
    let got = fl_norm(&f, 1.0, 2.0).unwrap();
    assert!((got / h1 - 1.0).abs() < 1e-12, "{got} vs {h1}");
}

#[test]
fn scaling_of_a_gaussian() {
    let g = Grid2D::new(128, 40.0).unwrap();
    let f = gaussian(g, 2.0);
    let c = scaling_check(&f, 2.0, 0.7, 1.5).unwrap();
    assert!(c.rel_error <= 1e-3, "{c:?}");
    assert!(scaling_check(&f, 1.5, 0.7, 1.5).is_err());
}

fn random_spacetime(seed: u64) -> SpacetimeField<f64> {
    let g = Grid2D::new(8, TAU).unwrap();
    let mut r = rng(seed);
    let slices: Vec<_> =
        (0..16).map(|_| SpectralPlan::new(g).inverse(&band_limited(g, 3, 1.0, false, &mut r)).unwrap()).collect();
    SpacetimeField::from_slices(3.0, DEFAULT_TAPER, &slices).unwrap()
}

#[test]
fn xsb_parseval_and_mode_independence() {
    let u = random_spacetime(3);
    let l2 = u.tapered_l2();
    for mode in [XsbMode::Plus, XsbMode::Minus, XsbMode::Absolute] {
        let v = xsb_norm(&u, 0.0, 0.0, 2.0, mode).unwrap();
        assert!((v / l2 - 1.0).abs() < 1e-12);
        let w = xsb_norm(&u, 0.4, 0.0, 1.4, mode).unwrap();
        let w0 = xsb_norm(&u, 0.4, 0.0, 1.4, XsbMode::Plus).unwrap();
        assert_eq!(w, w0);
    }
}

#[test]
fn free_waves_sit_on_their_cone() {
    // e^{i (x.xi - t|xi|)} has tau = -|xi|: the plus weight is identically 1.
    let g = Grid2D::new(16, TAU).unwrap();
    let u =
        SpacetimeField::from_fn(g, 32, TAU, 0.0, |t, x| Complex::from_polar(1.0, 3.0 * x[0] + 4.0 * x[1] - 5.0 * t))
            .unwrap();
    let base = xsb_norm(&u, 0.5, 0.0, 1.5, XsbMode::Plus).unwrap();
    let plus = xsb_norm(&u, 0.5, 2.0, 1.5, XsbMode::Plus).unwrap();
    let minus = xsb_norm(&u, 0.5, 2.0, 1.5, XsbMode::Minus).unwrap();
    assert!((plus / base - 1.0).abs() < 1e-12);
    assert!((minus / base - 101.0).abs() < 1e-9);
}

proptest! {
    #[test]
    fn norms_increase_with_regularity(seed in 0u64..500, s in -1.0..1.0f64, ds in 0.0..1.0f64, r in 1.05..2.0f64) {
        let g = Grid2D::new(16, 10.0).unwrap();
        let f = band_limited(g, 7, 1.0, false, &mut rng(seed));
        let a = fl_norm(&f, s, r).unwrap();
        let b = fl_norm(&f, s + ds, r).unwrap();
        prop_assert!(b >= a * (1.0 - 1e-14));
    }

    #[test]
    fn xsb_increases_with_b(seed in 0u64..200, b in 0.0..1.0f64, db in 0.0..1.0f64) {
        let u = random_spacetime(seed);
        let a = xsb_norm(&u, 0.3, b, 1.5, XsbMode::Absolute).unwrap();
        let c = xsb_norm(&u, 0.3, b + db, 1.5, XsbMode::Absolute).unwrap();
        prop_assert!(c >= a * (1.0 - 1e-14));
    }
}

#[test]
fn parameter_validation() {
    let g = Grid2D::new(8, TAU).unwrap();
    let f = band_limited(g, 2, 1.0, false, &mut rng(0));
    assert!(fl_norm(&f, 0.0, 1.0).is_err());
    assert!(fl_norm(&f, 0.0, 2.5).is_err());
    let p = FLParams::theorem_compliant(1.5, 0.01).unwrap();
    assert!(p.is_theorem_compliant());
    assert!(!FLParams::new(1.5, 0.5, 0.84, 0.0).unwrap().is_theorem_compliant());
}
