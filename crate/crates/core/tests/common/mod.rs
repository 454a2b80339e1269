#![allow(dead_code)]

use cslab_core::spectral::{ComplexField, Grid2D, Repr, SpectralPlan};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random spectral field supported on `|k_1|, |k_2| <= band`.
pub fn band_limited(g: Grid2D<f64>, band: isize, amp: f64, real: bool, rng: &mut ChaCha8Rng) -> ComplexField<f64> {
    let mut f = ComplexField::zeros(g, Repr::Spectral);
    for idx in 0..g.len() {
        let [k1, k2] = g.wavevector(idx);
        if k1.abs() <= band && k2.abs() <= band {
            f.values_mut()[idx] = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * amp;
        }
    }
    if real {
        let plan = SpectralPlan::new(g);
        let p = plan.inverse(&f).unwrap().map(|v| Complex::new(v.re, 0.0));
        plan.forward(&p).unwrap()
    } else {
        f
    }
}

pub fn physical(g: Grid2D<f64>, f: &ComplexField<f64>) -> Vec<Complex<f64>> {
    SpectralPlan::new(g).inverse(f).unwrap().into_values()
}

pub fn spectral(g: Grid2D<f64>, v: Vec<Complex<f64>>) -> ComplexField<f64> {
    SpectralPlan::new(g).forward(&ComplexField::from_values(g, v, Repr::Physical).unwrap()).unwrap()
}

/// Sign of the permutation `(a, b, c)` of `(0, 1, 2)`, zero on repeats.
pub fn perm_sign(a: usize, b: usize, c: usize) -> f64 {
    if a == b || b == c || a == c {
        0.0
    } else if (a, b, c) == (0, 1, 2) || (a, b, c) == (1, 2, 0) || (a, b, c) == (2, 0, 1) {
        1.0
    } else {
        -1.0
    }
}

/// Spectral `d_j f` computed from scratch.
pub fn dx(f: &ComplexField<f64>, j: usize) -> ComplexField<f64> {
    let g = *f.grid();
    let mut out = f.clone();
    for (idx, v) in out.values_mut().iter_mut().enumerate() {
        let xi = g.xi(idx);
        *v = if g.is_nyquist(idx) { Complex::new(0.0, 0.0) } else { *v * Complex::new(0.0, xi[j]) };
    }
    out
}
