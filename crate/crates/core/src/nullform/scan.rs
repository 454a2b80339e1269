//! Sampled suprema of the symbol, angle, hyperbolic Leibniz and `I` ratios.
//!
//! Every scan is a pure function of its sample count and seed.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::quadrature::{i_sup_scan, log_uniform_samples, IsupParams, ScanTable};
use super::weights::{
    angle_bound_ratio, convolution_sign, hyperbolic_leibniz_ratio, norm, symbol_bound_ratio, ConePoint, SignCase,
};
use crate::error::Result;
use crate::real::Sign;

/// Largest sampled value of a ratio and where it occurred.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupScan {
    pub name: String,
    pub samples: usize,
    pub seed: u64,
    pub max: f64,
    /// Flattened arguments of the maximizer.
    pub argmax: Vec<f64>,
}

impl SupScan {
    fn new(name: &str, samples: usize, seed: u64) -> Self {
        Self { name: name.into(), samples, seed, max: 0.0, argmax: Vec::new() }
    }

    fn offer(&mut self, value: f64, args: impl FnOnce() -> Vec<f64>) {
        if value > self.max {
            self.max = value;
            self.argmax = args();
        }
    }
}

/// Uniform point of the disk of radius `radius`.
fn disk(rng: &mut impl Rng, radius: f64) -> [f64; 2] {
    let rho = radius * rng.random::<f64>().sqrt();
    let th = 2.0 * PI * rng.random::<f64>();
    [rho * th.cos(), rho * th.sin()]
}

fn random_sign(rng: &mut impl Rng) -> Sign {
    if rng.random::<bool>() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Offset whose magnitude is log-uniform over six decades below `scale`.
fn near_zero(rng: &mut impl Rng, scale: f64) -> f64 {
    let m = scale * 10f64.powf(-6.0 * rng.random::<f64>());
    if rng.random::<bool>() {
        m
    } else {
        -m
    }
}

/// Symbol-bound ratio with `xi`, `eta` uniform in the disk of radius `radius`.
pub fn symbol_bound_scan(case: SignCase, samples: usize, radius: f64, seed: u64) -> Result<SupScan> {
    let name = match case {
        SignCase::Equal => "symbol_bound_equal",
        SignCase::Unequal => "symbol_bound_unequal",
    };
    let mut out = SupScan::new(name, samples, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let xi = disk(&mut rng, radius);
        let eta = disk(&mut rng, radius);
        if norm(eta) == 0.0 || norm([xi[0] - eta[0], xi[1] - eta[1]]) == 0.0 {
            continue;
        }
        let v = symbol_bound_ratio(case, xi, eta)?;
        out.offer(v, || vec![xi[0], xi[1], eta[0], eta[1]]);
    }
    Ok(out)
}

/// Angle-lemma ratio for `xi_1`, `xi_2` uniform in the disk of radius
/// `radius`, random signs, and `tau_i = -s_i |xi_i| + d_i` with modulations
/// `d_i` spread log-uniformly over `(1e-6, 1) * <xi_i>`.
pub fn angle_scan(samples: usize, radius: f64, seed: u64) -> Result<SupScan> {
    let mut out = SupScan::new("angle_bound", samples, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x1 = disk(&mut rng, radius);
        let x2 = disk(&mut rng, radius);
        let signs = (random_sign(&mut rng), random_sign(&mut rng));
        if norm(x1) == 0.0 || norm(x2) == 0.0 {
            continue;
        }
        let t1 = -signs.0.value::<f64>() * norm(x1) + near_zero(&mut rng, 1f64.hypot(norm(x1)));
        let t2 = -signs.1.value::<f64>() * norm(x2) + near_zero(&mut rng, 1f64.hypot(norm(x2)));
        let p1 = ConePoint::new(t1, x1);
        let p2 = ConePoint::new(t2, x2);
        let p0 = ConePoint::new(t1 + t2, [x1[0] + x2[0], x1[1] + x2[1]]);
        let v = angle_bound_ratio(p0, p1, p2, signs)?;
        out.offer(v, || vec![t1, x1[0], x1[1], t2, x2[0], x2[1], signs.0.value::<f64>(), signs.1.value::<f64>()]);
    }
    Ok(out)
}

/// Hyperbolic Leibniz ratio with both factors near the cone: `rho = s_1 |eta| + d_1`,
/// `tau - rho = s_2 |xi - eta| + d_2`, `xi`, `eta` in the disk of radius `radius`.
pub fn leibniz_scan(samples: usize, radius: f64, seed: u64) -> Result<SupScan> {
    let mut out = SupScan::new("hyperbolic_leibniz", samples, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let xi = disk(&mut rng, radius);
        let eta = disk(&mut rng, radius);
        let zeta = [xi[0] - eta[0], xi[1] - eta[1]];
        let (s1, s2) = (random_sign(&mut rng), random_sign(&mut rng));
        let rho = s1.value::<f64>() * norm(eta) + near_zero(&mut rng, 1.0);
        let sigma = s2.value::<f64>() * norm(zeta) + near_zero(&mut rng, 1.0);
        let tau = rho + sigma;
        let v = hyperbolic_leibniz_ratio(tau, xi, rho, eta, convolution_sign(tau, rho))?;
        out.offer(v, || vec![tau, xi[0], xi[1], rho, eta[0], eta[1]]);
    }
    Ok(out)
}

/// The on-cone calibration point `eta = (3, 4)`, `xi = (0, 8)`, `rho = 5`,
/// `tau = 10`, where both sides equal 2.
pub fn leibniz_calibration() -> Result<f64> {
    hyperbolic_leibniz_ratio(10.0, [0.0, 8.0], 5.0, [3.0, 4.0], Sign::Plus)
}

/// `I` over log-uniform samples with `|tau|, |xi|` in `[1e-2, 1e3]`.
pub fn i_scan(params: &IsupParams, samples: usize, seed: u64) -> Result<ScanTable> {
    i_sup_scan(params, &log_uniform_samples(samples, 1e-2, 1e3, seed))
}
