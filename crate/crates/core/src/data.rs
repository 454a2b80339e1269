//! Named analytic initial-data profiles.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::real::Real;
use crate::spectral::field::{ComplexField, Repr, SpinorField};
use crate::spectral::grid::Grid2D;
use crate::spectral::transform::SpectralPlan;

pub const DEFAULT_SIGMA: f64 = 2.0;
pub const DEFAULT_K0: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Recipe {
    Gaussian {
        sigma: f64,
    },
    ModulatedGaussian {
        sigma: f64,
        k0: f64,
    },
    /// Random phases on the frequency annulus `k_min <= |xi| <= k_max`.
    AnnulusSpectrum {
        k_min: f64,
        k_max: f64,
    },
}

impl Recipe {
    pub fn name(&self) -> &'static str {
        match self {
            Recipe::Gaussian { .. } => "gaussian",
            Recipe::ModulatedGaussian { .. } => "modulated-gaussian",
            Recipe::AnnulusSpectrum { .. } => "annulus-spectrum",
        }
    }

    /// Complex physical profile with `max |p| = 1`, centred at `centre` (fractions of `L`).
    pub fn profile<T: Real>(&self, grid: &Grid2D<T>, centre: [f64; 2], seed: u64) -> Result<ComplexField<T>> {
        let l = grid.length().to_f64();
        let wrap = |x: f64, c: f64| {
            let d = x - c * l;
            d - l * (d / l).round()
        };
        let f = match *self {
            Recipe::Gaussian { sigma } => {
                check_positive("sigma", sigma)?;
                ComplexField::from_fn_physical(*grid, |x| {
                    let (d1, d2) = (wrap(x[0].to_f64(), centre[0]), wrap(x[1].to_f64(), centre[1]));
                    Complex::new(T::lit((-(d1 * d1 + d2 * d2) / (2.0 * sigma * sigma)).exp()), T::zero())
                })
            }
            Recipe::ModulatedGaussian { sigma, k0 } => {
                check_positive("sigma", sigma)?;
                ComplexField::from_fn_physical(*grid, |x| {
                    let (d1, d2) = (wrap(x[0].to_f64(), centre[0]), wrap(x[1].to_f64(), centre[1]));
                    let g = (-(d1 * d1 + d2 * d2) / (2.0 * sigma * sigma)).exp();
                    let ph = k0 * x[0].to_f64();
                    Complex::new(T::lit(g * ph.cos()), T::lit(g * ph.sin()))
                })
            }
            Recipe::AnnulusSpectrum { k_min, k_max } => {
                if !(k_min >= 0.0 && k_max > k_min) {
                    return usage(format!("annulus needs 0 <= k_min < k_max, got [{k_min}, {k_max}]"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let hat = ComplexField::from_fn_spectral(*grid, |xi| {
                    let k = xi[0].to_f64().hypot(xi[1].to_f64());
                    let ph: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                    if k >= k_min && k <= k_max {
                        Complex::new(T::lit(ph.cos()), T::lit(ph.sin()))
                    } else {
                        Complex::new(T::zero(), T::zero())
                    }
                });
                let mut hat = hat;
                hat.zero_nyquist();
                let p = SpectralPlan::new(*grid).inverse(&hat)?;
                if p.max_abs() == T::zero() {
                    return usage(format!("annulus [{k_min}, {k_max}] contains no lattice frequency"));
                }
                p
            }
        };
        let m = f.max_abs();
        Ok(f.scale(Complex::new(m.recip(), T::zero())))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        usage(format!("{name} = {v} must be positive"))
    }
}

impl Default for Recipe {
    fn default() -> Self {
        Recipe::ModulatedGaussian { sigma: DEFAULT_SIGMA, k0: DEFAULT_K0 }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Recipe {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Recipe::Gaussian { sigma: DEFAULT_SIGMA }),
            "modulated-gaussian" => Ok(Recipe::default()),
            "annulus-spectrum" => Ok(Recipe::AnnulusSpectrum { k_min: 0.5, k_max: 1.5 }),
            other => usage(format!("unknown data recipe '{other}'")),
        }
    }
}

/// Gauge potentials `a_mu` (real, physical) built from the recipe.
pub fn gauge_data<T: Real>(grid: &Grid2D<T>, recipe: &Recipe, amp: T, seed: u64) -> Result<[ComplexField<T>; 3]> {
    let centres = [[0.45, 0.55], [0.55, 0.5], [0.5, 0.4]];
    let mut out = Vec::with_capacity(3);
    for (nu, c) in centres.iter().enumerate() {
        let sign = if nu == 2 { -amp } else { amp };
        let p = recipe.profile(grid, *c, seed.wrapping_add(1 + nu as u64))?;
        // rotate the peak onto the real axis before taking the real part
        let peak = p.values().iter().copied().fold(Complex::new(T::zero(), T::zero()), |m, v| {
            if v.norm() > m.norm() {
                v
            } else {
                m
            }
        });
        let rot = peak.conj() / peak.norm();
        out.push(p.map(|v| Complex::new((v * rot).re * sign, T::zero())));
    }
    Ok([out.remove(0), out.remove(0), out.remove(0)])
}

/// CSH data `(a_mu, f, g)`.
pub fn csh_data<T: Real>(
    grid: &Grid2D<T>,
    recipe: &Recipe,
    amp: T,
    seed: u64,
) -> Result<([ComplexField<T>; 3], ComplexField<T>, ComplexField<T>)> {
    let a = gauge_data(grid, recipe, amp, seed)?;
    let p = recipe.profile(grid, [0.5, 0.5], seed)?;
    let f = p.scale(Complex::new(amp, T::zero()));
    let g = p.scale(Complex::new(T::zero(), amp * T::lit(0.5)));
    Ok((a, f, g))
}

/// CSD data `(a_mu, psi_0)`.
pub fn csd_data<T: Real>(
    grid: &Grid2D<T>,
    recipe: &Recipe,
    amp: T,
    seed: u64,
) -> Result<([ComplexField<T>; 3], SpinorField<T>)> {
    let a = gauge_data(grid, recipe, amp, seed)?;
    let up = recipe.profile(grid, [0.5, 0.5], seed)?.scale(Complex::new(amp, T::zero()));
    let lo = recipe.profile(grid, [0.55, 0.45], seed.wrapping_add(7))?.scale(Complex::new(T::zero(), amp));
    Ok((a, SpinorField::new(up, lo)?))
}

/// Uniform zero field on the grid, physical.
pub fn zero_field<T: Real>(grid: &Grid2D<T>) -> ComplexField<T> {
    ComplexField::zeros(*grid, Repr::Physical)
}
