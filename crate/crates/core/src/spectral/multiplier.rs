use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::real::{Real, Sign};
use crate::spectral::field::{ComplexField, Repr};
use crate::spectral::transform::SpectralPlan;

/// Fourier multiplier symbols used throughout the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MultiplierSpec<T> {
    /// `<xi>^s`.
    Bracket(T),
    /// `|xi|^alpha`, zero at the origin unless `alpha == 0`.
    Homogeneous(T),
    /// `R^mu_sign`: `-1` for `mu = 0`, `-/+ xi_j/|xi|` for `mu = j`.
    Riesz(usize, Sign),
    /// `|xi|^-1`.
    InverseD,
    /// `d/dx_j`, symbol `i xi_j`.
    Derivative(usize),
}

#[inline]
pub fn abs_xi<T: Real>(xi: [T; 2]) -> T {
    (xi[0] * xi[0] + xi[1] * xi[1]).sqrt()
}

/// `<xi> = sqrt(1 + |xi|^2)`.
#[inline]
pub fn bracket<T: Real>(xi: [T; 2]) -> T {
    (T::one() + xi[0] * xi[0] + xi[1] * xi[1]).sqrt()
}

/// Real Riesz symbol with the zero-mode rule.
#[inline]
pub fn riesz_symbol<T: Real>(mu: usize, sign: Sign, xi: [T; 2]) -> T {
    if mu == 0 {
        return -T::one();
    }
    let d = abs_xi(xi);
    if d == T::zero() {
        T::zero()
    } else {
        -sign.value::<T>() * xi[mu - 1] / d
    }
}

impl<T: Real> MultiplierSpec<T> {
    pub fn symbol(&self, xi: [T; 2]) -> Complex<T> {
        let re = |x: T| Complex::new(x, T::zero());
        match *self {
            MultiplierSpec::Bracket(s) => re(bracket(xi).powf(s)),
            MultiplierSpec::Homogeneous(a) => {
                let d = abs_xi(xi);
                if d == T::zero() {
                    re(if a == T::zero() { T::one() } else { T::zero() })
                } else {
                    re(d.powf(a))
                }
            }
            MultiplierSpec::Riesz(mu, sign) => re(riesz_symbol(mu, sign, xi)),
            MultiplierSpec::InverseD => {
                let d = abs_xi(xi);
                re(if d == T::zero() { T::zero() } else { d.recip() })
            }
            MultiplierSpec::Derivative(j) => Complex::new(T::zero(), xi[j]),
        }
    }

    /// Odd symbols pair `xi` with `-xi` and must vanish on the Nyquist lines.
    pub fn is_odd(&self) -> bool {
        matches!(self, MultiplierSpec::Riesz(mu, _) if *mu > 0) || matches!(self, MultiplierSpec::Derivative(_))
    }

    /// Apply to a spectral field.
    pub fn apply_spectral(&self, field: &ComplexField<T>) -> ComplexField<T> {
        debug_assert!(field.is_spectral());
        let g = *field.grid();
        let odd = self.is_odd();
        field.map_spectrum(|i, xi, v| {
            if odd && g.is_nyquist(i) {
                Complex::new(T::zero(), T::zero())
            } else {
                v * self.symbol(xi)
            }
        })
    }
}

/// Apply a multiplier, keeping the field's representation.
pub fn apply_multiplier<T: Real>(
    plan: &SpectralPlan<T>,
    spec: &MultiplierSpec<T>,
    field: &ComplexField<T>,
) -> Result<ComplexField<T>> {
    match field.repr() {
        Repr::Spectral => Ok(spec.apply_spectral(field)),
        Repr::Physical => plan.inverse(&spec.apply_spectral(&plan.forward(field)?)),
    }
}
