use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::real::Real;
use crate::spectral::field::ComplexField;
use crate::spectral::multiplier::{abs_xi, bracket};

/// Dispersion operator of a half-wave pair: `D = |nabla|` or `<D>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaveOperator {
    D,
    Bracket,
}

impl WaveOperator {
    #[inline]
    pub fn omega<T: Real>(self, xi: [T; 2]) -> T {
        match self {
            WaveOperator::D => abs_xi(xi),
            WaveOperator::Bracket => bracket(xi),
        }
    }
}

/// Split `(u, u_t)` into `u_pm = (u +/- i Op^-1 u_t) / 2`.
///
/// With this convention `u = u_+ + u_-`, `u_t = -i Op (u_+ - u_-)` and free
/// components evolve as `u_pm(t) = exp(-/+ i t Op) u_pm(0)`. For `Op = D` the
/// zero mode of `u_t` is ignored and `u(0)` is shared equally.
pub fn half_wave_split<T: Real>(
    u: &ComplexField<T>,
    ut: &ComplexField<T>,
    op: WaveOperator,
) -> Result<(ComplexField<T>, ComplexField<T>)> {
    if !u.is_spectral() || !u.same_layout(ut) {
        return usage("half_wave_split needs spectral fields on a common grid");
    }
    let half = T::lit(0.5);
    let g = *u.grid();
    let mut plus = u.zeros_like();
    let mut minus = u.zeros_like();
    for idx in 0..g.len() {
        let w = op.omega(g.xi(idx));
        let a = u.values()[idx];
        let b = if w == T::zero() {
            Complex::new(T::zero(), T::zero())
        } else {
            // i * ut / w
            let v = ut.values()[idx] / w;
            Complex::new(-v.im, v.re)
        };
        plus.values_mut()[idx] = (a + b) * half;
        minus.values_mut()[idx] = (a - b) * half;
    }
    Ok((plus, minus))
}

/// Inverse of [`half_wave_split`]: returns `(u, u_t)`.
pub fn half_wave_reconstruct<T: Real>(
    plus: &ComplexField<T>,
    minus: &ComplexField<T>,
    op: WaveOperator,
) -> (ComplexField<T>, ComplexField<T>) {
    let u = plus.add(minus);
    let d = plus.sub(minus);
    let ut = d.map_spectrum(|_, xi, v| {
        let w = op.omega(xi);
        Complex::new(v.im * w, -v.re * w)
    });
    (u, ut)
}
