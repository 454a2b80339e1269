//! Gauge-field half of the state vector, shared by both systems.
//!
//! Fields `0..6` of a state hold `A_{nu,+}, A_{nu,-}` at index `2 nu + {0,1}`;
//! zero-mode channel `nu` holds the mean of `A_nu` and of its time derivative.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::lorentz::{epsilon_pairs, metric};
use crate::real::{Real, Sign};
use crate::spectral::field::ComplexField;
use crate::spectral::grid::Grid2D;
use crate::spectral::halfwave::{half_wave_split, WaveOperator};
use crate::spectral::multiplier::abs_xi;
use crate::wave::{Component, WaveState, ZeroMode};

pub const GAUGE_FIELDS: usize = 6;

#[inline]
pub fn gauge_index(nu: usize, sign: Sign) -> usize {
    2 * nu + sign.index()
}

pub fn gauge_components() -> Vec<Component> {
    (0..3).flat_map(|_| Sign::BOTH.map(|sign| Component { sign, op: WaveOperator::D })).collect()
}

/// Spectral zero-mode coefficient of a constant.
#[inline]
pub fn mean_to_coefficient<T: Real>(grid: &Grid2D<T>, mean: T) -> Complex<T> {
    Complex::new(mean * grid.area() / T::TAU(), T::zero())
}

#[inline]
pub fn coefficient_to_mean<T: Real>(grid: &Grid2D<T>, c: Complex<T>) -> Complex<T> {
    c * (T::TAU() / grid.area())
}

/// Spectral `A_nu`, mean included.
pub fn gauge_potential<T: Real>(state: &WaveState<T>, nu: usize) -> ComplexField<T> {
    let mut a = state.fields[gauge_index(nu, Sign::Plus)].add(&state.fields[gauge_index(nu, Sign::Minus)]);
    a.values_mut()[0] = mean_to_coefficient(state.grid(), state.zero_modes[nu].value);
    a
}

/// Spectral `d/dt A_nu = -i D (A_+ - A_-)`, mean rate included.
pub fn gauge_velocity<T: Real>(state: &WaveState<T>, nu: usize) -> ComplexField<T> {
    let d = state.fields[gauge_index(nu, Sign::Plus)].sub(&state.fields[gauge_index(nu, Sign::Minus)]);
    let mut v = d.map_spectrum(|_, xi, v| {
        let w = abs_xi(xi);
        Complex::new(v.im * w, -v.re * w)
    });
    v.values_mut()[0] = mean_to_coefficient(state.grid(), state.zero_modes[nu].rate);
    v
}

/// Half-wave split of `(A_nu, d/dt A_nu)` with the means moved to zero-mode channels.
pub fn split_gauge<T: Real>(
    a: &[ComplexField<T>; 3],
    a_t: &[ComplexField<T>; 3],
) -> Result<(Vec<ComplexField<T>>, Vec<ZeroMode<T>>)> {
    let grid = *a[0].grid();
    let mut fields = Vec::with_capacity(GAUGE_FIELDS);
    let mut zero = Vec::with_capacity(3);
    for nu in 0..3 {
        let mut u = a[nu].clone();
        let mut ut = a_t[nu].clone();
        zero.push(ZeroMode {
            value: coefficient_to_mean(&grid, u.values()[0]).re,
            rate: coefficient_to_mean(&grid, ut.values()[0]).re,
        });
        u.values_mut()[0] = Complex::new(T::zero(), T::zero());
        ut.values_mut()[0] = Complex::new(T::zero(), T::zero());
        let (p, m) = half_wave_split(&u, &ut, WaveOperator::D)?;
        fields.push(p);
        fields.push(m);
    }
    Ok((fields, zero))
}

/// Spectral `i xi_j f^`, Nyquist-free.
pub fn partial<T: Real>(f: &ComplexField<T>, j: usize) -> ComplexField<T> {
    let g = *f.grid();
    f.map_spectrum(|i, xi, v| {
        if g.is_nyquist(i) {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(-v.im * xi[j], v.re * xi[j])
        }
    })
}

/// `d_1 a_2 - d_2 a_1`.
pub fn curl<T: Real>(a1: &ComplexField<T>, a2: &ComplexField<T>) -> ComplexField<T> {
    partial(a2, 0).sub(&partial(a1, 1))
}

/// Source of the gauge wave equations:
/// `F_nu = c * eps_{mu nu lambda} d^mu J^lambda` with `d^0 J^lambda = K^lambda`.
///
/// `j` holds `J^0, J^1, J^2` and `k` holds `d/dt J^1, d/dt J^2`.
pub fn gauge_source<T: Real>(coupling: T, j: &[ComplexField<T>; 3], k: &[ComplexField<T>; 2]) -> [ComplexField<T>; 3] {
    std::array::from_fn(|nu| {
        let mut out = j[0].zeros_like();
        for (mu, lam, e) in epsilon_pairs(nu) {
            let coef = Complex::new(coupling * T::lit(e as f64), T::zero());
            let term = if mu == 0 {
                k[lam - 1].clone()
            } else {
                partial(&j[lam], mu - 1).scale(Complex::new(T::lit(metric(mu)), T::zero()))
            };
            out.axpy(coef, &term);
        }
        out
    })
}

/// Half-wave forcing `+/- (i/2) D^-1 F_nu` and the zero-mode forcing `(0, mean F_nu)`.
pub fn gauge_nonlinear<T: Real>(source: &[ComplexField<T>; 3]) -> (Vec<ComplexField<T>>, Vec<ZeroMode<T>>) {
    let grid = *source[0].grid();
    let half = T::lit(0.5);
    let mut fields = Vec::with_capacity(GAUGE_FIELDS);
    let mut zero = Vec::with_capacity(3);
    for f in source {
        let plus = f.map_spectrum(|_, xi, v| {
            let d = abs_xi(xi);
            if d == T::zero() {
                Complex::new(T::zero(), T::zero())
            } else {
                let s = half / d;
                Complex::new(-v.im * s, v.re * s)
            }
        });
        let minus = plus.scale(Complex::new(-T::one(), T::zero()));
        fields.push(plus);
        fields.push(minus);
        zero.push(ZeroMode { value: T::zero(), rate: coefficient_to_mean(&grid, f.values()[0]).re });
    }
    (fields, zero)
}

/// `|| d^mu A_mu ||_{L^2} = || d_t A_0 - d_1 A_1 - d_2 A_2 ||`.
pub fn lorenz_residual<T: Real>(state: &WaveState<T>) -> T {
    let g = gauge_velocity(state, 0)
        .sub(&partial(&gauge_potential(state, 1), 0))
        .sub(&partial(&gauge_potential(state, 2), 1));
    g.l2_norm()
}

/// Largest relative imaginary part among the reconstructed `A_nu`.
pub fn realness_defect<T: Real>(state: &WaveState<T>) -> T {
    (0..3)
        .map(|nu| {
            let a = gauge_potential(state, nu);
            let n = a.l2_norm();
            if n == T::zero() {
                T::zero()
            } else {
                a.sub(&a.conj()).l2_norm() * T::lit(0.5) / n
            }
        })
        .fold(T::zero(), T::max)
}

/// How initial data handles the curl constraint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintMode {
    Check { tolerance: f64 },
    Project,
}

/// Diagnostics of an initial-data construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDataReport {
    /// Mean of the constraint right-hand side, which a periodic curl cannot carry.
    pub flux_deficit: f64,
    /// `L^2` constraint residual of the supplied data.
    pub residual_before: f64,
    /// Residual of the data actually used.
    pub residual_after: f64,
}

/// Enforce `curl a = target - mean(target)` according to `mode`; returns the
/// possibly adjusted `(a1, a2)` and the report.
pub fn impose_curl<T: Real>(
    a1: &ComplexField<T>,
    a2: &ComplexField<T>,
    target: &ComplexField<T>,
    mode: ConstraintMode,
) -> Result<(ComplexField<T>, ComplexField<T>, InitialDataReport)> {
    let grid = *a1.grid();
    let flux = coefficient_to_mean(&grid, target.values()[0]).re;
    let mut rhs = target.clone();
    rhs.values_mut()[0] = Complex::new(T::zero(), T::zero());
    let before = curl(a1, a2).sub(&rhs).l2_norm();
    match mode {
        ConstraintMode::Check { tolerance } => {
            if before.to_f64() > tolerance {
                return Err(Error::ConstraintViolation { residual: before.to_f64(), tolerance });
            }
            let report = InitialDataReport {
                flux_deficit: flux.to_f64(),
                residual_before: before.to_f64(),
                residual_after: before.to_f64(),
            };
            Ok((a1.clone(), a2.clone(), report))
        }
        ConstraintMode::Project => {
            // keep the curl-free part and the mean, replace the rest by (-d_2 chi, d_1 chi), lap chi = rhs
            let parts = crate::spectral::hodge::hodge_decompose(a1, a2)?;
            let chi = rhs.map_spectrum(|_, xi, v| {
                let d2 = xi[0] * xi[0] + xi[1] * xi[1];
                if d2 == T::zero() {
                    Complex::new(T::zero(), T::zero())
                } else {
                    -v / d2
                }
            });
            let mut n1 = parts.cf[0].sub(&partial(&chi, 1));
            let mut n2 = parts.cf[1].add(&partial(&chi, 0));
            n1.values_mut()[0] = a1.values()[0];
            n2.values_mut()[0] = a2.values()[0];
            let after = curl(&n1, &n2).sub(&rhs).l2_norm();
            let report = InitialDataReport {
                flux_deficit: flux.to_f64(),
                residual_before: before.to_f64(),
                residual_after: after.to_f64(),
            };
            Ok((n1, n2, report))
        }
    }
}

/// Bring real gauge data to spectral form; rejects fields with an imaginary part.
pub fn real_spectral<T: Real>(
    plan: &crate::spectral::transform::SpectralPlan<T>,
    f: &ComplexField<T>,
    name: &str,
) -> Result<ComplexField<T>> {
    let mut s = plan.spectral(f)?;
    s.zero_nyquist();
    let n = s.l2_norm();
    let im = s.sub(&s.conj()).l2_norm() * T::lit(0.5);
    if im > T::lit(1e-10) * n.max(T::min_positive_value()) {
        return usage(format!("gauge datum {name} must be real"));
    }
    Ok(s)
}
