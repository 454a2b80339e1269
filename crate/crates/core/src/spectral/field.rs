use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::real::Real;
use crate::spectral::grid::Grid2D;

/// Whether a field holds physical samples or spectral coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Repr {
    Physical,
    Spectral,
}

/// Complex samples on a [`Grid2D`], in either representation.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField<T> {
    grid: Grid2D<T>,
    values: Vec<Complex<T>>,
    repr: Repr,
}

impl<T: Real> ComplexField<T> {
    pub fn zeros(grid: Grid2D<T>, repr: Repr) -> Self {
        Self { grid, values: vec![Complex::new(T::zero(), T::zero()); grid.len()], repr }
    }

    pub fn from_values(grid: Grid2D<T>, values: Vec<Complex<T>>, repr: Repr) -> Result<Self> {
        if values.len() != grid.len() {
            return usage(format!("field has {} values, grid needs {}", values.len(), grid.len()));
        }
        Ok(Self { grid, values, repr })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid2D<T>, values: Vec<Complex<T>>, repr: Repr) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values, repr }
    }

    /// Physical field sampled from `f(x)`.
    pub fn from_fn_physical(grid: Grid2D<T>, mut f: impl FnMut([T; 2]) -> Complex<T>) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, values, repr: Repr::Physical }
    }

    /// Spectral field with coefficient `f(xi)` at each lattice frequency.
    pub fn from_fn_spectral(grid: Grid2D<T>, mut f: impl FnMut([T; 2]) -> Complex<T>) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.xi(i))).collect();
        Self { grid, values, repr: Repr::Spectral }
    }

    /// Unit-amplitude plane wave `exp(i x . xi)` at integer wavevector `k`, physical.
    pub fn plane_wave(grid: Grid2D<T>, k: [isize; 2]) -> Self {
        let dk = grid.dk();
        let q = [dk * T::from_isize(k[0]).unwrap(), dk * T::from_isize(k[1]).unwrap()];
        Self::from_fn_physical(grid, |x| Complex::from_polar(T::one(), x[0] * q[0] + x[1] * q[1]))
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    #[inline]
    pub fn repr(&self) -> Repr {
        self.repr
    }

    #[inline]
    pub fn is_spectral(&self) -> bool {
        self.repr == Repr::Spectral
    }

    #[inline]
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// Same grid and representation, new values.
    pub fn with_values(&self, values: Vec<Complex<T>>) -> Self {
        Self::from_vec_unchecked(self.grid, values, self.repr)
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.grid, self.repr)
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.grid == other.grid && self.repr == other.repr
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Mode-wise map with access to the frequency vector. Spectral fields only.
    pub fn map_spectrum(&self, f: impl Fn(usize, [T; 2], Complex<T>) -> Complex<T>) -> Self {
        debug_assert!(self.is_spectral());
        let g = self.grid;
        self.with_values(self.values.iter().enumerate().map(|(i, &v)| f(i, g.xi(i), v)).collect())
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        self.map(|v| v * a)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(self.same_layout(other));
        self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert!(self.same_layout(other));
        self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect())
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: Complex<T>, other: &Self) {
        debug_assert!(self.same_layout(other));
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x = *x + *y * a;
        }
    }

    /// Pointwise conjugate. In spectral form this is `conj(f^(-xi))`; Nyquist modes are dropped.
    pub fn conj(&self) -> Self {
        match self.repr {
            Repr::Physical => self.map(|v| v.conj()),
            Repr::Spectral => {
                let g = self.grid;
                let values = (0..g.len())
                    .map(|i| g.negated(i).map_or(Complex::new(T::zero(), T::zero()), |j| self.values[j].conj()))
                    .collect();
                self.with_values(values)
            }
        }
    }

    /// `L^2` norm over the torus; representation-independent by Parseval.
    pub fn l2_norm(&self) -> T {
        let cell = match self.repr {
            Repr::Physical => self.grid.physical_cell(),
            Repr::Spectral => self.grid.spectral_cell(),
        };
        (self.values.iter().map(|v| v.norm_sqr()).sum::<T>() * cell).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Spatial mean.
    pub fn mean(&self) -> Complex<T> {
        match self.repr {
            Repr::Physical => {
                let s: Complex<T> = self.values.iter().fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b);
                s / T::from_usize(self.grid.len()).unwrap()
            }
            Repr::Spectral => self.values[0] * (T::TAU() / self.grid.area()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Zero every Nyquist-row/column coefficient. Spectral fields only.
    pub fn zero_nyquist(&mut self) {
        debug_assert!(self.is_spectral());
        let g = self.grid;
        for (i, v) in self.values.iter_mut().enumerate() {
            if g.is_nyquist(i) {
                *v = Complex::new(T::zero(), T::zero());
            }
        }
    }

    /// Maximum modulus of `f - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        debug_assert!(self.same_layout(other));
        self.values.iter().zip(&other.values).fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }
}

/// Two-component spinor field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField<T> {
    pub upper: ComplexField<T>,
    pub lower: ComplexField<T>,
}

impl<T: Real> SpinorField<T> {
    pub fn new(upper: ComplexField<T>, lower: ComplexField<T>) -> Result<Self> {
        if !upper.same_layout(&lower) {
            return usage("spinor components must share grid and representation");
        }
        Ok(Self { upper, lower })
    }

    pub fn zeros(grid: Grid2D<T>, repr: Repr) -> Self {
        Self { upper: ComplexField::zeros(grid, repr), lower: ComplexField::zeros(grid, repr) }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(*self.grid(), self.repr())
    }

    pub fn grid(&self) -> &Grid2D<T> {
        self.upper.grid()
    }

    pub fn repr(&self) -> Repr {
        self.upper.repr()
    }

    pub fn component(&self, a: usize) -> &ComplexField<T> {
        if a == 0 {
            &self.upper
        } else {
            &self.lower
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { upper: self.upper.add(&other.upper), lower: self.lower.add(&other.lower) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { upper: self.upper.sub(&other.upper), lower: self.lower.sub(&other.lower) }
    }

    pub fn l2_norm(&self) -> T {
        self.upper.l2_norm().hypot(self.lower.l2_norm())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.upper.max_abs_diff(&other.upper).max(self.lower.max_abs_diff(&other.lower))
    }
}
