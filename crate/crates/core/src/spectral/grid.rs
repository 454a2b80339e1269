use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::real::Real;

/// Periodic `n x n` lattice on the torus `[0, L)^2` together with its dual lattice.
///
/// Arrays are row-major with axis 0 (`x1`, `k1`) outermost. Spectral indices
/// follow FFT order: index `i` carries wavenumber `i` for `i < n/2` and `i - n`
/// otherwise, so the Nyquist wavenumber is `-n/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2D<T> {
    n: usize,
    length: T,
}

impl<T: Real> Grid2D<T> {
    pub fn new(n: usize, length: T) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return usage(format!("grid size n = {n} must be a power of two >= 8"));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return usage(format!("torus period L = {length} must be positive and finite"));
        }
        Ok(Self { n, length })
    }

    /// Default torus side `2*pi*8`.
    pub fn with_default_length(n: usize) -> Result<Self> {
        Self::new(n, T::lit(16.0 * std::f64::consts::PI))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn length(&self) -> T {
        self.length
    }

    /// Number of lattice points `n^2`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn spacing(&self) -> T {
        self.length / T::from_usize(self.n).unwrap()
    }

    /// Dual lattice spacing `2 pi / L`.
    #[inline]
    pub fn dk(&self) -> T {
        T::TAU() / self.length
    }

    /// Cell weight `(2 pi / L)^2` of spectral Riemann sums.
    #[inline]
    pub fn spectral_cell(&self) -> T {
        let dk = self.dk();
        dk * dk
    }

    /// Cell weight `(L / n)^2` of physical Riemann sums.
    #[inline]
    pub fn physical_cell(&self) -> T {
        let h = self.spacing();
        h * h
    }

    pub fn area(&self) -> T {
        self.length * self.length
    }

    /// Signed integer wavenumber of FFT index `i` along one axis.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> isize {
        wavenumber(i, self.n)
    }

    /// FFT index carrying the signed wavenumber `k`, if it lies on the lattice.
    pub fn index_of(&self, k: isize) -> Option<usize> {
        let h = (self.n / 2) as isize;
        if k < -h || k >= h {
            None
        } else {
            Some(k.rem_euclid(self.n as isize) as usize)
        }
    }

    /// Frequency vector of the flat spectral index.
    #[inline]
    pub fn xi(&self, idx: usize) -> [T; 2] {
        let dk = self.dk();
        let k1 = self.wavenumber(idx / self.n);
        let k2 = self.wavenumber(idx % self.n);
        [dk * T::from_isize(k1).unwrap(), dk * T::from_isize(k2).unwrap()]
    }

    /// Integer wavenumbers of the flat spectral index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [isize; 2] {
        [self.wavenumber(idx / self.n), self.wavenumber(idx % self.n)]
    }

    /// Flat spectral index of `-k`, or `None` on the Nyquist row or column.
    pub fn negated(&self, idx: usize) -> Option<usize> {
        let [k1, k2] = self.wavevector(idx);
        Some(self.index_of(-k1)? * self.n + self.index_of(-k2)?)
    }

    /// True on the Nyquist row or column.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let h = self.n / 2;
        idx / self.n == h || idx % self.n == h
    }

    /// Physical coordinates of the flat index.
    #[inline]
    pub fn point(&self, idx: usize) -> [T; 2] {
        let h = self.spacing();
        [h * T::from_usize(idx / self.n).unwrap(), h * T::from_usize(idx % self.n).unwrap()]
    }

    /// Grid of the same size with period `L / lambda`.
    pub fn dilated(&self, lambda: T) -> Result<Self> {
        Self::new(self.n, self.length / lambda)
    }

    /// Same geometry in another scalar type.
    pub fn cast<U: Real>(&self) -> Grid2D<U> {
        Grid2D { n: self.n, length: U::lit(self.length.to_f64()) }
    }
}

#[inline]
pub(crate) fn wavenumber(i: usize, n: usize) -> isize {
    if i < n / 2 {
        i as isize
    } else {
        i as isize - n as isize
    }
}
