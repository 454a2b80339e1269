//! Fourier-Lebesgue norms, windowed restriction-space norms and the scaling check.

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::real::Real;
use crate::spectral::field::{ComplexField, Repr};
use crate::spectral::grid::Grid2D;
use crate::spectral::multiplier::{abs_xi, bracket};
use crate::spectral::transform::SpectralPlan;

/// Above this dual exponent the `l^{r'}` sum is replaced by a maximum.
pub const MAX_DUAL_EXPONENT: f64 = 1e6;

/// Default raised-cosine taper fraction.
pub const DEFAULT_TAPER: f64 = 0.25;

/// Exponents of the Fourier-Lebesgue and restriction norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FLParams<T> {
    pub r: T,
    pub r_prime: T,
    pub s: T,
    pub b: T,
    pub gamma: T,
}

/// `r' = r / (r - 1)`, infinite at `r = 1`.
pub fn dual_exponent<T: Real>(r: T) -> T {
    if r == T::one() {
        T::infinity()
    } else {
        r / (r - T::one())
    }
}

fn check_r<T: Real>(r: T) -> Result<()> {
    if !(r > T::one() && r <= T::lit(2.0)) {
        return usage(format!("r = {r} must lie in (1, 2]"));
    }
    Ok(())
}

impl<T: Real> FLParams<T> {
    pub fn new(r: T, s: T, b: T, gamma: T) -> Result<Self> {
        check_r(r)?;
        Ok(Self { r, r_prime: dual_exponent(r), s, b, gamma })
    }

    /// `s = 3/(2r) - 1/2 + eps`, `b = 1/2 + 1/(2r) + eps`.
    pub fn theorem_compliant(r: T, eps: T) -> Result<Self> {
        check_r(r)?;
        if !(eps > T::zero()) {
            return usage(format!("surplus eps = {eps} must be positive"));
        }
        let half = T::lit(0.5);
        let s = T::lit(1.5) / r - half + eps;
        let b = half + half / r + eps;
        Self::new(r, s, b, T::zero())
    }

    /// Whether `s` and `b` clear the well-posedness thresholds.
    pub fn is_theorem_compliant(&self) -> bool {
        let half = T::lit(0.5);
        self.s > T::lit(1.5) / self.r - half && self.b > half + half / self.r
    }
}

/// `( sum (w |f|)^{r'} cell )^{1/r'}`, or the weighted max for huge `r'`.
fn weighted_lp<T: Real>(terms: impl Iterator<Item = T>, r_prime: T, cell: T) -> T {
    let terms: Vec<T> = terms.collect();
    let m = terms.iter().fold(T::zero(), |a, &b| a.max(b));
    if m == T::zero() {
        return T::zero();
    }
    if !(r_prime <= T::lit(MAX_DUAL_EXPONENT)) {
        return m;
    }
    let s: T = terms.iter().map(|&t| (t / m).powf(r_prime)).sum();
    m * (s * cell).powf(r_prime.recip())
}

fn require_spectral<T: Real>(f: &ComplexField<T>) -> Result<()> {
    if !f.is_spectral() {
        return usage("norm evaluation needs a spectral field");
    }
    Ok(())
}

/// `|| <xi>^s f^ ||_{L^{r'}}` as a lattice sum with cell `(2 pi / L)^2`.
pub fn fl_norm<T: Real>(f: &ComplexField<T>, s: T, r: T) -> Result<T> {
    check_r(r)?;
    require_spectral(f)?;
    let g = f.grid();
    let terms = f.values().iter().enumerate().map(|(i, v)| bracket(g.xi(i)).powf(s) * v.norm());
    Ok(weighted_lp(terms, dual_exponent(r), g.spectral_cell()))
}

/// Homogeneous variant with `|xi|^s`; the zero mode is skipped.
pub fn fl_norm_homogeneous<T: Real>(f: &ComplexField<T>, s: T, r: T) -> Result<T> {
    check_r(r)?;
    require_spectral(f)?;
    let g = f.grid();
    let terms = f.values().iter().enumerate().skip(1).map(|(i, v)| abs_xi(g.xi(i)).powf(s) * v.norm());
    Ok(weighted_lp(terms, dual_exponent(r), g.spectral_cell()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalExponents<T> {
    /// `2/r - 1`.
    pub s_c: T,
    /// `3/(2r) - 1/2`.
    pub threshold: T,
    /// `threshold - s_c = 1/2 - 1/(2r)`.
    pub gap: T,
}

pub fn critical_exponent<T: Real>(r: T) -> Result<CriticalExponents<T>> {
    if !(r >= T::one() && r <= T::lit(2.0)) {
        return usage(format!("r = {r} must lie in [1, 2]"));
    }
    let s_c = T::lit(2.0) / r - T::one();
    let threshold = T::lit(1.5) / r - T::lit(0.5);
    Ok(CriticalExponents { s_c, threshold, gap: threshold - s_c })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub rel_error: T,
}

/// Compare `|| f_lambda ||` with `lambda^{1+s-2/r} || f ||` in the homogeneous
/// norm of regularity `s + 1/2`, where `f_lambda(x) = lambda^{1/2} f(lambda x)`
/// is sampled on the grid of period `L / lambda` with the same `n`.
pub fn scaling_check<T: Real>(f: &ComplexField<T>, lambda: T, s: T, r: T) -> Result<ScalingCheck<T>> {
    if lambda.fract() != T::zero() || lambda < T::lit(2.0) {
        return usage(format!("dilation factor {lambda} must be an integer >= 2"));
    }
    let g = *f.grid();
    let phys = SpectralPlan::new(g).physical(f)?;
    let dg = g.dilated(lambda)?;
    let amp = lambda.sqrt();
    let dilated = ComplexField::from_values(dg, phys.values().iter().map(|v| v * amp).collect(), Repr::Physical)?;
    let dilated = SpectralPlan::new(dg).forward(&dilated)?;
    let reg = s + T::lit(0.5);
    let lhs = fl_norm_homogeneous(&dilated, reg, r)?;
    let base = fl_norm_homogeneous(&SpectralPlan::new(g).spectral(f)?, reg, r)?;
    let rhs = lambda.powf(T::one() + s - T::lit(2.0) / r) * base;
    let denom = lhs.abs().max(rhs.abs());
    let rel_error = if denom == T::zero() { T::zero() } else { (lhs - rhs).abs() / denom };
    Ok(ScalingCheck { lhs, rhs, rel_error })
}

/// Which modulation weight an [`xsb_norm`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum XsbMode {
    /// `<tau + |xi|>`.
    Plus,
    /// `<tau - |xi|>`.
    Minus,
    /// `<|tau| - |xi|>`.
    Absolute,
}

/// Field sampled at `nt` equispaced times `t_j = j T_w / nt` of the window `[0, T_w]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeField<T> {
    grid: Grid2D<T>,
    nt: usize,
    window: T,
    taper: T,
    values: Vec<Complex<T>>,
}

/// Raised-cosine (Tukey) window with flat fraction `1 - rho`, vanishing at both ends.
pub fn taper_weight<T: Real>(t: T, window: T, rho: T) -> T {
    if rho <= T::zero() {
        return T::one();
    }
    let edge = rho * window * T::lit(0.5);
    let u = if t < edge {
        t
    } else if t > window - edge {
        window - t
    } else {
        return T::one();
    };
    let u = u.max(T::zero());
    T::lit(0.5) * (T::one() - (T::PI() * u / edge).cos())
}

impl<T: Real> SpacetimeField<T> {
    pub fn new(grid: Grid2D<T>, nt: usize, window: T, taper: T, values: Vec<Complex<T>>) -> Result<Self> {
        if nt < 2 {
            return usage("need at least two time samples");
        }
        if !(window > T::zero()) {
            return usage(format!("window length {window} must be positive"));
        }
        if !(taper >= T::zero() && taper <= T::one()) {
            return usage(format!("taper fraction {taper} must lie in [0, 1]"));
        }
        if values.len() != nt * grid.len() {
            return usage("space-time sample count does not match nt * n^2");
        }
        Ok(Self { grid, nt, window, taper, values })
    }

    pub fn from_fn(
        grid: Grid2D<T>,
        nt: usize,
        window: T,
        taper: T,
        mut f: impl FnMut(T, [T; 2]) -> Complex<T>,
    ) -> Result<Self> {
        let dt = window / T::from_usize(nt).unwrap();
        let mut values = Vec::with_capacity(nt * grid.len());
        for j in 0..nt {
            let t = dt * T::from_usize(j).unwrap();
            values.extend((0..grid.len()).map(|i| f(t, grid.point(i))));
        }
        Self::new(grid, nt, window, taper, values)
    }

    /// Stack physical slices taken at `t_j = j T_w / nt`.
    pub fn from_slices(window: T, taper: T, slices: &[ComplexField<T>]) -> Result<Self> {
        let Some(first) = slices.first() else {
            return usage("no time slices");
        };
        let grid = *first.grid();
        if slices.iter().any(|s| s.grid() != &grid || s.repr() != Repr::Physical) {
            return usage("time slices must be physical fields on a common grid");
        }
        let values = slices.iter().flat_map(|s| s.values().iter().copied()).collect();
        Self::new(grid, slices.len(), window, taper, values)
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }
    pub fn nt(&self) -> usize {
        self.nt
    }
    pub fn window(&self) -> T {
        self.window
    }
    pub fn taper(&self) -> T {
        self.taper
    }
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn time(&self, j: usize) -> T {
        self.window * T::from_usize(j).unwrap() / T::from_usize(self.nt).unwrap()
    }

    /// Time-frequency `tau_m = 2 pi m / T_w` of FFT index `m`.
    pub fn tau(&self, m: usize) -> T {
        let k = crate::spectral::grid::wavenumber(m, self.nt);
        T::TAU() * T::from_isize(k).unwrap() / self.window
    }

    /// Values multiplied by the taper.
    pub fn tapered(&self) -> Vec<Complex<T>> {
        let np = self.grid.len();
        let mut out = self.values.clone();
        for j in 0..self.nt {
            let w = taper_weight(self.time(j), self.window, self.taper);
            for v in &mut out[j * np..(j + 1) * np] {
                *v = *v * w;
            }
        }
        out
    }

    /// Space-time transform of the tapered field, `[m][xi]` layout, normalized
    /// so that `sum |u~|^2 dtau dxi^2 = int |u|^2 dt dx`.
    pub fn spectrum(&self) -> Vec<Complex<T>> {
        let n = self.grid.n();
        let np = n * n;
        let mut data = self.tapered();
        let mut planner = FftPlanner::new();
        let fx = planner.plan_fft_forward(n);
        let ft = planner.plan_fft_forward(self.nt);
        let zero = Complex::new(T::zero(), T::zero());
        let mut scratch = vec![zero; fx.get_inplace_scratch_len().max(ft.get_inplace_scratch_len())];
        for slice in data.chunks_mut(np) {
            fx.process_with_scratch(slice, &mut scratch);
            crate::spectral::transform::transpose_square(slice, n);
            fx.process_with_scratch(slice, &mut scratch);
            crate::spectral::transform::transpose_square(slice, n);
        }
        let mut column = vec![zero; self.nt];
        for idx in 0..np {
            for j in 0..self.nt {
                column[j] = data[j * np + idx];
            }
            ft.process_with_scratch(&mut column, &mut scratch);
            for j in 0..self.nt {
                data[j * np + idx] = column[j];
            }
        }
        let dt = self.window / T::from_usize(self.nt).unwrap();
        let scale = dt * self.grid.physical_cell() / T::TAU().powf(T::lit(1.5));
        for v in &mut data {
            *v = *v * scale;
        }
        data
    }

    /// Untapered field whose [`spectrum`](Self::spectrum) is `spec` (`[m][xi]` layout).
    pub fn from_spectrum(grid: Grid2D<T>, nt: usize, window: T, spec: &[Complex<T>]) -> Result<Self> {
        let n = grid.n();
        let np = n * n;
        if nt == 0 || spec.len() != nt * np {
            return usage("space-time spectrum length does not match nt * n^2");
        }
        let mut data = spec.to_vec();
        let mut planner = FftPlanner::new();
        let fx = planner.plan_fft_inverse(n);
        let ft = planner.plan_fft_inverse(nt);
        let zero = Complex::new(T::zero(), T::zero());
        let mut scratch = vec![zero; fx.get_inplace_scratch_len().max(ft.get_inplace_scratch_len())];
        let mut column = vec![zero; nt];
        for idx in 0..np {
            for j in 0..nt {
                column[j] = data[j * np + idx];
            }
            ft.process_with_scratch(&mut column, &mut scratch);
            for j in 0..nt {
                data[j * np + idx] = column[j];
            }
        }
        for slice in data.chunks_mut(np) {
            fx.process_with_scratch(slice, &mut scratch);
            crate::spectral::transform::transpose_square(slice, n);
            fx.process_with_scratch(slice, &mut scratch);
            crate::spectral::transform::transpose_square(slice, n);
        }
        let dt = window / T::from_usize(nt).unwrap();
        let count = T::from_usize(nt * np).unwrap();
        let scale = T::TAU().powf(T::lit(1.5)) / (dt * grid.physical_cell() * count);
        for v in &mut data {
            *v = *v * scale;
        }
        Self::new(grid, nt, window, T::zero(), data)
    }

    pub fn dtau(&self) -> T {
        T::TAU() / self.window
    }

    /// `L^2` norm of the tapered samples over the window and torus.
    pub fn tapered_l2(&self) -> T {
        let dt = self.window / T::from_usize(self.nt).unwrap();
        let s: T = self.tapered().iter().map(|v| v.norm_sqr()).sum();
        (s * dt * self.grid.physical_cell()).sqrt()
    }
}

/// `|| <xi>^s <modulation>^b u~ ||_{L^{r'}_{tau xi}}` of the tapered window.
pub fn xsb_norm<T: Real>(u: &SpacetimeField<T>, s: T, b: T, r: T, mode: XsbMode) -> Result<T> {
    check_r(r)?;
    let spec = u.spectrum();
    Ok(xsb_norm_from_spectrum(u, &spec, s, b, r, mode))
}

pub(crate) fn xsb_norm_from_spectrum<T: Real>(
    u: &SpacetimeField<T>,
    spec: &[Complex<T>],
    s: T,
    b: T,
    r: T,
    mode: XsbMode,
) -> T {
    let g = u.grid();
    let np = g.len();
    let taus: Vec<T> = (0..u.nt()).map(|m| u.tau(m)).collect();
    let space: Vec<(T, T)> = (0..np)
        .map(|i| {
            let xi = g.xi(i);
            (bracket(xi).powf(s), abs_xi(xi))
        })
        .collect();
    let one = T::one();
    let terms = spec.iter().enumerate().map(|(k, v)| {
        let tau = taus[k / np];
        let (ws, d) = space[k % np];
        let modulation = match mode {
            XsbMode::Plus => tau + d,
            XsbMode::Minus => tau - d,
            XsbMode::Absolute => tau.abs() - d,
        };
        ws * (one + modulation * modulation).sqrt().powf(b) * v.norm()
    });
    weighted_lp(terms, dual_exponent(r), u.dtau() * g.spectral_cell())
}
