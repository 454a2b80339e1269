use std::sync::{Arc, Mutex};

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{usage, Error, Result};
use crate::real::Real;
use crate::spectral::field::{ComplexField, Repr};
use crate::spectral::grid::{wavenumber, Grid2D};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Default cap on scratch memory for padded products.
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;

/// Reusable FFT plans for one grid, including zero-padded grids for products.
///
/// Forward: `f^(xi) = (1/2pi) (L/n)^2 sum_x f(x) e^{-i x.xi}`.
/// Inverse: `f(x) = (1/2pi) (2pi/L)^2 sum_xi f^(xi) e^{i x.xi}`.
/// With these, `sum |f|^2 (L/n)^2 = sum |f^|^2 (2pi/L)^2`.
pub struct SpectralPlan<T: Real> {
    grid: Grid2D<T>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    padded: Vec<PaddedPlan<T>>,
    memory_budget: usize,
}

struct PaddedPlan<T: Real> {
    m: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> Clone for PaddedPlan<T> {
    fn clone(&self) -> Self {
        Self { m: self.m, fwd: Arc::clone(&self.fwd), inv: Arc::clone(&self.inv) }
    }
}

impl<T: Real> std::fmt::Debug for SpectralPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("grid", &self.grid).finish()
    }
}

impl<T: Real> SpectralPlan<T> {
    pub fn new(grid: Grid2D<T>) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n();
        let padded = [2usize, 3]
            .iter()
            .map(|&f| PaddedPlan {
                m: f * n,
                fwd: planner.plan_fft_forward(f * n),
                inv: planner.plan_fft_inverse(f * n),
            })
            .collect();
        Self {
            grid,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            padded,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }

    pub fn with_memory_budget(mut self, bytes: usize) -> Self {
        self.memory_budget = bytes;
        self
    }

    pub fn memory_budget(&self) -> usize {
        self.memory_budget
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    pub fn transform(&self, field: &ComplexField<T>, direction: Direction) -> Result<ComplexField<T>> {
        if field.grid() != &self.grid {
            return usage("field grid does not match the transform plan");
        }
        let (want, fft, out_repr, scale) = match direction {
            Direction::Forward => (Repr::Physical, &self.fwd, Repr::Spectral, self.grid.physical_cell() / T::TAU()),
            Direction::Inverse => (Repr::Spectral, &self.inv, Repr::Physical, self.grid.spectral_cell() / T::TAU()),
        };
        if field.repr() != want {
            return usage(format!("{direction:?} transform needs a {want:?} field, got {:?}", field.repr()));
        }
        let mut data = field.values().to_vec();
        fft2_square(fft.as_ref(), &mut data, self.grid.n());
        for v in &mut data {
            *v = *v * scale;
        }
        Ok(ComplexField::from_vec_unchecked(self.grid, data, out_repr))
    }

    pub fn forward(&self, field: &ComplexField<T>) -> Result<ComplexField<T>> {
        self.transform(field, Direction::Forward)
    }

    pub fn inverse(&self, field: &ComplexField<T>) -> Result<ComplexField<T>> {
        self.transform(field, Direction::Inverse)
    }

    /// Spectral copy of `field`, transforming if needed.
    pub fn spectral(&self, field: &ComplexField<T>) -> Result<ComplexField<T>> {
        match field.repr() {
            Repr::Spectral => Ok(field.clone()),
            Repr::Physical => self.forward(field),
        }
    }

    /// Physical copy of `field`, transforming if needed.
    pub fn physical(&self, field: &ComplexField<T>) -> Result<ComplexField<T>> {
        match field.repr() {
            Repr::Physical => Ok(field.clone()),
            Repr::Spectral => self.inverse(field),
        }
    }

    /// Padding factor `ceil((p+1)/2)` for products of degree `p`.
    pub fn padding_factor(degree: usize) -> usize {
        (degree + 2) / 2
    }

    /// Evaluator on the zero-padded grid that resolves products of degree `degree`.
    ///
    /// `fields` is the number of padded arrays the caller intends to keep alive;
    /// it is checked against the memory budget.
    pub fn padded(&self, degree: usize, fields: usize) -> Result<Padded<T>> {
        if degree == 0 {
            return usage("product degree must be at least 1");
        }
        let m = Self::padding_factor(degree).max(1) * self.grid.n();
        let bytes = m * m * std::mem::size_of::<Complex<T>>() * (fields + 2);
        if bytes > self.memory_budget {
            return Err(Error::Resource(format!(
                "padded grid {m}x{m} with {fields} arrays needs {bytes} bytes, budget is {}",
                self.memory_budget
            )));
        }
        let plan = match self.padded.iter().find(|p| p.m == m) {
            Some(p) => p.clone(),
            None => {
                let mut planner = FftPlanner::new();
                PaddedPlan { m, fwd: planner.plan_fft_forward(m), inv: planner.plan_fft_inverse(m) }
            }
        };
        Ok(Padded::with_plan(self.grid, plan))
    }
}

/// Physical evaluation on an `m x m` grid for spectral fields band-limited to `n`.
///
/// Physical arrays produced here are stored with axis 1 (`x2`) outermost; all
/// lifted arrays share that layout so pointwise work is layout-agnostic.
/// Internal scratch is reused across calls, so keeping one evaluator alive
/// avoids repeated large allocations.
pub struct Padded<T: Real> {
    grid: Grid2D<T>,
    plan: PaddedPlan<T>,
    work: Mutex<PadWork<T>>,
}

struct PadWork<T> {
    rows: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
    packed: Vec<Complex<T>>,
}

impl<T: Real> Padded<T> {
    fn with_plan(grid: Grid2D<T>, plan: PaddedPlan<T>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let len = plan.fwd.get_inplace_scratch_len().max(plan.inv.get_inplace_scratch_len());
        let work = PadWork { rows: vec![zero; grid.n() * plan.m], scratch: vec![zero; len], packed: Vec::new() };
        Self { grid, plan, work: Mutex::new(work) }
    }

    pub fn m(&self) -> usize {
        self.plan.m
    }

    pub fn len(&self) -> usize {
        self.plan.m * self.plan.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    fn work(&self) -> std::sync::MutexGuard<'_, PadWork<T>> {
        self.work.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Physical samples of a spectral field on the padded grid.
    pub fn lift(&self, spec: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = Vec::new();
        self.lift_into(spec, &mut out);
        out
    }

    /// [`Padded::lift`] into a reusable buffer.
    pub fn lift_into(&self, spec: &[Complex<T>], out: &mut Vec<Complex<T>>) {
        let mut w = self.work();
        let PadWork { rows, scratch, .. } = &mut *w;
        lift_impl(&self.grid, &self.plan, spec, out, rows, scratch);
    }

    /// Lift two real fields at once; the result holds `a` in `re` and `b` in `im`.
    pub fn lift_real_pair(&self, a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = Vec::new();
        self.lift_real_pair_into(a, b, &mut out);
        out
    }

    pub fn lift_real_pair_into(&self, a: &[Complex<T>], b: &[Complex<T>], out: &mut Vec<Complex<T>>) {
        let mut w = self.work();
        let PadWork { rows, scratch, packed } = &mut *w;
        let i = Complex::new(T::zero(), T::one());
        packed.clear();
        packed.extend(a.iter().zip(b).map(|(&x, &y)| x + i * y));
        lift_impl(&self.grid, &self.plan, packed, out, rows, scratch);
    }

    /// Spectral coefficients on the original lattice, truncated and Nyquist-free.
    pub fn project(&self, mut phys: Vec<Complex<T>>) -> Vec<Complex<T>> {
        let mut out = Vec::new();
        self.project_into(&mut phys, &mut out);
        out
    }

    /// [`Padded::project`] into a reusable buffer; `phys` is used as scratch.
    pub fn project_into(&self, phys: &mut [Complex<T>], out: &mut Vec<Complex<T>>) {
        let n = self.grid.n();
        let m = self.plan.m;
        assert_eq!(phys.len(), m * m, "padded array has the wrong size");
        let zero = Complex::new(T::zero(), T::zero());
        let mut w = self.work();
        let PadWork { rows, scratch, .. } = &mut *w;
        self.plan.fwd.process_with_scratch(phys, scratch);
        // low wavenumbers 0..n/2 and high -n/2+1..-1; the Nyquist row stays zero
        let h = n / 2;
        gather_block(phys, &mut rows[..h * m], h, m, 0);
        rows[h * m..(h + 1) * m].iter_mut().for_each(|v| *v = zero);
        gather_block(phys, &mut rows[(h + 1) * m..], h - 1, m, m - (h - 1));
        self.plan.fwd.process_with_scratch(rows, scratch);
        let h = self.grid.length() / T::from_usize(m).unwrap();
        let scale = h * h / T::TAU();
        out.clear();
        out.resize(n * n, zero);
        for i1 in 0..n {
            if i1 == n / 2 {
                continue;
            }
            for i2 in 0..n {
                if i2 == n / 2 {
                    continue;
                }
                let p2 = wavenumber(i2, n).rem_euclid(m as isize) as usize;
                out[i1 * n + i2] = rows[i1 * m + p2] * scale;
            }
        }
    }

    /// Project two real physical arrays at once.
    pub fn project_real_pair(&self, a: &[T], b: &[T]) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let mut packed: Vec<Complex<T>> = a.iter().zip(b).map(|(&x, &y)| Complex::new(x, y)).collect();
        let mut z = Vec::new();
        self.project_into(&mut packed, &mut z);
        split_real_pair(&self.grid, &z)
    }

    pub fn project_field(&self, phys: Vec<Complex<T>>) -> ComplexField<T> {
        ComplexField::from_vec_unchecked(self.grid, self.project(phys), Repr::Spectral)
    }
}

fn lift_impl<T: Real>(
    grid: &Grid2D<T>,
    plan: &PaddedPlan<T>,
    spec: &[Complex<T>],
    out: &mut Vec<Complex<T>>,
    rows: &mut [Complex<T>],
    scratch: &mut [Complex<T>],
) {
    let n = grid.n();
    let m = plan.m;
    assert_eq!(spec.len(), n * n, "spectral array has the wrong size");
    let zero = Complex::new(T::zero(), T::zero());
    let scale = grid.spectral_cell() / T::TAU();
    let h = n / 2;
    let hi = m - (n - h);
    for i1 in 0..n {
        let src = &spec[i1 * n..(i1 + 1) * n];
        let dst = &mut rows[i1 * m..(i1 + 1) * m];
        for (d, &v) in dst[..h].iter_mut().zip(&src[..h]) {
            *d = v * scale;
        }
        dst[h..hi].iter_mut().for_each(|v| *v = zero);
        for (d, &v) in dst[hi..].iter_mut().zip(&src[h..]) {
            *d = v * scale;
        }
    }
    plan.inv.process_with_scratch(rows, scratch);
    if out.len() != m * m {
        out.clear();
        out.resize(m * m, zero);
    }
    // rows i1 land in column p1(i1); low and high halves are contiguous column runs
    transpose_block(&rows[..h * m], out, h, m, 0);
    transpose_block(&rows[h * m..], out, n - h, m, hi);
    for row in out.chunks_exact_mut(m) {
        row[h..hi].iter_mut().for_each(|v| *v = zero);
    }
    plan.inv.process_with_scratch(out, scratch);
}

/// `dst[x * m + col0 + r] = src[r * m + x]` for `r < count`, `x < m`, in cache blocks.
fn transpose_block<X: Copy>(src: &[X], dst: &mut [X], count: usize, m: usize, col0: usize) {
    const B: usize = 16;
    for r0 in (0..count).step_by(B) {
        let r1 = (r0 + B).min(count);
        for x0 in (0..m).step_by(B) {
            let x1 = (x0 + B).min(m);
            for r in r0..r1 {
                let row = &src[r * m..(r + 1) * m];
                for x in x0..x1 {
                    dst[x * m + col0 + r] = row[x];
                }
            }
        }
    }
}

/// Inverse of [`transpose_block`]: `dst[r * m + x] = src[x * m + col0 + r]`.
fn gather_block<X: Copy>(src: &[X], dst: &mut [X], count: usize, m: usize, col0: usize) {
    const B: usize = 16;
    for r0 in (0..count).step_by(B) {
        let r1 = (r0 + B).min(count);
        for x0 in (0..m).step_by(B) {
            let x1 = (x0 + B).min(m);
            for r in r0..r1 {
                let row = &mut dst[r * m..(r + 1) * m];
                for x in x0..x1 {
                    row[x] = src[x * m + col0 + r];
                }
            }
        }
    }
}

/// Recover the spectra of two real fields from the spectrum of `a + i b`.
pub(crate) fn split_real_pair<T: Real>(grid: &Grid2D<T>, z: &[Complex<T>]) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let half = T::lit(0.5);
    let zero = Complex::new(T::zero(), T::zero());
    let mut a = vec![zero; z.len()];
    let mut b = vec![zero; z.len()];
    for idx in 0..z.len() {
        if let Some(j) = grid.negated(idx) {
            let p = z[idx];
            let q = z[j].conj();
            a[idx] = (p + q) * half;
            let d = (p - q) * half;
            b[idx] = Complex::new(d.im, -d.re);
        }
    }
    (a, b)
}

/// In-place 2D FFT of a square row-major array.
fn fft2_square<T: Real>(fft: &dyn Fft<T>, data: &mut [Complex<T>], n: usize) {
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
    transpose_square(data, n);
    fft.process_with_scratch(data, &mut scratch);
    transpose_square(data, n);
}

pub(crate) fn transpose_square<X: Copy>(data: &mut [X], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}
