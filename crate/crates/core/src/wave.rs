//! First-order half-wave state vectors shared by both systems.

use std::collections::HashMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::real::{Real, Sign};
use crate::spectral::field::ComplexField;
use crate::spectral::grid::Grid2D;
use crate::spectral::halfwave::WaveOperator;

/// Dispersion label of one spectral component: `d/dt u = -/+ i Op u + ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    pub sign: Sign,
    pub op: WaveOperator,
}

/// Spatial mean of a gauge component and its time derivative.
///
/// Its linear part is `d/dt (value, rate) = (rate, 0)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroMode<T> {
    pub value: T,
    pub rate: T,
}

/// Spectral half-wave components plus zero-mode channels at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveState<T> {
    pub t: T,
    pub fields: Vec<ComplexField<T>>,
    pub components: Vec<Component>,
    pub zero_modes: Vec<ZeroMode<T>>,
}

impl<T: Real> WaveState<T> {
    pub fn new(
        t: T,
        fields: Vec<ComplexField<T>>,
        components: Vec<Component>,
        zero_modes: Vec<ZeroMode<T>>,
    ) -> Result<Self> {
        if fields.is_empty() || fields.len() != components.len() {
            return usage("each field needs exactly one component label");
        }
        let g = *fields[0].grid();
        if fields.iter().any(|f| f.grid() != &g || !f.is_spectral()) {
            return usage("state fields must be spectral on a common grid");
        }
        Ok(Self { t, fields, components, zero_modes })
    }

    pub fn grid(&self) -> &Grid2D<T> {
        self.fields[0].grid()
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            t: self.t,
            fields: self.fields.iter().map(|f| f.zeros_like()).collect(),
            components: self.components.clone(),
            zero_modes: vec![ZeroMode::default(); self.zero_modes.len()],
        }
    }

    /// `self += a * other` on fields and zero modes; time is untouched.
    pub fn axpy(&mut self, a: T, other: &Self) {
        let ac = Complex::new(a, T::zero());
        for (f, g) in self.fields.iter_mut().zip(&other.fields) {
            f.axpy(ac, g);
        }
        for (z, w) in self.zero_modes.iter_mut().zip(&other.zero_modes) {
            z.value = z.value + a * w.value;
            z.rate = z.rate + a * w.rate;
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut d = self.clone();
        d.axpy(-T::one(), other);
        d
    }

    pub fn is_finite(&self) -> bool {
        self.fields.iter().all(|f| f.is_finite())
            && self.zero_modes.iter().all(|z| z.value.is_finite() && z.rate.is_finite())
    }

    /// Combined `L^2` size: fields plus zero-mode channels weighted by the torus area.
    pub fn l2_norm(&self) -> T {
        let area = self.grid().area();
        let f: T = self.fields.iter().map(|f| f.l2_norm().powi(2)).sum();
        let z: T = self.zero_modes.iter().map(|z| (z.value * z.value + z.rate * z.rate) * area).sum();
        (f + z).sqrt()
    }

    /// Linear part of the time derivative: `-/+ i Op u` and `(rate, 0)`.
    pub fn linear_derivative(&self) -> Self {
        let fields = self
            .fields
            .iter()
            .zip(&self.components)
            .map(|(f, c)| {
                let s = c.sign.value::<T>();
                f.map_spectrum(|_, xi, v| {
                    let w = c.op.omega(xi) * s;
                    Complex::new(v.im * w, -v.re * w)
                })
            })
            .collect();
        let zero_modes = self.zero_modes.iter().map(|z| ZeroMode { value: z.rate, rate: T::zero() }).collect();
        Self { t: self.t, fields, components: self.components.clone(), zero_modes }
    }
}

/// Exact linear flow over a fixed time step, with cached phase tables.
#[derive(Clone, Debug)]
pub struct Propagator<T> {
    dt: T,
    grid: Grid2D<T>,
    phases: HashMap<WaveOperator, Vec<Complex<T>>>,
}

impl<T: Real> Propagator<T> {
    pub fn new(grid: Grid2D<T>, dt: T, ops: &[WaveOperator]) -> Self {
        let mut phases = HashMap::new();
        for &op in ops {
            phases.entry(op).or_insert_with(|| {
                (0..grid.len()).map(|i| Complex::from_polar(T::one(), -op.omega(grid.xi(i)) * dt)).collect()
            });
        }
        Self { dt, grid, phases }
    }

    pub fn for_state(state: &WaveState<T>, dt: T) -> Self {
        let ops: Vec<WaveOperator> = state.components.iter().map(|c| c.op).collect();
        Self::new(*state.grid(), dt, &ops)
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Apply `exp(L dt)`; the state's time is advanced by `dt`.
    pub fn apply(&self, state: &WaveState<T>) -> WaveState<T> {
        let mut out = state.clone();
        self.apply_in_place(&mut out);
        out.t = state.t + self.dt;
        out
    }

    /// Apply `exp(L dt)` without touching the time stamp.
    pub fn apply_in_place(&self, state: &mut WaveState<T>) {
        debug_assert_eq!(state.grid(), &self.grid);
        for (f, c) in state.fields.iter_mut().zip(&state.components) {
            let table = self.phases.get(&c.op).expect("propagator lacks a phase table for this operator");
            match c.sign {
                Sign::Plus => {
                    for (v, p) in f.values_mut().iter_mut().zip(table) {
                        *v = *v * p;
                    }
                }
                Sign::Minus => {
                    for (v, p) in f.values_mut().iter_mut().zip(table) {
                        *v = *v * p.conj();
                    }
                }
            }
        }
        for z in &mut state.zero_modes {
            z.value = z.value + z.rate * self.dt;
        }
    }
}
