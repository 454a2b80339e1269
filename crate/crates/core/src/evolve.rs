//! Integrating-factor time stepping and the Picard iteration driver.

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::norms::{fl_norm, xsb_norm, SpacetimeField, XsbMode};
use crate::real::{Real, Sign};
use crate::spectral::field::ComplexField;
use crate::spectral::transform::SpectralPlan;
use crate::wave::{Propagator, WaveState};

/// A system `d/dt u = L u + N(u)` whose linear part is diagonal in the half-wave basis.
pub trait HalfWaveSystem<T: Real> {
    /// The nonlinear part `N(u)`, laid out like `u`.
    fn nonlinear(&self, state: &WaveState<T>) -> Result<WaveState<T>>;

    /// Full time derivative `L u + N(u)`.
    fn rhs(&self, state: &WaveState<T>) -> Result<WaveState<T>> {
        let mut d = state.linear_derivative();
        d.axpy(T::one(), &self.nonlinear(state)?);
        Ok(d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    EtdMidpoint,
    EtdEuler,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "etd-midpoint" => Ok(Scheme::EtdMidpoint),
            "etd-euler" => Ok(Scheme::EtdEuler),
            _ => usage(format!("unknown scheme '{s}' (expected etd-midpoint or etd-euler)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig<T> {
    pub dt: T,
    pub scheme: Scheme,
    pub horizon: T,
    pub snapshot_stride: usize,
}

impl<T: Real> IntegratorConfig<T> {
    pub fn new(dt: T, horizon: T) -> Result<Self> {
        let c = Self { dt, scheme: Scheme::EtdMidpoint, horizon, snapshot_stride: 1 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) {
            return usage(format!("dt = {} must be positive", self.dt));
        }
        if !(self.horizon >= self.dt) {
            return usage(format!("horizon T = {} must be at least dt = {}", self.horizon, self.dt));
        }
        if self.snapshot_stride == 0 {
            return usage("snapshot stride must be at least 1");
        }
        Ok(())
    }

    /// Number of steps, `round(T / dt)`.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round().to_usize().unwrap_or(0)
    }
}

/// Advance by the exact linear flow only.
pub fn linear_propagate<T: Real>(state: &WaveState<T>, dt: T) -> WaveState<T> {
    Propagator::for_state(state, dt).apply(state)
}

/// Fixed-step integrator with cached phase tables.
pub struct Stepper<T> {
    dt: T,
    scheme: Scheme,
    full: Propagator<T>,
    half: Propagator<T>,
}

impl<T: Real> Stepper<T> {
    pub fn new(template: &WaveState<T>, dt: T, scheme: Scheme) -> Self {
        Self {
            dt,
            scheme,
            full: Propagator::for_state(template, dt),
            half: Propagator::for_state(template, dt * T::lit(0.5)),
        }
    }

    /// One step. Midpoint: `u* = e^{L h/2}(u + h/2 N(u))`, `u' = e^{L h} u + h e^{L h/2} N(u*)`.
    pub fn step<S: HalfWaveSystem<T> + ?Sized>(&self, system: &S, state: &WaveState<T>) -> Result<WaveState<T>> {
        let h = self.dt;
        let k1 = system.nonlinear(state)?;
        let mut out = match self.scheme {
            Scheme::EtdEuler => {
                let mut u = state.clone();
                u.axpy(h, &k1);
                self.full.apply_in_place(&mut u);
                u
            }
            Scheme::EtdMidpoint => {
                let mut mid = state.clone();
                mid.axpy(h * T::lit(0.5), &k1);
                self.half.apply_in_place(&mut mid);
                mid.t = state.t + h * T::lit(0.5);
                let mut k2 = system.nonlinear(&mid)?;
                self.half.apply_in_place(&mut k2);
                let mut u = state.clone();
                self.full.apply_in_place(&mut u);
                u.axpy(h, &k2);
                u
            }
        };
        out.t = state.t + h;
        if !out.is_finite() {
            return Err(Error::Blowup { time: out.t.to_f64() });
        }
        Ok(out)
    }
}

/// Single step with a freshly built propagator.
pub fn step<T: Real, S: HalfWaveSystem<T> + ?Sized>(
    system: &S,
    state: &WaveState<T>,
    config: &IntegratorConfig<T>,
) -> Result<WaveState<T>> {
    Stepper::new(state, config.dt, config.scheme).step(system, state)
}

/// Integrate to the horizon, calling `observe` on the initial state, every
/// `snapshot_stride` steps, and on the final state.
pub fn integrate<T: Real, S: HalfWaveSystem<T> + ?Sized>(
    system: &S,
    initial: &WaveState<T>,
    config: &IntegratorConfig<T>,
    mut observe: impl FnMut(&WaveState<T>) -> Result<()>,
) -> Result<WaveState<T>> {
    config.validate()?;
    let stepper = Stepper::new(initial, config.dt, config.scheme);
    let steps = config.steps();
    let mut u = initial.clone();
    observe(&u)?;
    for k in 1..=steps {
        u = stepper.step(system, &u)?;
        if k % config.snapshot_stride == 0 || k == steps {
            observe(&u)?;
        }
    }
    Ok(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig<T> {
    pub iterations: usize,
    pub horizon: T,
    pub dt: T,
    /// Exponents of the difference norms.
    pub s: T,
    pub b: T,
    pub r: T,
    pub taper: T,
    pub keep_iterates: bool,
    pub memory_budget: usize,
}

impl<T: Real> PicardConfig<T> {
    pub fn new(iterations: usize, horizon: T, dt: T, s: T, b: T, r: T) -> Result<Self> {
        let c = Self {
            iterations,
            horizon,
            dt,
            s,
            b,
            r,
            taper: T::lit(crate::norms::DEFAULT_TAPER),
            keep_iterates: false,
            memory_budget: crate::spectral::transform::DEFAULT_MEMORY_BUDGET,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return usage("Picard iteration count must be at least 1");
        }
        IntegratorConfig { dt: self.dt, scheme: Scheme::EtdMidpoint, horizon: self.horizon, snapshot_stride: 1 }
            .validate()
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round().to_usize().unwrap_or(0)
    }
}

/// Size of `u^(n) - u^(n-1)` over the window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardDifference<T> {
    pub iteration: usize,
    pub xsb: T,
    pub sup_fl: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContractionStatus {
    Contracting,
    NotContracting,
    /// A difference norm grew tenfold over two iterations; iteration stopped.
    Diverged {
        iteration: usize,
    },
}

#[derive(Clone, Debug)]
pub struct PicardOutcome<T> {
    pub differences: Vec<PicardDifference<T>>,
    pub status: ContractionStatus,
    /// Final iterate on the time grid `t_k = k dt`.
    pub last: Vec<WaveState<T>>,
    /// All iterates when requested.
    pub iterates: Vec<Vec<WaveState<T>>>,
}

impl<T: Real> PicardOutcome<T> {
    /// Successive ratios `||d_{n+1}|| / ||d_n||` of the windowed norm.
    pub fn ratios(&self) -> Vec<T> {
        self.differences
            .windows(2)
            .map(|w| if w[0].xsb == T::zero() { T::zero() } else { w[1].xsb / w[0].xsb })
            .collect()
    }
}

/// Picard iteration in the interaction picture with trapezoidal Duhamel quadrature:
/// `u_{k+1} = e^{L dt}(u_k + dt/2 N_k) + dt/2 N_{k+1}` with `N_k = N(u^(n-1)(t_k))`.
pub fn picard_iterate<T: Real, S: HalfWaveSystem<T> + ?Sized>(
    system: &S,
    data: &WaveState<T>,
    config: &PicardConfig<T>,
) -> Result<PicardOutcome<T>> {
    config.validate()?;
    let steps = config.steps();
    let per_state = data.fields.len() * data.grid().len() * std::mem::size_of::<num_complex::Complex<T>>();
    let histories = if config.keep_iterates { config.iterations + 1 } else { 2 };
    let need = per_state * (steps + 1) * (histories + 1);
    if need > config.memory_budget {
        return Err(Error::Resource(format!("Picard histories need {need} bytes, budget is {}", config.memory_budget)));
    }
    let prop = Propagator::for_state(data, config.dt);
    let plan = SpectralPlan::new(*data.grid());

    let mut current = Vec::with_capacity(steps + 1);
    current.push(data.clone());
    for k in 0..steps {
        let next = prop.apply(&current[k]);
        current.push(next);
    }

    let mut iterates = Vec::new();
    let mut differences: Vec<PicardDifference<T>> = Vec::new();
    let mut status = ContractionStatus::Contracting;
    let h2 = config.dt * T::lit(0.5);
    for n in 1..=config.iterations {
        let forcing: Vec<WaveState<T>> = current.iter().map(|u| system.nonlinear(u)).collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(steps + 1);
        next.push(data.clone());
        for k in 0..steps {
            let mut u = next[k].clone();
            u.axpy(h2, &forcing[k]);
            let mut u = prop.apply(&u);
            u.axpy(h2, &forcing[k + 1]);
            if !u.is_finite() {
                return Err(Error::Blowup { time: u.t.to_f64() });
            }
            next.push(u);
        }
        let diff = history_difference(&plan, &next, &current, config, n)?;
        differences.push(diff);
        if config.keep_iterates {
            iterates.push(std::mem::replace(&mut current, next));
        } else {
            current = next;
        }
        if n >= 3 {
            let a = differences[n - 3].xsb;
            if a > T::zero() && differences[n - 1].xsb >= T::lit(10.0) * a {
                status = ContractionStatus::Diverged { iteration: n };
                break;
            }
        }
    }
    if status == ContractionStatus::Contracting {
        let ratios: Vec<T> = differences
            .windows(2)
            .map(|w| if w[0].xsb == T::zero() { T::zero() } else { w[1].xsb / w[0].xsb })
            .collect();
        if ratios.iter().any(|&q| q >= T::one()) {
            status = ContractionStatus::NotContracting;
        }
    }
    if config.keep_iterates {
        iterates.push(current.clone());
    }
    Ok(PicardOutcome { differences, status, last: current, iterates })
}

fn history_difference<T: Real>(
    plan: &SpectralPlan<T>,
    a: &[WaveState<T>],
    b: &[WaveState<T>],
    config: &PicardConfig<T>,
    iteration: usize,
) -> Result<PicardDifference<T>> {
    let diffs: Vec<WaveState<T>> = a.iter().zip(b).map(|(x, y)| x.difference(y)).collect();
    let grid = *diffs[0].grid();
    // zero-mode channels enter the spatial norm as a mean coefficient
    let zero_weight = grid.area() / T::TAU() * grid.spectral_cell().powf(T::one() - T::one() / config.r);
    let mut sup_fl = T::zero();
    for d in &diffs {
        let mut total = T::zero();
        for f in &d.fields {
            total = total + fl_norm(f, config.s, config.r)?;
        }
        for z in &d.zero_modes {
            total = total + z.value.abs() * zero_weight;
        }
        sup_fl = sup_fl.max(total);
    }
    let steps = diffs.len() - 1;
    let window = config.dt * T::from_usize(steps.max(1)).unwrap();
    let mut xsb = T::zero();
    for (c, comp) in diffs[0].components.iter().enumerate() {
        let slices: Vec<ComplexField<T>> =
            diffs[..steps.max(1)].iter().map(|d| plan.inverse(&d.fields[c])).collect::<Result<_>>()?;
        if slices.len() < 2 {
            continue;
        }
        let st = SpacetimeField::from_slices(window, config.taper, &slices)?;
        let mode = match comp.sign {
            Sign::Plus => XsbMode::Plus,
            Sign::Minus => XsbMode::Minus,
        };
        xsb = xsb + xsb_norm(&st, config.s, config.b, config.r, mode)?;
    }
    Ok(PicardDifference { iteration, xsb, sup_fl })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid2D;
    use crate::spectral::halfwave::WaveOperator;
    use crate::wave::{Component, ZeroMode};
    use num_complex::Complex;

    struct Free;
    impl HalfWaveSystem<f64> for Free {
        fn nonlinear(&self, s: &WaveState<f64>) -> Result<WaveState<f64>> {
            Ok(s.zeros_like())
        }
    }

    /// `N(u) = c u` on every component: exact solution `exp((L + c) t)`.
    struct Damped(f64);
    impl HalfWaveSystem<f64> for Damped {
        fn nonlinear(&self, s: &WaveState<f64>) -> Result<WaveState<f64>> {
            let mut z = s.zeros_like();
            z.axpy(self.0, s);
            Ok(z)
        }
    }

    fn state() -> WaveState<f64> {
        let g = Grid2D::new(8, std::f64::consts::TAU).unwrap();
        let f =
            ComplexField::from_fn_spectral(g, |xi| Complex::new((-(xi[0] * xi[0] + xi[1] * xi[1]) / 4.0).exp(), 0.1));
        WaveState::new(
            0.0,
            vec![f.clone(), f],
            vec![
                Component { sign: Sign::Plus, op: WaveOperator::D },
                Component { sign: Sign::Minus, op: WaveOperator::Bracket },
            ],
            vec![ZeroMode { value: 0.5, rate: -1.0 }],
        )
        .unwrap()
    }

    #[test]
    fn free_step_equals_linear_propagation() {
        let s = state();
        let cfg = IntegratorConfig::new(0.01, 1.0).unwrap();
        let a = step(&Free, &s, &cfg).unwrap();
        let b = linear_propagate(&s, 0.01);
        assert!(a.difference(&b).l2_norm() == 0.0);
        assert!((a.t - 0.01).abs() < 1e-16);
    }

    #[test]
    fn midpoint_is_second_order_on_linear_damping() {
        let s = state();
        let exact = {
            let mut e = linear_propagate(&s, 0.5);
            let k = (-0.5f64 * 0.5).exp();
            for f in &mut e.fields {
                *f = f.scale(Complex::new(k, 0.0));
            }
            e
        };
        let err = |dt: f64| {
            let cfg = IntegratorConfig::new(dt, 0.5).unwrap();
            let u = integrate(&Damped(-0.5), &s, &cfg, |_| Ok(())).unwrap();
            let mut d = u.difference(&exact);
            d.zero_modes.clear();
            d.l2_norm()
        };
        let slope = (err(0.02) / err(0.01)).log2();
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn picard_of_free_flow_has_zero_differences() {
        let s = state();
        let cfg = PicardConfig::new(2, 0.2, 0.02, 0.0, 0.6, 2.0).unwrap();
        let out = picard_iterate(&Free, &s, &cfg).unwrap();
        assert!(out.differences.iter().all(|d| d.xsb == 0.0 && d.sup_fl == 0.0));
        let end = linear_propagate(&s, 0.2);
        assert!(out.last.last().unwrap().difference(&end).l2_norm() < 1e-13);
    }

    #[test]
    fn blowup_is_reported() {
        let s = state();
        let cfg = IntegratorConfig::new(0.5, 50.0).unwrap();
        match integrate(&Damped(500.0), &s, &cfg, |_| Ok(())) {
            Err(Error::Blowup { time }) => assert!(time > 0.0),
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(0.0, 1.0).is_err());
        assert!(IntegratorConfig::new(0.1, 0.01).is_err());
        assert!(PicardConfig::new(0, 1.0, 0.1, 0.0, 0.5, 2.0).is_err());
        assert_eq!("etd-euler".parse::<Scheme>().unwrap(), Scheme::EtdEuler);
    }
}
