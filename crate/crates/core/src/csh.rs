//! Chern-Simons-Higgs system in Lorenz gauge, half-wave form.
//!
//! Second-order form (index conventions in [`crate::lorentz`]):
//! `box A_nu = (2/kappa) eps_{mu nu lambda} d^mu J^lambda`, with
//! `J^lambda = Im(conj(phi) d^lambda phi) - A^lambda |phi|^2`, and
//! `(box + 1) phi = 2i A^mu d_mu phi + A^mu A_mu phi - phi V'(|phi|^2) + phi`.

use num_complex::Complex;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::evolve::HalfWaveSystem;
use crate::gauge::{
    gauge_components, gauge_nonlinear, gauge_potential, gauge_source, gauge_velocity, impose_curl, partial,
    real_spectral, split_gauge, ConstraintMode, InitialDataReport, GAUGE_FIELDS,
};
use crate::real::{Real, Sign};
use crate::spectral::dealias::dealias_product;
use crate::spectral::field::{ComplexField, Repr};
use crate::spectral::grid::Grid2D;
use crate::spectral::halfwave::{half_wave_reconstruct, half_wave_split, WaveOperator};
use crate::spectral::multiplier::{abs_xi, bracket, riesz_symbol};
use crate::spectral::transform::{split_real_pair, Padded, SpectralPlan};
use crate::wave::{Component, WaveState};

/// `V(rho) = c0 + c1 rho + c2 rho^2 + c3 rho^3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiggsPotential<T> {
    pub coeffs: [T; 4],
}

impl<T: Real> HiggsPotential<T> {
    /// `kappa^-2 rho (1 - rho)^2`.
    pub fn standard(kappa: T) -> Self {
        let k = (kappa * kappa).recip();
        Self { coeffs: [T::zero(), k, T::lit(-2.0) * k, k] }
    }

    pub fn zero() -> Self {
        Self { coeffs: [T::zero(); 4] }
    }

    pub fn value(&self, rho: T) -> T {
        let c = &self.coeffs;
        c[0] + rho * (c[1] + rho * (c[2] + rho * c[3]))
    }

    /// Coefficients of `V'(rho)` in powers of `rho`.
    pub fn derivative_coeffs(&self) -> [T; 3] {
        let c = &self.coeffs;
        [c[1], T::lit(2.0) * c[2], T::lit(3.0) * c[3]]
    }

    pub fn derivative(&self, rho: T) -> T {
        let d = self.derivative_coeffs();
        d[0] + rho * (d[1] + rho * d[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CshParams<T> {
    pub kappa: T,
    pub potential: HiggsPotential<T>,
}

impl<T: Real> CshParams<T> {
    pub fn new(kappa: T, potential: HiggsPotential<T>) -> Result<Self> {
        if !(kappa > T::zero()) {
            return usage(format!("coupling kappa = {kappa} must be positive"));
        }
        Ok(Self { kappa, potential })
    }

    /// `kappa = 1` with the standard potential.
    pub fn standard() -> Self {
        Self { kappa: T::one(), potential: HiggsPotential::standard(T::one()) }
    }
}

pub const PHI_PLUS: usize = GAUGE_FIELDS;
pub const PHI_MINUS: usize = GAUGE_FIELDS + 1;

pub fn csh_components() -> Vec<Component> {
    let mut c = gauge_components();
    c.push(Component { sign: Sign::Plus, op: WaveOperator::Bracket });
    c.push(Component { sign: Sign::Minus, op: WaveOperator::Bracket });
    c
}

/// Index of `phi_pm` in a CSH state.
pub fn phi_index(sign: Sign) -> usize {
    GAUGE_FIELDS + sign.index()
}

/// Spectral `(phi, d/dt phi)` of a CSH state.
pub fn scalar_field<T: Real>(state: &WaveState<T>) -> (ComplexField<T>, ComplexField<T>) {
    half_wave_reconstruct(&state.fields[PHI_PLUS], &state.fields[PHI_MINUS], WaveOperator::Bracket)
}

/// Currents `J^lambda`, their time derivatives `d/dt J^k`, and the scalar forcing.
#[derive(Clone, Debug)]
pub struct CshSources<T> {
    pub current: [ComplexField<T>; 3],
    pub current_rate: [ComplexField<T>; 2],
    pub scalar: ComplexField<T>,
}

/// The CSH half-wave system on a fixed grid.
pub struct Csh<T: Real> {
    plan: SpectralPlan<T>,
    params: CshParams<T>,
    pad3: Padded<T>,
    pad5: Padded<T>,
    work: Mutex<Workspace<T>>,
}

/// Reusable padded-grid buffers for one evaluator.
#[derive(Default)]
pub(crate) struct Workspace<T> {
    pub lifted: [Vec<Complex<T>>; 7],
    pub outputs: [Vec<Complex<T>>; 4],
    pub spec: Vec<Complex<T>>,
}

impl<T: Real> Csh<T> {
    pub fn new(grid: Grid2D<T>, params: CshParams<T>) -> Result<Self> {
        Self::with_plan(SpectralPlan::new(grid), params)
    }

    /// Use an existing plan (and its memory budget).
    pub fn with_plan(plan: SpectralPlan<T>, params: CshParams<T>) -> Result<Self> {
        CshParams::new(params.kappa, params.potential)?;
        let pad3 = plan.padded(3, 14)?;
        let pad5 = plan.padded(5, 2)?;
        Ok(Self { plan, params, pad3, pad5, work: Mutex::new(Workspace::default()) })
    }

    pub fn plan(&self) -> &SpectralPlan<T> {
        &self.plan
    }

    pub fn params(&self) -> &CshParams<T> {
        &self.params
    }

    pub fn grid(&self) -> &Grid2D<T> {
        self.plan.grid()
    }

    /// Build the `t = 0` state from `A_mu(0) = a_mu`, `phi(0) = f`, `d/dt phi(0) = g`.
    pub fn initial_data(
        &self,
        a: [&ComplexField<T>; 3],
        f: &ComplexField<T>,
        g: &ComplexField<T>,
        mode: ConstraintMode,
    ) -> Result<(WaveState<T>, InitialDataReport)> {
        let grid = *self.grid();
        if a.iter().any(|x| x.grid() != &grid) || f.grid() != &grid || g.grid() != &grid {
            return usage("initial data must live on the system grid");
        }
        let a0 = real_spectral(&self.plan, a[0], "a0")?;
        let a1 = real_spectral(&self.plan, a[1], "a1")?;
        let a2 = real_spectral(&self.plan, a[2], "a2")?;
        let mut f = self.plan.spectral(f)?;
        f.zero_nyquist();
        let mut g = self.plan.spectral(g)?;
        g.zero_nyquist();

        let zero = a0.zeros_like();
        let coupling = T::lit(2.0) / self.params.kappa;
        let src0 =
            self.sources(&[a0.clone(), a1.clone(), a2.clone()], &[zero.clone(), zero.clone(), zero.clone()], &f, &g)?;
        let target = src0.current[0].scale(Complex::new(coupling, T::zero()));
        let (a1, a2, report) = impose_curl(&a1, &a2, &target, mode)?;

        let src =
            self.sources(&[a0.clone(), a1.clone(), a2.clone()], &[zero.clone(), zero.clone(), zero.clone()], &f, &g)?;
        // d_t A_0 = d_1 a_1 + d_2 a_2, d_t A_j = d_j a_0 + (2/kappa) eps_{0jk} J^k
        let at0 = partial(&a1, 0).add(&partial(&a2, 1));
        let c = Complex::new(coupling, T::zero());
        let at1 = partial(&a0, 0).add(&src.current[2].scale(c));
        let at2 = partial(&a0, 1).sub(&src.current[1].scale(c));
        let (mut fields, zero_modes) = split_gauge(&[a0, a1, a2], &[at0, at1, at2])?;
        let (pp, pm) = half_wave_split(&f, &g, WaveOperator::Bracket)?;
        fields.push(pp);
        fields.push(pm);
        Ok((WaveState::new(T::zero(), fields, csh_components(), zero_modes)?, report))
    }

    /// Dealiased currents and scalar forcing from second-order variables.
    ///
    /// Only `a_t[1]`, `a_t[2]` enter (through `d/dt J^k`).
    pub fn sources(
        &self,
        a: &[ComplexField<T>; 3],
        a_t: &[ComplexField<T>; 3],
        phi: &ComplexField<T>,
        phi_t: &ComplexField<T>,
    ) -> Result<CshSources<T>> {
        let grid = *self.grid();
        let d = self.params.potential.derivative_coeffs();
        let mut guard = self.work.lock().unwrap_or_else(|e| e.into_inner());
        let w = &mut *guard;
        let pad = &self.pad3;
        let [pa01, pa2v1, pv2, p, pt, p1, p2] = &mut w.lifted;
        let zero = a[0].zeros_like();
        pad.lift_real_pair_into(a[0].values(), a[1].values(), pa01);
        pad.lift_real_pair_into(a[2].values(), a_t[1].values(), pa2v1);
        pad.lift_real_pair_into(a_t[2].values(), zero.values(), pv2);
        pad.lift_into(phi.values(), p);
        pad.lift_into(phi_t.values(), pt);
        pad.lift_into(partial(phi, 0).values(), p1);
        pad.lift_into(partial(phi, 1).values(), p2);

        let two = T::lit(2.0);
        let zc = Complex::new(T::zero(), T::zero());
        let [o01, o2q, ok, onl] = &mut w.outputs;
        for o in [&mut *o01, &mut *o2q, &mut *ok, &mut *onl] {
            // every entry is overwritten below
            o.resize(pad.len(), zc);
        }
        for i in 0..pad.len() {
            let (a0, a1) = (pa01[i].re, pa01[i].im);
            let (a2, v1) = (pa2v1[i].re, pa2v1[i].im);
            let v2 = pv2[i].re;
            let (f, ft, f1, f2) = (p[i], pt[i], p1[i], p2[i]);
            let rho = f.norm_sqr();
            let fc = f.conj();
            let ftc = ft.conj();
            let qi = (fc * ft).im;
            let rho_t = two * (fc * ft).re;
            let j0 = qi - a0 * rho;
            let j1 = -(fc * f1).im + a1 * rho;
            let j2 = -(fc * f2).im + a2 * rho;
            let k1 = -two * (ftc * f1).im + v1 * rho + a1 * rho_t;
            let k2 = -two * (ftc * f2).im + v2 * rho + a2 * rho_t;
            o01[i] = Complex::new(j0, j1);
            o2q[i] = Complex::new(j2, qi);
            ok[i] = Complex::new(k1, k2);
            let cov = ft * a0 - f1 * a1 - f2 * a2;
            let quad = a0 * a0 - a1 * a1 - a2 * a2 - d[1] * rho;
            onl[i] = Complex::new(-cov.im * two, cov.re * two) + f * quad;
        }
        let spec = &mut w.spec;
        pad.project_into(o01, spec);
        let (j0, j1) = split_real_pair(&grid, spec);
        pad.project_into(o2q, spec);
        let (j2, qh) = split_real_pair(&grid, spec);
        pad.project_into(ok, spec);
        let (k1, k2) = split_real_pair(&grid, spec);
        pad.project_into(onl, spec);
        let mut scalar = ComplexField::from_vec_unchecked(grid, spec.clone(), Repr::Spectral);

        // linear part of the scalar forcing: (1 - c1) phi
        scalar.axpy(Complex::new(T::one() - d[0], T::zero()), phi);
        if d[2] != T::zero() {
            let pad5 = &self.pad5;
            let [p, ..] = &mut w.lifted;
            pad5.lift_into(phi.values(), p);
            for v in p.iter_mut() {
                let r = v.norm_sqr();
                *v = *v * (-d[2] * r * r);
            }
            pad5.project_into(p, spec);
            for (s, q) in scalar.values_mut().iter_mut().zip(spec.iter()) {
                *s = *s + q;
            }
        }
        drop(guard);

        let wrap = |v: Vec<Complex<T>>| ComplexField::from_vec_unchecked(grid, v, Repr::Spectral);
        let qh = wrap(qh);
        let k1 = wrap(k1).sub(&partial(&qh, 0));
        let k2 = wrap(k2).sub(&partial(&qh, 1));
        Ok(CshSources { current: [wrap(j0), wrap(j1), wrap(j2)], current_rate: [k1, k2], scalar })
    }

    /// Sources evaluated on a state.
    pub fn state_sources(&self, state: &WaveState<T>) -> Result<CshSources<T>> {
        let a = std::array::from_fn(|nu| gauge_potential(state, nu));
        let at = std::array::from_fn(|nu| gauge_velocity(state, nu));
        let (phi, phi_t) = scalar_field(state);
        self.sources(&a, &at, &phi, &phi_t)
    }

    /// `F_nu`, the right-hand side of `box A_nu = F_nu`.
    pub fn gauge_source(&self, src: &CshSources<T>) -> [ComplexField<T>; 3] {
        gauge_source(T::lit(2.0) / self.params.kappa, &src.current, &src.current_rate)
    }

    /// `|| curl A - (2/kappa) (J^0 - mean J^0) ||_{L^2}`.
    pub fn constraint_residual(&self, state: &WaveState<T>) -> Result<T> {
        let src = self.state_sources(state)?;
        let mut rhs = src.current[0].scale(Complex::new(T::lit(2.0) / self.params.kappa, T::zero()));
        rhs.values_mut()[0] = Complex::new(T::zero(), T::zero());
        let c = crate::gauge::curl(&gauge_potential(state, 1), &gauge_potential(state, 2));
        Ok(c.sub(&rhs).l2_norm())
    }
}

impl<T: Real> HalfWaveSystem<T> for Csh<T> {
    fn nonlinear(&self, state: &WaveState<T>) -> Result<WaveState<T>> {
        let src = self.state_sources(state)?;
        let f = self.gauge_source(&src);
        let (mut fields, zero_modes) = gauge_nonlinear(&f);
        let half = T::lit(0.5);
        let plus = src.scalar.map_spectrum(|_, xi, v| {
            let s = half / bracket(xi);
            Complex::new(-v.im * s, v.re * s)
        });
        let minus = plus.scale(Complex::new(-T::one(), T::zero()));
        fields.push(plus);
        fields.push(minus);
        Ok(WaveState { t: state.t, fields, components: state.components.clone(), zero_modes })
    }
}

/// Lorenz-gauge residual along a history.
pub fn gauge_residual<T: Real>(history: &[WaveState<T>]) -> Result<Vec<T>> {
    if history.is_empty() {
        return usage("history must not be empty");
    }
    Ok(history.iter().map(crate::gauge::lorenz_residual).collect())
}

/// Direct and null-form evaluations of `A_mu R^mu psi` with `psi_pm = (+/- i) D phi_pm`.
#[derive(Clone, Debug)]
pub struct HodgeNullformReport<T> {
    pub direct: ComplexField<T>,
    pub decomposed: ComplexField<T>,
    /// `sum Q^12_{+-2,+-1}(B_{+-2}, psi_{+-1})`.
    pub q12: ComplexField<T>,
    /// `-sum Q^0_{+-1,+-2}(psi_{+-1}, A_{0,+-2})`.
    pub q0: ComplexField<T>,
    /// Largest physical-space discrepancy between the two evaluations.
    pub max_discrepancy: T,
}

impl<T: Real> Csh<T> {
    /// Compare the covariant derivative term with its null-form decomposition.
    ///
    /// The `Q^0` rewrite uses the Lorenz relation `rho . A = -(A_{0+} - A_{0-})`,
    /// which initial-data states satisfy exactly.
    pub fn hodge_nullform_rhs(&self, state: &WaveState<T>) -> Result<HodgeNullformReport<T>> {
        let plan = &self.plan;
        let grid = *self.grid();
        let riesz = |f: &ComplexField<T>, mu: usize, s: Sign| {
            f.map_spectrum(|i, xi, v| {
                if grid.is_nyquist(i) {
                    Complex::new(T::zero(), T::zero())
                } else {
                    v * riesz_symbol(mu, s, xi)
                }
            })
        };
        let psi: Vec<ComplexField<T>> = Sign::BOTH
            .iter()
            .map(|&s| {
                let sv = s.value::<T>();
                state.fields[phi_index(s)].map_spectrum(|_, xi, v| {
                    let w = abs_xi(xi) * sv;
                    Complex::new(-v.im * w, v.re * w)
                })
            })
            .collect();
        let prod = |u: &ComplexField<T>, v: &ComplexField<T>| dealias_product(plan, &[u, v], 2);
        let a: [ComplexField<T>; 3] = std::array::from_fn(|nu| gauge_potential(state, nu));

        // direct: A_0 R^0 psi + A_j R^j psi
        let mut direct = a[0].zeros_like();
        for (k, &s) in Sign::BOTH.iter().enumerate() {
            for mu in 0..3 {
                direct = direct.add(&prod(&a[mu], &riesz(&psi[k], mu, s))?);
            }
        }

        // null forms
        let comp = |nu: usize, s: Sign| state.fields[crate::gauge::gauge_index(nu, s)].clone();
        let mut q12 = a[0].zeros_like();
        let mut q0 = a[0].zeros_like();
        for (k1, &s1) in Sign::BOTH.iter().enumerate() {
            for &s2 in &Sign::BOTH {
                let b = riesz(&comp(2, s2), 1, s2).sub(&riesz(&comp(1, s2), 2, s2));
                let t = prod(&riesz(&b, 1, s2), &riesz(&psi[k1], 2, s1))?
                    .sub(&prod(&riesz(&b, 2, s2), &riesz(&psi[k1], 1, s1))?);
                q12 = q12.add(&t);
                let a0 = comp(0, s2);
                let mut q = prod(&psi[k1], &a0)?;
                for l in 1..3 {
                    q = q.sub(&prod(&riesz(&psi[k1], l, s1), &riesz(&a0, l, s2))?);
                }
                q0 = q0.sub(&q);
            }
        }
        // mean parts of A, which the half-wave components do not carry
        let mut decomposed = q12.add(&q0);
        for (k, &s) in Sign::BOTH.iter().enumerate() {
            for mu in 0..3 {
                let mut m = a[mu].zeros_like();
                m.values_mut()[0] = a[mu].values()[0];
                decomposed = decomposed.add(&prod(&m, &riesz(&psi[k], mu, s))?);
            }
        }
        let max_discrepancy = plan.inverse(&direct.sub(&decomposed))?.max_abs();
        Ok(HodgeNullformReport { direct, decomposed, q12, q0, max_discrepancy })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_potential_derivative() {
        for kappa in [1.0f64, 0.5, 2.0] {
            let v = HiggsPotential::standard(kappa);
            for rho in [0.0, 0.3, 1.0, 2.5] {
                let expect = (1.0 - 4.0 * rho + 3.0 * rho * rho) / (kappa * kappa);
                assert!((v.derivative(rho) - expect).abs() < 1e-13);
                assert!((v.value(rho) - rho * (1.0 - rho) * (1.0 - rho) / (kappa * kappa)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_data_gives_zero_state() {
        let g = Grid2D::<f64>::with_default_length(16).unwrap();
        let sys = Csh::new(g, CshParams::standard()).unwrap();
        let z = ComplexField::zeros(g, Repr::Physical);
        let (s, rep) = sys.initial_data([&z, &z, &z], &z, &z, ConstraintMode::Check { tolerance: 1e-12 }).unwrap();
        assert_eq!(s.l2_norm(), 0.0);
        assert_eq!(rep.flux_deficit, 0.0);
        assert_eq!(sys.nonlinear(&s).unwrap().l2_norm(), 0.0);
    }
}
