//! The canonical experiment suite. Each `criterion_*` function measures the
//! metrics named in [`crate::criteria`] and returns them with a verdict.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::time::Instant;

use cslab_core::csd::{Csd, CsdParams};
use cslab_core::csh::{scalar_field, Csh, CshParams, HiggsPotential};
use cslab_core::data::{csd_data, csh_data, Recipe};
use cslab_core::evolve::{integrate, picard_iterate, HalfWaveSystem, IntegratorConfig, PicardConfig, PicardOutcome};
use cslab_core::gauge::{gauge_potential, lorenz_residual, realness_defect, ConstraintMode, InitialDataReport};
use cslab_core::lorentz::{epsilon_pairs, levi_civita};
use cslab_core::norms::{critical_exponent, scaling_check};
use cslab_core::nullform::bilinear::{bilinear_ratio_estimate, ProductEstimate, RatioRow};
use cslab_core::nullform::quadrature::smeared_delta_monte_carlo;
use cslab_core::nullform::scan::{angle_scan, i_scan, leibniz_calibration, leibniz_scan, symbol_bound_scan, SupScan};
use cslab_core::nullform::{delta_convolution_integral, fk_exponents, DeltaCase, IsupParams, SignCase};
use cslab_core::real::Sign;
use cslab_core::spectral::dirac::{identity, mat_add, mat_max_abs, mat_mul, mat_scale, mat_sub};
use cslab_core::spectral::*;
use cslab_core::wave::WaveState;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baseline;
use crate::config::{ExperimentConfig, SystemKind};
use crate::criteria::CriterionResult;
use crate::error::Result;

pub type Metrics = BTreeMap<String, f64>;

type C = Complex<f64>;

/// Either system behind one interface.
#[allow(clippy::large_enum_variant)]
pub enum Model {
    Csh(Csh<f64>),
    Csd(Csd<f64>),
}

impl HalfWaveSystem<f64> for Model {
    fn nonlinear(&self, state: &WaveState<f64>) -> cslab_core::Result<WaveState<f64>> {
        match self {
            Model::Csh(s) => s.nonlinear(state),
            Model::Csd(s) => s.nonlinear(state),
        }
    }
}

impl Model {
    /// System and projected initial state for a configuration.
    pub fn build(cfg: &ExperimentConfig) -> Result<(Self, WaveState<f64>, InitialDataReport)> {
        let g = cfg.grid();
        let (recipe, amp, seed) = (&cfg.data.recipe, cfg.data.amp, cfg.data.seed);
        Ok(match cfg.system {
            SystemKind::Csh => {
                let sys = Csh::new(g, CshParams::new(cfg.kappa, cfg.potential)?)?;
                let (a, f, gg) = csh_data(&g, recipe, amp, seed)?;
                let (s0, rep) = sys.initial_data([&a[0], &a[1], &a[2]], &f, &gg, ConstraintMode::Project)?;
                (Model::Csh(sys), s0, rep)
            }
            SystemKind::Csd => {
                let sys = Csd::new(g, CsdParams::new(cfg.mass, cfg.kappa)?)?;
                let (a, psi) = csd_data(&g, recipe, amp, seed)?;
                let (s0, rep) = sys.initial_data([&a[0], &a[1], &a[2]], &psi, ConstraintMode::Project)?;
                (Model::Csd(sys), s0, rep)
            }
        })
    }

    pub fn constraint_residual(&self, s: &WaveState<f64>) -> Result<f64> {
        Ok(match self {
            Model::Csh(m) => m.constraint_residual(s)?,
            Model::Csd(m) => m.constraint_residual(s)?,
        })
    }

    pub fn charge(&self, s: &WaveState<f64>) -> Option<f64> {
        match self {
            Model::Csh(_) => None,
            Model::Csd(m) => Some(m.charge(s)),
        }
    }

    pub fn journal_columns(&self) -> &'static [&'static str] {
        match self {
            Model::Csh(_) => &["t", "lorenz_residual", "constraint_residual", "realness_defect"],
            Model::Csd(_) => {
                &["t", "lorenz_residual", "constraint_residual", "realness_defect", "charge", "charge_drift"]
            }
        }
    }
}

/// Diagnostics of one observed state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub lorenz: f64,
    pub constraint: f64,
    pub realness: f64,
    pub charge: Option<f64>,
}

impl Sample {
    pub fn row(&self, q0: Option<f64>) -> Vec<f64> {
        let mut r = vec![self.t, self.lorenz, self.constraint, self.realness];
        if let (Some(q), Some(q0)) = (self.charge, q0) {
            r.push(q);
            r.push((q - q0).abs() / q0);
        }
        r
    }
}

/// Integrate, recording diagnostics at every observed state; `observe` also
/// sees each state with its running index.
pub fn run_trajectory(
    model: &Model,
    s0: &WaveState<f64>,
    integ: &IntegratorConfig<f64>,
    mut observe: impl FnMut(usize, &WaveState<f64>, &Sample) -> Result<()>,
) -> Result<(Vec<Sample>, WaveState<f64>)> {
    let mut samples = Vec::new();
    let mut failure = None;
    let end = integrate(model, s0, integ, |s| {
        let sample = Sample {
            t: s.t,
            lorenz: lorenz_residual(s),
            constraint: model.constraint_residual(s).map_err(|e| match e {
                crate::error::CliError::Core(c) => c,
                other => cslab_core::Error::Numeric(other.to_string()),
            })?,
            realness: realness_defect(s),
            charge: model.charge(s),
        };
        if let Err(e) = observe(samples.len(), s, &sample) {
            failure = Some(e);
            return Err(cslab_core::Error::Numeric("observer failed".into()));
        }
        samples.push(sample);
        Ok(())
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((samples, end?))
}

fn timed(id: u8, f: impl FnOnce() -> Result<Metrics>) -> Result<CriterionResult> {
    let t0 = Instant::now();
    let m = f()?;
    Ok(CriterionResult::judge(id, m, t0.elapsed().as_secs_f64()))
}

fn metrics<const N: usize>(pairs: [(&str, f64); N]) -> Metrics {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

// ---------------------------------------------------------------- criterion 1

/// Largest violation of the projector relations at one frequency.
pub fn projector_identity_error(alg: &DiracAlgebra<f64>, xi: [f64; 2]) -> f64 {
    let eye = identity::<f64>();
    let (p, m) = (projector(Sign::Plus, xi), projector(Sign::Minus, xi));
    let mut errs = vec![
        mat_max_abs(&mat_sub(&mat_mul(&p, &p), &p)),
        mat_max_abs(&mat_sub(&mat_mul(&m, &m), &m)),
        mat_max_abs(&mat_mul(&p, &m)),
        mat_max_abs(&mat_mul(&m, &p)),
        mat_max_abs(&mat_sub(&mat_add(&p, &m), &eye)),
    ];
    let d = xi[0].hypot(xi[1]);
    if d > 0.0 {
        let neg = [-xi[0], -xi[1]];
        let (pn, mn) = (projector(Sign::Plus, neg), projector(Sign::Minus, neg));
        errs.push(mat_max_abs(&mat_sub(&p, &mn)));
        errs.push(mat_max_abs(&mat_sub(&m, &pn)));
        errs.push(mat_max_abs(&mat_sub(&mat_mul(&alg.beta, &p), &mat_mul(&pn, &alg.beta))));
        for (alpha, x) in alg.alpha[1..].iter().zip(xi) {
            // alpha^j Pi_+(xi) - Pi_+(-xi) alpha^j = (xi_j / |xi|) I
            let lhs = mat_sub(&mat_mul(alpha, &p), &mat_mul(&pn, alpha));
            errs.push(mat_max_abs(&mat_sub(&lhs, &mat_scale(&eye, C::new(x / d, 0.0)))));
        }
        let xa = mat_add(&mat_scale(&alg.alpha[1], C::new(xi[0], 0.0)), &mat_scale(&alg.alpha[2], C::new(xi[1], 0.0)));
        let eig = mat_scale(&mat_sub(&p, &m), C::new(d, 0.0));
        errs.push(mat_max_abs(&mat_sub(&xa, &eig)) / d);
    }
    errs.into_iter().fold(0.0, f64::max)
}

fn levi_civita_error() -> f64 {
    let mut worst: f64 = (f64::from(levi_civita(0, 1, 2)) - 1.0).abs();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let e = f64::from(levi_civita(a, b, c));
                worst = worst.max((e + f64::from(levi_civita(b, a, c))).abs());
                worst = worst.max((e + f64::from(levi_civita(a, c, b))).abs());
                worst = worst.max((e + f64::from(levi_civita(c, b, a))).abs());
            }
        }
    }
    for nu in 0..3 {
        for (mu, la, e) in epsilon_pairs(nu) {
            worst = worst.max(f64::from(e - levi_civita(mu, nu, la)).abs());
        }
    }
    worst
}

/// Projector algebra on the lattice and at random frequencies, antisymmetry of
/// the Levi-Civita symbol, and the null-form decompositions on random states.
pub fn identity_suite(states: usize, n: usize, seed: u64) -> Result<Metrics> {
    let alg = DiracAlgebra::new(0.0, 1.0)?;
    let g = Grid2D::new(n, 12.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut proj: f64 = 0.0;
    for i in 0..g.len() {
        proj = proj.max(projector_identity_error(&alg, g.xi(i)));
    }
    for _ in 0..10_000 {
        let xi = [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
        proj = proj.max(projector_identity_error(&alg, xi));
    }
    let recipe = Recipe::AnnulusSpectrum { k_min: 0.5, k_max: 4.0 };
    let (mut en, mut em, mut eh): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 0..states {
        let s = seed.wrapping_add(k as u64);
        let mass = if k % 2 == 0 { 0.0 } else { 0.4 };
        let csd = Csd::new(g, CsdParams::new(mass, 1.0)?)?;
        let (a, psi) = csd_data(&g, &recipe, 0.5, s)?;
        let (st, _) = csd.initial_data([&a[0], &a[1], &a[2]], &psi, ConstraintMode::Project)?;
        let e = csd.nullform_decomposition_check(&st)?;
        en = en.max(e.max_err_n);
        em = em.max(e.max_err_m);
        if k < states / 10 {
            let csh = Csh::new(g, CshParams::standard())?;
            let (a, f, gg) = csh_data(&g, &recipe, 0.5, s)?;
            let (st, _) = csh.initial_data([&a[0], &a[1], &a[2]], &f, &gg, ConstraintMode::Project)?;
            eh = eh.max(csh.hodge_nullform_rhs(&st)?.max_discrepancy);
        }
    }
    Ok(metrics([
        ("projector_error", proj),
        ("levi_civita_error", levi_civita_error()),
        ("n_decomposition_error", en),
        ("m_decomposition_error", em),
        ("hodge_nullform_error", eh),
    ]))
}

pub fn criterion_1() -> Result<CriterionResult> {
    timed(1, || identity_suite(100, 32, 1000))
}

// ---------------------------------------------------------------- criterion 2

fn random_field(g: Grid2D<f64>, band: isize, rng: &mut ChaCha8Rng) -> ComplexField<f64> {
    let mut f = ComplexField::zeros(g, Repr::Spectral);
    for i in 0..g.len() {
        let k = g.wavevector(i);
        if k[0].abs() <= band && k[1].abs() <= band {
            f.values_mut()[i] = C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    f
}

fn derivative(f: &ComplexField<f64>, j: usize) -> ComplexField<f64> {
    let g = *f.grid();
    f.map_spectrum(|i, xi, v| if g.is_nyquist(i) { C::new(0.0, 0.0) } else { v * C::new(0.0, xi[j]) })
}

type Coefficients = HashMap<[isize; 2], C>;

fn coefficients(f: &ComplexField<f64>) -> Coefficients {
    let g = f.grid();
    (0..g.len()).filter(|&i| f.values()[i] != C::new(0.0, 0.0)).map(|i| (g.wavevector(i), f.values()[i])).collect()
}

/// Non-circular convolution of lattice coefficients with the transform's cell factor.
fn convolve(a: &Coefficients, b: &Coefficients, cell: f64) -> Coefficients {
    let mut out = HashMap::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            *out.entry([ka[0] + kb[0], ka[1] + kb[1]]).or_insert(C::new(0.0, 0.0)) += va * vb * cell;
        }
    }
    out
}

/// Largest relative error of the dealiased product of `degree` random factors
/// against direct convolution on an `n = 16` lattice.
pub fn dealias_error(seed: u64) -> Result<f64> {
    let g = Grid2D::new(16, 8.0)?;
    let plan = SpectralPlan::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields: Vec<ComplexField<f64>> = (0..5).map(|_| random_field(g, 7, &mut rng)).collect();
    let cell = g.spectral_cell() / TAU;
    let mut worst: f64 = 0.0;
    for degree in [2usize, 3, 5] {
        let mut acc = coefficients(&fields[0]);
        for f in &fields[1..degree] {
            acc = convolve(&acc, &coefficients(f), cell);
        }
        let refs: Vec<&ComplexField<f64>> = fields[..degree].iter().collect();
        let got = dealias_product(&plan, &refs, degree)?;
        let (mut err, mut scale): (f64, f64) = (0.0, 0.0);
        for i in 0..g.len() {
            let want =
                if g.is_nyquist(i) { C::new(0.0, 0.0) } else { acc.get(&g.wavevector(i)).copied().unwrap_or_default() };
            err = err.max((got.values()[i] - want).norm());
            scale = scale.max(want.norm());
        }
        worst = worst.max(err / scale);
    }
    Ok(worst)
}

pub fn spectral_suite(seed: u64) -> Result<Metrics> {
    let g = Grid2D::new(32, 11.0)?;
    let plan = SpectralPlan::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut rt, mut pars, mut mult, mut hw, mut hodge): (f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..20 {
        let phys =
            ComplexField::from_fn_physical(g, |_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let spec = plan.forward(&phys)?;
        rt = rt.max(plan.inverse(&spec)?.max_abs_diff(&phys) / phys.max_abs());
        pars = pars.max((spec.l2_norm() / phys.l2_norm() - 1.0).abs());

        let f = random_field(g, 15, &mut rng);
        let (s1, s2) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let two = MultiplierSpec::Bracket(s2).apply_spectral(&MultiplierSpec::Bracket(s1).apply_spectral(&f));
        let one = MultiplierSpec::Bracket(s1 + s2).apply_spectral(&f);
        mult = mult.max(two.max_abs_diff(&one) / one.max_abs());
        let mut mean_free = f.clone();
        mean_free.values_mut()[0] = C::new(0.0, 0.0);
        let back =
            MultiplierSpec::InverseD.apply_spectral(&MultiplierSpec::Homogeneous(1.0).apply_spectral(&mean_free));
        mult = mult.max(back.max_abs_diff(&mean_free) / mean_free.max_abs());

        let u = random_field(g, 15, &mut rng);
        let mut ut = random_field(g, 15, &mut rng);
        for op in [WaveOperator::Bracket, WaveOperator::D] {
            if op == WaveOperator::D {
                ut.values_mut()[0] = C::new(0.0, 0.0);
            }
            let (p, m) = half_wave_split(&u, &ut, op)?;
            let (u2, ut2) = half_wave_reconstruct(&p, &m, op);
            hw = hw.max(u2.max_abs_diff(&u) / u.max_abs()).max(ut2.max_abs_diff(&ut) / ut.max_abs());
        }

        // real band-limited vector field without mean
        let real = |f: ComplexField<f64>| -> Result<ComplexField<f64>> {
            let p = plan.inverse(&f)?.map(|v| C::new(v.re, 0.0));
            let mut s = plan.forward(&p)?;
            s.values_mut()[0] = C::new(0.0, 0.0);
            Ok(s)
        };
        let a1 = real(random_field(g, 15, &mut rng))?;
        let a2 = real(random_field(g, 15, &mut rng))?;
        let h = hodge_decompose(&a1, &a2)?;
        let scale = a1.max_abs().max(a2.max_abs());
        let div = derivative(&h.df[0], 0).add(&derivative(&h.df[1], 1));
        let curl = derivative(&h.cf[1], 0).sub(&derivative(&h.cf[0], 1));
        hodge = hodge
            .max(h.df[0].add(&h.cf[0]).max_abs_diff(&a1) / scale)
            .max(h.df[1].add(&h.cf[1]).max_abs_diff(&a2) / scale)
            .max(div.max_abs() / (scale * g.n() as f64 * g.dk()))
            .max(curl.max_abs() / (scale * g.n() as f64 * g.dk()));
    }
    Ok(metrics([
        ("round_trip_error", rt),
        ("parseval_error", pars),
        ("multiplier_error", mult),
        ("half_wave_error", hw),
        ("hodge_error", hodge),
        ("dealias_error", dealias_error(seed)?),
    ]))
}

pub fn criterion_2() -> Result<CriterionResult> {
    timed(2, || spectral_suite(2000))
}

// ---------------------------------------------------------- criteria 3 to 5

/// Configuration of a suite trajectory: modulated Gaussian data, default box.
pub fn suite_config(system: SystemKind, n: usize, dt: f64, horizon: f64, amp: f64) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig { system, n, ..Default::default() };
    c.data.amp = amp;
    c.integrator = IntegratorConfig::new(dt, horizon)?;
    c.integrator.snapshot_stride = 10;
    c.grid();
    Ok(c)
}

/// `max_t || d^mu A_mu ||` over a run, sampled every tenth step.
pub fn max_gauge_residual(cfg: &ExperimentConfig) -> Result<f64> {
    let (model, s0, _) = Model::build(cfg)?;
    let (samples, _) = run_trajectory(&model, &s0, &cfg.integrator, |_, _, _| Ok(()))?;
    Ok(samples.iter().map(|s| s.lorenz).fold(0.0, f64::max))
}

pub fn gauge_residual_study(amp: f64) -> Result<Metrics> {
    let mut m = Metrics::new();
    for (system, name) in [(SystemKind::Csh, "csh"), (SystemKind::Csd, "csd")] {
        let coarse = max_gauge_residual(&suite_config(system, 64, 1e-3, 1.0, amp)?)?;
        let fine = max_gauge_residual(&suite_config(system, 128, 5e-4, 1.0, amp)?)?;
        m.insert(format!("{name}_residual"), coarse);
        m.insert(format!("{name}_fine_residual"), fine);
        m.insert(format!("{name}_refinement_factor"), coarse / fine);
    }
    Ok(m)
}

pub fn criterion_3() -> Result<CriterionResult> {
    timed(3, || gauge_residual_study(0.05))
}

/// Largest relative charge drift of a CSD run.
pub fn charge_drift(cfg: &ExperimentConfig) -> Result<f64> {
    let (model, s0, _) = Model::build(cfg)?;
    let q0 = model.charge(&s0).expect("CSD run");
    let (samples, _) = run_trajectory(&model, &s0, &cfg.integrator, |_, _, _| Ok(()))?;
    Ok(samples.iter().map(|s| (s.charge.unwrap() - q0).abs() / q0).fold(0.0, f64::max))
}

pub fn charge_study(amp: f64) -> Result<Metrics> {
    let coarse = charge_drift(&suite_config(SystemKind::Csd, 64, 1e-3, 1.0, amp)?)?;
    let mut cfg = suite_config(SystemKind::Csd, 64, 5e-4, 1.0, amp)?;
    cfg.integrator.snapshot_stride = 20;
    let fine = charge_drift(&cfg)?;
    Ok(metrics([("relative_drift", coarse), ("fine_drift", fine), ("halving_factor", coarse / fine)]))
}

pub fn criterion_4() -> Result<CriterionResult> {
    timed(4, || charge_study(0.05))
}

/// Least-squares slope of `log err` against `log dt`.
pub fn loglog_slope(dts: &[f64], errs: &[f64]) -> f64 {
    let n = dts.len() as f64;
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

pub const ORDER_STEPS: [f64; 3] = [4e-3, 2e-3, 1e-3];
pub const ORDER_REFERENCE_STEP: f64 = 1.25e-4;

/// Global errors at [`ORDER_STEPS`] against a fine-step reference.
pub fn order_errors(system: SystemKind, n: usize, horizon: f64, amp: f64) -> Result<Vec<f64>> {
    let run = |dt: f64| -> Result<WaveState<f64>> {
        let cfg = suite_config(system, n, dt, horizon, amp)?;
        let (model, s0, _) = Model::build(&cfg)?;
        Ok(integrate(&model, &s0, &cfg.integrator, |_| Ok(()))?)
    };
    let reference = run(ORDER_REFERENCE_STEP)?;
    let scale = reference.l2_norm();
    ORDER_STEPS.iter().map(|&dt| Ok(run(dt)?.difference(&reference).l2_norm() / scale)).collect()
}

pub fn order_study() -> Result<Metrics> {
    let mut m = Metrics::new();
    for (system, name) in [(SystemKind::Csh, "csh"), (SystemKind::Csd, "csd")] {
        let errs = order_errors(system, 32, 1.0, 0.3)?;
        for (dt, e) in ORDER_STEPS.iter().zip(&errs) {
            m.insert(format!("{name}_error_{dt:e}"), *e);
        }
        m.insert(format!("{name}_slope"), loglog_slope(&ORDER_STEPS, &errs));
    }
    Ok(m)
}

pub fn criterion_5() -> Result<CriterionResult> {
    timed(5, order_study)
}

// ---------------------------------------------------------------- criterion 6

pub fn picard_run(amp: f64, cfg: &ExperimentConfig) -> Result<PicardOutcome<f64>> {
    let mut c = cfg.clone();
    c.data.amp = amp;
    let (model, s0, _) = Model::build(&c)?;
    Ok(picard_iterate(&model, &s0, &c.picard)?)
}

pub fn picard_suite_config() -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::default();
    c.n = 32;
    c.picard = PicardConfig::new(5, 0.5, 5e-3, c.fl.s, c.fl.b, c.fl.r)?;
    Ok(c)
}

pub fn picard_study(amp: f64) -> Result<Metrics> {
    let cfg = picard_suite_config()?;
    let base = picard_run(amp, &cfg)?;
    let double = picard_run(2.0 * amp, &cfg)?;
    let ratios = base.ratios();
    let mut m = Metrics::new();
    for (i, q) in ratios.iter().enumerate() {
        m.insert(format!("ratio_{}", i + 1), *q);
    }
    m.insert("max_ratio".into(), ratios.iter().copied().fold(0.0, f64::max));
    m.insert("doubling_factor".into(), double.differences[0].xsb / base.differences[0].xsb);
    m.insert("doubling_factor_sup".into(), double.differences[0].sup_fl / base.differences[0].sup_fl);
    Ok(m)
}

pub fn criterion_6() -> Result<CriterionResult> {
    timed(6, || picard_study(0.01))
}

// ---------------------------------------------------------------- criterion 7

/// Run massless potential-free CSH from data on an `L`-box to `2t`, and from
/// the `lambda = 2` rescaled data on an `L/2`-box to `t`; returns the largest
/// relative discrepancy of the pulled-back gauge and scalar fields.
pub fn pullback_error(n: usize, amp: f64, dt: f64, t: f64) -> Result<f64> {
    let lambda = 2.0;
    let g = Grid2D::with_default_length(n)?;
    let gs = g.dilated(lambda)?;
    let params = CshParams::new(1.0, HiggsPotential::zero())?;
    let (a, f, gg) = csh_data(&g, &Recipe::default(), amp, 3)?;
    let (plan, splan) = (SpectralPlan::new(g), SpectralPlan::new(gs));
    let rescale = |x: &ComplexField<f64>, power: f64| -> Result<ComplexField<f64>> {
        let x = plan.physical(x)?;
        Ok(ComplexField::from_values(gs, x.values().iter().map(|v| v * lambda.powf(power)).collect(), Repr::Physical)?)
    };
    let sa = [rescale(&a[0], 1.0)?, rescale(&a[1], 1.0)?, rescale(&a[2], 1.0)?];
    let (sf, sg) = (rescale(&f, 0.5)?, rescale(&gg, 1.5)?);

    let sys = Csh::new(g, params)?;
    let (s0, _) = sys.initial_data([&a[0], &a[1], &a[2]], &f, &gg, ConstraintMode::Project)?;
    let end = integrate(&sys, &s0, &IntegratorConfig::new(dt, lambda * t)?, |_| Ok(()))?;
    let ssys = Csh::new(gs, params)?;
    let (ss0, _) = ssys.initial_data([&sa[0], &sa[1], &sa[2]], &sf, &sg, ConstraintMode::Project)?;
    let send = integrate(&ssys, &ss0, &IntegratorConfig::new(dt / lambda, t)?, |_| Ok(()))?;

    let mut worst: f64 = 0.0;
    let mut compare = |x: &ComplexField<f64>, y: &ComplexField<f64>, power: f64| -> Result<()> {
        let x = plan.physical(x)?;
        let y = splan.physical(y)?;
        let back =
            ComplexField::from_values(g, y.values().iter().map(|v| v / lambda.powf(power)).collect(), Repr::Physical)?;
        worst = worst.max(back.max_abs_diff(&x) / x.max_abs());
        Ok(())
    };
    for nu in 0..3 {
        compare(&gauge_potential(&end, nu), &gauge_potential(&send, nu), 1.0)?;
    }
    compare(&scalar_field(&end).0, &scalar_field(&send).0, 0.5)?;
    Ok(worst)
}

pub fn scaling_study() -> Result<Metrics> {
    let pull = pullback_error(64, 0.3, 1e-3, 0.25)?;
    let g = Grid2D::with_default_length(64)?;
    let mut single: f64 = 0.0;
    for (k, s, r) in [([3isize, -2], 0.7, 1.5), ([1, 0], 0.2, 2.0), ([5, 7], -0.3, 1.1)] {
        let mut f = ComplexField::zeros(g, Repr::Spectral);
        f.values_mut()[g.index_of(k[0]).unwrap() * g.n() + g.index_of(k[1]).unwrap()] = C::new(0.3, -0.4);
        single = single.max(scaling_check(&f, 2.0, s, r)?.rel_error);
    }
    let gauss = Grid2D::new(128, 40.0)?;
    let c = gauss.length() / 2.0;
    let profile = ComplexField::from_fn_physical(gauss, |x: [f64; 2]| {
        C::new((-((x[0] - c).powi(2) + (x[1] - c).powi(2)) / 8.0).exp(), 0.0)
    });
    let gaussian = scaling_check(&SpectralPlan::new(gauss).forward(&profile)?, 2.0, 0.7, 1.5)?.rel_error;
    let gaps: Vec<f64> = [1.1, 1.01, 1.001, 1.0001]
        .iter()
        .map(|&r: &f64| critical_exponent(r).map(|c| c.gap))
        .collect::<std::result::Result<_, _>>()?;
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]) && gaps[3] < 1e-4;
    Ok(metrics([
        ("pullback_error", pull),
        ("single_mode_error", single),
        ("gaussian_error", gaussian),
        ("exponent_at_r2", critical_exponent(2.0f64)?.s_c.abs()),
        ("gap_at_r1", critical_exponent(1.0f64)?.gap.abs()),
        ("gap_decreasing", if decreasing { 1.0 } else { 0.0 }),
    ]))
}

pub fn criterion_7() -> Result<CriterionResult> {
    timed(7, scaling_study)
}

// ---------------------------------------------------------------- criterion 8

/// A row of the integral table: quadrature against a reference value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralRow {
    pub tau: f64,
    pub xi: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub value: f64,
    pub reference: f64,
    pub rel_error: f64,
}

impl IntegralRow {
    fn new(tau: f64, xi: f64, alpha1: f64, alpha2: f64, value: f64, reference: f64) -> Self {
        Self { tau, xi, alpha1, alpha2, value, reference, rel_error: (value - reference).abs() / reference.abs() }
    }
}

/// Quadrature near `xi = 0` against `pi (tau/2)^{1 - (alpha1 + alpha2) r}`,
/// plus weights integrable in closed form.
pub fn closed_form_rows(case: DeltaCase, alphas: &[(f64, f64)], r: f64) -> Result<Vec<IntegralRow>> {
    let mut rows = Vec::new();
    match case {
        DeltaCase::PlusPlus => {
            for &(a1, a2) in alphas {
                for tau in [0.5, 1.0, 7.0, 40.0] {
                    let xi = 1e-7 * tau;
                    let v = delta_convolution_integral(tau, [xi, 0.0], a1, a2, r, case)?;
                    rows.push(IntegralRow::new(tau, xi, a1, a2, v, PI * (tau / 2.0).powf(1.0 - (a1 + a2) * r)));
                }
            }
            for (tau, k) in [(3.0, 1.0), (1.001, 1.0), (50.0, 0.3)] {
                // weights 1 and |.|^{-1}: 2 pi / sqrt(tau^2 - k^2) and 4 pi / (tau^2 - k^2)
                let v = delta_convolution_integral(tau, [0.0, k], 0.5, 0.5, 2.0, case)?;
                rows.push(IntegralRow::new(tau, k, 0.5, 0.5, v, TAU / (tau * tau - k * k).sqrt()));
                let v = delta_convolution_integral(tau, [k, 0.0], 1.0, 0.5, 2.0, case)?;
                rows.push(IntegralRow::new(tau, k, 1.0, 0.5, v, 2.0 * TAU / (tau * tau - k * k)));
            }
        }
        DeltaCase::PlusMinusA => {
            for (tau, k) in [(0.4, 2.0), (0.0, 1.0), (-3.0, 5.0)] {
                let v = delta_convolution_integral(tau, [k, 0.0], 0.5, 0.5, 2.0, case)?;
                let d = tau / k;
                rows.push(IntegralRow::new(tau, k, 0.5, 0.5, v, 2.0 / k / (1.0 - d * d).sqrt() * 2f64.acosh()));
            }
        }
        DeltaCase::PlusMinusB => {
            for k in [2.0, 0.5, 10.0] {
                let v = delta_convolution_integral(0.0, [k, 0.0], 0.75, 0.75, 2.0, case)?;
                rows.push(IntegralRow::new(0.0, k, 0.75, 0.75, v, PI / 6.0 / (k / 2.0).powi(2)));
            }
        }
    }
    Ok(rows)
}

fn power_slope(f: impl Fn(f64) -> Result<f64>, x0: f64, x1: f64) -> Result<f64> {
    Ok((f(x1)? / f(x0)?).ln() / (x1 / x0).ln())
}

/// Largest deviation of measured log-log slopes from the predicted exponents.
pub fn slope_deviation(r: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (a1, a2) in [(0.5, 0.5), (1.0, 0.5), (0.5, 1.0)] {
        let (a1, a2) = (a1 * 2.0 / r, a2 * 2.0 / r);
        let e = fk_exponents(a1, a2, r, DeltaCase::PlusPlus)?;
        let pp = |tau: f64, k: f64| Ok(delta_convolution_integral(tau, [k, 0.0], a1, a2, r, DeltaCase::PlusPlus)?);
        worst = worst.max((power_slope(|t| pp(t, 1.0), 10.0, 100.0)? - (e.a + e.b)).abs());
        worst = worst.max((power_slope(|t| pp(t, t - 1.0), 10.0, 100.0)? - e.a).abs());
        worst = worst.max((power_slope(|d| pp(100.0, 100.0 - d), 0.01, 0.1)? - e.b).abs());
        for case in [DeltaCase::PlusMinusA, DeltaCase::PlusMinusB] {
            if case == DeltaCase::PlusMinusB && (a1 + a2) * r <= 2.0 {
                continue;
            }
            let e = fk_exponents(a1, a2, r, case)?;
            let pm = |k: f64, d: f64| Ok(delta_convolution_integral(k - d, [k, 0.0], a1, a2, r, case)?);
            worst = worst.max((power_slope(|k| pm(k, 1.0), 10.0, 100.0)? - e.a).abs());
            worst = worst.max((power_slope(|d| pm(100.0, d), 0.01, 0.1)? - e.b).abs());
        }
    }
    Ok(worst)
}

/// Off-axis quadrature against the Richardson-extrapolated smeared-delta estimate.
pub fn monte_carlo_error() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (xi, a1, a2) in [([1.0, 0.0], 0.5, 0.5), ([0.6, 0.8], 0.3, 0.7), ([0.6, 0.8], 1.0, 0.4)] {
        let q = delta_convolution_integral(3.0, xi, a1, a2, 2.0, DeltaCase::PlusPlus)?;
        let wide = smeared_delta_monte_carlo(3.0, xi, a1, a2, 2.0, 0.04, 1000, 1)?;
        let narrow = smeared_delta_monte_carlo(3.0, xi, a1, a2, 2.0, 0.02, 1000, 2)?;
        worst = worst.max(((4.0 * narrow - wide) / 3.0 - q).abs() / q);
    }
    Ok(worst)
}

pub fn integral_study() -> Result<Metrics> {
    let mut closed: f64 = 0.0;
    let alphas = [(0.0, 0.0), (0.5, 0.5), (0.3, 0.9), (1.1, 0.2)];
    for case in [DeltaCase::PlusPlus, DeltaCase::PlusMinusA, DeltaCase::PlusMinusB] {
        for row in closed_form_rows(case, &alphas, 2.0)? {
            closed = closed.max(row.rel_error);
        }
    }
    Ok(metrics([
        ("closed_form_error", closed),
        ("monte_carlo_error", monte_carlo_error()?),
        ("slope_deviation", slope_deviation(2.0)?.max(slope_deviation(1.5)?)),
    ]))
}

pub fn criterion_8() -> Result<CriterionResult> {
    timed(8, integral_study)
}

// ---------------------------------------------------------------- criterion 9

/// Sample counts of the sup-scans.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    pub samples: usize,
    pub i_samples: usize,
    pub radius: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self { samples: 1_000_000, i_samples: 4000, radius: 10.0 }
    }
}

/// All five sup-scans for one seed; the `I` scan is reported in [`SupScan`] form.
pub fn sup_scans(settings: &ScanSettings, seed: u64) -> Result<Vec<SupScan>> {
    let mut out = vec![
        symbol_bound_scan(SignCase::Equal, settings.samples, settings.radius, seed)?,
        symbol_bound_scan(SignCase::Unequal, settings.samples, settings.radius, seed)?,
        angle_scan(settings.samples, settings.radius, seed)?,
        leibniz_scan(settings.samples, settings.radius, seed)?,
    ];
    let table = i_scan(&IsupParams::reference(), settings.i_samples, seed)?;
    out.push(SupScan {
        name: "i_sup".into(),
        samples: settings.i_samples,
        seed,
        max: table.max,
        argmax: table.argmax.map(|p| vec![p.tau, p.xi[0], p.xi[1]]).unwrap_or_default(),
    });
    Ok(out)
}

pub const SCAN_SEEDS: [u64; 4] = [0, 1, 2, 3];

pub fn scan_study(settings: &ScanSettings, baselines: &Path) -> Result<Metrics> {
    let runs: Vec<Vec<SupScan>> = SCAN_SEEDS.iter().map(|&s| sup_scans(settings, s)).collect::<Result<_>>()?;
    let mut m = Metrics::new();
    let mut finite = true;
    let mut spread: f64 = 0.0;
    for (i, scan) in runs[0].iter().enumerate() {
        let maxima: Vec<f64> = runs.iter().map(|r| r[i].max).collect();
        finite &= maxima.iter().all(|v| v.is_finite() && *v > 0.0);
        let (lo, hi) = maxima.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        spread = spread.max((hi - lo) / hi);
        m.insert(format!("{}_max", scan.name), scan.max);
    }
    let mut mismatch: f64 = 0.0;
    for scan in &runs[0] {
        mismatch = mismatch.max(baseline::compare_scan(baselines, scan, settings.radius)?);
    }
    m.insert("all_finite".into(), if finite { 1.0 } else { 0.0 });
    m.insert("seed_spread".into(), spread);
    m.insert("baseline_mismatch".into(), mismatch);
    m.insert("calibration_error".into(), (leibniz_calibration()? - 1.0).abs());
    Ok(m)
}

pub fn criterion_9(baselines: &Path) -> Result<CriterionResult> {
    timed(9, || scan_study(&ScanSettings::default(), baselines))
}

// --------------------------------------------------------------- criterion 10

pub const RATIO_GRIDS: [(usize, usize); 2] = [(16, 16), (32, 32)];

pub fn bilinear_study(count: usize, seed: u64) -> Result<(Vec<RatioRow>, Metrics)> {
    let rows = bilinear_ratio_estimate(&ProductEstimate::reference(), count, seed, &RATIO_GRIDS)?;
    let m = metrics([
        ("max_ratio_16", rows[0].max_ratio),
        ("max_ratio_32", rows[1].max_ratio),
        ("growth", rows[1].max_ratio / rows[0].max_ratio),
    ]);
    Ok((rows, m))
}

pub fn criterion_10() -> Result<CriterionResult> {
    timed(10, || Ok(bilinear_study(64, 0)?.1))
}

/// Run one criterion by id.
pub fn run_criterion(id: u8, baselines: &Path) -> Result<CriterionResult> {
    match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(baselines),
        10 => criterion_10(),
        _ => Err(crate::error::CliError::validation("criterion", format!("no criterion {id} (expected 1..=10)"))),
    }
}
