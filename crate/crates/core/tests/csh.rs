mod common;

use common::*;
use cslab_core::csh::*;
use cslab_core::evolve::{integrate, HalfWaveSystem, IntegratorConfig};
use cslab_core::gauge::*;
use cslab_core::spectral::{abs_xi, bracket, half_wave_split, ComplexField, Grid2D, Repr, SpectralPlan, WaveOperator};
use cslab_core::wave::WaveState;
use cslab_core::Error;
use num_complex::Complex;

struct Second {
    a: [ComplexField<f64>; 3],
    at: [ComplexField<f64>; 3],
    phi: ComplexField<f64>,
    phit: ComplexField<f64>,
}

fn random_second(g: Grid2D<f64>, band: isize, amp: f64, seed: u64) -> Second {
    let mut r = rng(seed);
    let a = std::array::from_fn(|_| band_limited(g, band, amp, true, &mut r));
    let at = std::array::from_fn(|_| band_limited(g, band, amp, true, &mut r));
    let phi = band_limited(g, band, amp, false, &mut r);
    let phit = band_limited(g, band, amp, false, &mut r);
    Second { a, at, phi, phit }
}

fn state_of(s: &Second) -> WaveState<f64> {
    let (mut fields, zero) = split_gauge(&s.a, &s.at).unwrap();
    let (p, m) = half_wave_split(&s.phi, &s.phit, WaveOperator::Bracket).unwrap();
    fields.push(p);
    fields.push(m);
    WaveState::new(0.0, fields, csh_components(), zero).unwrap()
}

/// `box A_nu` and `(box + 1) phi` implied by a half-wave forcing.
fn second_order_forcing(n: &WaveState<f64>) -> ([ComplexField<f64>; 3], ComplexField<f64>) {
    let g = *n.grid();
    let wave = |p: &ComplexField<f64>, m: &ComplexField<f64>, op: fn([f64; 2]) -> f64| {
        let mut out = p.sub(m);
        for (idx, v) in out.values_mut().iter_mut().enumerate() {
            *v = *v * Complex::new(0.0, -op(g.xi(idx)));
        }
        out
    };
    let f = std::array::from_fn(|nu| {
        let mut f = wave(&n.fields[2 * nu], &n.fields[2 * nu + 1], abs_xi);
        f.values_mut()[0] = Complex::new(n.zero_modes[nu].rate * g.area() / std::f64::consts::TAU, 0.0);
        f
    });
    (f, wave(&n.fields[6], &n.fields[7], bracket))
}

/// Direct transcription of the second-order system on an unpadded grid.
fn oracle(
    g: Grid2D<f64>,
    s: &Second,
    kappa: f64,
    v: &HiggsPotential<f64>,
) -> ([ComplexField<f64>; 3], ComplexField<f64>) {
    let ph = |f: &ComplexField<f64>| physical(g, f);
    let a: Vec<_> = s.a.iter().map(ph).collect();
    let at: Vec<_> = s.at.iter().map(ph).collect();
    let (f, ft) = (ph(&s.phi), ph(&s.phit));
    // d^j = -d_j, A^j = -A_j
    let up = [1.0, -1.0, -1.0];
    let dphi = [ft.clone(), ph(&dx(&s.phi, 0)), ph(&dx(&s.phi, 1))];
    let dphit = [vec![], ph(&dx(&s.phit, 0)), ph(&dx(&s.phit, 1))];
    let len = g.len();
    let mut j = vec![vec![0.0; len]; 3];
    let mut jt = vec![vec![0.0; len]; 3];
    for i in 0..len {
        let rho = f[i].norm_sqr();
        let rho_t = 2.0 * (f[i].conj() * ft[i]).re;
        for lam in 0..3 {
            j[lam][i] = (f[i].conj() * dphi[lam][i] * up[lam]).im - up[lam] * a[lam][i].re * rho;
            if lam > 0 {
                jt[lam][i] = (ft[i].conj() * dphi[lam][i] * up[lam] + f[i].conj() * dphit[lam][i] * up[lam]).im
                    - up[lam] * (at[lam][i].re * rho + a[lam][i].re * rho_t);
            }
        }
    }
    let to_spec = |v: &Vec<f64>| spectral(g, v.iter().map(|&x| Complex::new(x, 0.0)).collect());
    let jh: Vec<_> = j.iter().map(to_spec).collect();
    let jth: Vec<_> = jt.iter().map(to_spec).collect();
    let mut fs: [ComplexField<f64>; 3] = std::array::from_fn(|_| ComplexField::zeros(g, Repr::Spectral));
    for nu in 0..3 {
        for mu in 0..3 {
            for lam in 0..3 {
                let e = perm_sign(mu, nu, lam);
                if e == 0.0 {
                    continue;
                }
                let d = if mu == 0 { jth[lam].clone() } else { dx(&jh[lam], mu - 1).scale(Complex::new(-1.0, 0.0)) };
                fs[nu].axpy(Complex::new(2.0 / kappa * e, 0.0), &d);
            }
        }
    }
    let mut nphi = vec![Complex::new(0.0, 0.0); len];
    for i in 0..len {
        let cov = a[0][i].re * dphi[0][i] - a[1][i].re * dphi[1][i] - a[2][i].re * dphi[2][i];
        let aa = a[0][i].re.powi(2) - a[1][i].re.powi(2) - a[2][i].re.powi(2);
        let rho = f[i].norm_sqr();
        nphi[i] = Complex::new(0.0, 2.0) * cov + f[i] * aa - f[i] * v.derivative(rho) + f[i];
    }
    (fs, spectral(g, nphi))
}

#[test]
fn rhs_matches_second_order_oracle() {
    let g = Grid2D::new(64, 20.0).unwrap();
    for (seed, kappa) in [(1u64, 1.0), (2, 0.7)] {
        let s = random_second(g, 5, 0.05, seed);
        let pot = HiggsPotential::standard(kappa);
        let sys = Csh::new(g, CshParams::new(kappa, pot).unwrap()).unwrap();
        let n = sys.nonlinear(&state_of(&s)).unwrap();
        let (fa, fphi) = second_order_forcing(&n);
        let (oa, ophi) = oracle(g, &s, kappa, &pot);
        let scale = oa.iter().map(|f| f.l2_norm()).fold(0.0, f64::max);
        for nu in 0..3 {
            let err = fa[nu].max_abs_diff(&oa[nu]);
            assert!(err <= 1e-8 * scale.max(1e-12), "nu={nu} err={err:e} scale={scale:e}");
        }
        let err = fphi.max_abs_diff(&ophi);
        assert!(err <= 1e-8 * ophi.l2_norm(), "phi err={err:e}");
    }
}

#[test]
fn gauge_term_is_quadratic_in_phi_without_gauge_field() {
    // polarization: F(p+q) + F(p-q) = 2F(p) + 2F(q) when A = 0
    let g = Grid2D::new(32, 12.0).unwrap();
    let sys = Csh::new(g, CshParams::new(1.0, HiggsPotential::zero()).unwrap()).unwrap();
    let mut r = rng(9);
    let zero: [ComplexField<f64>; 3] = std::array::from_fn(|_| ComplexField::zeros(g, Repr::Spectral));
    let p = [band_limited(g, 6, 0.3, false, &mut r), band_limited(g, 6, 0.3, false, &mut r)];
    let q = [band_limited(g, 6, 0.3, false, &mut r), band_limited(g, 6, 0.3, false, &mut r)];
    let f =
        |u: &ComplexField<f64>, ut: &ComplexField<f64>| sys.gauge_source(&sys.sources(&zero, &zero, u, ut).unwrap());
    let plus = f(&p[0].add(&q[0]), &p[1].add(&q[1]));
    let minus = f(&p[0].sub(&q[0]), &p[1].sub(&q[1]));
    let fp = f(&p[0], &p[1]);
    let fq = f(&q[0], &q[1]);
    for nu in 0..3 {
        let lhs = plus[nu].add(&minus[nu]);
        let rhs = fp[nu].add(&fq[nu]).scale(Complex::new(2.0, 0.0));
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * rhs.max_abs().max(1e-300), "nu={nu}");
    }
}

#[test]
fn phi_free_state_has_no_forcing() {
    let g = Grid2D::new(32, 12.0).unwrap();
    let mut s = random_second(g, 6, 0.2, 4);
    s.phi = ComplexField::zeros(g, Repr::Spectral);
    s.phit = ComplexField::zeros(g, Repr::Spectral);
    let sys = Csh::new(g, CshParams::standard()).unwrap();
    let n = sys.nonlinear(&state_of(&s)).unwrap();
    assert_eq!(n.l2_norm(), 0.0);
}

#[test]
fn single_mode_without_gauge_field() {
    // A = 0, V = 0: only the +phi term survives, forcing +/-(i/2)<xi>^-1 phi
    let g = Grid2D::new(16, std::f64::consts::TAU).unwrap();
    let sys = Csh::new(g, CshParams::new(1.0, HiggsPotential::zero()).unwrap()).unwrap();
    let z = ComplexField::zeros(g, Repr::Physical);
    let phi = ComplexField::plane_wave(g, [2, -1]).scale(Complex::new(0.3, 0.1));
    let (s, _) = sys.initial_data([&z, &z, &z], &phi, &z, ConstraintMode::Project).unwrap();
    let n = sys.nonlinear(&s).unwrap();
    let plan = SpectralPlan::new(g);
    let ph = plan.forward(&phi).unwrap();
    for idx in 0..g.len() {
        let expect = ph.values()[idx] * Complex::new(0.0, 0.5 / bracket(g.xi(idx)));
        assert!((n.fields[PHI_PLUS].values()[idx] - expect).norm() < 1e-13);
        assert!((n.fields[PHI_MINUS].values()[idx] + expect).norm() < 1e-13);
    }
    for f in &n.fields[..GAUGE_FIELDS] {
        assert!(f.max_abs() < 1e-13);
    }
}

#[test]
fn initial_data_projection_and_lorenz() {
    let g = Grid2D::new(32, 16.0).unwrap();
    let sys = Csh::new(g, CshParams::standard()).unwrap();
    let plan = SpectralPlan::new(g);
    for seed in 0..3 {
        let s = random_second(g, 8, 0.3, 20 + seed);
        let a = s.a.clone().map(|f| plan.inverse(&f).unwrap().map(|v| Complex::new(v.re, 0.0)));
        let (st, rep) = sys
            .initial_data(
                [&a[0], &a[1], &a[2]],
                &plan.inverse(&s.phi).unwrap(),
                &plan.inverse(&s.phit).unwrap(),
                ConstraintMode::Project,
            )
            .unwrap();
        assert!(rep.residual_before > 1e-3);
        assert!(rep.residual_after <= 1e-12, "{rep:?}");
        assert!(sys.constraint_residual(&st).unwrap() <= 1e-12);
        assert!(lorenz_residual(&st) <= 1e-12);
        assert!(realness_defect(&st) <= 1e-12);
        // check mode refuses the same data
        let err = sys
            .initial_data(
                [&a[0], &a[1], &a[2]],
                &plan.inverse(&s.phi).unwrap(),
                &plan.inverse(&s.phit).unwrap(),
                ConstraintMode::Check { tolerance: 1e-10 },
            )
            .unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation { .. }));
    }
}

#[test]
fn zero_scalar_accepts_curl_free_gauge_data() {
    let g = Grid2D::new(16, 10.0).unwrap();
    let sys = Csh::new(g, CshParams::standard()).unwrap();
    let plan = SpectralPlan::new(g);
    let mut r = rng(3);
    let chi = band_limited(g, 4, 1.0, true, &mut r);
    let a1 = plan.inverse(&dx(&chi, 0)).unwrap();
    let a2 = plan.inverse(&dx(&chi, 1)).unwrap();
    let z = ComplexField::zeros(g, Repr::Physical);
    let gt = plan.inverse(&band_limited(g, 4, 1.0, false, &mut r)).unwrap();
    let (st, rep) = sys.initial_data([&z, &a1, &a2], &z, &gt, ConstraintMode::Check { tolerance: 1e-10 }).unwrap();
    assert!(rep.residual_before <= 1e-10);
    assert!(gauge_residual(&[st]).unwrap()[0] <= 1e-12);
    assert!(gauge_residual::<f64>(&[]).is_err());
}

fn initial_state(sys: &Csh<f64>, s: &Second) -> WaveState<f64> {
    let g = *sys.grid();
    let plan = SpectralPlan::new(g);
    let a = s.a.clone().map(|f| plan.inverse(&f).unwrap().map(|v| Complex::new(v.re, 0.0)));
    sys.initial_data(
        [&a[0], &a[1], &a[2]],
        &plan.inverse(&s.phi).unwrap(),
        &plan.inverse(&s.phit).unwrap(),
        ConstraintMode::Project,
    )
    .unwrap()
    .0
}

#[test]
fn nullform_decomposition_matches_direct_evaluation() {
    let g = Grid2D::new(32, 16.0).unwrap();
    let sys = Csh::new(g, CshParams::standard()).unwrap();
    for seed in 0..3 {
        let st = initial_state(&sys, &random_second(g, 6, 0.4, 40 + seed));
        let rep = sys.hodge_nullform_rhs(&st).unwrap();
        let scale = rep.direct.max_abs();
        assert!(scale > 1e-6);
        assert!(rep.direct.max_abs_diff(&rep.decomposed) <= 1e-10 * scale.max(1.0), "seed {seed}");
        assert!(rep.max_discrepancy <= 1e-10);
    }
}

#[test]
fn nullform_pieces_vanish_in_degenerate_cases() {
    let g = Grid2D::new(16, 10.0).unwrap();
    let sys = Csh::new(g, CshParams::standard()).unwrap();
    let mut r = rng(5);
    let zero = ComplexField::zeros(g, Repr::Spectral);
    let phi = [band_limited(g, 4, 0.5, false, &mut r), band_limited(g, 4, 0.5, false, &mut r)];
    let pot = band_limited(g, 4, 0.5, true, &mut r);
    let build = |a: [ComplexField<f64>; 3], at: [ComplexField<f64>; 3]| {
        state_of(&Second { a, at, phi: phi[0].clone(), phit: phi[1].clone() })
    };
    // divergence-free, A_0 = 0: no Q^0 part
    let df = [zero.clone(), dx(&pot, 1).scale(Complex::new(-1.0, 0.0)), dx(&pot, 0)];
    let rep = sys.hodge_nullform_rhs(&build(df.clone(), df)).unwrap();
    assert!(rep.q0.max_abs() < 1e-15 && rep.q12.max_abs() > 1e-6);
    // curl-free spatial part: no Q^12 part
    let cf = [pot.clone(), dx(&pot, 0), dx(&pot, 1)];
    let rep = sys.hodge_nullform_rhs(&build(cf.clone(), cf)).unwrap();
    assert!(rep.q12.max_abs() < 1e-14 && rep.q0.max_abs() > 1e-6);
}

#[test]
fn evolution_keeps_gauge_real_and_lorenz_small() {
    let g = Grid2D::new(32, 16.0).unwrap();
    let sys = Csh::new(g, CshParams::standard()).unwrap();
    let s0 = initial_state(&sys, &random_second(g, 5, 0.1, 7));
    let mut hist = Vec::new();
    let cfg = IntegratorConfig::new(2e-3, 0.1).unwrap();
    integrate(&sys, &s0, &cfg, |s| {
        hist.push(s.clone());
        Ok(())
    })
    .unwrap();
    let res = gauge_residual(&hist).unwrap();
    assert!(res[0] <= 1e-12);
    assert!(res.iter().all(|&r| r < 1e-6));
    assert!(hist.iter().all(|s| realness_defect(s) <= 1e-10));
    let zero = initial_state(
        &sys,
        &Second {
            a: std::array::from_fn(|_| ComplexField::zeros(g, Repr::Spectral)),
            at: std::array::from_fn(|_| ComplexField::zeros(g, Repr::Spectral)),
            phi: ComplexField::zeros(g, Repr::Spectral),
            phit: ComplexField::zeros(g, Repr::Spectral),
        },
    );
    let mut zs = Vec::new();
    integrate(&sys, &zero, &cfg, |s| {
        zs.push(s.clone());
        Ok(())
    })
    .unwrap();
    assert!(gauge_residual(&zs).unwrap().iter().all(|&r| r == 0.0));
}
