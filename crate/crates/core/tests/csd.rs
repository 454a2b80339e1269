mod common;

use common::*;
use cslab_core::csd::*;
use cslab_core::evolve::{integrate, HalfWaveSystem, IntegratorConfig};
use cslab_core::gauge::*;
use cslab_core::spectral::{abs_xi, dirac_project, ComplexField, Grid2D, Repr, SpectralPlan, SpinorField};
use cslab_core::wave::WaveState;
use cslab_core::{Error, Sign};
use num_complex::Complex;

type C = Complex<f64>;

struct Data {
    a: [ComplexField<f64>; 3],
    at: [ComplexField<f64>; 3],
    psi: SpinorField<f64>,
}

fn random_data(g: Grid2D<f64>, band: isize, amp: f64, seed: u64) -> Data {
    let mut r = rng(seed);
    let a = std::array::from_fn(|_| band_limited(g, band, amp, true, &mut r));
    let at = std::array::from_fn(|_| band_limited(g, band, amp, true, &mut r));
    let psi = SpinorField {
        upper: band_limited(g, band, amp, false, &mut r),
        lower: band_limited(g, band, amp, false, &mut r),
    };
    Data { a, at, psi }
}

fn state_of(sys: &Csd<f64>, d: &Data) -> WaveState<f64> {
    let (mut fields, zero) = split_gauge(&d.a, &d.at).unwrap();
    for sign in Sign::BOTH {
        let p = sys.project(sign, &d.psi);
        fields.push(p.upper);
        fields.push(p.lower);
    }
    WaveState::new(0.0, fields, csd_components(), zero).unwrap()
}

/// `box A_nu` implied by the half-wave gauge forcing.
fn gauge_forcing(n: &WaveState<f64>) -> [ComplexField<f64>; 3] {
    let g = *n.grid();
    std::array::from_fn(|nu| {
        let mut f = n.fields[2 * nu].sub(&n.fields[2 * nu + 1]);
        for (idx, v) in f.values_mut().iter_mut().enumerate() {
            *v = *v * C::new(0.0, -abs_xi(g.xi(idx)));
        }
        f.values_mut()[0] = C::new(n.zero_modes[nu].rate * g.area() / std::f64::consts::TAU, 0.0);
        f
    })
}

/// Pointwise `alpha^mu A_mu psi` and `alpha^j d_j psi`, physical space.
fn alpha_apply(c: [C; 3], u: C, l: C) -> (C, C) {
    // alpha^0 = I, alpha^1 = sigma^1, alpha^2 = sigma^2
    let i = C::new(0.0, 1.0);
    (c[0] * u + c[1] * l - i * c[2] * l, c[0] * l + c[1] * u + i * c[2] * u)
}

/// Direct transcription of the second-order system on an unpadded grid.
/// Returns `box A_nu` and `d_t psi`.
fn oracle(g: Grid2D<f64>, d: &Data, mass: f64, kappa: f64) -> ([ComplexField<f64>; 3], SpinorField<f64>) {
    let ph = |f: &ComplexField<f64>| physical(g, f);
    let a: Vec<_> = d.a.iter().map(ph).collect();
    let (u, l) = (ph(&d.psi.upper), ph(&d.psi.lower));
    let du = [ph(&dx(&d.psi.upper, 0)), ph(&dx(&d.psi.upper, 1))];
    let dl = [ph(&dx(&d.psi.lower, 0)), ph(&dx(&d.psi.lower, 1))];
    let len = g.len();
    let i = C::new(0.0, 1.0);
    let (mut ut, mut lt) = (vec![C::new(0.0, 0.0); len], vec![C::new(0.0, 0.0); len]);
    for k in 0..len {
        // alpha^1 d_1 psi + alpha^2 d_2 psi
        let (x1u, x1l) = alpha_apply([C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)], du[0][k], dl[0][k]);
        let (x2u, x2l) = alpha_apply([C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)], du[1][k], dl[1][k]);
        let (au, al) = alpha_apply([a[0][k], a[1][k], a[2][k]], u[k], l[k]);
        ut[k] = -(x1u + x2u) - i * mass * u[k] + i * au;
        lt[k] = -(x1l + x2l) + i * mass * l[k] + i * al;
    }
    let mut j = vec![vec![0.0; len]; 3];
    let mut jt = vec![vec![0.0; len]; 3];
    for k in 0..len {
        for lam in 0..3 {
            let mut e = [C::new(0.0, 0.0); 3];
            e[lam] = C::new(1.0, 0.0);
            let (xu, xl) = alpha_apply(e, u[k], l[k]);
            j[lam][k] = (u[k].conj() * xu + l[k].conj() * xl).re;
            let (yu, yl) = alpha_apply(e, ut[k], lt[k]);
            jt[lam][k] = 2.0 * (u[k].conj() * yu + l[k].conj() * yl).re;
        }
    }
    let to_spec = |v: &Vec<f64>| spectral(g, v.iter().map(|&x| C::new(x, 0.0)).collect());
    let jh: Vec<_> = j.iter().map(to_spec).collect();
    let jth: Vec<_> = jt.iter().map(to_spec).collect();
    // box A_nu = -(2/kappa) eps_{mu nu lambda} d^mu J^lambda, d^j = -d_j
    let mut fs: [ComplexField<f64>; 3] = std::array::from_fn(|_| ComplexField::zeros(g, Repr::Spectral));
    for nu in 0..3 {
        for mu in 0..3 {
            for lam in 0..3 {
                let e = perm_sign(mu, nu, lam);
                if e == 0.0 {
                    continue;
                }
                let dj = if mu == 0 { jth[lam].clone() } else { dx(&jh[lam], mu - 1).scale(C::new(-1.0, 0.0)) };
                fs[nu].axpy(C::new(-2.0 / kappa * e, 0.0), &dj);
            }
        }
    }
    (fs, SpinorField { upper: spectral(g, ut), lower: spectral(g, lt) })
}

#[test]
fn rhs_matches_second_order_oracle() {
    let g = Grid2D::new(64, 20.0).unwrap();
    for (seed, mass, kappa) in [(1u64, 0.0, 1.0), (2, 0.5, 0.7)] {
        let d = random_data(g, 5, 0.05, seed);
        let sys = Csd::new(g, CsdParams::new(mass, kappa).unwrap()).unwrap();
        let s = state_of(&sys, &d);
        let n = sys.nonlinear(&s).unwrap();
        let (oa, opsi) = oracle(g, &d, mass, kappa);
        let fa = gauge_forcing(&n);
        let scale = oa.iter().map(|f| f.max_abs()).fold(0.0, f64::max);
        for nu in 0..3 {
            let err = fa[nu].max_abs_diff(&oa[nu]);
            assert!(err <= 1e-8 * scale, "nu={nu} err={err:e} scale={scale:e}");
        }
        // d_t psi = sum(-/+ i D psi_pm) + forcing
        let mut dt = SpinorField::zeros(g, Repr::Spectral);
        for sign in Sign::BOTH {
            let k = 6 + 2 * sign.index();
            let mut part = SpinorField { upper: n.fields[k].clone(), lower: n.fields[k + 1].clone() };
            let free = SpinorField { upper: s.fields[k].clone(), lower: s.fields[k + 1].clone() };
            for idx in 0..g.len() {
                let w = C::new(0.0, -sign.value::<f64>() * abs_xi(g.xi(idx)));
                part.upper.values_mut()[idx] += w * free.upper.values()[idx];
                part.lower.values_mut()[idx] += w * free.lower.values()[idx];
            }
            dt = dt.add(&part);
        }
        let err = dt.max_abs_diff(&opsi);
        assert!(err <= 1e-8 * opsi.upper.max_abs(), "psi err={err:e}");
    }
}

#[test]
fn forcing_lies_in_projector_ranges() {
    let g = Grid2D::new(32, 12.0).unwrap();
    let sys = Csd::new(g, CsdParams::new(0.3, 1.0).unwrap()).unwrap();
    let s = state_of(&sys, &random_data(g, 6, 0.2, 3));
    let n = sys.nonlinear(&s).unwrap();
    for st in [&s, &n] {
        for sign in Sign::BOTH {
            let p = spinor_part(st, sign);
            assert!(dirac_project(sign, &p).unwrap().max_abs_diff(&p) <= 1e-12);
        }
    }
}

#[test]
fn vanishing_spinor_or_field_gives_no_forcing() {
    let g = Grid2D::new(32, 12.0).unwrap();
    let sys = Csd::new(g, CsdParams::standard()).unwrap();
    let mut d = random_data(g, 6, 0.2, 4);
    let psi = d.psi.clone();
    d.psi = SpinorField::zeros(g, Repr::Spectral);
    assert_eq!(sys.nonlinear(&state_of(&sys, &d)).unwrap().l2_norm(), 0.0);
    // A = 0, m = 0: only the gauge equation is forced
    let d = Data {
        a: std::array::from_fn(|_| ComplexField::zeros(g, Repr::Spectral)),
        at: std::array::from_fn(|_| ComplexField::zeros(g, Repr::Spectral)),
        psi,
    };
    let n = sys.nonlinear(&state_of(&sys, &d)).unwrap();
    for f in &n.fields[GAUGE_FIELDS..] {
        assert_eq!(f.max_abs(), 0.0);
    }
    assert!(n.fields[..GAUGE_FIELDS].iter().any(|f| f.max_abs() > 1e-6));
}

#[test]
fn mass_term_couples_opposite_half_waves() {
    // A = 0, m > 0, psi = psi_+ on one mode: forcing of psi_- is -i m beta psi_+
    let g = Grid2D::new(16, std::f64::consts::TAU).unwrap();
    let m = 0.7;
    let sys = Csd::new(g, CsdParams::new(m, 1.0).unwrap()).unwrap();
    let z = ComplexField::zeros(g, Repr::Spectral);
    let wave = SpectralPlan::new(g).forward(&ComplexField::plane_wave(g, [2, -1])).unwrap();
    let psi = SpinorField { upper: wave.scale(C::new(0.3, 0.1)), lower: wave.scale(C::new(-0.2, 0.4)) };
    let plus = sys.project(Sign::Plus, &psi);
    let d = Data { a: [z.clone(), z.clone(), z.clone()], at: [z.clone(), z.clone(), z.clone()], psi: plus.clone() };
    let s = state_of(&sys, &d);
    assert!(spinor_part(&s, Sign::Minus).l2_norm() < 1e-14);
    let n = sys.nonlinear(&s).unwrap();
    let beta = apply_matrix(&sys.algebra().beta, &plus);
    let expect = SpinorField { upper: beta.upper.scale(C::new(0.0, -m)), lower: beta.lower.scale(C::new(0.0, -m)) };
    assert!(spinor_part(&n, Sign::Minus).max_abs_diff(&expect) < 1e-14);
    assert!(spinor_part(&n, Sign::Plus).l2_norm() < 1e-14);
    for f in &n.fields[..GAUGE_FIELDS] {
        assert!(f.max_abs() < 1e-13);
    }
}

#[test]
fn dirac_current_matches_componentwise_sum() {
    let g = Grid2D::new(16, 7.0).unwrap();
    let plan = SpectralPlan::new(g);
    let mut r = rng(11);
    let spin =
        |r: &mut _| SpinorField { upper: band_limited(g, 3, 1.0, false, r), lower: band_limited(g, 3, 1.0, false, r) };
    let (a, b) = (spin(&mut r), spin(&mut r));
    let phys = |s: &SpinorField<f64>| SpinorField {
        upper: plan.inverse(&s.upper).unwrap(),
        lower: plan.inverse(&s.lower).unwrap(),
    };
    let (pa, pb) = (phys(&a), phys(&b));
    for lam in 0..3 {
        let got = dirac_current(&plan, &pa, &pb, lam).unwrap();
        let mut e = [C::new(0.0, 0.0); 3];
        e[lam] = C::new(1.0, 0.0);
        for k in 0..g.len() {
            let (xu, xl) = alpha_apply(e, pb.upper.values()[k], pb.lower.values()[k]);
            let want = pa.upper.values()[k].conj() * xu + pa.lower.values()[k].conj() * xl;
            assert!((got.values()[k] - want).norm() <= 1e-13, "lambda={lam}");
        }
        // Hermitian: conj(a^dagger X b) = b^dagger X a
        let back = dirac_current(&plan, &pb, &pa, lam).unwrap();
        assert!(got.conj().max_abs_diff(&back) <= 1e-13);
        let own = dirac_current(&plan, &pa, &pa, lam).unwrap();
        assert!(own.values().iter().all(|v| v.im.abs() <= 1e-13));
        if lam == 0 {
            assert!(own.values().iter().all(|v| v.re >= -1e-13));
        }
        // spectral input gives the spectral product
        let spec = dirac_current(&plan, &a, &b, lam).unwrap();
        assert!(plan.inverse(&spec).unwrap().max_abs_diff(&got) <= 1e-13);
    }
    assert!(dirac_current(&plan, &pa, &b, 0).is_err());
    assert!(dirac_current(&plan, &pa, &pb, 3).is_err());
}

#[test]
fn charge_matches_riemann_sum() {
    let g = Grid2D::new(32, 9.0).unwrap();
    let sys = Csd::new(g, CsdParams::standard()).unwrap();
    let d = random_data(g, 10, 0.4, 12);
    let s = state_of(&sys, &d);
    let (u, l) = (physical(g, &d.psi.upper), physical(g, &d.psi.lower));
    let sum: f64 = u.iter().chain(&l).map(|v| v.norm_sqr()).sum::<f64>() * g.physical_cell();
    assert!((sys.charge(&s) - sum).abs() <= 1e-12 * sum);
    let zero = SpinorField::zeros(g, Repr::Spectral);
    assert_eq!(charge(&zero, &zero), 0.0);
    // one mode: Parseval with a single term
    let mut one = SpinorField::zeros(g, Repr::Spectral);
    one.upper.values_mut()[5] = C::new(0.6, 0.8);
    assert!((charge(&one, &zero) - one.l2_norm().powi(2)).abs() < 1e-15);
}

#[test]
fn decomposition_identities_hold() {
    let g = Grid2D::new(32, 12.0).unwrap();
    for (seed, mass) in [(21u64, 0.0), (22, 0.4)] {
        let sys = Csd::new(g, CsdParams::new(mass, 1.0).unwrap()).unwrap();
        let s = state_of(&sys, &random_data(g, 8, 0.5, seed));
        let e = sys.nullform_decomposition_check(&s).unwrap();
        assert!(e.norm_n > 1e-3 && e.norm_m > 1e-3, "{e:?}");
        assert!(e.max_err_n <= 1e-11 && e.max_err_m <= 1e-11, "{e:?}");
    }
    // a single mode: finite matrix identity
    let sys = Csd::new(g, CsdParams::standard()).unwrap();
    let mut d = random_data(g, 0, 0.0, 0);
    d.psi.upper.values_mut()[3] = C::new(0.5, -0.2);
    d.psi.lower.values_mut()[3] = C::new(0.1, 0.3);
    d.a[1].values_mut()[0] = C::new(0.4, 0.0);
    let e = sys.nullform_decomposition_check(&state_of(&sys, &d)).unwrap();
    assert!(e.max_err_n <= 1e-15 && e.max_err_m <= 1e-15, "{e:?}");
}

#[test]
fn initial_data_constraint_and_lorenz() {
    let g = Grid2D::new(32, 16.0).unwrap();
    let sys = Csd::new(g, CsdParams::standard()).unwrap();
    let plan = SpectralPlan::new(g);
    for seed in 0..3 {
        let d = random_data(g, 8, 0.3, 30 + seed);
        let a = d.a.clone().map(|f| plan.inverse(&f).unwrap());
        let psi =
            SpinorField { upper: plan.inverse(&d.psi.upper).unwrap(), lower: plan.inverse(&d.psi.lower).unwrap() };
        let (st, rep) = sys.initial_data([&a[0], &a[1], &a[2]], &psi, ConstraintMode::Project).unwrap();
        assert!(rep.residual_before > 1e-3);
        assert!(rep.residual_after <= 1e-12, "{rep:?}");
        assert!(sys.constraint_residual(&st).unwrap() <= 1e-12);
        assert!(lorenz_residual(&st) <= 1e-12);
        assert!(realness_defect(&st) <= 1e-12);
        for sign in Sign::BOTH {
            let p = spinor_part(&st, sign);
            assert!(dirac_project(sign, &p).unwrap().max_abs_diff(&p) <= 1e-12);
        }
        assert!(spinor(&st).max_abs_diff(&d.psi) <= 1e-13);
        let err =
            sys.initial_data([&a[0], &a[1], &a[2]], &psi, ConstraintMode::Check { tolerance: 1e-10 }).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation { .. }));
    }
    // vanishing spinor: curl-free gauge data passes the check unchanged
    let mut r = rng(5);
    let chi = band_limited(g, 4, 1.0, true, &mut r);
    let a1 = plan.inverse(&dx(&chi, 0)).unwrap();
    let a2 = plan.inverse(&dx(&chi, 1)).unwrap();
    let z = ComplexField::zeros(g, Repr::Physical);
    let (st, rep) = sys
        .initial_data(
            [&z, &a1, &a2],
            &SpinorField::zeros(g, Repr::Physical),
            ConstraintMode::Check { tolerance: 1e-10 },
        )
        .unwrap();
    assert!(rep.residual_before <= 1e-10);
    assert!(gauge_potential(&st, 1).max_abs_diff(&dx(&chi, 0)) <= 1e-12);
}

#[test]
fn gauge_forcing_is_divergence_free() {
    // d^nu F_nu = 0 by antisymmetry; d_t F_0 = -(2/kappa)(d_1 K^2 - d_2 K^1)
    let g = Grid2D::new(32, 12.0).unwrap();
    let sys = Csd::new(g, CsdParams::standard()).unwrap();
    let s = state_of(&sys, &random_data(g, 6, 0.3, 8));
    let src = sys.state_sources(&s).unwrap();
    let f = sys.gauge_source(&src);
    let k = &src.current_rate;
    let mut div = dx(&f[1], 0).add(&dx(&f[2], 1)).scale(C::new(-1.0, 0.0));
    div.axpy(C::new(-2.0, 0.0), &dx(&k[1], 0).sub(&dx(&k[0], 1)));
    let scale = f[1].max_abs().max(f[2].max_abs());
    assert!(scale > 1e-6);
    assert!(div.max_abs() <= 1e-10 * scale, "{:e}", div.max_abs());
}

fn initial_state(sys: &Csd<f64>, d: &Data) -> WaveState<f64> {
    let plan = sys.plan();
    let a = d.a.clone().map(|f| plan.inverse(&f).unwrap());
    let psi = SpinorField { upper: plan.inverse(&d.psi.upper).unwrap(), lower: plan.inverse(&d.psi.lower).unwrap() };
    sys.initial_data([&a[0], &a[1], &a[2]], &psi, ConstraintMode::Project).unwrap().0
}

#[test]
fn evolution_conserves_charge_and_keeps_gauge() {
    let g = Grid2D::new(32, 16.0).unwrap();
    let sys = Csd::new(g, CsdParams::new(0.2, 1.0).unwrap()).unwrap();
    let s0 = initial_state(&sys, &random_data(g, 5, 0.1, 7));
    let q0 = sys.charge(&s0);
    let mut hist = Vec::new();
    integrate(&sys, &s0, &IntegratorConfig::new(2e-3, 0.1).unwrap(), |s| {
        hist.push(s.clone());
        Ok(())
    })
    .unwrap();
    for s in &hist {
        assert!((sys.charge(s) - q0).abs() <= 1e-8 * q0);
        assert!(lorenz_residual(s) < 1e-6);
        assert!(realness_defect(s) <= 1e-10);
        for sign in Sign::BOTH {
            let p = spinor_part(s, sign);
            assert!(dirac_project(sign, &p).unwrap().max_abs_diff(&p) <= 1e-12);
        }
    }
}
