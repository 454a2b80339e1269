//! The bilinear operator `B^gamma_pm` and randomized ratio estimates for
//! products in restriction norms.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::weights::{b_weight, japanese, norm};
use crate::error::{usage, Error, Result};
use crate::norms::{xsb_norm, SpacetimeField, XsbMode};
use crate::real::Sign;
use crate::spectral::{ComplexField, Grid2D, Repr};

/// Largest grid accepted by the direct `O(n^4)` summation.
pub const MAX_DIRECT_N: usize = 64;

/// `B^gamma_pm(f, g)^(xi) = int b_pm(xi, eta)^gamma f^(eta) g^(xi - eta) d eta`
/// as a lattice sum with cell `dk^2 / (2 pi)` (the transform convention of
/// the spectral module). Output modes are taken mod `n`, so `gamma = 0` is the
/// pointwise product of the sampled fields, aliasing included. The weight is
/// evaluated at the unwrapped sum `eta + zeta`.
pub fn bilinear_b_gamma(
    gamma: f64,
    sign: Sign,
    f: &ComplexField<f64>,
    g: &ComplexField<f64>,
) -> Result<ComplexField<f64>> {
    if !f.is_spectral() || !g.is_spectral() || f.grid() != g.grid() {
        return usage("B^gamma needs two spectral fields on one grid");
    }
    if !(gamma >= 0.0) {
        return usage(format!("gamma = {gamma} must be nonnegative"));
    }
    let grid = *f.grid();
    let n = grid.n();
    if n > MAX_DIRECT_N {
        return Err(Error::Resource(format!(
            "direct B^gamma summation is O(n^4); n = {n} exceeds {MAX_DIRECT_N}, use a smaller grid"
        )));
    }
    let dk = grid.dk();
    let cell = grid.spectral_cell() / std::f64::consts::TAU;
    let wave: Vec<[isize; 2]> = (0..grid.len()).map(|i| grid.wavevector(i)).collect();
    let wrap = |k: isize| k.rem_euclid(n as isize) as usize;
    let mut out = vec![Complex::new(0.0, 0.0); grid.len()];
    for (i, &fe) in f.values().iter().enumerate() {
        if fe == Complex::new(0.0, 0.0) {
            continue;
        }
        let ke = wave[i];
        let eta = [dk * ke[0] as f64, dk * ke[1] as f64];
        for (j, &gz) in g.values().iter().enumerate() {
            let kz = wave[j];
            let ks = [ke[0] + kz[0], ke[1] + kz[1]];
            let xi = [dk * ks[0] as f64, dk * ks[1] as f64];
            let w = if gamma == 0.0 { 1.0 } else { b_weight(sign, xi, eta).powf(gamma) };
            out[wrap(ks[0]) * n + wrap(ks[1])] += fe * gz * w;
        }
    }
    for v in &mut out {
        *v *= cell;
    }
    ComplexField::from_values(grid, out, Repr::Spectral)
}

/// Which product estimate a ratio experiment probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateKind {
    /// `||uv||_{X^r_{0,0}} <= C ||u||_{X^r_{alpha_1,b_1}} ||v||_{X^r_{alpha_2,b_2}}`.
    FourierLebesgue,
    /// `||uv||_{X^r_{alpha_0,gamma}} <= C ||u||_{X^r_{alpha_1,b}} ||v||_{X^r_{alpha_2,b}}`.
    Leibniz,
    /// `||uv||_{H^{-s_0,-b_0}} <= C ||u||_{H^{s_1,b_1}} ||v||_{H^{s_2,b_2}}`, `r = 2`.
    WaveSobolev,
}

/// A product estimate: norm exponents `(s, b)` of the product and of each factor.
///
/// For [`EstimateKind::WaveSobolev`] `lhs = (-s_0, -b_0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductEstimate {
    pub kind: EstimateKind,
    pub r: f64,
    pub lhs: (f64, f64),
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl ProductEstimate {
    pub fn fourier_lebesgue(r: f64, u: (f64, f64), v: (f64, f64)) -> Self {
        Self { kind: EstimateKind::FourierLebesgue, r, lhs: (0.0, 0.0), u, v }
    }

    /// The product point used by the refinement experiment.
    pub fn reference() -> Self {
        Self::fourier_lebesgue(2.0, (0.8, 0.76), (0.8, 0.76))
    }

    /// Each condition of the selected estimate with whether it holds.
    pub fn hypotheses(&self) -> Vec<(String, bool)> {
        let r = self.r;
        let ((l0, l1), (a1, b1), (a2, b2)) = (self.lhs, self.u, self.v);
        let tol = 1e-12;
        let c = |name: &str, ok: bool| (name.to_string(), ok);
        match self.kind {
            EstimateKind::FourierLebesgue => vec![
                c("product norm is X^r_{0,0}", l0 == 0.0 && l1 == 0.0),
                c("1 < r <= 2", r > 1.0 && r <= 2.0),
                c("alpha_1, alpha_2 >= 0", a1 >= 0.0 && a2 >= 0.0),
                c("alpha_1 + alpha_2 > 3/(2r)", a1 + a2 > 1.5 / r),
                c("b_1 + b_2 > 3/(2r)", b1 + b2 > 1.5 / r),
                c("b_1, b_2 > 1/(2r)", b1 > 0.5 / r && b2 > 0.5 / r),
            ],
            EstimateKind::Leibniz => {
                let (a0, g, b) = (l0, l1, b1);
                let excess = a1 + a2 - a0 - g - 1.0 / r;
                vec![
                    c("b_1 = b_2", b1 == b2),
                    c("1 < r <= 2", r > 1.0 && r <= 2.0),
                    c("alpha_0 > 1/r - gamma", a0 > 1.0 / r - g),
                    c("alpha_1 + alpha_2 > 2/r", a1 + a2 > 2.0 / r),
                    c("0 <= alpha_0 <= alpha_1, alpha_2", a0 >= 0.0 && a0 <= a1 && a0 <= a2),
                    c("max(alpha_1, alpha_2) != 3/(2r)", (a1.max(a2) - 1.5 / r).abs() > tol),
                    c("b >= gamma", b >= g),
                    c(
                        "alpha_1 + alpha_2 - alpha_0 > gamma + 1/r with gamma >= 1/(2r), or >= with gamma > 1/(2r)",
                        (excess > tol && g >= 0.5 / r - tol) || (excess >= -tol && g > 0.5 / r),
                    ),
                    c("gamma >= max(alpha_1, alpha_2) - 1/r", g >= a1.max(a2) - 1.0 / r - tol),
                    c("b > 1/r", b > 1.0 / r),
                ]
            }
            EstimateKind::WaveSobolev => {
                let (s0, b0, s1, s2) = (-l0, -l1, a1, a2);
                let ss = s0 + s1 + s2;
                let min_pair = (b0 + b1).min(b0 + b2).min(b1 + b2);
                vec![
                    c("r = 2", r == 2.0),
                    c("b_0 + b_1 + b_2 > 1/2", b0 + b1 + b2 > 0.5),
                    c("b_0 + b_1 >= 0", b0 + b1 >= 0.0),
                    c("b_0 + b_2 >= 0", b0 + b2 >= 0.0),
                    c("b_1 + b_2 >= 0", b1 + b2 >= 0.0),
                    c("s_0 + s_1 + s_2 > 3/2 - (b_0 + b_1 + b_2)", ss > 1.5 - (b0 + b1 + b2)),
                    c("s_0 + s_1 + s_2 > 1 - min(b_0 + b_1, b_0 + b_2, b_1 + b_2)", ss > 1.0 - min_pair),
                    c("s_0 + s_1 + s_2 > 1/2 - min(b_0, b_1, b_2)", ss > 0.5 - b0.min(b1).min(b2)),
                    c("s_0 + s_1 + s_2 > 3/4", ss > 0.75),
                    c("(s_0 + b_0) + 2 s_1 + 2 s_2 > 1", s0 + b0 + 2.0 * s1 + 2.0 * s2 > 1.0),
                    c("2 s_0 + (s_1 + b_1) + 2 s_2 > 1", 2.0 * s0 + s1 + b1 + 2.0 * s2 > 1.0),
                    c("2 s_0 + 2 s_1 + (s_2 + b_2) > 1", 2.0 * s0 + 2.0 * s1 + s2 + b2 > 1.0),
                    c("s_1 + s_2 >= max(0, -b_0)", s1 + s2 >= 0f64.max(-b0)),
                    c("s_0 + s_2 >= max(0, -b_1)", s0 + s2 >= 0f64.max(-b1)),
                    c("s_0 + s_1 >= max(0, -b_2)", s0 + s1 >= 0f64.max(-b2)),
                ]
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((name, _)) = self.hypotheses().into_iter().find(|(_, ok)| !ok) {
            return usage(format!("hypothesis violated: {name}"));
        }
        Ok(())
    }
}

/// `||uv|| / (||u|| ||v||)` in the estimate's norms (modulation `<|tau| - |xi|>`).
/// Zero when either factor vanishes.
pub fn bilinear_ratio(u: &SpacetimeField<f64>, v: &SpacetimeField<f64>, est: &ProductEstimate) -> Result<f64> {
    if u.grid() != v.grid() || u.nt() != v.nt() || u.window() != v.window() || u.taper() != v.taper() {
        return usage("ratio factors must share grid, time samples, window and taper");
    }
    let mode = XsbMode::Absolute;
    let nu = xsb_norm(u, est.u.0, est.u.1, est.r, mode)?;
    let nv = xsb_norm(v, est.v.0, est.v.1, est.r, mode)?;
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    let prod: Vec<Complex<f64>> = u.values().iter().zip(v.values()).map(|(a, b)| a * b).collect();
    let uv = SpacetimeField::new(*u.grid(), u.nt(), u.window(), u.taper(), prod)?;
    Ok(xsb_norm(&uv, est.lhs.0, est.lhs.1, est.r, mode)? / (nu * nv))
}

/// Spatial period and time window of the ensemble fields.
pub const ENSEMBLE_LENGTH: f64 = 4.0 * std::f64::consts::PI;

/// Random band-limited field with complex Gaussian coefficients shaped by
/// `<xi>^{-s-1} <tau + sign |xi|>^{-b-1/2}`, normalized to unit `X^r_{s,b}`
/// norm. Only `|k_j| < n/4`, `|m| < nt/4` are populated, so products of two
/// such fields are represented without aliasing.
pub fn random_wave_field(
    n: usize,
    nt: usize,
    s: f64,
    b: f64,
    r: f64,
    sign: Sign,
    rng: &mut impl Rng,
) -> Result<SpacetimeField<f64>> {
    if n < 8 || nt < 8 {
        return usage("ensemble grids need n, nt >= 8");
    }
    let grid = Grid2D::new(n, ENSEMBLE_LENGTH)?;
    let np = grid.len();
    let probe = SpacetimeField::new(grid, nt, ENSEMBLE_LENGTH, 0.0, vec![Complex::new(0.0, 0.0); nt * np])?;
    let (kmax, mmax) = ((n / 4) as isize, (nt / 4) as isize);
    let sg = sign.value::<f64>();
    let mut spec = vec![Complex::new(0.0, 0.0); nt * np];
    for m in 0..nt {
        if crate::spectral::grid::wavenumber(m, nt).abs() >= mmax {
            continue;
        }
        let tau = probe.tau(m);
        for i in 0..np {
            let k = grid.wavevector(i);
            if k[0].abs() >= kmax || k[1].abs() >= kmax {
                continue;
            }
            let xi = grid.xi(i);
            let w = japanese(norm(xi)).powf(-s - 1.0) * japanese(tau + sg * norm(xi)).powf(-b - 0.5);
            let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            spec[m * np + i] = Complex::new(re, im) * (w * std::f64::consts::FRAC_1_SQRT_2);
        }
    }
    let u = SpacetimeField::from_spectrum(grid, nt, ENSEMBLE_LENGTH, &spec)?;
    let size = xsb_norm(&u, s, b, r, XsbMode::Absolute)?;
    let scaled = u.values().iter().map(|v| v / size).collect();
    SpacetimeField::new(grid, nt, ENSEMBLE_LENGTH, 0.0, scaled)
}

/// Ensemble statistics on one grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub n: usize,
    pub nt: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

/// Max and mean of the ratio over `count` random pairs on each grid. Pair `j`
/// on every grid uses the stream `seed + j`, with independent random signs.
pub fn bilinear_ratio_estimate(
    est: &ProductEstimate,
    count: usize,
    seed: u64,
    grids: &[(usize, usize)],
) -> Result<Vec<RatioRow>> {
    est.validate()?;
    if count == 0 {
        return usage("ensemble needs at least one sample");
    }
    let mut rows = Vec::with_capacity(grids.len());
    for &(n, nt) in grids {
        let mut max: f64 = 0.0;
        let mut sum = 0.0;
        for j in 0..count {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(j as u64));
            let su = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
            let sv = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
            let u = random_wave_field(n, nt, est.u.0, est.u.1, est.r, su, &mut rng)?;
            let v = random_wave_field(n, nt, est.v.0, est.v.1, est.r, sv, &mut rng)?;
            let q = bilinear_ratio(&u, &v, est)?;
            max = max.max(q);
            sum += q;
        }
        rows.push(RatioRow { n, nt, max_ratio: max, mean_ratio: sum / count as f64 });
    }
    Ok(rows)
}
