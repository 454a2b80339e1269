//! Delta-restricted convolution integrals
//! `int delta(tau - |eta| -+ |xi - eta|) |eta|^{-a} |xi - eta|^{-b} d eta`
//! with `a = alpha_1 r`, `b = alpha_2 r`, their power-law exponents, and the
//! supremum scan of the weighted quantity `I(tau, xi)`.
//!
//! Both level sets are handled in elliptic coordinates with foci `0` and `xi`,
//! `eta = xi/2 + c (cosh mu cos nu, sinh mu sin nu)` (rotated), `c = |xi|/2`,
//! where `|eta| = c (cosh mu + cos nu)` and `|xi - eta| = c (cosh mu - cos nu)`.
//! The ellipse `|eta| + |xi - eta| = tau` is `cosh mu = tau / |xi|`, the
//! hyperbola branch `|eta| - |xi - eta| = tau` is `cos nu = tau / |xi|`, and
//! the area element `c^2 (cosh^2 mu - cos^2 nu)` cancels one power of each
//! distance. What remains is a one-dimensional integral of a positive, smooth
//! function, evaluated by adaptive Gauss-Kronrod.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::weights::{japanese, norm, ConePoint};
use crate::error::{usage, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Result of an adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the per-panel `|K15 - G7|` estimates.
    pub error: f64,
    pub panels: usize,
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let s = f(mid - x) + f(mid + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Adaptive 15-point Gauss-Kronrod on `[a, b]`: the panel with the largest
/// error estimate is bisected until the total estimate drops below
/// `rel_tol * |value|` (or underflows to zero).
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, max_panels: usize) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return usage(format!("quadrature interval [{a}, {b}] is not a finite ordered interval"));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, panels: 0 });
    }
    let (value, error) = kronrod_panel(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let (mut total, mut err) = (value, error);
    loop {
        if !total.is_finite() {
            return Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")));
        }
        if err <= rel_tol * total.abs() || err < 1e-300 {
            return Ok(Quadrature { value: total, error: err, panels: heap.len() });
        }
        if heap.len() >= max_panels {
            return Err(Error::Numeric(format!(
                "quadrature on [{a}, {b}] did not converge: error {err:e} vs value {total:e} after {max_panels} panels"
            )));
        }
        let p = heap.pop().expect("heap is never empty");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            return Err(Error::Numeric(format!("quadrature panel at {} cannot be split further", p.a)));
        }
        let (v1, e1) = kronrod_panel(&f, p.a, m);
        let (v2, e2) = kronrod_panel(&f, m, p.b);
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2 });
        // Re-sum occasionally so the running totals do not drift.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
    }
}

/// Relative tolerance of the delta-integral quadrature.
pub const DELTA_RTOL: f64 = 1e-11;
const MAX_PANELS: usize = 4000;

/// Sign case of the convolution integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeltaCase {
    /// Ellipse `|eta| + |xi - eta| = tau`, `tau > |xi|`.
    PlusPlus,
    /// Hyperbola `|eta| - |xi - eta| = tau`, `|tau| < |xi|`, near part `|eta| + |xi - eta| <= 2|xi|`.
    PlusMinusA,
    /// The far part `|eta| + |xi - eta| >= 2|xi|` of the hyperbola.
    PlusMinusB,
}

impl std::str::FromStr for DeltaCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pp" | "++" | "plus-plus" => Ok(DeltaCase::PlusPlus),
            "pma" | "+-a" | "plus-minus-a" => Ok(DeltaCase::PlusMinusA),
            "pmb" | "+-b" | "plus-minus-b" => Ok(DeltaCase::PlusMinusB),
            _ => usage(format!("unknown integral case '{s}' (expected pp, pma or pmb)")),
        }
    }
}

/// Which side of `3/2` the larger weight exponent sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Low,
    High,
}

/// Exponents of the power law: `tau^A ||tau| - |xi||^B` for `(+,+)`,
/// `|xi|^A ||xi| - |tau||^B` for the `(+,-)` parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FKExponents {
    pub a: f64,
    pub b: f64,
    pub regime: Regime,
    pub case: DeltaCase,
}

pub fn fk_exponents(alpha1: f64, alpha2: f64, r: f64, case: DeltaCase) -> Result<FKExponents> {
    if !(r > 0.0) || !alpha1.is_finite() || !alpha2.is_finite() {
        return usage("fk_exponents needs finite alphas and r > 0");
    }
    let crit = 1.5 / r;
    if (alpha1.max(alpha2) - crit).abs() <= 1e-14 * crit {
        return usage(format!("max(alpha_1, alpha_2) = 3/(2r) = {crit} is excluded"));
    }
    let (a1, a2) = (alpha1 * r, alpha2 * r);
    let sum = (alpha1 + alpha2) * r;
    let regime = if a1.max(a2) < 1.5 { Regime::Low } else { Regime::High };
    let (a, b) = match case {
        DeltaCase::PlusPlus => {
            let m = a1.max(a2).max(1.5);
            (m - sum, 1.0 - m)
        }
        DeltaCase::PlusMinusA => {
            let m = a2.max(1.5);
            (m - sum, 1.0 - m)
        }
        DeltaCase::PlusMinusB => (1.5 - sum, -0.5),
    };
    Ok(FKExponents { a, b, regime, case })
}

/// Closed form of the `(+,+)` integral at `xi = 0`: `pi (tau/2)^{1 - (alpha_1 + alpha_2) r}`.
pub fn delta_integral_at_origin(tau: f64, alpha1: f64, alpha2: f64, r: f64) -> f64 {
    PI * (0.5 * tau).powf(1.0 - (alpha1 + alpha2) * r)
}

/// The delta-restricted convolution integral; see [`delta_convolution_quadrature`].
pub fn delta_convolution_integral(
    tau: f64,
    xi: [f64; 2],
    alpha1: f64,
    alpha2: f64,
    r: f64,
    case: DeltaCase,
) -> Result<f64> {
    delta_convolution_quadrature(tau, xi, alpha1, alpha2, r, case).map(|q| q.value)
}

/// Evaluates `int delta(tau - |eta| -+ |xi - eta|) |eta|^{-alpha_1 r} |xi - eta|^{-alpha_2 r} d eta`
/// over the part of the level set selected by `case`.
///
/// The far part of the hyperbola converges only for `(alpha_1 + alpha_2) r > 2`;
/// it is mapped onto `(0, 1]` exactly rather than truncated.
pub fn delta_convolution_quadrature(
    tau: f64,
    xi: [f64; 2],
    alpha1: f64,
    alpha2: f64,
    r: f64,
    case: DeltaCase,
) -> Result<Quadrature> {
    if !(tau.is_finite() && xi[0].is_finite() && xi[1].is_finite() && r > 0.0) {
        return usage("delta integral needs finite tau, xi and r > 0");
    }
    let (a, b) = (alpha1 * r, alpha2 * r);
    let k = norm(xi);
    let c = 0.5 * k;
    match case {
        DeltaCase::PlusPlus => {
            if !(tau > k) {
                return usage(format!("(+,+) integral needs tau > |xi| (tau = {tau}, |xi| = {k})"));
            }
            if k <= 1e-9 * tau {
                let v = delta_integral_at_origin(tau, alpha1, alpha2, r);
                return Ok(Quadrature { value: v, error: 0.0, panels: 0 });
            }
            // C = cosh mu_0; C - cos nu = (C - 1) + 2 sin^2(nu/2) keeps the near-cone case accurate.
            let cc = tau / k;
            let gap = (tau - k) / k;
            let sinh0 = (gap * (cc + 1.0)).sqrt();
            let f = |nu: f64| {
                let s = (0.5 * nu).sin();
                let minus = gap + 2.0 * s * s;
                let plus = cc + nu.cos();
                plus.powf(1.0 - a) * minus.powf(1.0 - b)
            };
            // cos nu = -1 makes C + cos nu = C - 1: split at pi/2 so both ends get their own panels.
            let q1 = gauss_kronrod(f, 0.0, 0.5 * PI, DELTA_RTOL, MAX_PANELS)?;
            let q2 = gauss_kronrod(
                |nu: f64| {
                    let s = (0.5 * (PI - nu)).sin();
                    let plus = gap + 2.0 * s * s;
                    let minus = cc - nu.cos();
                    plus.powf(1.0 - a) * minus.powf(1.0 - b)
                },
                0.5 * PI,
                PI,
                DELTA_RTOL,
                MAX_PANELS,
            )?;
            let pre = c.powf(1.0 - a - b) / sinh0;
            Ok(Quadrature {
                value: pre * (q1.value + q2.value),
                error: pre * (q1.error + q2.error),
                panels: q1.panels + q2.panels,
            })
        }
        DeltaCase::PlusMinusA | DeltaCase::PlusMinusB => {
            if !(tau.abs() < k) {
                return usage(format!("(+,-) integral needs |tau| < |xi| (tau = {tau}, |xi| = {k})"));
            }
            let d = tau / k;
            let (one_minus, one_plus) = if tau >= 0.0 { ((k - tau) / k, 1.0 + d) } else { (1.0 - d, (k + tau) / k) };
            let pre = c.powf(1.0 - a - b) / (one_minus * one_plus).sqrt();
            let q = if case == DeltaCase::PlusMinusA {
                // x = cosh mu on [1, 2]; cosh mu -+ D = (1 -+ D) + 2 sinh^2(mu/2).
                let f = |mu: f64| {
                    let s = (0.5 * mu).sinh();
                    let s2 = 2.0 * s * s;
                    (one_plus + s2).powf(1.0 - a) * (one_minus + s2).powf(1.0 - b)
                };
                gauss_kronrod(f, 0.0, 2f64.acosh(), DELTA_RTOL, MAX_PANELS)?
            } else {
                if !(a + b > 2.0) {
                    return usage(format!(
                        "far hyperbola integral diverges unless (alpha_1 + alpha_2) r > 2 (got {})",
                        a + b
                    ));
                }
                // x = 2 t^{-p}, p = 1/(a + b - 2): the integrand becomes 2^{2-a-b} p h(t^p / 2)
                // with h(y) = (1 + D y)^{1-a} (1 - D y)^{1-b} (1 - y^2)^{-1/2}.
                let p = 1.0 / (a + b - 2.0);
                let scale = 2f64.powf(2.0 - a - b) * p;
                let f = |t: f64| {
                    let y = 0.5 * t.powf(p);
                    scale * (1.0 + d * y).powf(1.0 - a) * (1.0 - d * y).powf(1.0 - b) / (1.0 - y * y).sqrt()
                };
                gauss_kronrod(f, 0.0, 1.0, DELTA_RTOL, MAX_PANELS)?
            };
            Ok(Quadrature { value: pre * q.value, error: pre * q.error, panels: q.panels })
        }
    }
}

/// Monte-Carlo estimate of the `(+,+)` integral with the delta replaced by a
/// Gaussian of width `width`, sampled on a jittered Cartesian grid covering
/// the ellipse. Independent of the elliptic-coordinate quadrature.
pub fn smeared_delta_monte_carlo(
    tau: f64,
    xi: [f64; 2],
    alpha1: f64,
    alpha2: f64,
    r: f64,
    width: f64,
    per_side: usize,
    seed: u64,
) -> Result<f64> {
    let k = norm(xi);
    if !(tau > k) || !(width > 0.0) || per_side == 0 {
        return usage("smeared delta needs tau > |xi|, width > 0 and a nonempty grid");
    }
    let (a, b) = (alpha1 * r, alpha2 * r);
    let half = 0.5 * tau + 8.0 * width;
    let centre = [0.5 * xi[0], 0.5 * xi[1]];
    let h = 2.0 * half / per_side as f64;
    let norm_c = 1.0 / ((2.0 * PI).sqrt() * width);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    for i in 0..per_side {
        let mut row = 0.0;
        for j in 0..per_side {
            let e = [
                centre[0] - half + h * (i as f64 + rng.random::<f64>()),
                centre[1] - half + h * (j as f64 + rng.random::<f64>()),
            ];
            let p = norm(e);
            let q = norm([xi[0] - e[0], xi[1] - e[1]]);
            let s = (tau - p - q) / width;
            if s.abs() > 9.0 {
                continue;
            }
            row += norm_c * (-0.5 * s * s).exp() * p.powf(-a) * q.powf(-b);
        }
        sum += row;
    }
    Ok(sum * h * h)
}

/// Parameters of the weighted quantity
/// `I(tau, xi) = ||tau| - |xi||^gamma |xi|^alpha_0 (delta integral)^{1/r}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsupParams {
    pub r: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub gamma: f64,
}

impl IsupParams {
    /// Default admissible point used by the scans.
    pub fn reference() -> Self {
        Self { r: 2.0, alpha0: 0.3, alpha1: 0.8, alpha2: 0.3, gamma: 0.3 }
    }

    /// Each hypothesis of the Leibniz-rule estimate with whether it holds.
    pub fn hypotheses(&self) -> Vec<(String, bool)> {
        let Self { r, alpha0, alpha1, alpha2, gamma } = *self;
        let tol = 1e-12;
        vec![
            ("1 < r <= 2".into(), r > 1.0 && r <= 2.0),
            (
                "alpha_1 + alpha_2 - alpha_0 = gamma + 1/r".into(),
                (alpha1 + alpha2 - alpha0 - gamma - 1.0 / r).abs() <= tol,
            ),
            ("alpha_0 > 1/r - gamma".into(), alpha0 > 1.0 / r - gamma),
            ("0 <= alpha_0 <= alpha_1, alpha_2".into(), alpha0 >= 0.0 && alpha0 <= alpha1 && alpha0 <= alpha2),
            ("alpha_1 + alpha_2 > 2/r".into(), alpha1 + alpha2 > 2.0 / r),
            (
                "gamma >= max(1/(2r), alpha_1 - 1/r, alpha_2 - 1/r)".into(),
                gamma >= (0.5 / r).max(alpha1 - 1.0 / r).max(alpha2 - 1.0 / r) - tol,
            ),
            ("max(alpha_1, alpha_2) != 3/(2r)".into(), (alpha1.max(alpha2) - 1.5 / r).abs() > tol),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let failed: Vec<String> = self.hypotheses().into_iter().filter(|(_, ok)| !ok).map(|(n, _)| n).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            usage(format!("hypothesis violated: {}", failed.join("; ")))
        }
    }

    /// `I(tau, xi)`: `(+,+)` at `|tau|` off the cone's inside, both hyperbola
    /// parts inside it, zero on the cone itself.
    pub fn value(&self, p: ConePoint) -> Result<f64> {
        let k = norm(p.xi);
        let t = p.tau.abs();
        let integral = if t > k {
            delta_convolution_integral(t, p.xi, self.alpha1, self.alpha2, self.r, DeltaCase::PlusPlus)?
        } else if t < k {
            delta_convolution_integral(p.tau, p.xi, self.alpha1, self.alpha2, self.r, DeltaCase::PlusMinusA)?
                + delta_convolution_integral(p.tau, p.xi, self.alpha1, self.alpha2, self.r, DeltaCase::PlusMinusB)?
        } else {
            return Ok(0.0);
        };
        Ok((t - k).abs().powf(self.gamma) * k.powf(self.alpha0) * integral.powf(1.0 / self.r))
    }

    /// Far-field prediction for `tau >> |xi|`, where the integral approaches its `xi = 0` value.
    pub fn far_field(&self, p: ConePoint) -> f64 {
        let k = norm(p.xi);
        let t = p.tau.abs();
        (t - k).abs().powf(self.gamma)
            * k.powf(self.alpha0)
            * delta_integral_at_origin(t, self.alpha1, self.alpha2, self.r).powf(1.0 / self.r)
    }
}

/// Whether `p` lies in the excluded band `||tau| - |xi|| < 1e-3 <xi>`.
pub fn in_cone_band(p: ConePoint) -> bool {
    p.modulation().abs() < 1e-3 * japanese(norm(p.xi))
}

/// Outcome of a supremum scan.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub max: f64,
    pub argmax: Option<ConePoint>,
    pub rows: Vec<(ConePoint, f64)>,
    pub rejected: usize,
}

/// Evaluates `I` at every sample outside the cone band.
pub fn i_sup_scan(params: &IsupParams, samples: &[ConePoint]) -> Result<ScanTable> {
    params.validate()?;
    let mut table = ScanTable::default();
    for &p in samples {
        if in_cone_band(p) {
            table.rejected += 1;
            continue;
        }
        let v = params.value(p)?;
        if v > table.max {
            table.max = v;
            table.argmax = Some(p);
        }
        table.rows.push((p, v));
    }
    Ok(table)
}

/// Samples with `|tau|` and `|xi|` log-uniform on `[lo, hi]`, random sign of
/// `tau` and uniform direction of `xi`.
pub fn log_uniform_samples(count: usize, lo: f64, hi: f64, seed: u64) -> Vec<ConePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..count)
        .map(|_| {
            let t = (l0 + (l1 - l0) * rng.random::<f64>()).exp();
            let k = (l0 + (l1 - l0) * rng.random::<f64>()).exp();
            let th = 2.0 * PI * rng.random::<f64>();
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            ConePoint::new(s * t, [k * th.cos(), k * th.sin()])
        })
        .collect()
}
