//! Pointwise weights, null-form symbols and the ratios behind the symbol,
//! angle and hyperbolic Leibniz bounds. Plain `f64` throughout.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::real::Sign;

/// A free sample point `(tau, xi)` of frequency space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub tau: f64,
    pub xi: [f64; 2],
}

impl ConePoint {
    pub fn new(tau: f64, xi: [f64; 2]) -> Self {
        Self { tau, xi }
    }

    /// `|tau| - |xi|`.
    pub fn modulation(&self) -> f64 {
        self.tau.abs() - norm(self.xi)
    }
}

#[inline]
pub(crate) fn norm(x: [f64; 2]) -> f64 {
    x[0].hypot(x[1])
}

#[inline]
pub(crate) fn japanese(x: f64) -> f64 {
    1f64.hypot(x)
}

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// `b_+(xi, eta) = |eta| + |xi - eta| - |xi|`, `b_-(xi, eta) = |xi| - ||eta| - |xi - eta||`.
///
/// Evaluated without cancellation: with `zeta = xi - eta`,
/// `b_+ = 2(|eta||zeta| - eta.zeta) / (|eta| + |zeta| + |xi|)` and
/// `b_- = 2(|eta||zeta| + eta.zeta) / (|xi| + ||eta| - |zeta||)`, where the
/// small numerators are rewritten through `(eta x zeta)^2`.
pub fn b_weight(sign: Sign, xi: [f64; 2], eta: [f64; 2]) -> f64 {
    let zeta = [xi[0] - eta[0], xi[1] - eta[1]];
    let (a, b, c) = (norm(eta), norm(zeta), norm(xi));
    let (p, d, x2) = (a * b, dot(eta, zeta), cross(eta, zeta).powi(2));
    match sign {
        Sign::Plus => {
            let num = if d > 0.0 { x2 / (p + d) } else { p - d };
            let den = a + b + c;
            if den == 0.0 || num == 0.0 {
                0.0
            } else {
                (2.0 * num / den).max(0.0)
            }
        }
        Sign::Minus => {
            let num = if d < 0.0 { x2 / (p - d) } else { p + d };
            let den = c + (a - b).abs();
            if den == 0.0 || num == 0.0 {
                0.0
            } else {
                (2.0 * num / den).max(0.0)
            }
        }
    }
}

/// Which null form a symbol belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NullForm {
    /// `Q^{12}`.
    Q12,
    /// `Q^0 = R_{mu,1} R^mu_2`, index lowered with `diag(1, -1, -1)`.
    Q0,
    /// `Q^{lambda mu}`.
    Qlm(usize, usize),
}

/// `R^mu_pm(xi)`: `-1` for `mu = 0`, `-/+ xi_j / |xi|` otherwise, zero at `xi = 0`.
pub fn riesz(mu: usize, sign: Sign, xi: [f64; 2]) -> f64 {
    crate::spectral::multiplier::riesz_symbol(mu, sign, xi)
}

/// Symbol of a null form acting on unit plane waves `e^{i x.xi_1}`, `e^{i x.xi_2}`.
pub fn nullform_symbol(form: NullForm, signs: (Sign, Sign), xi1: [f64; 2], xi2: [f64; 2]) -> Result<Complex<f64>> {
    if norm(xi1) == 0.0 || norm(xi2) == 0.0 {
        return Ok(Complex::new(0.0, 0.0));
    }
    let (s1, s2) = signs;
    let v = match form {
        NullForm::Q0 => (0..3).map(|mu| crate::lorentz::metric(mu) * riesz(mu, s1, xi1) * riesz(mu, s2, xi2)).sum(),
        NullForm::Q12 => riesz(1, s1, xi1) * riesz(2, s2, xi2) - riesz(2, s1, xi1) * riesz(1, s2, xi2),
        NullForm::Qlm(l, m) => {
            if l > 2 || m > 2 {
                return usage(format!("null-form indices ({l}, {m}) out of range"));
            }
            riesz(l, s1, xi1) * riesz(m, s2, xi2) - riesz(m, s1, xi1) * riesz(l, s2, xi2)
        }
    };
    Ok(Complex::new(v, 0.0))
}

/// Relative sign of the two factors in a symbol bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignCase {
    Equal,
    Unequal,
}

/// `|eta x (xi - eta)|` over `|eta|^1/2 |xi - eta|^1/2 (|eta| + |xi - eta|)^1/2 b_pm^1/2`.
pub fn symbol_bound_ratio(case: SignCase, xi: [f64; 2], eta: [f64; 2]) -> Result<f64> {
    let zeta = [xi[0] - eta[0], xi[1] - eta[1]];
    let (a, b) = (norm(eta), norm(zeta));
    if a == 0.0 || b == 0.0 {
        return usage("symbol bound needs eta != 0 and xi - eta != 0");
    }
    let lhs = cross(eta, zeta).abs();
    if lhs == 0.0 {
        return Ok(0.0);
    }
    let w = match case {
        SignCase::Equal => b_weight(Sign::Plus, xi, eta),
        SignCase::Unequal => b_weight(Sign::Minus, xi, eta),
    };
    let rhs = (a * b * (a + b) * w).sqrt();
    if rhs == 0.0 {
        return Err(Error::Contradiction(format!(
            "symbol bound: rhs vanishes at xi = {xi:?}, eta = {eta:?} with lhs {lhs:e}"
        )));
    }
    Ok(lhs / rhs)
}

/// Angle between `s1 xi_1` and `s2 xi_2`, in `[0, pi]`.
pub fn signed_angle(signs: (Sign, Sign), xi1: [f64; 2], xi2: [f64; 2]) -> f64 {
    let s = signs.0.value::<f64>() * signs.1.value::<f64>();
    cross(xi1, xi2).abs().atan2(s * dot(xi1, xi2))
}

/// `angle(s1 xi_1, s2 xi_2)` over
/// `((<|tau_0| - |xi_0|> + <tau_1 + s1 |xi_1|> + <tau_2 + s2 |xi_2|>) / min(<xi_1>, <xi_2>))^1/2`.
pub fn angle_bound_ratio(p0: ConePoint, p1: ConePoint, p2: ConePoint, signs: (Sign, Sign)) -> Result<f64> {
    let scale = 1.0 + p0.tau.abs().max(p1.tau.abs()).max(p2.tau.abs());
    if (p0.tau - p1.tau - p2.tau).abs() > 1e-12 * scale {
        return usage("angle bound needs tau_0 = tau_1 + tau_2");
    }
    for j in 0..2 {
        let sc = 1.0 + p0.xi[j].abs().max(p1.xi[j].abs()).max(p2.xi[j].abs());
        if (p0.xi[j] - p1.xi[j] - p2.xi[j]).abs() > 1e-12 * sc {
            return usage("angle bound needs xi_0 = xi_1 + xi_2");
        }
    }
    if norm(p1.xi) == 0.0 || norm(p2.xi) == 0.0 {
        return usage("angle bound needs xi_1, xi_2 != 0");
    }
    let angle = signed_angle(signs, p1.xi, p2.xi);
    let w = japanese(p0.modulation())
        + japanese(p1.tau + signs.0.value::<f64>() * norm(p1.xi))
        + japanese(p2.tau + signs.1.value::<f64>() * norm(p2.xi));
    let m = japanese(norm(p1.xi)).min(japanese(norm(p2.xi)));
    Ok(angle / (w / m).sqrt())
}

/// `||tau| - |xi||` over `||rho| - |eta|| + ||tau - rho| - |xi - eta|| + b_pm(xi, eta)`.
///
/// Both sides vanishing gives 0; a vanishing right side alone is a contradiction.
pub fn hyperbolic_leibniz_ratio(tau: f64, xi: [f64; 2], rho: f64, eta: [f64; 2], sign: Sign) -> Result<f64> {
    let zeta = [xi[0] - eta[0], xi[1] - eta[1]];
    let lhs = (tau.abs() - norm(xi)).abs();
    let rhs = (rho.abs() - norm(eta)).abs() + ((tau - rho).abs() - norm(zeta)).abs() + b_weight(sign, xi, eta);
    if lhs == 0.0 {
        return Ok(0.0);
    }
    if rhs == 0.0 {
        return Err(Error::Contradiction(format!(
            "hyperbolic Leibniz: rhs vanishes at tau = {tau}, xi = {xi:?}, rho = {rho}, eta = {eta:?}"
        )));
    }
    Ok(lhs / rhs)
}

/// The sign of `b_pm` matching a pair of time frequencies: `+` when `rho` and
/// `tau - rho` share a sign.
pub fn convolution_sign(tau: f64, rho: f64) -> Sign {
    if (rho >= 0.0) == (tau - rho >= 0.0) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}
