use num_complex::Complex;

use crate::error::{usage, Result};
use crate::real::{Real, Sign};
use crate::spectral::field::SpinorField;
use crate::spectral::multiplier::abs_xi;

/// 2x2 complex matrix, row-major.
pub type Mat2<T> = [[Complex<T>; 2]; 2];

#[inline]
fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub fn identity<T: Real>() -> Mat2<T> {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}

pub fn mat_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_add<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn mat_sub<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

pub fn mat_scale<T: Real>(a: &Mat2<T>, s: Complex<T>) -> Mat2<T> {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn mat_vec<T: Real>(a: &Mat2<T>, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// Largest entry modulus.
pub fn mat_max_abs<T: Real>(a: &Mat2<T>) -> T {
    a.iter().flatten().fold(T::zero(), |m, v| m.max(v.norm()))
}

/// Pauli, gamma and alpha matrices together with mass and coupling.
///
/// `gamma^0 = sigma^3`, `gamma^1 = i sigma^2`, `gamma^2 = -i sigma^1`,
/// `alpha^j = gamma^0 gamma^j`, `beta = gamma^0`; `alpha[0]` is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracAlgebra<T> {
    pub sigma: [Mat2<T>; 3],
    pub gamma: [Mat2<T>; 3],
    pub alpha: [Mat2<T>; 3],
    pub beta: Mat2<T>,
    pub mass: T,
    pub kappa: T,
}

impl<T: Real> DiracAlgebra<T> {
    pub fn new(mass: T, kappa: T) -> Result<Self> {
        if !(mass >= T::zero()) {
            return usage(format!("mass m = {mass} must be nonnegative"));
        }
        if !(kappa > T::zero()) {
            return usage(format!("coupling kappa = {kappa} must be positive"));
        }
        let z = c::<T>(0.0, 0.0);
        let s1 = [[z, c(1.0, 0.0)], [c(1.0, 0.0), z]];
        let s2 = [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]];
        let s3 = [[c(1.0, 0.0), z], [z, c(-1.0, 0.0)]];
        let i = c::<T>(0.0, 1.0);
        let g0 = s3;
        let g1 = mat_scale(&s2, i);
        let g2 = mat_scale(&s1, -i);
        let a1 = mat_mul(&g0, &g1);
        let a2 = mat_mul(&g0, &g2);
        Ok(Self { sigma: [s1, s2, s3], gamma: [g0, g1, g2], alpha: [identity(), a1, a2], beta: g0, mass, kappa })
    }
}

/// `Pi_pm(xi) = (I +/- xi_j alpha^j / |xi|) / 2`.
///
/// At `xi = 0` the direction `e_1` is used, so the pair stays a complementary
/// set of orthogonal projectors that also satisfies `beta Pi_pm = Pi_mp beta`.
pub fn projector<T: Real>(sign: Sign, xi: [T; 2]) -> Mat2<T> {
    let d = abs_xi(xi);
    let (r1, r2) = if d == T::zero() { (T::one(), T::zero()) } else { (xi[0] / d, xi[1] / d) };
    let h = T::lit(0.5) * sign.value::<T>();
    let half = Complex::new(T::lit(0.5), T::zero());
    // alpha^1 = sigma^1, alpha^2 = sigma^2
    let off_upper = Complex::new(r1 * h, -r2 * h);
    let off_lower = Complex::new(r1 * h, r2 * h);
    [[half, off_upper], [off_lower, half]]
}

/// Mode-wise `Pi_pm(xi) psi^(xi)` of a spectral spinor.
pub fn dirac_project<T: Real>(sign: Sign, psi: &SpinorField<T>) -> Result<SpinorField<T>> {
    if !psi.upper.is_spectral() {
        return usage("dirac_project needs a spectral spinor");
    }
    let g = *psi.grid();
    let mut out = SpinorField::zeros(g, psi.repr());
    for idx in 0..g.len() {
        let p = projector(sign, g.xi(idx));
        let v = mat_vec(&p, [psi.upper.values()[idx], psi.lower.values()[idx]]);
        out.upper.values_mut()[idx] = v[0];
        out.lower.values_mut()[idx] = v[1];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg() -> DiracAlgebra<f64> {
        DiracAlgebra::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn gamma_and_alpha_entries() {
        let a = alg();
        let i = Complex::new(0.0, 1.0);
        assert_eq!(a.gamma[0], a.sigma[2]);
        assert_eq!(a.gamma[1], mat_scale(&a.sigma[1], i));
        assert_eq!(a.gamma[2], mat_scale(&a.sigma[0], -i));
        assert_eq!(a.alpha[1], a.sigma[0]);
        assert_eq!(a.alpha[2], a.sigma[1]);
        assert_eq!(a.beta, a.gamma[0]);
    }

    #[test]
    fn projector_on_first_axis() {
        let p = projector::<f64>(Sign::Plus, [1.0, 0.0]);
        for row in p {
            for v in row {
                assert!((v - Complex::new(0.5, 0.0)).norm() < 1e-16);
            }
        }
    }

    #[test]
    fn projector_algebra_at_origin() {
        let a = alg();
        let p = projector::<f64>(Sign::Plus, [0.0, 0.0]);
        let m = projector::<f64>(Sign::Minus, [0.0, 0.0]);
        assert!(mat_max_abs(&mat_sub(&mat_mul(&p, &p), &p)) < 1e-16);
        assert!(mat_max_abs(&mat_mul(&p, &m)) < 1e-16);
        assert!(mat_max_abs(&mat_sub(&mat_add(&p, &m), &identity())) < 1e-16);
        assert!(mat_max_abs(&mat_sub(&mat_mul(&a.beta, &p), &mat_mul(&m, &a.beta))) < 1e-16);
    }

    #[test]
    fn invalid_parameters() {
        assert!(DiracAlgebra::new(-1.0, 1.0).is_err());
        assert!(DiracAlgebra::new(0.0, 0.0).is_err());
    }
}
