use crate::error::{usage, Result};
use crate::real::Real;
use crate::spectral::field::ComplexField;
use crate::spectral::multiplier::abs_xi;

/// Divergence-free and curl-free parts of a planar vector field.
#[derive(Clone, Debug)]
pub struct HodgeParts<T> {
    pub df: [ComplexField<T>; 2],
    pub cf: [ComplexField<T>; 2],
}

/// Homogeneous Hodge splitting with `rho = xi/|xi|`:
/// `cf = rho (rho . a)`, `df = a - cf`, both without the mean.
pub fn hodge_decompose<T: Real>(a1: &ComplexField<T>, a2: &ComplexField<T>) -> Result<HodgeParts<T>> {
    if !a1.is_spectral() || !a1.same_layout(a2) {
        return usage("hodge_decompose needs spectral fields on a common grid");
    }
    let g = *a1.grid();
    let mut df = [a1.zeros_like(), a1.zeros_like()];
    let mut cf = [a1.zeros_like(), a1.zeros_like()];
    for idx in 0..g.len() {
        let xi = g.xi(idx);
        let d = abs_xi(xi);
        if d == T::zero() || g.is_nyquist(idx) {
            continue;
        }
        let rho = [xi[0] / d, xi[1] / d];
        let u = [a1.values()[idx], a2.values()[idx]];
        let proj = u[0] * rho[0] + u[1] * rho[1];
        for j in 0..2 {
            let c = proj * rho[j];
            cf[j].values_mut()[idx] = c;
        }
        // df = (rho2^2 a1 - rho1 rho2 a2, rho1^2 a2 - rho1 rho2 a1)
        df[0].values_mut()[idx] = u[0] * (rho[1] * rho[1]) - u[1] * (rho[0] * rho[1]);
        df[1].values_mut()[idx] = u[1] * (rho[0] * rho[0]) - u[0] * (rho[0] * rho[1]);
    }
    Ok(HodgeParts { df, cf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid2D;
    use num_complex::Complex;

    #[test]
    fn gradient_has_no_df_part() {
        let g = Grid2D::<f64>::new(16, 9.0).unwrap();
        let chi = ComplexField::from_fn_spectral(g, |xi| Complex::new((-xi[0] * xi[0] - xi[1] * xi[1]).exp(), 0.0));
        let grad: Vec<ComplexField<f64>> = (0..2)
            .map(|j| {
                let mut f = chi.map_spectrum(|_, xi, v| v * Complex::new(0.0, xi[j]));
                f.zero_nyquist();
                f
            })
            .collect();
        let h = hodge_decompose(&grad[0], &grad[1]).unwrap();
        assert!(h.df[0].max_abs() < 1e-15 && h.df[1].max_abs() < 1e-15);
        assert!(h.cf[0].max_abs_diff(&grad[0]) < 1e-15);
        let rot = [grad[1].scale(Complex::new(-1.0, 0.0)), grad[0].clone()];
        let h = hodge_decompose(&rot[0], &rot[1]).unwrap();
        assert!(h.cf[0].max_abs() < 1e-15 && h.cf[1].max_abs() < 1e-15);
    }
}
