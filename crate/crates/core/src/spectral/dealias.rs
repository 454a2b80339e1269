use num_complex::Complex;

use crate::error::{usage, Result};
use crate::real::Real;
use crate::spectral::field::{ComplexField, Repr};
use crate::spectral::transform::SpectralPlan;

/// Alias-free pointwise product of `degree` factors, truncated to the retained band.
///
/// The result has the representation of the inputs and no Nyquist content.
pub fn dealias_product<T: Real>(
    plan: &SpectralPlan<T>,
    factors: &[&ComplexField<T>],
    degree: usize,
) -> Result<ComplexField<T>> {
    if factors.is_empty() || factors.len() != degree {
        return usage(format!("degree {degree} product needs exactly {degree} factors, got {}", factors.len()));
    }
    let repr = factors[0].repr();
    if factors.iter().any(|f| f.grid() != plan.grid() || f.repr() != repr) {
        return usage("product factors must share the plan grid and representation");
    }
    let pad = plan.padded(degree, 2)?;
    let mut acc: Option<Vec<Complex<T>>> = None;
    for f in factors {
        let spec = plan.spectral(f)?;
        let lifted = pad.lift(spec.values());
        acc = Some(match acc {
            None => lifted,
            Some(mut a) => {
                for (x, y) in a.iter_mut().zip(&lifted) {
                    *x = *x * *y;
                }
                a
            }
        });
    }
    let out = pad.project_field(acc.expect("nonempty factors"));
    match repr {
        Repr::Spectral => Ok(out),
        Repr::Physical => plan.inverse(&out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid2D;

    #[test]
    fn plane_waves_combine_or_vanish() {
        let g = Grid2D::<f64>::new(16, 7.0).unwrap();
        let plan = SpectralPlan::new(g);
        let a = ComplexField::plane_wave(g, [2, 1]);
        let b = ComplexField::plane_wave(g, [3, -4]);
        let p = dealias_product(&plan, &[&a, &b], 2).unwrap();
        let expect = ComplexField::plane_wave(g, [5, -3]);
        assert!(p.max_abs_diff(&expect) < 1e-12);
        let c = ComplexField::plane_wave(g, [6, 0]);
        let q = dealias_product(&plan, &[&c, &c], 2).unwrap();
        assert!(q.max_abs() < 1e-12);
    }

    #[test]
    fn factor_count_must_match_degree() {
        let g = Grid2D::<f64>::new(8, 1.0).unwrap();
        let plan = SpectralPlan::new(g);
        let a = ComplexField::zeros(g, Repr::Spectral);
        assert!(dealias_product(&plan, &[&a], 2).is_err());
    }
}
