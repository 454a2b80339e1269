//! Spectral simulation of the Chern-Simons-Higgs and Chern-Simons-Dirac systems
//! in Lorenz gauge on a periodic square, plus numerical checks of the null-form,
//! Fourier-Lebesgue and restriction-norm estimates used in their analysis.
//!
//! The numeric kernels are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the experiments use.

// `!(x > 0)` is how NaN inputs get rejected alongside out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csd;
pub mod csh;
pub mod data;
pub mod error;
pub mod evolve;
pub mod gauge;
pub mod lorentz;
pub mod norms;
pub mod nullform;
pub mod real;
pub mod spectral;
pub mod wave;

pub use error::{Error, Result};
pub use real::{Real, Sign};

pub type Grid = spectral::Grid2D<f64>;
pub type Field = spectral::ComplexField<f64>;
pub type Spinor = spectral::SpinorField<f64>;
pub type Plan = spectral::SpectralPlan<f64>;
