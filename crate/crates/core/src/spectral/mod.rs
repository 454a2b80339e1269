//! Transforms, multipliers and operators on the periodic lattice.

pub mod dealias;
pub mod dirac;
pub mod field;
pub mod grid;
pub mod halfwave;
pub mod hodge;
pub mod multiplier;
pub mod transform;

pub use dealias::dealias_product;
pub use dirac::{dirac_project, projector, DiracAlgebra, Mat2};
pub use field::{ComplexField, Repr, SpinorField};
pub use grid::Grid2D;
pub use halfwave::{half_wave_reconstruct, half_wave_split, WaveOperator};
pub use hodge::{hodge_decompose, HodgeParts};
pub use multiplier::{abs_xi, apply_multiplier, bracket, riesz_symbol, MultiplierSpec};
pub use transform::{Direction, Padded, SpectralPlan};
