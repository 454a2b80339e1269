//! Null-form symbols, weights and the numerical checks of the bilinear
//! estimates: sampled symbol/angle/Leibniz bounds, delta-restricted
//! convolution integrals, the operator `B^gamma_pm`, and randomized ratio
//! estimates for products in restriction norms.

pub mod bilinear;
pub mod quadrature;
pub mod scan;
pub mod weights;

pub use quadrature::{
    delta_convolution_integral, fk_exponents, i_sup_scan, DeltaCase, FKExponents, IsupParams, Regime, ScanTable,
};
pub use weights::{
    angle_bound_ratio, b_weight, hyperbolic_leibniz_ratio, nullform_symbol, symbol_bound_ratio, ConePoint, NullForm,
    SignCase,
};
