//! Scalar abstraction shared by every numeric kernel.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};
use rustfft::FftNum;

/// Floating-point scalar usable by the spectral kernels.
///
/// Implemented for `f32` and `f64`. Literals go through [`Real::lit`] so
/// generic code can write constants without a fallible cast.
pub trait Real:
    Float + FloatConst + FromPrimitive + FftNum + Default + Debug + Display + Sum + Send + Sync + 'static
{
    fn lit(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// Sign label of a half-wave component, a time-frequency branch, or a projector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    #[inline]
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Product of two signs.
    #[inline]
    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::lit(0.5).to_f64(), 0.5);
    }

    #[test]
    fn sign_algebra() {
        assert_eq!(Sign::Plus.value::<f64>(), 1.0);
        assert_eq!(Sign::Minus.flip(), Sign::Plus);
        assert_eq!(Sign::Minus.times(Sign::Minus), Sign::Plus);
        assert_eq!(Sign::Plus.times(Sign::Minus), Sign::Minus);
    }
}
