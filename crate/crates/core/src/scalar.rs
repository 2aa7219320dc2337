//! Coefficient rings for free polynomials.
//!
//! Algebraic operations (sums, products, substitution) only need a ring, so
//! [`NCPolynomial`](crate::NCPolynomial) is generic over [`Coeff`]. Norms and
//! matrix evaluation go through `f64` / `Complex64` conversions.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Squared modulus as an `f64`.
    fn norm_sqr_f64(&self) -> f64;

    fn modulus_f64(&self) -> f64 {
        self.norm_sqr_f64().sqrt()
    }

    fn to_c64(&self) -> Complex64;
}

/// Coefficients that can be rescaled by a real factor (floating types).
pub trait ScalableCoeff: Coeff {
    fn scale(&self, factor: f64) -> Self;
}

macro_rules! impl_float_coeff {
    ($t:ty) => {
        impl Coeff for $t {
            fn norm_sqr_f64(&self) -> f64 {
                let v = *self as f64;
                v * v
            }
            fn modulus_f64(&self) -> f64 {
                (*self as f64).abs()
            }
            fn to_c64(&self) -> Complex64 {
                Complex64::new(*self as f64, 0.0)
            }
        }

        impl ScalableCoeff for $t {
            fn scale(&self, factor: f64) -> Self {
                (*self as f64 * factor) as $t
            }
        }

        impl Coeff for Complex<$t> {
            fn norm_sqr_f64(&self) -> f64 {
                let (re, im) = (self.re as f64, self.im as f64);
                re * re + im * im
            }
            fn modulus_f64(&self) -> f64 {
                (self.re as f64).hypot(self.im as f64)
            }
            fn to_c64(&self) -> Complex64 {
                Complex64::new(self.re as f64, self.im as f64)
            }
        }

        impl ScalableCoeff for Complex<$t> {
            fn scale(&self, factor: f64) -> Self {
                Complex::new(
                    (self.re as f64 * factor) as $t,
                    (self.im as f64 * factor) as $t,
                )
            }
        }
    };
}

impl_float_coeff!(f32);
impl_float_coeff!(f64);

impl Coeff for i64 {
    fn norm_sqr_f64(&self) -> f64 {
        let v = *self as f64;
        v * v
    }
    fn modulus_f64(&self) -> f64 {
        (*self as f64).abs()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self as f64, 0.0)
    }
}

impl Coeff for Ratio<i64> {
    fn norm_sqr_f64(&self) -> f64 {
        let v = self.to_f64().unwrap_or(f64::NAN);
        v * v
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli() {
        assert_eq!(Complex64::new(3.0, 4.0).modulus_f64(), 5.0);
        assert_eq!((-2i64).norm_sqr_f64(), 4.0);
        assert_eq!(Ratio::new(1i64, 2).to_c64(), Complex64::new(0.5, 0.0));
        assert_eq!((-1.5f32).modulus_f64(), 1.5);
    }
}
