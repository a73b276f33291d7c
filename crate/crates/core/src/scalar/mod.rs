//! Scalar fields the solvers are generic over.

mod dd;

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{FromPrimitive, Num, NumAssign, ToPrimitive};

pub use dd::{DoubleDouble, ParseDoubleDoubleError};

/// An ordered real field with enough elementary functions for the
/// recursion kernels: `f32`, `f64` and [`DoubleDouble`].
pub trait Real:
    Copy
    + Send
    + Sync
    + Debug
    + Display
    + PartialOrd
    + Num
    + NumAssign
    + Neg<Output = Self>
    + FromPrimitive
    + ToPrimitive
    + Sum
    + 'static
{
    /// Significant decimal digits the field carries reliably.
    const DIGITS: u32;

    fn epsilon() -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn is_finite(self) -> bool;
    fn pow10(n: i32) -> Self;

    /// Nearest representable value to `x`.
    fn cast(x: f64) -> Self;
    /// Nearest `f64`.
    fn approx(self) -> f64;

    fn parse_decimal(s: &str) -> Option<Self>;
    /// Scientific notation with `digits` significant digits.
    fn to_decimal(self, digits: usize) -> String;

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("index fits the field")
    }

    fn of_int(n: i64) -> Self {
        <Self as FromPrimitive>::from_i64(n).expect("integer fits the field")
    }
}

macro_rules! impl_native {
    ($t:ty, $digits:expr) => {
        impl Real for $t {
            const DIGITS: u32 = $digits;

            fn epsilon() -> Self {
                <$t>::EPSILON
            }
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            fn powi(self, n: i32) -> Self {
                <$t>::powi(self, n)
            }
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
            fn pow10(n: i32) -> Self {
                (10.0 as $t).powi(n)
            }
            fn cast(x: f64) -> Self {
                x as $t
            }
            fn approx(self) -> f64 {
                self as f64
            }
            fn parse_decimal(s: &str) -> Option<Self> {
                s.trim().parse().ok()
            }
            fn to_decimal(self, digits: usize) -> String {
                format!("{:.*e}", digits.saturating_sub(1), self)
            }
        }
    };
}

impl_native!(f32, 6);
impl_native!(f64, 15);

impl Real for DoubleDouble {
    const DIGITS: u32 = 31;

    fn epsilon() -> Self {
        DoubleDouble::EPSILON
    }
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        DoubleDouble::powi(self, n)
    }
    fn is_finite(self) -> bool {
        DoubleDouble::is_finite(self)
    }
    fn pow10(n: i32) -> Self {
        DoubleDouble::pow10(n)
    }
    fn cast(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    fn approx(self) -> f64 {
        self.hi() + self.lo()
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        s.parse().ok()
    }
    fn to_decimal(self, digits: usize) -> String {
        self.to_sci_string(digits)
    }
}

/// Values the minor recursion can run over: a real field or its complex
/// extension. Supplies the magnitude estimate and the power-of-ten scaling
/// used to keep the recursion in range.
pub trait Recursive: Copy + Num + Neg<Output = Self> {
    type Re: Real;

    fn from_re(r: Self::Re) -> Self;
    /// Estimate of `|self|` within a factor of two.
    fn magnitude(self) -> f64;
    fn scale(self, by: Self::Re) -> Self;
}

impl<T: Real> Recursive for T {
    type Re = T;

    fn from_re(r: T) -> Self {
        r
    }
    fn magnitude(self) -> f64 {
        self.approx().abs()
    }
    fn scale(self, by: T) -> Self {
        self * by
    }
}

impl<T: Real> Recursive for Complex<T> {
    type Re = T;

    fn from_re(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    fn magnitude(self) -> f64 {
        self.re.approx().abs().max(self.im.approx().abs())
    }
    fn scale(self, by: T) -> Self {
        Complex::new(self.re * by, self.im * by)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip<T: Real>(s: &str) -> String {
        T::parse_decimal(s).unwrap().to_decimal(T::DIGITS as usize)
    }

    #[test]
    fn decimal_roundtrip_per_field() {
        assert_eq!(roundtrip::<f64>("0.1"), "1.00000000000000e-1");
        assert_eq!(roundtrip::<f32>("0.25"), "2.50000e-1");
        assert_eq!(
            roundtrip::<DoubleDouble>("0.1"),
            "1.000000000000000000000000000000e-1"
        );
    }

    #[test]
    fn complex_scaling_preserves_ratio() {
        let z = Complex::new(3.0f64, -4.0);
        let w = z.scale(1e-3);
        assert_eq!(w, Complex::new(3e-3, -4e-3));
        assert_eq!(z.magnitude(), 4.0);
    }
}
