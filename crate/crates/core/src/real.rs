//! Arbitrary-precision real numbers.
//!
//! [`Real`] is a thin newtype over an MPFR float. Binary operations run at
//! the larger of the two operand precisions, so mixing precisions never
//! silently truncates the more accurate operand.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealError {
    #[error("precision must be at least {min} bits, got {got}")]
    PrecisionTooLow { min: u32, got: u32 },
    #[error("cannot parse {0:?} as a decimal number")]
    Parse(String),
}

/// Working precision in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub const MIN_BITS: u32 = 64;
    pub const DEFAULT: Precision = Precision(256);

    pub fn new(bits: u32) -> Result<Self, RealError> {
        if bits < Self::MIN_BITS {
            return Err(RealError::PrecisionTooLow {
                min: Self::MIN_BITS,
                got: bits,
            });
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `2^-(bits/2)`, the half-precision tolerance used by identity checks.
    pub fn half_eps(self) -> Real {
        Real::one(self).mul_pow2(-((self.0 / 2) as i32))
    }

    /// Significant decimal digits carried by this precision, `⌈bits·log10 2⌉`.
    pub fn decimal_digits(self) -> usize {
        (self.0 as f64 * std::f64::consts::LOG10_2).ceil() as usize
    }

    pub fn doubled(self) -> Precision {
        Precision(self.0 * 2)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

#[derive(Clone, PartialEq, PartialOrd)]
pub struct Real(Float);

impl Real {
    pub fn zero(prec: Precision) -> Self {
        Real(Float::with_val(prec.0, 0))
    }

    pub fn one(prec: Precision) -> Self {
        Real(Float::with_val(prec.0, 1))
    }

    pub fn from_i64(v: i64, prec: Precision) -> Self {
        Real(Float::with_val(prec.0, v))
    }

    pub fn from_f64(v: f64, prec: Precision) -> Self {
        Real(Float::with_val(prec.0, v))
    }

    /// `num / den`, correctly rounded.
    pub fn ratio(num: i64, den: i64, prec: Precision) -> Self {
        Self::from_i64(num, prec) / den
    }

    pub fn pi(prec: Precision) -> Self {
        Real(Float::with_val(prec.0, Constant::Pi))
    }

    /// Parses a decimal string (`"-1"`, `"0.5"`, `"2.5e-3"`) at `prec`.
    pub fn parse(s: &str, prec: Precision) -> Result<Self, RealError> {
        let parsed = Float::parse(s.trim()).map_err(|_| RealError::Parse(s.to_string()))?;
        let v = Float::with_val(prec.0, parsed);
        if !v.is_finite() {
            return Err(RealError::Parse(s.to_string()));
        }
        Ok(Real(v))
    }

    pub fn prec(&self) -> Precision {
        Precision(self.0.prec())
    }

    /// Same value re-rounded to `prec`.
    pub fn with_prec(&self, prec: Precision) -> Self {
        Real(Float::with_val(prec.0, &self.0))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_sign_positive() && !self.0.is_zero() && !self.0.is_nan()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn abs(&self) -> Self {
        Real(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.clone().sqrt())
    }

    pub fn ln(&self) -> Self {
        Real(self.0.clone().ln())
    }

    pub fn exp(&self) -> Self {
        Real(self.0.clone().exp())
    }

    pub fn cos(&self) -> Self {
        Real(self.0.clone().cos())
    }

    pub fn recip(&self) -> Self {
        Real(self.0.clone().recip())
    }

    pub fn square(&self) -> Self {
        Real(self.0.clone().square())
    }

    /// Γ(x). Returns a non-finite value at the poles; callers that care
    /// check the domain first.
    pub fn gamma(&self) -> Self {
        Real(self.0.clone().gamma())
    }

    pub fn powi(&self, e: i32) -> Self {
        Real(Float::with_val(self.0.prec(), (&self.0).pow(e)))
    }

    pub fn powr(&self, e: &Real) -> Self {
        let p = self.0.prec().max(e.0.prec());
        Real(Float::with_val(p, (&self.0).pow(&e.0)))
    }

    /// `self · 2^e`, exact.
    pub fn mul_pow2(&self, e: i32) -> Self {
        Real(Float::with_val(self.0.prec(), &self.0 << e))
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn cmp_total(&self, other: &Real) -> Ordering {
        self.0.total_cmp(&other.0)
    }

    /// Decimal representation with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits.max(1)))
    }

    /// Decimal representation at the digit count implied by the precision.
    pub fn to_decimal_full(&self) -> String {
        self.to_decimal(self.prec().decimal_digits())
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => write!(f, "{}", self.to_decimal(d)),
            None => write!(f, "{}", self.to_decimal_full()),
        }
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.0.prec().max(rhs.0.prec());
                Real(Float::with_val(p, $trait::$method(&self.0, &rhs.0)))
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                $trait::$method(self, &rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                $trait::$method(&self, rhs)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<i64> for &Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                Real(Float::with_val(self.0.prec(), $trait::$method(&self.0, rhs)))
            }
        }
        impl $trait<i64> for Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                $trait::$method(&self, rhs)
            }
        }
        impl $assign_trait<&Real> for Real {
            fn $assign_method(&mut self, rhs: &Real) {
                *self = $trait::$method(&*self, rhs);
            }
        }
        impl $assign_trait<Real> for Real {
            fn $assign_method(&mut self, rhs: Real) {
                *self = $trait::$method(&*self, &rhs);
            }
        }
        impl $assign_trait<i64> for Real {
            fn $assign_method(&mut self, rhs: i64) {
                *self = $trait::$method(&*self, rhs);
            }
        }
    };
}

real_binop!(Add, add, AddAssign, add_assign);
real_binop!(Sub, sub, SubAssign, sub_assign);
real_binop!(Mul, mul, MulAssign, mul_assign);
real_binop!(Div, div, DivAssign, div_assign);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(Float::with_val(self.0.prec(), -&self.0))
    }
}

impl PartialEq<i64> for Real {
    fn eq(&self, other: &i64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<i64> for Real {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

/// `|a - b| / max(|b|, floor)`.
pub fn rel_diff(a: &Real, b: &Real, floor: &Real) -> Real {
    let scale = b.abs().max(floor.clone());
    (a - b).abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::DEFAULT
    }

    #[test]
    fn precision_floor_enforced() {
        assert!(Precision::new(63).is_err());
        assert_eq!(Precision::new(64).unwrap().bits(), 64);
        assert_eq!(Precision::DEFAULT.decimal_digits(), 78);
    }

    #[test]
    fn mixed_precision_promotes() {
        let lo = Real::ratio(1, 3, Precision::new(64).unwrap());
        let hi = Real::ratio(1, 3, Precision::new(512).unwrap());
        assert_eq!((&lo + &hi).prec().bits(), 512);
        assert_eq!((&hi * &lo).prec().bits(), 512);
    }

    #[test]
    fn parse_decimal() {
        let x = Real::parse("0.5", p()).unwrap();
        assert_eq!(x, Real::ratio(1, 2, p()));
        assert!(Real::parse("abc", p()).is_err());
        assert!(Real::parse("-1", p()).unwrap().is_negative());
    }

    #[test]
    fn gamma_anchors() {
        let g5 = Real::from_i64(5, p()).gamma();
        assert_eq!(g5, 24);
        let half = Real::ratio(1, 2, p()).gamma();
        let sqrt_pi = Real::pi(p()).sqrt();
        assert!(rel_diff(&half, &sqrt_pi, &Real::one(p())) < p().half_eps().square());
    }

    #[test]
    fn decimal_output_is_full_width() {
        let third = Real::ratio(1, 3, p());
        let s = third.to_decimal_full();
        let mantissa = s.split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 78);
        assert!(mantissa.starts_with("3.3333333333"));
    }
}
