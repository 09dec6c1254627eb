//! Exact rational scalars.
//!
//! Every distance in this crate is stored as an arbitrary precision rational so
//! that the equality tests the algorithms branch on (quotient levels, distance
//! differences, isometry checks) are exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_integer(v: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(v)))
    }

    /// `num / den`. Panics when `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Exact conversion of a finite float. Returns `None` for NaN and infinities.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Scalar)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn abs_diff(&self, other: &Scalar) -> Self {
        if self >= other {
            self - other
        } else {
            other - self
        }
    }

    pub fn half(&self) -> Self {
        Scalar(&self.0 / BigInt::from(2))
    }

    pub fn pow(&self, exp: u32) -> Self {
        Scalar(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// The value as a `u32` when it is a non-negative integer that fits.
    pub fn to_u32(&self) -> Option<u32> {
        if self.0.is_integer() {
            self.0.to_integer().to_u32()
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with exactly `digits` fractional digits, rounded half
    /// away from zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits);
        let scaled = self.0.abs() * BigRational::from_integer(scale.clone());
        let rounded = (scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor();
        let units = rounded.to_integer();
        let (int_part, frac_part) = units.div_rem(&scale);
        let sign = if self.0.is_negative() && !units.is_zero() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
        }
    }

    pub fn max_of<'a>(a: &'a Scalar, b: &'a Scalar) -> &'a Scalar {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number literal {0:?}")]
pub struct ParseScalarError(pub String);

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Accepts integers, fractions `p/q`, and decimal literals with an
    /// optional exponent (`0.25`, `-3`, `1.5e-2`). Decimal parsing is exact.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseScalarError(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        if let Some((num, den)) = t.split_once('/') {
            let num: BigInt = num.trim().parse().map_err(|_| err())?;
            let den: BigInt = den.trim().parse().map_err(|_| err())?;
            if den.is_zero() {
                return Err(err());
            }
            return Ok(Scalar(BigRational::new(num, den)));
        }
        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(pos) => {
                let e: i32 = t[pos + 1..].parse().map_err(|_| err())?;
                (&t[..pos], e)
            }
            None => (t, 0),
        };
        let (negative, body) = match mantissa.as_bytes().first() {
            Some(b'-') => (true, &mantissa[1..]),
            Some(b'+') => (false, &mantissa[1..]),
            _ => (false, mantissa),
        };
        let (int_digits, frac_digits) = body.split_once('.').unwrap_or((body, ""));
        if int_digits.is_empty() && frac_digits.is_empty() {
            return Err(err());
        }
        if !int_digits.bytes().chain(frac_digits.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{int_digits}{frac_digits}");
        let mut value = BigRational::from_integer(digits.parse::<BigInt>().map_err(|_| err())?);
        let shift = exponent - frac_digits.len() as i32;
        let ten = BigRational::from_integer(BigInt::from(10));
        if shift >= 0 {
            value *= num_traits::pow(ten, shift as usize);
        } else {
            value /= num_traits::pow(ten, (-shift) as usize);
        }
        if negative {
            value = -value;
        }
        Ok(Scalar(value))
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_integer(v)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

/// Compare `a^(1/p)` against `b^(1/q)` for non-negative `a`, `b` without
/// leaving exact arithmetic.
pub fn cmp_roots(a: &Scalar, p: u32, b: &Scalar, q: u32) -> Ordering {
    if p == q {
        return a.cmp(b);
    }
    a.pow(q).cmp(&b.pow(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_exactly() {
        assert_eq!("0.5".parse::<Scalar>().unwrap(), Scalar::ratio(1, 2));
        assert_eq!("1/3".parse::<Scalar>().unwrap(), Scalar::ratio(1, 3));
        assert_eq!("-2.25".parse::<Scalar>().unwrap(), Scalar::ratio(-9, 4));
        assert_eq!("1.5e-2".parse::<Scalar>().unwrap(), Scalar::ratio(3, 200));
        assert_eq!("12e1".parse::<Scalar>().unwrap(), Scalar::from_integer(120));
        assert_eq!(".5".parse::<Scalar>().unwrap(), Scalar::ratio(1, 2));
        assert!("a".parse::<Scalar>().is_err());
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
        assert!("1.2.3".parse::<Scalar>().is_err());
    }

    #[test]
    fn display_and_decimal() {
        assert_eq!(Scalar::ratio(1, 2).to_string(), "1/2");
        assert_eq!(Scalar::from_integer(2).to_string(), "2");
        assert_eq!(Scalar::ratio(2, 3).to_decimal(4), "0.6667");
        assert_eq!(Scalar::ratio(-1, 8).to_decimal(2), "-0.13");
        assert_eq!(Scalar::from_integer(3).to_decimal(0), "3");
        assert_eq!(Scalar::ratio(1, 1000).to_decimal(1), "0.0");
    }

    #[test]
    fn root_comparison() {
        // 3^(1/2) > 1 and 2^(1/2) < 4^(1/3)? 2^3 = 8 vs 4^2 = 16
        assert_eq!(cmp_roots(&Scalar::from_integer(3), 2, &Scalar::one(), 1), Ordering::Greater);
        assert_eq!(cmp_roots(&Scalar::from_integer(2), 2, &Scalar::from_integer(4), 3), Ordering::Less);
        assert_eq!(cmp_roots(&Scalar::from_integer(4), 2, &Scalar::from_integer(2), 1), Ordering::Equal);
    }
}
