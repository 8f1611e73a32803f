//! The two value backends: exact big-integer rationals and `f64`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact rational value type used for all Lebesgue constants, norms and
/// bound margins.
pub type Rat = BigRational;

/// Build a reduced rational from machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// `num / 2^exp` as a reduced rational.
pub fn rat_dyadic(num: i128, exp: u32) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(1u8) << exp)
}

/// Scalar backend for cylinder functions and spectra.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether the backend carries exact values (drives the depth cap).
    const EXACT: bool;

    fn from_int(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rat(r: &Rat) -> Self;
    fn abs_val(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// The exact value, if the backend carries one.
    fn to_rat(&self) -> Option<Rat>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_rat(r: &Rat) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_rat(&self) -> Option<Rat> {
        None
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        rat(num, den)
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn abs_val(&self) -> Self {
        Signed::abs(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
}

/// Serialize a rational as `num/den` (always reduced, den > 0).
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_roundtrip() {
        let r = rat(-6, 8);
        assert_eq!(format_rat(&r), "-3/4");
        assert_eq!(Scalar::to_f64(&Rat::from_ratio(7, 4)), 1.75);
        assert_eq!(rat_dyadic(7, 2), rat(7, 4));
    }
}
