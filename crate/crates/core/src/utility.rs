//! Exact non-negative utilities.

use alloc::string::{String, ToString};
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Mul};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A non-negative exact rational utility (or Shapley value).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Utility(BigRational);

impl Utility {
    pub fn zero() -> Self {
        Utility(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: u64) -> Self {
        Utility(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Config("utility with zero denominator".into()));
        }
        Ok(Utility(BigRational::new(BigInt::from(numer), BigInt::from(denom))))
    }

    pub fn from_rational(r: BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::NegativeUtility);
        }
        Ok(Utility(r))
    }

    pub(crate) fn from_rational_unchecked(r: BigRational) -> Self {
        debug_assert!(!r.is_negative());
        Utility(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Lossy conversion for reporting.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `self - other`, or `None` if the result would be negative.
    pub fn checked_sub(&self, other: &Utility) -> Option<Utility> {
        let d = &self.0 - &other.0;
        (!d.is_negative()).then_some(Utility(d))
    }

    /// `self / n`.
    pub fn div_int(&self, n: u64) -> Utility {
        assert!(n > 0, "division of a utility by zero");
        Utility(&self.0 / BigRational::from_integer(BigInt::from(n)))
    }

    pub(crate) fn div_big(&self, n: &BigUint) -> Utility {
        Utility(&self.0 / BigRational::from_integer(BigInt::from(n.clone())))
    }

    pub fn scale(&self, factor: &Utility) -> Utility {
        Utility(&self.0 * &factor.0)
    }
}

impl Add for Utility {
    type Output = Utility;
    fn add(self, rhs: Utility) -> Utility {
        Utility(self.0 + rhs.0)
    }
}

impl Add<&Utility> for &Utility {
    type Output = Utility;
    fn add(self, rhs: &Utility) -> Utility {
        Utility(&self.0 + &rhs.0)
    }
}

impl AddAssign<&Utility> for Utility {
    fn add_assign(&mut self, rhs: &Utility) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Utility {
    fn add_assign(&mut self, rhs: Utility) {
        self.0 += rhs.0;
    }
}

impl Mul<&Utility> for &Utility {
    type Output = Utility;
    fn mul(self, rhs: &Utility) -> Utility {
        self.scale(rhs)
    }
}

impl Sum for Utility {
    fn sum<I: Iterator<Item = Utility>>(iter: I) -> Utility {
        iter.fold(Utility::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Utility> for Utility {
    fn sum<I: Iterator<Item = &'a Utility>>(iter: I) -> Utility {
        iter.fold(Utility::zero(), |mut a, b| {
            a += b;
            a
        })
    }
}

impl fmt::Display for Utility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Utility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Parses `"n"` or `"n/d"`.
impl FromStr for Utility {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(alloc::format!("invalid utility {s:?}"));
        let s = s.trim();
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(s.parse().map_err(|_| bad())?),
        };
        Utility::from_rational(r)
    }
}

impl Serialize for Utility {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Utility {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
