//! Scalar cell values with canonical (exact) equality.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A typed, canonicalized cell value.
///
/// Strings are trimmed; decimals are normalized (trailing fractional zeros
/// stripped, integral decimals collapse to [`Value::Int`]), so equality is
/// exact value equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Decimal(Decimal),
    Str(Arc<str>),
}

pub type Row = Vec<Value>;

/// Fixed-point decimal `mantissa * 10^-scale` with `scale >= 1` and a
/// mantissa not divisible by 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decimal {
    mantissa: i128,
    scale: u8,
}

const MAX_SCALE: usize = 30;

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s.trim()))
    }

    pub fn parse_int(s: &str) -> Option<Value> {
        s.trim().parse::<i64>().ok().map(Value::Int)
    }

    /// Parses a plain decimal literal (`-12.50`, `3`, `.5`); no exponents.
    pub fn parse_decimal(s: &str) -> Option<Value> {
        let s = s.trim();
        let (neg, body) = match s.as_bytes().first()? {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
            return None;
        }
        let frac = frac.trim_end_matches('0');
        if frac.len() > MAX_SCALE {
            return None;
        }
        let mut mantissa: i128 = 0;
        for b in int.bytes().chain(frac.bytes()) {
            mantissa = mantissa.checked_mul(10)?.checked_add((b - b'0') as i128)?;
        }
        if neg {
            mantissa = -mantissa;
        }
        if frac.is_empty() {
            return i64::try_from(mantissa).ok().map(Value::Int);
        }
        Some(Value::Decimal(Decimal { mantissa, scale: frac.len() as u8 }))
    }

    /// Integer, then decimal, then string.
    pub fn infer(s: &str) -> Value {
        Self::parse_int(s).or_else(|| Self::parse_decimal(s)).unwrap_or_else(|| Self::str(s))
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::str(v)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.mantissa.unsigned_abs().to_string();
        let scale = self.scale as usize;
        if self.mantissa < 0 {
            f.write_str("-")?;
        }
        if digits.len() > scale {
            let (i, fr) = digits.split_at(digits.len() - scale);
            write!(f, "{i}.{fr}")
        } else {
            f.write_str("0.")?;
            for _ in digits.len()..scale {
                f.write_str("0")?;
            }
            f.write_str(&digits)
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Decimal(d) => write!(f, "{d}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => write!(f, "{s:?}"),
            other => write!(f, "{other}"),
        }
    }
}

// JSON form: integers as numbers, strings as strings, decimals as
// {"decimal": "1.25"} so they survive without float rounding.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueRepr {
    Int(i64),
    Str(String),
    Decimal { decimal: String },
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Int(v) => ValueRepr::Int(*v),
            Value::Str(v) => ValueRepr::Str(v.to_string()),
            Value::Decimal(d) => ValueRepr::Decimal { decimal: d.to_string() },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match ValueRepr::deserialize(d)? {
            ValueRepr::Int(v) => Value::Int(v),
            ValueRepr::Str(s) => Value::str(&s),
            ValueRepr::Decimal { decimal } => Value::parse_decimal(&decimal)
                .ok_or_else(|| serde::de::Error::custom(alloc::format!("bad decimal {decimal:?}")))?,
        })
    }
}
