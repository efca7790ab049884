//! Extended reals `ℝ ∪ {+∞}` with a total order.
//!
//! Most numeric code stores values as `f64` with `f64::INFINITY` standing for
//! `+∞`; this type is the checked boundary used where the arithmetic rules
//! matter (sums of functions, serialization of grid values).

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Panics on NaN or `-∞`; those are not members of the extended half-line.
    pub fn new(v: f64) -> Self {
        assert!(!v.is_nan() && v != f64::NEG_INFINITY, "ExtReal::new({v})");
        ExtReal(v)
    }

    pub fn try_new(v: f64) -> Option<Self> {
        (!v.is_nan() && v != f64::NEG_INFINITY).then_some(ExtReal(v))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// `(+∞) − (+∞)` is an error; `(+∞) − c = +∞`; `c − (+∞)` leaves the
    /// extended half-line and is also rejected.
    pub fn checked_sub(self, other: Self) -> Result<Self> {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Err(Error::InfMinusInf),
            (true, false) => Ok(ExtReal::INFINITY),
            (false, true) => Err(Error::InvalidArgument(
                "finite minus +inf is -inf, outside the extended half-line".into(),
            )),
            (false, false) => Ok(ExtReal(self.0 - other.0)),
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        if self.is_infinite() || rhs.is_infinite() {
            ExtReal::INFINITY
        } else {
            ExtReal(self.0 + rhs.0)
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::new(rhs)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl From<ExtReal> for f64 {
    fn from(v: ExtReal) -> f64 {
        v.0
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "+inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// `+∞` serializes as `null` since JSON has no infinity literal.
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Option<f64> = Option::deserialize(d)?;
        match v {
            None => Ok(ExtReal::INFINITY),
            Some(x) => ExtReal::try_new(x).ok_or_else(|| serde::de::Error::custom("value must not be NaN or -inf")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_rules() {
        let inf = ExtReal::INFINITY;
        let c = ExtReal::new(3.0);
        assert_eq!(inf + c, inf);
        assert_eq!(c + 1.5, ExtReal::new(4.5));
        assert_eq!(inf.min(c), c);
        assert_eq!(inf.max(c), inf);
        assert!(matches!(inf.checked_sub(inf), Err(Error::InfMinusInf)));
        assert_eq!(inf.checked_sub(c).unwrap(), inf);
        assert_eq!(c.checked_sub(ExtReal::new(1.0)).unwrap(), ExtReal::new(2.0));
    }

    #[test]
    fn total_order_puts_infinity_last() {
        let mut v = vec![ExtReal::INFINITY, ExtReal::new(-2.0), ExtReal::new(7.0)];
        v.sort();
        assert_eq!(v, vec![ExtReal::new(-2.0), ExtReal::new(7.0), ExtReal::INFINITY]);
    }

    #[test]
    fn json_uses_null_for_infinity() {
        let v = vec![ExtReal::new(1.0), ExtReal::INFINITY];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[1.0,null]");
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
