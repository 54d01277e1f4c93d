//! Reals extended by a single point at negative infinity.
//!
//! Kernels and fields take values in `R ∪ {-∞}`. The value `+∞` has no
//! representation, so sums are always defined: `-∞` absorbs everything.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A real number or negative infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
}

pub use ExtReal::NegInf as NEG_INFINITY;

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Converts an IEEE value; `-inf` maps to [`ExtReal::NegInf`].
    ///
    /// Panics on NaN or `+inf`: neither can arise from a well-formed kernel or field.
    pub fn from_f64(x: f64) -> Self {
        if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            assert!(x.is_finite(), "non-representable extended real: {x}");
            ExtReal::Finite(x)
        }
    }

    /// Natural logarithm of a non-negative number, `ln 0 = -∞`.
    pub fn ln(x: f64) -> Self {
        debug_assert!(x >= 0.0, "logarithm of negative number {x}");
        if x <= 0.0 {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x.ln())
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::NegInf => None,
        }
    }

    /// IEEE view of the value (`-∞` becomes `f64::NEG_INFINITY`).
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::NegInf => f64::NEG_INFINITY,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// `exp` of the value, with `exp(-∞) = 0`.
    pub fn exp(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x.exp(),
            ExtReal::NegInf => 0.0,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::NegInf, ExtReal::NegInf) => Some(Ordering::Equal),
            (ExtReal::NegInf, ExtReal::Finite(_)) => Some(Ordering::Less),
            (ExtReal::Finite(_), ExtReal::NegInf) => Some(Ordering::Greater),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::NegInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> Self {
        self + ExtReal::from_f64(rhs)
    }
}

/// Scaling by a positive constant; `c · (-∞) = -∞` for `c > 0`.
impl Mul<ExtReal> for f64 {
    type Output = ExtReal;

    fn mul(self, rhs: ExtReal) -> ExtReal {
        debug_assert!(self > 0.0, "extended reals may only be scaled by positive factors");
        match rhs {
            ExtReal::Finite(x) => ExtReal::Finite(self * x),
            ExtReal::NegInf => ExtReal::NegInf,
        }
    }
}

impl std::iter::Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> Self {
        iter.fold(ExtReal::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => fmt::Display::fmt(x, f),
            ExtReal::NegInf => f.write_str("-inf"),
        }
    }
}

/// JSON form: a number, or `null` for `-∞`.
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => serializer.serialize_f64(*x),
            ExtReal::NegInf => serializer.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Option::<f64>::deserialize(deserializer)?;
        match value {
            None => Ok(ExtReal::NegInf),
            Some(x) if x.is_finite() => Ok(ExtReal::Finite(x)),
            Some(x) => Err(serde::de::Error::custom(format!("invalid extended real {x}"))),
        }
    }
}
