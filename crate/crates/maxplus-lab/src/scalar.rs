//! The max-plus semifield: reals together with a bottom element, under
//! `a ⊕ b = max(a, b)` and `a ⊗ b = a + b`.
//!
//! Bottom is a dedicated tagged state rather than a sentinel float, so
//! `⊗` with bottom is exact and no finite value can ever be mistaken
//! for it.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Token used for the bottom element in every text format.
pub const BOTTOM_TOKEN: &str = "-inf";

/// An element of the max-plus semifield: a finite real or bottom.
///
/// `+inf` and `NaN` are not members and are rejected at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxScalar {
    Bottom,
    Finite(f64),
}

impl MaxScalar {
    /// Neutral element of `⊕`.
    pub const BOTTOM: MaxScalar = MaxScalar::Bottom;
    /// Neutral element of `⊗`.
    pub const UNIT: MaxScalar = MaxScalar::Finite(0.0);

    /// Wraps a finite real. Fails fast on NaN and infinities.
    pub fn finite(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(MaxScalar::Finite(v))
        } else {
            Err(Error::NotMaxPlus(v))
        }
    }

    /// Wraps a finite real, panicking on NaN and infinities. Intended for
    /// literals and values already known to be finite.
    pub fn num(v: f64) -> Self {
        MaxScalar::finite(v).expect("finite value required")
    }

    pub fn is_bottom(self) -> bool {
        matches!(self, MaxScalar::Bottom)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, MaxScalar::Finite(_))
    }

    /// The finite value, if any.
    pub fn value(self) -> Option<f64> {
        match self {
            MaxScalar::Bottom => None,
            MaxScalar::Finite(v) => Some(v),
        }
    }

    /// Lossy embedding into IEEE doubles: bottom maps to `-inf`.
    ///
    /// Safe for `max`-style reductions and for adding finite values;
    /// the caller must not feed the result back through a path that
    /// could produce `+inf` or NaN.
    pub fn to_f64(self) -> f64 {
        match self {
            MaxScalar::Bottom => f64::NEG_INFINITY,
            MaxScalar::Finite(v) => v,
        }
    }

    /// Inverse of [`to_f64`](Self::to_f64): `-inf` becomes bottom, finite
    /// values stay finite. `+inf`/NaN are rejected.
    pub fn from_f64(v: f64) -> Result<Self> {
        if v == f64::NEG_INFINITY {
            Ok(MaxScalar::Bottom)
        } else {
            MaxScalar::finite(v)
        }
    }

    /// `a ⊕ b = max(a, b)`; bottom is neutral. Introduces no rounding.
    pub fn oplus(self, other: Self) -> Self {
        match (self, other) {
            (MaxScalar::Bottom, x) => x,
            (x, MaxScalar::Bottom) => x,
            (MaxScalar::Finite(a), MaxScalar::Finite(b)) => {
                // Return one of the operands unchanged; never recompute.
                if a >= b {
                    MaxScalar::Finite(a)
                } else {
                    MaxScalar::Finite(b)
                }
            }
        }
    }

    /// `a ⊗ b = a + b`; bottom is absorbing. Exact up to IEEE addition.
    pub fn otimes(self, other: Self) -> Self {
        match (self, other) {
            (MaxScalar::Bottom, _) | (_, MaxScalar::Bottom) => MaxScalar::Bottom,
            (MaxScalar::Finite(a), MaxScalar::Finite(b)) => MaxScalar::Finite(a + b),
        }
    }

    /// The standard order: `a ⪯ b` iff `a ⊕ b = b`. Bottom is least.
    pub fn leq(self, other: Self) -> bool {
        match (self, other) {
            (MaxScalar::Bottom, _) => true,
            (MaxScalar::Finite(_), MaxScalar::Bottom) => false,
            (MaxScalar::Finite(a), MaxScalar::Finite(b)) => a <= b,
        }
    }
}

impl PartialOrd for MaxScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (MaxScalar::Bottom, MaxScalar::Bottom) => Some(Ordering::Equal),
            (MaxScalar::Bottom, MaxScalar::Finite(_)) => Some(Ordering::Less),
            (MaxScalar::Finite(_), MaxScalar::Bottom) => Some(Ordering::Greater),
            (MaxScalar::Finite(a), MaxScalar::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for MaxScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxScalar::Bottom => f.write_str(BOTTOM_TOKEN),
            // {:?} prints the shortest representation that round-trips,
            // which the text formats rely on.
            MaxScalar::Finite(v) => write!(f, "{:?}", v),
        }
    }
}

impl FromStr for MaxScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == BOTTOM_TOKEN {
            return Ok(MaxScalar::Bottom);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("unparseable scalar token `{s}`")))?;
        MaxScalar::finite(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oplus_bottom_neutral() {
        let a = MaxScalar::num(3.0);
        assert_eq!(a.oplus(MaxScalar::Bottom), a);
        assert_eq!(MaxScalar::Bottom.oplus(a), a);
    }

    #[test]
    fn oplus_idempotent_and_max() {
        let two = MaxScalar::num(2.0);
        assert_eq!(two.oplus(two), two);
        assert_eq!(
            MaxScalar::num(-1.5).oplus(MaxScalar::num(0.25)),
            MaxScalar::num(0.25)
        );
    }

    #[test]
    fn otimes_adds_and_absorbs() {
        assert_eq!(
            MaxScalar::num(2.0).otimes(MaxScalar::num(3.0)),
            MaxScalar::num(5.0)
        );
        assert_eq!(MaxScalar::num(7.0).otimes(MaxScalar::Bottom), MaxScalar::Bottom);
        assert_eq!(
            MaxScalar::UNIT.otimes(MaxScalar::num(-4.5)),
            MaxScalar::num(-4.5)
        );
    }

    #[test]
    fn leq_matches_extended_order() {
        assert!(MaxScalar::Bottom.leq(MaxScalar::num(-7.0)));
        assert!(MaxScalar::num(3.0).leq(MaxScalar::num(3.0)));
        assert!(!MaxScalar::num(4.0).leq(MaxScalar::num(1.0)));
        assert!(!MaxScalar::num(-7.0).leq(MaxScalar::Bottom));
    }

    #[test]
    fn construction_rejects_nonmembers() {
        assert!(MaxScalar::finite(f64::NAN).is_err());
        assert!(MaxScalar::finite(f64::INFINITY).is_err());
        assert!(MaxScalar::finite(f64::NEG_INFINITY).is_err());
        assert!(MaxScalar::from_f64(f64::NEG_INFINITY).unwrap().is_bottom());
        assert!(MaxScalar::from_f64(f64::INFINITY).is_err());
    }

    #[test]
    fn text_round_trip() {
        for s in ["-inf", "0.1", "-3.25", "1e-300"] {
            let x: MaxScalar = s.parse().unwrap();
            let back: MaxScalar = x.to_string().parse().unwrap();
            assert_eq!(x, back);
        }
    }
}
