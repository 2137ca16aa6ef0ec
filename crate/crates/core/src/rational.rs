//! Positive rationals for the rotation parameter `α = p/q`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest denominator tried when a decimal is snapped to a fraction.
pub const MAX_SNAP_DENOMINATOR: u64 = 64;

/// A positive rational `p/q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    p: u64,
    q: u64,
}

/// Result of parsing a user-supplied `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsedRational {
    pub value: Rational,
    /// `Some(x)` when `x` was a decimal that had to be approximated.
    pub snapped_from: Option<f64>,
}

impl Rational {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::Param(format!("alpha must be a positive fraction, got {p}/{q}")));
        }
        let d = p.gcd(&q);
        Ok(Self { p: p / d, q: q / d })
    }

    pub fn numer(&self) -> u64 {
        self.p
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// Smallest `L > 0` with both `g̃` and `e^{iαπx}` `L`-periodic:
    /// `lcm(2, 2/α) = 2q`.
    pub fn joint_period(&self) -> f64 {
        2.0 * self.q as f64
    }

    /// Nearest fraction with denominator at most `max_q`; ties go to the
    /// smaller denominator.
    pub fn snap(x: f64, max_q: u64) -> Result<Self> {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::Param(format!("alpha must be positive, got {x}")));
        }
        let mut best: Option<(f64, u64, u64)> = None;
        for q in 1..=max_q.max(1) {
            let p = (x * q as f64).round().max(1.0) as u64;
            let err = (x - p as f64 / q as f64).abs();
            if best.is_none_or(|(e, _, _)| err < e) {
                best = Some((err, p, q));
            }
        }
        let (_, p, q) = best.unwrap();
        Self::new(p, q)
    }

    /// Parses `"p/q"`, an integer, or a decimal (snapped with
    /// [`MAX_SNAP_DENOMINATOR`]).
    pub fn parse(s: &str) -> Result<ParsedRational> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let p = a
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::Param(format!("alpha numerator {a:?}: {e}")))?;
            let q = b
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::Param(format!("alpha denominator {b:?}: {e}")))?;
            return Ok(ParsedRational {
                value: Self::new(p, q)?,
                snapped_from: None,
            });
        }
        if let Ok(p) = s.parse::<u64>() {
            return Ok(ParsedRational {
                value: Self::new(p, 1)?,
                snapped_from: None,
            });
        }
        let x = s
            .parse::<f64>()
            .map_err(|e| Error::Param(format!("alpha {s:?}: {e}")))?;
        let value = Self::snap(x, MAX_SNAP_DENOMINATOR)?;
        let snapped_from = if value.to_f64() == x { None } else { Some(x) };
        Ok(ParsedRational { value, snapped_from })
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Self::parse(s)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        let r = Rational::new(4, 8).unwrap();
        assert_eq!((r.numer(), r.denom()), (1, 2));
        assert!(Rational::new(0, 3).is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Rational::parse("1/8").unwrap().value, Rational::new(1, 8).unwrap());
        assert_eq!(Rational::parse("2").unwrap().value, Rational::new(2, 1).unwrap());
        let p = Rational::parse("0.25").unwrap();
        assert_eq!(p.value, Rational::new(1, 4).unwrap());
        assert!(p.snapped_from.is_none());
        let p = Rational::parse("0.3333").unwrap();
        assert_eq!(p.value, Rational::new(1, 3).unwrap());
        assert_eq!(p.snapped_from, Some(0.3333));
        assert!(Rational::parse("-1").is_err());
        assert!(Rational::parse("abc").is_err());
    }

    #[test]
    fn joint_periods() {
        assert_eq!(Rational::new(1, 1).unwrap().joint_period(), 2.0);
        assert_eq!(Rational::new(1, 2).unwrap().joint_period(), 4.0);
        assert_eq!(Rational::new(3, 8).unwrap().joint_period(), 16.0);
    }

    #[test]
    fn display() {
        assert_eq!(Rational::new(1, 4).unwrap().to_string(), "1/4");
        assert_eq!(Rational::new(3, 1).unwrap().to_string(), "3");
    }
}
