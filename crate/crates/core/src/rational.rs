//! Exact rationals and their `num/den` text form.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::Error;

pub type Rational = Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Always `num/den`, even for integers.
pub fn fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `num/den`, or just `num` when the value is an integer.
pub fn compact(r: &Rational) -> String {
    r.to_string()
}

/// Parses `a`, `a/b`, with optional sign.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational of the form num/den"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().map_err(|_| bad())?, d.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if den == 0 {
        return Err(Error::Parse(format!("`{s}` has a zero denominator")));
    }
    Ok(Rational::new(num, den))
}

/// A delivery time that may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ndt {
    Finite(Rational),
    Infinite,
}

impl Ndt {
    pub fn finite(&self) -> Option<Rational> {
        match self {
            Ndt::Finite(r) => Some(*r),
            Ndt::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ndt::Infinite)
    }

    /// Like [`Display`](fmt::Display) but finite values are always `num/den`.
    pub fn fraction(&self) -> String {
        match self {
            Ndt::Finite(r) => fraction(r),
            Ndt::Infinite => "inf".to_string(),
        }
    }
}

impl fmt::Display for Ndt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ndt::Finite(r) => write!(f, "{r}"),
            Ndt::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Ndt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "inf" {
            Ok(Ndt::Infinite)
        } else {
            parse_rational(s).map(Ndt::Finite)
        }
    }
}

/// Inclusive grid `start, start + step, ..., <= end`, parsed from `a:b:step`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalGrid {
    pub start: Rational,
    pub end: Rational,
    pub step: Rational,
}

impl RationalGrid {
    pub fn values(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut v = self.start;
        while v <= self.end {
            out.push(v);
            v += self.step;
        }
        out
    }
}

impl FromStr for RationalGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts.as_slice() else {
            return Err(Error::Parse(format!("grid `{s}` must look like start:end:step")));
        };
        let grid = RationalGrid {
            start: parse_rational(a)?,
            end: parse_rational(b)?,
            step: parse_rational(step)?,
        };
        if grid.step.is_zero() || grid.step.is_negative() {
            return Err(Error::Parse(format!("grid `{s}` needs a positive step")));
        }
        if grid.end < grid.start {
            return Err(Error::Parse(format!("grid `{s}` is empty")));
        }
        Ok(grid)
    }
}
