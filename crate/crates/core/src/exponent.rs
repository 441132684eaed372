//! Exact exponents: rationals extended by `∞`.
//!
//! Exponents are never carried as floats. `1/∞ = 0`, `1' = ∞` and `∞' = 1`
//! are first-class; conversion to `f64` happens only at the point where a
//! norm is evaluated.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// A nonnegative exact exponent or `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational),
    Infinite,
}

impl Exponent {
    pub const INF: Exponent = Exponent::Infinite;

    pub fn new(num: i64, den: i64) -> Exponent {
        Exponent::Finite(rat(num, den))
    }

    pub fn int(v: i64) -> Exponent {
        Exponent::Finite(Rational::from_integer(v))
    }

    pub fn one() -> Exponent {
        Exponent::int(1)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn finite(&self) -> Option<Rational> {
        match self {
            Exponent::Finite(r) => Some(*r),
            Exponent::Infinite => None,
        }
    }

    /// `1/self`, with `1/∞ = 0` and `1/0 = ∞`.
    pub fn recip(&self) -> Exponent {
        match self {
            Exponent::Infinite => Exponent::Finite(Rational::zero()),
            Exponent::Finite(r) if r.is_zero() => Exponent::Infinite,
            Exponent::Finite(r) => Exponent::Finite(r.recip()),
        }
    }

    /// Reciprocal as a plain rational (`1/∞ = 0`). Panics on zero.
    pub fn inv(&self) -> Rational {
        match self {
            Exponent::Infinite => Rational::zero(),
            Exponent::Finite(r) => r.recip(),
        }
    }

    /// Hölder conjugate: `1/p + 1/p' = 1`. Defined for `p >= 1`.
    pub fn conj(&self) -> Exponent {
        match self {
            Exponent::Infinite => Exponent::one(),
            Exponent::Finite(r) if r.is_one() => Exponent::Infinite,
            Exponent::Finite(r) => Exponent::Finite(*r / (*r - Rational::one())),
        }
    }

    pub fn from_inv(inv: Rational) -> Exponent {
        if inv.is_zero() {
            Exponent::Infinite
        } else {
            Exponent::Finite(inv.recip())
        }
    }

    /// Multiply by a positive rational; `∞·c = ∞`.
    pub fn scale(&self, c: Rational) -> Exponent {
        match self {
            Exponent::Infinite => Exponent::Infinite,
            Exponent::Finite(r) => Exponent::Finite(*r * c),
        }
    }

    /// Divide by a positive rational; `∞/c = ∞`.
    pub fn div(&self, c: Rational) -> Exponent {
        self.scale(c.recip())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Infinite => f64::INFINITY,
            Exponent::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
        }
    }

    /// Checks `1 <= self <= ∞`.
    pub fn is_lebesgue(&self) -> bool {
        match self {
            Exponent::Infinite => true,
            Exponent::Finite(r) => *r >= Rational::one(),
        }
    }

    pub fn require_lebesgue(&self, what: &str) -> Result<()> {
        if self.is_lebesgue() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{what} = {self} must lie in [1, inf]")))
        }
    }

    /// Stable `num/den` encoding, used in file names and seeds.
    pub fn key(&self) -> String {
        match self {
            Exponent::Infinite => "inf".to_string(),
            Exponent::Finite(r) => format!("{}/{}", r.numer(), r.denom()),
        }
    }
}

impl From<Rational> for Exponent {
    fn from(r: Rational) -> Self {
        Exponent::Finite(r)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Exponent::Infinite, Exponent::Infinite) => Ordering::Equal,
            (Exponent::Infinite, _) => Ordering::Greater,
            (_, Exponent::Infinite) => Ordering::Less,
            (Exponent::Finite(a), Exponent::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinite => write!(f, "inf"),
            Exponent::Finite(r) => write!(f, "{r}"),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = |reason: &str| Error::Parse {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: i64 = num.parse().map_err(|_| err("bad numerator"))?;
    let den: i64 = den.parse().map_err(|_| err("bad denominator"))?;
    if den == 0 {
        return Err(err("zero denominator"));
    }
    Ok(rat(num, den))
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "Inf" | "INF" => Ok(Exponent::Infinite),
            t => {
                let r = parse_rational(t)?;
                if r.is_negative() {
                    return Err(Error::Parse {
                        input: s.to_string(),
                        reason: "exponent must be nonnegative".into(),
                    });
                }
                Ok(Exponent::Finite(r))
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.key())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing a rational as a `num/den` string.
pub mod rational_str {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses either `a:b:step` (inclusive arithmetic progression) or a comma
/// separated list of exponents.
pub fn parse_grid(s: &str) -> Result<Vec<Exponent>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let a = parse_rational(a)?;
            let b = parse_rational(b)?;
            let step = parse_rational(step)?;
            if !step.is_positive() || b < a {
                return Err(Error::Parse {
                    input: s.to_string(),
                    reason: "grid needs a <= b and step > 0".into(),
                });
            }
            let mut out = Vec::new();
            let mut x = a;
            while x <= b {
                out.push(Exponent::Finite(x));
                x += step;
            }
            Ok(out)
        }
        [_] => s.split(',').map(|t| t.parse()).collect(),
        _ => Err(Error::Parse {
            input: s.to_string(),
            reason: "expected a:b:step or a comma separated list".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        assert_eq!(Exponent::one().conj(), Exponent::INF);
        assert_eq!(Exponent::INF.conj(), Exponent::one());
        assert_eq!(Exponent::new(4, 3).conj(), Exponent::int(4));
        assert_eq!(Exponent::int(2).conj(), Exponent::int(2));
        assert_eq!(Exponent::INF.inv(), Rational::zero());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("4/3".parse::<Exponent>().unwrap(), Exponent::new(4, 3));
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::INF);
        assert_eq!(Exponent::new(8, 4).to_string(), "2");
        assert!("1/0".parse::<Exponent>().is_err());
        assert!("-1".parse::<Exponent>().is_err());
    }

    #[test]
    fn grids() {
        let g = parse_grid("1:2:1/4").unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[4], Exponent::int(2));
        let g = parse_grid("1,5/4,inf").unwrap();
        assert_eq!(g, vec![Exponent::int(1), Exponent::new(5, 4), Exponent::INF]);
    }

    #[test]
    fn ordering_puts_infinity_last() {
        let mut v = vec![Exponent::INF, Exponent::new(3, 2), Exponent::one()];
        v.sort();
        assert_eq!(v, vec![Exponent::one(), Exponent::new(3, 2), Exponent::INF]);
    }
}
