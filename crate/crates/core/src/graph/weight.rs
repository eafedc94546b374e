use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;

use crate::error::Error;

/// An edge or vertex weight, kept exact whenever it was given as a rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Exact(Rational64),
    Real(f64),
}

impl Weight {
    pub const ONE: Weight = Weight::Exact(Rational64::new_raw(1, 1));

    pub fn integer(k: i64) -> Self {
        Weight::Exact(Rational64::from_integer(k))
    }

    pub fn value(&self) -> f64 {
        match *self {
            Weight::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Weight::Real(x) => x,
        }
    }

    pub fn exact(&self) -> Option<Rational64> {
        match *self {
            Weight::Exact(r) => Some(r),
            Weight::Real(_) => None,
        }
    }

    pub fn is_one(&self) -> bool {
        match *self {
            Weight::Exact(r) => r == Rational64::from_integer(1),
            Weight::Real(x) => x == 1.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match *self {
            Weight::Exact(r) => r > Rational64::from_integer(0),
            Weight::Real(x) => x.is_finite() && x > 0.0,
        }
    }
}

impl From<f64> for Weight {
    fn from(x: f64) -> Self {
        Weight::Real(x)
    }
}

impl From<i64> for Weight {
    fn from(k: i64) -> Self {
        Weight::integer(k)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Weight::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Weight::Real(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// Accepts `p/q`, plain decimals (kept exact) and any other float syntax
    /// (stored as a real).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse weight `{s}`"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(Error::InvalidArgument(format!("zero denominator in `{s}`")));
            }
            return Ok(Weight::Exact(Rational64::new(p, q)));
        }
        if let Some(r) = parse_decimal(s) {
            return Ok(Weight::Exact(r));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        Ok(Weight::Real(x))
    }
}

/// Parses `[-]digits[.digits]` exactly, giving up on overflow.
fn parse_decimal(s: &str) -> Option<Rational64> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut numer: i64 = 0;
    for b in int.bytes().chain(frac.bytes()) {
        numer = numer.checked_mul(10)?.checked_add((b - b'0') as i64)?;
    }
    let denom = 10i64.checked_pow(frac.len() as u32)?;
    let r = Rational64::new(numer, denom);
    Some(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals_exactly() {
        assert_eq!("3/6".parse::<Weight>().unwrap(), Weight::Exact(Rational64::new(1, 2)));
        assert_eq!("0.25".parse::<Weight>().unwrap(), Weight::Exact(Rational64::new(1, 4)));
        assert_eq!("2".parse::<Weight>().unwrap(), Weight::integer(2));
        assert_eq!("1e-3".parse::<Weight>().unwrap(), Weight::Real(1e-3));
        assert!("1/0".parse::<Weight>().is_err());
        assert!("abc".parse::<Weight>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["1", "1/2", "7/3", "2.449489742783178"] {
            let w: Weight = s.parse().unwrap();
            let back: Weight = w.to_string().parse().unwrap();
            assert_eq!(w.value(), back.value());
        }
    }
}
