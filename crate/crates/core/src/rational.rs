//! Exact rational scalars.
//!
//! Every coordinate of a bid, valuation, payment or reference point is a
//! [`Rational`]. Values are parsed from decimal strings without rounding
//! (`2.5` is stored as `5/2`) and printed back as terminating decimals
//! whenever the reduced denominator has only the prime factors 2 and 5.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An arbitrary precision rational number kept in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number {text:?}: {reason}")]
pub struct ParseRationalError {
    pub text: String,
    pub reason: &'static str,
}

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`; panics when `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn half(&self) -> Self {
        Rational(&self.0 / BigRational::from_integer(BigInt::from(2)))
    }

    /// Nearest `f64`, for timing tables and plotting only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// Decimal digits after the point if the value has a terminating decimal
    /// expansion, `None` otherwise.
    fn decimal_places(&self) -> Option<usize> {
        let mut d = self.denom().clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let (mut twos, mut fives) = (0usize, 0usize);
        while d.is_even() {
            d /= &two;
            twos += 1;
        }
        while (&d % &five).is_zero() {
            d /= &five;
            fives += 1;
        }
        if d.is_one() {
            Some(twos.max(fives))
        } else {
            None
        }
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            return write!(f, "{}", self.numer());
        }
        match self.decimal_places() {
            Some(places) => {
                let scale = BigInt::from(10).pow(places as u32);
                let scaled = self.numer() * &scale / self.denom();
                let sign = if scaled.is_negative() { "-" } else { "" };
                let abs = scaled.abs();
                let (int, frac) = abs.div_rem(&scale);
                let frac = frac.to_string();
                write!(f, "{sign}{int}.{}{frac}", "0".repeat(places - frac.len()))
            }
            None => write!(f, "{}/{}", self.numer(), self.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `-12`, `3.125`, `.5`, `+7` and `22/7`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParseRationalError {
            text: s.to_string(),
            reason,
        };
        let t = s.trim();
        if t.is_empty() {
            return Err(err("empty"));
        }
        if let Some((n, d)) = t.split_once('/') {
            let n = parse_int(n).ok_or_else(|| err("bad numerator"))?;
            let d = parse_int(d).ok_or_else(|| err("bad denominator"))?;
            if d.is_zero() {
                return Err(err("zero denominator"));
            }
            return Ok(Rational(BigRational::new(n, d)));
        }
        let (neg, body) = match t.as_bytes()[0] {
            b'-' => (true, &t[1..]),
            b'+' => (false, &t[1..]),
            _ => (false, t),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err("no digits"));
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(err("unexpected character"));
        }
        let digits = format!("{int_part}{frac_part}");
        let mut numer: BigInt = digits.parse().map_err(|_| err("bad digits"))?;
        if neg {
            numer = -numer;
        }
        let denom = BigInt::from(10).pow(frac_part.len() as u32);
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// A rational paired with its nearest `f64`, for sorting large inputs.
///
/// Rounding to nearest is monotone, so differing roundings already decide
/// the order; only equal roundings fall back to the exact comparison.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Keyed<'a> {
    approx: f64,
    exact: &'a Rational,
}

impl<'a> Keyed<'a> {
    pub(crate) fn new(exact: &'a Rational) -> Self {
        Keyed {
            approx: exact.to_f64(),
            exact,
        }
    }
}

impl Ord for Keyed<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.approx.partial_cmp(&other.approx) {
            Some(Ordering::Equal) | None => self.exact.cmp(other.exact),
            Some(decided) => decided,
        }
    }
}

impl PartialOrd for Keyed<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Keyed<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Keyed<'_> {}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn decimal_strings_parse_exactly() {
        assert_eq!(r("2.5"), Rational::new(5, 2));
        assert_eq!(r("-0.125"), Rational::new(-1, 8));
        assert_eq!(r(".5"), Rational::new(1, 2));
        assert_eq!(r("007"), Rational::from_integer(7));
        assert_eq!(r("6/4"), Rational::new(3, 2));
        assert_eq!(r("0.1") + r("0.2"), r("0.3"));
    }

    #[test]
    fn rejects_garbage() {
        for bad in [
            "", "-", ".", "1.2.3", "1e5", "abc", "1/0", "1/", "/2", "0x10", "- 1",
        ] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(r("2.50").to_string(), "2.5");
        assert_eq!(r("-3").to_string(), "-3");
        assert_eq!(r("0.05").to_string(), "0.05");
        assert_eq!(r("-0.05").to_string(), "-0.05");
        assert_eq!(Rational::new(1, 3).to_string(), "1/3");
        assert_eq!(Rational::new(-7, 40).to_string(), "-0.175");
        assert_eq!(r("0").to_string(), "0");
    }

    #[test]
    fn half_and_order() {
        assert_eq!(r("3").half(), r("1.5"));
        assert!(r("1/3") < r("0.34"));
        assert!(r("-1") < Rational::zero());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn display_round_trips(n in -100_000i64..100_000, d in 1i64..2_000) {
                let x = Rational::new(n, d);
                let back: Rational = x.to_string().parse().unwrap();
                prop_assert_eq!(back, x);
            }

            #[test]
            fn keyed_order_is_exact(
                a in -(1i64 << 60)..(1i64 << 60), b in 1i64..(1i64 << 40),
                c in -(1i64 << 60)..(1i64 << 60), d in 1i64..(1i64 << 40),
                nudge in -2i64..=2,
            ) {
                let x = Rational::new(a, b);
                let y = Rational::new(c, d);
                let close = &x + &Rational::new(nudge, 1i64 << 62);
                for (p, q) in [(&x, &y), (&x, &close), (&close, &x)] {
                    prop_assert_eq!(Keyed::new(p).cmp(&Keyed::new(q)), p.cmp(q));
                }
            }
        }
    }
}
