//! Exact Gaussian rationals.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Renders a rational as `p` or `p/q` in lowest terms.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::ScalarSyntax(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// A complex number `re + im·i` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Scalar {
    pub re: Rational,
    pub im: Rational,
}

impl Scalar {
    pub fn new(re: Rational, im: Rational) -> Self {
        Scalar { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Scalar { re, im: Rational::zero() }
    }

    pub fn int(n: i64) -> Self {
        Scalar::real(rat_int(n))
    }

    pub fn zero() -> Self {
        Scalar::int(0)
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn i() -> Self {
        Scalar::new(rat_int(0), rat_int(1))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, always real and exact.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.norm_sqr();
        Some(Scalar::new(&self.re / &d, -&self.im / &d))
    }

    /// True when the value is a non-negative real number.
    pub fn is_nonneg_real(&self) -> bool {
        self.im.is_zero() && !self.re.is_negative()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    pub fn abs_f64(&self) -> f64 {
        let (a, b) = self.to_f64();
        a.hypot(b)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::real(r)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| Scalar::new(&a.re + &b.re, &a.im + &b.im));
forward_binop!(Sub, sub, |a, b| Scalar::new(&a.re - &b.re, &a.im - &b.im));
forward_binop!(Mul, mul, |a, b| Scalar::new(
    &a.re * &b.re - &a.im * &b.im,
    &a.re * &b.im + &a.im * &b.re
));
forward_binop!(Div, div, |a, b| a * &b.inv().expect("division by zero scalar"));

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-&self.re, -&self.im)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

/// Canonical text form: `p/q` for reals, `p/q+r/s i` otherwise, integers
/// without a denominator, imaginary unit coefficient always written.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{} i", fmt_rational(&self.re), sign, fmt_rational(&self.im.abs()))
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix('i') else {
            return Ok(Scalar::real(parse_rational(s)?));
        };
        let body = body.trim_end();
        // split at the sign that separates the real and imaginary parts
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .last()
            .map(|(k, _)| k)
            .ok_or_else(|| Error::ScalarSyntax(format!("missing real part in {s:?}")))?;
        let re = parse_rational(&body[..split])?;
        let im = parse_rational(&body[split..].replace('+', ""))?;
        Ok(Scalar::new(re, im))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a bare rational rendered as `p/q`.
pub mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(re: (i64, i64), im: (i64, i64)) -> Scalar {
        Scalar::new(rat(re.0, re.1), rat(im.0, im.1))
    }

    #[test]
    fn rendering_is_canonical() {
        assert_eq!(Scalar::int(-1).to_string(), "-1");
        assert_eq!(s((1, 2), (0, 1)).to_string(), "1/2");
        assert_eq!(s((1, 2), (3, 4)).to_string(), "1/2+3/4 i");
        assert_eq!(s((0, 1), (-2, 6)).to_string(), "0-1/3 i");
        assert_eq!(s((-4, 2), (1, 1)).to_string(), "-2+1 i");
    }

    #[test]
    fn parse_round_trips() {
        for v in [s((1, 2), (3, 4)), s((-7, 3), (-1, 5)), Scalar::zero(), s((0, 1), (1, 1)), s((5, 1), (0, 1))] {
            let back: Scalar = v.to_string().parse().unwrap();
            assert_eq!(back, v);
        }
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
        assert!("3 i".parse::<Scalar>().is_err());
    }

    #[test]
    fn field_operations() {
        let a = s((1, 2), (3, 1));
        let b = s((-2, 3), (1, 4));
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
        assert_eq!((&a * &a.conj()).im, rat_int(0));
        assert!(Scalar::zero().inv().is_none());
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::int(-1));
    }
}
