//! Polynomials with Gaussian-rational coefficients and continuous piecewise
//! polynomials on `(0, 1]` with rational breakpoints.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{fmt_rational, Rational, Scalar};

/// Coefficients in increasing degree; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn identity() -> Self {
        Poly::new(vec![Scalar::zero(), Scalar::one()])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: &Rational) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = Scalar::new(&acc.re * t, &acc.im * t) + c;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Scalar::zero();
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + other.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&Scalar::int(-1)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in other.coeffs.iter().enumerate() {
                out[a + b] += &(x * y);
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Coefficient-wise conjugate; equals the pointwise conjugate for real `t`.
    pub fn conj(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(Scalar::conj).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})t"),
                _ => format!("({c})t^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// A continuous function on `(0, 1]` given by polynomials on the pieces
/// `(b₀, b₁], (b₁, b₂], …` with `b₀ = 0`, `b_m = 1`. Adjacent pieces with the
/// same polynomial are always merged, so equal functions have equal
/// representations.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Piecewise {
    #[serde(with = "rational_vec")]
    breaks: Vec<Rational>,
    pieces: Vec<Poly>,
}

mod rational_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(fmt_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| crate::scalar::parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl Piecewise {
    /// Validates breakpoints and continuity, then normalizes.
    pub fn new(breaks: Vec<Rational>, pieces: Vec<Poly>) -> Result<Self> {
        if breaks.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints for {} pieces",
                breaks.len(),
                pieces.len()
            )));
        }
        if !breaks[0].is_zero() || !breaks[breaks.len() - 1].is_one() {
            return Err(Error::InvalidFunction("breakpoints must run from 0 to 1".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction("breakpoints must be strictly increasing".into()));
        }
        for k in 1..pieces.len() {
            if pieces[k - 1].eval(&breaks[k]) != pieces[k].eval(&breaks[k]) {
                return Err(Error::InvalidFunction(format!(
                    "discontinuous at t = {}",
                    fmt_rational(&breaks[k])
                )));
            }
        }
        Ok(Piecewise { breaks, pieces }.normalized())
    }

    pub fn from_poly(p: Poly) -> Self {
        Piecewise { breaks: vec![Rational::zero(), Rational::one()], pieces: vec![p] }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    /// `(lo, hi, poly)` for every piece.
    pub fn intervals(&self) -> impl Iterator<Item = (&Rational, &Rational, &Poly)> {
        self.pieces.iter().enumerate().map(move |(k, p)| (&self.breaks[k], &self.breaks[k + 1], p))
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(Poly::is_zero)
    }

    pub fn is_constant(&self) -> Option<Scalar> {
        match (self.pieces.len(), self.pieces[0].degree()) {
            (1, None) => Some(Scalar::zero()),
            (1, Some(0)) => Some(self.pieces[0].coeffs()[0].clone()),
            _ => None,
        }
    }

    /// Value at `t ∈ (0, 1]`; `t = 0` gives the limit from the right.
    pub fn eval(&self, t: &Rational) -> Scalar {
        let k = self.breaks[1..].partition_point(|b| b < t).min(self.pieces.len() - 1);
        self.pieces[k].eval(t)
    }

    pub fn limit_at_zero(&self) -> Scalar {
        self.pieces[0].eval(&Rational::zero())
    }

    fn normalized(mut self) -> Self {
        let mut breaks = vec![self.breaks[0].clone()];
        let mut pieces: Vec<Poly> = Vec::new();
        for (k, p) in self.pieces.drain(..).enumerate() {
            if pieces.last() == Some(&p) {
                *breaks.last_mut().unwrap() = self.breaks[k + 1].clone();
            } else {
                pieces.push(p);
                breaks.push(self.breaks[k + 1].clone());
            }
        }
        Piecewise { breaks, pieces }
    }

    /// Restates both functions over the union of their breakpoints.
    fn refine<'a>(&'a self, other: &'a Piecewise) -> (Vec<Rational>, Vec<(&'a Poly, &'a Poly)>) {
        let mut breaks: Vec<Rational> = self.breaks.iter().chain(other.breaks.iter()).cloned().collect();
        breaks.sort();
        breaks.dedup();
        let mut pairs = Vec::with_capacity(breaks.len() - 1);
        let (mut a, mut b) = (0, 0);
        for w in breaks.windows(2) {
            while self.breaks[a + 1] < w[1] {
                a += 1;
            }
            while other.breaks[b + 1] < w[1] {
                b += 1;
            }
            pairs.push((&self.pieces[a], &other.pieces[b]));
        }
        (breaks, pairs)
    }

    /// Pointwise combination on the common refinement. `op` must preserve
    /// continuity (sums and products do).
    pub fn zip_with(&self, other: &Piecewise, op: impl Fn(&Poly, &Poly) -> Poly) -> Piecewise {
        let (breaks, pairs) = self.refine(other);
        let pieces = pairs.into_iter().map(|(p, q)| op(p, q)).collect();
        Piecewise { breaks, pieces }.normalized()
    }

    /// Common refinement of several functions: the merged breakpoints.
    pub fn common_breaks<'a>(fs: impl IntoIterator<Item = &'a Piecewise>) -> Vec<Rational> {
        let mut breaks: Vec<Rational> = fs.into_iter().flat_map(|f| f.breaks.iter().cloned()).collect();
        breaks.push(Rational::zero());
        breaks.push(Rational::one());
        breaks.sort();
        breaks.dedup();
        breaks
    }

    /// The polynomial in force on the subinterval `(lo, hi)`, which must lie
    /// inside a single piece.
    pub fn poly_on(&self, lo: &Rational, hi: &Rational) -> &Poly {
        let k = self.breaks[1..].partition_point(|b| b < hi).min(self.pieces.len() - 1);
        debug_assert!(&self.breaks[k] <= lo);
        &self.pieces[k]
    }

    pub fn add(&self, other: &Piecewise) -> Piecewise {
        self.zip_with(other, Poly::add)
    }

    pub fn sub(&self, other: &Piecewise) -> Piecewise {
        self.zip_with(other, Poly::sub)
    }

    pub fn mul(&self, other: &Piecewise) -> Piecewise {
        self.zip_with(other, Poly::mul)
    }

    pub fn scale(&self, c: &Scalar) -> Piecewise {
        Piecewise { breaks: self.breaks.clone(), pieces: self.pieces.iter().map(|p| p.scale(c)).collect() }
            .normalized()
    }

    pub fn conj(&self) -> Piecewise {
        Piecewise { breaks: self.breaks.clone(), pieces: self.pieces.iter().map(Poly::conj).collect() }
    }
}

impl fmt::Display for Piecewise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .intervals()
            .map(|(lo, hi, p)| format!("({}, {}]: {p}", fmt_rational(lo), fmt_rational(hi)))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn c(n: i64) -> Scalar {
        Scalar::int(n)
    }

    #[test]
    fn poly_product_and_eval() {
        let t = Poly::identity();
        let t2 = t.mul(&t);
        assert_eq!(t2.coeffs(), &[c(0), c(0), c(1)]);
        assert_eq!(t2.eval(&rat(1, 3)), Scalar::real(rat(1, 9)));
        assert_eq!(Poly::constant(c(1)).mul(&Poly::constant(c(1))), Poly::constant(c(1)));
        assert!(t.sub(&t).is_zero());
        assert_eq!(t.sub(&t).degree(), None);
    }

    #[test]
    fn continuity_is_enforced() {
        let half = rat(1, 2);
        let ok = Piecewise::new(
            vec![rat_int(0), half.clone(), rat_int(1)],
            vec![Poly::identity(), Poly::constant(Scalar::real(half.clone()))],
        );
        assert!(ok.is_ok());
        let bad = Piecewise::new(vec![rat_int(0), half, rat_int(1)], vec![Poly::identity(), Poly::constant(c(1))]);
        assert!(bad.is_err());
        assert!(Piecewise::new(vec![rat_int(0), rat_int(1)], vec![]).is_err());
        assert!(Piecewise::new(vec![rat(1, 4), rat_int(1)], vec![Poly::zero()]).is_err());
    }

    #[test]
    fn equal_pieces_merge() {
        let f = Piecewise::new(
            vec![rat_int(0), rat(1, 3), rat_int(1)],
            vec![Poly::identity(), Poly::identity()],
        )
        .unwrap();
        assert_eq!(f, Piecewise::from_poly(Poly::identity()));
    }

    #[test]
    fn refinement_arithmetic() {
        // f = min(t, 1/2), g = t
        let f = Piecewise::new(
            vec![rat_int(0), rat(1, 2), rat_int(1)],
            vec![Poly::identity(), Poly::constant(Scalar::real(rat(1, 2)))],
        )
        .unwrap();
        let g = Piecewise::from_poly(Poly::identity());
        let h = f.mul(&g);
        assert_eq!(h.breaks().len(), 3);
        for t in [rat(1, 7), rat(1, 2), rat(2, 3), rat_int(1)] {
            assert_eq!(h.eval(&t), &f.eval(&t) * &g.eval(&t));
            assert_eq!(f.add(&g).eval(&t), &f.eval(&t) + &g.eval(&t));
        }
        assert_eq!(g.limit_at_zero(), Scalar::zero());
        assert!(f.sub(&f).is_zero());
        assert_eq!(f.sub(&f).breaks().len(), 2);
    }
}
