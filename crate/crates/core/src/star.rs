//! The star space with `n` edges: `[0,1] × {1..n}` with all the points
//! `(0, i)` glued to one center. Edge coordinates live in `(0, 1]`; the
//! center is its own point.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::poly::Piecewise;
use crate::scalar::{fmt_rational, rational_serde, Rational, Scalar};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StarPoint {
    Center,
    Edge {
        edge: usize,
        #[serde(with = "rational_serde")]
        t: Rational,
    },
}

impl StarPoint {
    pub fn edge(edge: usize, t: Rational) -> Result<Self> {
        if t <= Rational::zero() || t > Rational::one() {
            return Err(Error::InvalidOpenSet(format!("edge coordinate {} outside (0, 1]", fmt_rational(&t))));
        }
        Ok(StarPoint::Edge { edge, t })
    }

    /// `(t, i) ↦ (t, σ(i))`; the center is fixed.
    pub fn act(&self, sigma: &Permutation) -> StarPoint {
        match self {
            StarPoint::Center => StarPoint::Center,
            StarPoint::Edge { edge, t } => StarPoint::Edge { edge: sigma.apply(*edge), t: t.clone() },
        }
    }
}

impl fmt::Display for StarPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarPoint::Center => write!(f, "0"),
            StarPoint::Edge { edge, t } => write!(f, "({}, {})", fmt_rational(t), edge + 1),
        }
    }
}

/// A relatively open interval of `(0, 1]`: `(lo, hi)`, or `(lo, 1]` when
/// `closed_hi` is set.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "rational_serde")]
    pub lo: Rational,
    #[serde(with = "rational_serde")]
    pub hi: Rational,
    pub closed_hi: bool,
}

impl Interval {
    pub fn open(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi, closed_hi: false }
    }

    /// `(lo, 1]`
    pub fn to_end(lo: Rational) -> Self {
        Interval { lo, hi: Rational::one(), closed_hi: true }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        &self.lo < t && (t < &self.hi || (self.closed_hi && t == &self.hi))
    }

    fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    fn validate(&self) -> Result<()> {
        if self.lo < Rational::zero() || self.hi > Rational::one() {
            return Err(Error::InvalidOpenSet(format!("interval {self} not inside (0, 1]")));
        }
        if self.closed_hi && !self.hi.is_one() {
            return Err(Error::InvalidOpenSet(format!("interval {self} closed at an interior point")));
        }
        Ok(())
    }

    fn intersect(&self, other: &Interval) -> Interval {
        let lo = (&self.lo).max(&other.lo).clone();
        let (hi, closed_hi) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.closed_hi),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.closed_hi),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.closed_hi && other.closed_hi),
        };
        Interval { lo, hi, closed_hi }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let close = if self.closed_hi { ']' } else { ')' };
        write!(f, "({}, {}{close}", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

fn normalize_intervals(mut ivs: Vec<Interval>) -> Vec<Interval> {
    ivs.retain(|iv| !iv.is_empty());
    ivs.sort_by(|a, b| a.lo.cmp(&b.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
    for iv in ivs {
        match out.last_mut() {
            // the shared endpoint of (a,b) and (b,c) is not in the union
            Some(cur) if iv.lo < cur.hi => {
                if iv.hi > cur.hi {
                    cur.hi = iv.hi;
                    cur.closed_hi = iv.closed_hi;
                } else if iv.hi == cur.hi {
                    cur.closed_hi |= iv.closed_hi;
                }
            }
            _ => out.push(iv),
        }
    }
    out
}

/// An open subset of the star: per-edge finite unions of relatively open
/// intervals plus a center flag. When the center is included every edge
/// carries an interval `(0, ε)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct OpenStarSet {
    contains_center: bool,
    edges: Vec<Vec<Interval>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
}

impl OpenStarSet {
    pub fn new(contains_center: bool, edges: Vec<Vec<Interval>>) -> Result<Self> {
        for iv in edges.iter().flatten() {
            iv.validate()?;
        }
        let edges: Vec<Vec<Interval>> = edges.into_iter().map(normalize_intervals).collect();
        let set = OpenStarSet { contains_center, edges };
        if contains_center && !set.covers_center_germ() {
            return Err(Error::InvalidOpenSet(
                "set contains the center but misses (0, ε) on some edge".into(),
            ));
        }
        Ok(set)
    }

    pub fn full(n: usize) -> Self {
        OpenStarSet { contains_center: true, edges: vec![vec![Interval::to_end(Rational::zero())]; n] }
    }

    pub fn empty(n: usize) -> Self {
        OpenStarSet { contains_center: false, edges: vec![Vec::new(); n] }
    }

    /// The open ball `{0} ∪ ⋃ᵢ (0, ε) × {i}`.
    pub fn center_ball(n: usize, eps: Rational) -> Result<Self> {
        let iv = if eps >= Rational::one() { Interval::to_end(Rational::zero()) } else { Interval::open(Rational::zero(), eps) };
        Self::new(true, vec![vec![iv]; n])
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_center(&self) -> bool {
        self.contains_center
    }

    pub fn edge_intervals(&self, edge: usize) -> &[Interval] {
        &self.edges[edge]
    }

    fn covers_center_germ(&self) -> bool {
        self.edges.iter().all(|ivs| ivs.first().is_some_and(|iv| iv.lo.is_zero()))
    }

    pub fn contains(&self, p: &StarPoint) -> bool {
        match p {
            StarPoint::Center => self.contains_center,
            StarPoint::Edge { edge, t } => self.edges.get(*edge).is_some_and(|ivs| ivs.iter().any(|iv| iv.contains(t))),
        }
    }

    pub fn combine(&self, other: &OpenStarSet, op: SetOp) -> Result<OpenStarSet> {
        if self.edge_count() != other.edge_count() {
            return Err(Error::EdgeCountMismatch { left: self.edge_count(), right: other.edge_count() });
        }
        let edges = self
            .edges
            .iter()
            .zip(&other.edges)
            .map(|(a, b)| match op {
                SetOp::Union => normalize_intervals(a.iter().chain(b).cloned().collect()),
                SetOp::Intersection => {
                    normalize_intervals(a.iter().flat_map(|x| b.iter().map(move |y| x.intersect(y))).collect())
                }
            })
            .collect();
        let mut set = OpenStarSet { contains_center: false, edges };
        set.contains_center = match op {
            SetOp::Union => self.contains_center || other.contains_center,
            SetOp::Intersection => self.contains_center && other.contains_center,
        } && set.covers_center_germ();
        Ok(set)
    }

    pub fn union(&self, other: &OpenStarSet) -> Result<OpenStarSet> {
        self.combine(other, SetOp::Union)
    }

    pub fn intersection(&self, other: &OpenStarSet) -> Result<OpenStarSet> {
        self.combine(other, SetOp::Intersection)
    }

    /// Image under `σ`: the intervals on edge `i` move to edge `σ(i)`.
    pub fn act(&self, sigma: &Permutation) -> OpenStarSet {
        let mut edges = vec![Vec::new(); self.edge_count()];
        for (i, ivs) in self.edges.iter().enumerate() {
            edges[sigma.apply(i)] = ivs.clone();
        }
        OpenStarSet { contains_center: self.contains_center, edges }
    }
}

/// A continuous function on the star: a piecewise polynomial per edge, all
/// with the same limit at the center, which is the center value.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PPFun {
    center: Scalar,
    edges: Vec<Piecewise>,
}

impl PPFun {
    pub fn new(center: Scalar, edges: Vec<Piecewise>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.limit_at_zero() != center {
                return Err(Error::InvalidFunction(format!(
                    "edge {} tends to {} at the center, center value is {center}",
                    i + 1,
                    e.limit_at_zero()
                )));
            }
        }
        Ok(PPFun { center, edges })
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        PPFun { edges: vec![Piecewise::constant(c.clone()); n], center: c }
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, Scalar::zero())
    }

    /// `f` on one edge, zero elsewhere; `f` must vanish at the center.
    pub fn on_edge(n: usize, edge: usize, f: Piecewise) -> Result<Self> {
        let mut edges = vec![Piecewise::zero(); n];
        edges[edge] = f;
        Self::new(Scalar::zero(), edges)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn center_value(&self) -> &Scalar {
        &self.center
    }

    pub fn edge_fn(&self, edge: usize) -> &Piecewise {
        &self.edges[edge]
    }

    pub fn eval(&self, p: &StarPoint) -> Scalar {
        match p {
            StarPoint::Center => self.center.clone(),
            StarPoint::Edge { edge, t } => self.edges[*edge].eval(t),
        }
    }

    fn check_same(&self, other: &PPFun) -> Result<()> {
        if self.edge_count() != other.edge_count() {
            return Err(Error::EdgeCountMismatch { left: self.edge_count(), right: other.edge_count() });
        }
        Ok(())
    }

    pub fn add(&self, other: &PPFun) -> Result<PPFun> {
        self.check_same(other)?;
        Ok(PPFun {
            center: &self.center + &other.center,
            edges: self.edges.iter().zip(&other.edges).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn mul(&self, other: &PPFun) -> Result<PPFun> {
        self.check_same(other)?;
        Ok(PPFun {
            center: &self.center * &other.center,
            edges: self.edges.iter().zip(&other.edges).map(|(a, b)| a.mul(b)).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> PPFun {
        PPFun { center: &self.center * c, edges: self.edges.iter().map(|e| e.scale(c)).collect() }
    }

    pub fn conj(&self) -> PPFun {
        PPFun { center: self.center.conj(), edges: self.edges.iter().map(Piecewise::conj).collect() }
    }

    /// `act(σ, h)(p) = h(σ⁻¹ p)`.
    pub fn act(&self, sigma: &Permutation) -> PPFun {
        let mut edges = vec![Piecewise::zero(); self.edge_count()];
        for (i, e) in self.edges.iter().enumerate() {
            edges[sigma.apply(i)] = e.clone();
        }
        PPFun { center: self.center.clone(), edges }
    }

    /// `h ∘ σ`, i.e. `p ↦ h(σ p)`.
    pub fn compose_perm(&self, sigma: &Permutation) -> PPFun {
        self.act(&sigma.inverse())
    }
}
