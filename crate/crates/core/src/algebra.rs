//! The convolution *-algebra of a star germ groupoid, in a normal form that
//! stores the function on the groupoid: one piecewise polynomial per edge
//! pair `(i, j)` ("strip") plus one value per center germ.
//!
//! Every element satisfies the gluing law
//! `lim_{t→0} f(t, i, j) = Σ_{σ(i) = j} f([σ, 0])`, the trace left by the
//! non-Hausdorff topology near the center.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::germ::{Germ, GermGroupoid};
use crate::perm::Permutation;
use crate::poly::Piecewise;
use crate::scalar::{fmt_rational, rat, Rational, Scalar};
use crate::star::{PPFun, StarPoint};

#[derive(Clone, Debug)]
pub struct AlgebraElement {
    groupoid: Arc<GermGroupoid>,
    strips: BTreeMap<(usize, usize), Piecewise>,
    center: BTreeMap<usize, Scalar>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        same_groupoid(&self.groupoid, &other.groupoid) && self.strips == other.strips && self.center == other.center
    }
}

impl Eq for AlgebraElement {}

fn same_groupoid(a: &Arc<GermGroupoid>, b: &Arc<GermGroupoid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn add_strip(strips: &mut BTreeMap<(usize, usize), Piecewise>, key: (usize, usize), f: Piecewise) {
    let sum = match strips.remove(&key) {
        Some(old) => old.add(&f),
        None => f,
    };
    if !sum.is_zero() {
        strips.insert(key, sum);
    }
}

fn add_center(center: &mut BTreeMap<usize, Scalar>, k: usize, c: Scalar) {
    let sum = match center.remove(&k) {
        Some(old) => old + c,
        None => c,
    };
    if !sum.is_zero() {
        center.insert(k, sum);
    }
}

/// A function on the unit space that may jump at the center: the restriction
/// of an algebra element to the units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictedFunction {
    pub center: Scalar,
    pub edges: Vec<Piecewise>,
}

impl RestrictedFunction {
    pub fn eval(&self, p: &StarPoint) -> Scalar {
        match p {
            StarPoint::Center => self.center.clone(),
            StarPoint::Edge { edge, t } => self.edges[*edge].eval(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.center.is_zero() && self.edges.iter().all(Piecewise::is_zero)
    }

    /// Continuous at the center, i.e. an honest function on the star.
    pub fn is_continuous(&self) -> bool {
        self.edges.iter().all(|e| e.limit_at_zero() == self.center)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceSupport {
    pub lo: String,
    pub hi: String,
    /// Identically zero on this piece; otherwise nonzero off at most
    /// `degree` points.
    pub vanishes: bool,
    pub degree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripSupport {
    pub source_edge: usize,
    pub range_edge: usize,
    pub pieces: Vec<PieceSupport>,
}

/// `supp′(f) = {γ : f(γ) ≠ 0}`, described strip by strip.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportDescriptor {
    pub strips: Vec<StripSupport>,
    pub center: Vec<Permutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BisectionViolation {
    /// Several center germs, all with source and range the center.
    CenterValues { germs: Vec<Permutation> },
    /// Two strips leaving the same edge overlap on `(lo, hi)`.
    SharedSource { edge: usize, ranges: (usize, usize), lo: String, hi: String },
    /// Two strips entering the same edge overlap on `(lo, hi)`.
    SharedRange { edge: usize, sources: (usize, usize), lo: String, hi: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisectionVerdict {
    pub bisection: bool,
    pub violation: Option<BisectionViolation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSegment {
    pub lo: String,
    pub hi: String,
    /// 1-based target edge, `None` where the element vanishes.
    pub target: Option<usize>,
}

/// The partial map `s(γ) ↦ r(γ)` over `supp′(u)`. On each segment it is
/// defined off the finitely many zeros of the strip polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointMap {
    pub edges: Vec<Vec<MapSegment>>,
    pub center_to_center: bool,
}

impl PointMap {
    /// The edge permutation realized by the map when every edge goes wholly
    /// to a single edge.
    pub fn as_edge_permutation(&self) -> Option<Permutation> {
        let images = self
            .edges
            .iter()
            .map(|segs| match segs.as_slice() {
                [MapSegment { target: Some(j), .. }] => Some(j - 1),
                _ => None,
            })
            .collect::<Option<Vec<usize>>>()?;
        Permutation::new(images).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripJson {
    pub source_edge: usize,
    pub range_edge: usize,
    pub function: Piecewise,
}

/// Machine-readable form of an element: strips with 1-based edges and the
/// center values keyed by cycle notation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub strips: Vec<StripJson>,
    pub center: BTreeMap<String, Scalar>,
}

impl AlgebraElement {
    pub fn zero(groupoid: &Arc<GermGroupoid>) -> Self {
        AlgebraElement { groupoid: groupoid.clone(), strips: BTreeMap::new(), center: BTreeMap::new() }
    }

    /// Builds an element from its values, checking admissibility and the
    /// gluing law.
    pub fn from_parts(
        groupoid: &Arc<GermGroupoid>,
        strips: BTreeMap<(usize, usize), Piecewise>,
        center: BTreeMap<Permutation, Scalar>,
    ) -> Result<Self> {
        let mut el = Self::zero(groupoid);
        for ((i, j), f) in strips {
            if !groupoid.is_admissible(i, j) {
                return Err(Error::GermNotInGroupoid(format!("strip ({}, {})", i + 1, j + 1)));
            }
            add_strip(&mut el.strips, (i, j), f);
        }
        for (s, c) in center {
            add_center(&mut el.center, groupoid.group_index(&s)?, c);
        }
        el.validate()?;
        Ok(el)
    }

    /// The sheet `h · 1_{U_σ}`.
    pub fn from_sheet(groupoid: &Arc<GermGroupoid>, sigma: &Permutation, h: &PPFun) -> Result<Self> {
        let k = groupoid.group_index(sigma)?;
        if h.edge_count() != groupoid.edges() {
            return Err(Error::EdgeCountMismatch { left: h.edge_count(), right: groupoid.edges() });
        }
        let mut el = Self::zero(groupoid);
        let perm = groupoid.edge_perm(k);
        for i in 0..groupoid.edges() {
            add_strip(&mut el.strips, (i, perm.apply(i)), h.edge_fn(i).clone());
        }
        add_center(&mut el.center, k, h.center_value().clone());
        Ok(el)
    }

    /// The characteristic function `1_σ` of the bisection `U_σ`.
    pub fn indicator(groupoid: &Arc<GermGroupoid>, sigma: &Permutation) -> Result<Self> {
        Self::from_sheet(groupoid, sigma, &PPFun::constant(groupoid.edges(), Scalar::one()))
    }

    pub fn unit(groupoid: &Arc<GermGroupoid>) -> Self {
        let id = Permutation::identity(groupoid.group().degree());
        Self::indicator(groupoid, &id).expect("identity is in every group")
    }

    /// `C₀(X) → algebra`, supported on the units.
    pub fn embed_c0(groupoid: &Arc<GermGroupoid>, h: &PPFun) -> Result<Self> {
        let id = Permutation::identity(groupoid.group().degree());
        Self::from_sheet(groupoid, &id, h)
    }

    /// `f = 1_id − 1_{σx} − 1_{σy} + 1_{σxσy}` on the cross groupoid.
    pub fn cross_f(groupoid: &Arc<GermGroupoid>) -> Result<Self> {
        if !groupoid.is_cross() {
            return Err(Error::NotCrossGroupoid);
        }
        let [id, sx, sy, sxy] = cross_elements();
        let mut f = Self::indicator(groupoid, &id)?;
        f = f.sub(&Self::indicator(groupoid, &sx)?)?;
        f = f.sub(&Self::indicator(groupoid, &sy)?)?;
        f.add(&Self::indicator(groupoid, &sxy)?)
    }

    pub fn groupoid(&self) -> &Arc<GermGroupoid> {
        &self.groupoid
    }

    pub fn strip(&self, i: usize, j: usize) -> Option<&Piecewise> {
        self.strips.get(&(i, j))
    }

    pub fn strips(&self) -> impl Iterator<Item = ((usize, usize), &Piecewise)> {
        self.strips.iter().map(|(k, f)| (*k, f))
    }

    pub fn center_value(&self, sigma: &Permutation) -> Scalar {
        self.groupoid.group().index_of(sigma).and_then(|k| self.center.get(&k).cloned()).unwrap_or_default()
    }

    /// Center germs carrying a nonzero value.
    pub fn center_support(&self) -> Vec<Permutation> {
        self.center.keys().map(|&k| self.groupoid.group().element(k).clone()).collect()
    }

    /// Checks the gluing law at every admissible edge pair.
    pub fn validate(&self) -> Result<()> {
        let g = &self.groupoid;
        for (i, j) in g.admissible_pairs() {
            let lim = self.strips.get(&(i, j)).map(Piecewise::limit_at_zero).unwrap_or_default();
            let sum: Scalar = g.pair_members(i, j).iter().map(|k| self.center.get(k).cloned().unwrap_or_default()).sum();
            if lim != sum {
                return Err(Error::Verification(format!(
                    "strip ({}, {}) tends to {lim} but the center values over it sum to {sum}",
                    i + 1,
                    j + 1
                )));
            }
        }
        if let Some((i, j)) = self.strips.keys().find(|(i, j)| !g.is_admissible(*i, *j)) {
            return Err(Error::GermNotInGroupoid(format!("strip ({}, {})", i + 1, j + 1)));
        }
        Ok(())
    }

    pub fn is_compatible(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn is_zero(&self) -> bool {
        self.strips.is_empty() && self.center.is_empty()
    }

    fn check_same(&self, other: &AlgebraElement) -> Result<()> {
        if same_groupoid(&self.groupoid, &other.groupoid) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, f) in &other.strips {
            add_strip(&mut out.strips, *k, f.clone());
        }
        for (k, c) in &other.center {
            add_center(&mut out.center, *k, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(&other.scale(&Scalar::int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> AlgebraElement {
        if c.is_zero() {
            return Self::zero(&self.groupoid);
        }
        AlgebraElement {
            groupoid: self.groupoid.clone(),
            strips: self.strips.iter().map(|(k, f)| (*k, f.scale(c))).collect(),
            center: self.center.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// `f*(γ) = conj f(γ⁻¹)`.
    pub fn adjoint(&self) -> AlgebraElement {
        let g = self.groupoid.group();
        AlgebraElement {
            groupoid: self.groupoid.clone(),
            strips: self.strips.iter().map(|(&(i, j), f)| ((j, i), f.conj())).collect(),
            center: self.center.iter().map(|(&k, v)| (g.inv_index(k), v.conj())).collect(),
        }
    }

    /// `(f * g)(γ) = Σ_{αβ = γ} f(α) g(β)`. On strips this reads
    /// `(f*g)(t, i, j) = Σ_k f(t, k, j) g(t, i, k)`; at the center it is the
    /// group algebra product.
    pub fn convolve(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.groupoid);
        for (&(k, j), f) in &self.strips {
            for (&(i, k2), g) in &other.strips {
                if k == k2 {
                    add_strip(&mut out.strips, (i, j), f.mul(g));
                }
            }
        }
        let group = self.groupoid.group();
        for (&a, x) in &self.center {
            for (&b, y) in &other.center {
                add_center(&mut out.center, group.mul_index(a, b), x * y);
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.convolve(other)?.sub(&other.convolve(self)?)
    }

    pub fn evaluate(&self, germ: &Germ) -> Result<Scalar> {
        if !self.groupoid.contains(germ) {
            return Err(Error::GermNotInGroupoid(germ.to_string()));
        }
        Ok(match germ {
            Germ::Edge { t, src, rng } => self.strips.get(&(*src, *rng)).map(|f| f.eval(t)).unwrap_or_default(),
            Germ::Center { sigma } => self.center_value(sigma),
        })
    }

    /// The restriction to the unit space.
    pub fn conditional_expectation(&self) -> RestrictedFunction {
        let id = self.groupoid.group().identity_index();
        RestrictedFunction {
            center: self.center.get(&id).cloned().unwrap_or_default(),
            edges: (0..self.groupoid.edges())
                .map(|i| self.strips.get(&(i, i)).cloned().unwrap_or_else(Piecewise::zero))
                .collect(),
        }
    }

    /// `g ↦ g(I) − g(σx) − g(σy) + g(σxσy)` on the cross groupoid.
    pub fn lambda_scalar(&self) -> Result<Scalar> {
        if !self.groupoid.is_cross() {
            return Err(Error::NotCrossGroupoid);
        }
        let [id, sx, sy, sxy] = cross_elements();
        Ok(self.center_value(&id) - self.center_value(&sx) - self.center_value(&sy) + self.center_value(&sxy))
    }

    /// A non-unit germ where the element does not vanish; `None` exactly when
    /// the element lies in the image of `C₀(X)`.
    pub fn nonunit_witness(&self) -> Option<Germ> {
        let id = self.groupoid.group().identity_index();
        if let Some((&k, _)) = self.center.iter().find(|(k, _)| **k != id) {
            return Some(Germ::Center { sigma: self.groupoid.group().element(k).clone() });
        }
        self.strips.iter().find(|((i, j), _)| i != j).map(|(&(i, j), f)| {
            let t = nonzero_point(f).expect("stored strips are nonzero");
            Germ::Edge { t, src: i, rng: j }
        })
    }

    pub fn is_in_c0(&self) -> bool {
        self.nonunit_witness().is_none()
    }

    pub fn open_support(&self) -> SupportDescriptor {
        SupportDescriptor {
            strips: self
                .strips
                .iter()
                .map(|(&(i, j), f)| StripSupport {
                    source_edge: i + 1,
                    range_edge: j + 1,
                    pieces: f
                        .intervals()
                        .map(|(lo, hi, p)| PieceSupport {
                            lo: fmt_rational(lo),
                            hi: fmt_rational(hi),
                            vanishes: p.is_zero(),
                            degree: p.degree(),
                        })
                        .collect(),
                })
                .collect(),
            center: self.center_support(),
        }
    }

    /// Whether `supp′(f)` is a bisection, with the first violation found.
    pub fn is_bisection_support(&self) -> BisectionVerdict {
        let violation = self.bisection_violation();
        BisectionVerdict { bisection: violation.is_none(), violation }
    }

    fn bisection_violation(&self) -> Option<BisectionViolation> {
        if self.center.len() >= 2 {
            return Some(BisectionViolation::CenterValues { germs: self.center_support() });
        }
        let n = self.groupoid.edges();
        for e in 0..n {
            let out: Vec<(usize, &Piecewise)> = (0..n).filter_map(|j| self.strips.get(&(e, j)).map(|f| (j, f))).collect();
            if let Some((a, b, lo, hi)) = overlapping_pair(&out) {
                return Some(BisectionViolation::SharedSource { edge: e + 1, ranges: (a + 1, b + 1), lo, hi });
            }
            let inc: Vec<(usize, &Piecewise)> = (0..n).filter_map(|i| self.strips.get(&(i, e)).map(|f| (i, f))).collect();
            if let Some((a, b, lo, hi)) = overlapping_pair(&inc) {
                return Some(BisectionViolation::SharedRange { edge: e + 1, sources: (a + 1, b + 1), lo, hi });
            }
        }
        None
    }

    /// The partial point map induced by a unitary `u`: each source point of
    /// `supp′(u)` goes to the range of the germ over it.
    pub fn induced_point_map(&self) -> Result<PointMap> {
        let unit = Self::unit(&self.groupoid);
        let star = self.adjoint();
        if star.convolve(self)? != unit || self.convolve(&star)? != unit {
            return Err(Error::NotUnitary("u*u and uu* must both be the unit".into()));
        }
        let n = self.groupoid.edges();
        let mut edges = Vec::with_capacity(n);
        for i in 0..n {
            let out: Vec<(usize, &Piecewise)> = (0..n).filter_map(|j| self.strips.get(&(i, j)).map(|f| (j, f))).collect();
            let breaks = Piecewise::common_breaks(out.iter().map(|(_, f)| *f));
            let mut segs: Vec<MapSegment> = Vec::new();
            for w in breaks.windows(2) {
                let targets: Vec<usize> =
                    out.iter().filter(|(_, f)| !f.poly_on(&w[0], &w[1]).is_zero()).map(|(j, _)| j + 1).collect();
                if targets.len() > 1 {
                    return Err(Error::MultiValued {
                        edge: i + 1,
                        lo: fmt_rational(&w[0]),
                        hi: fmt_rational(&w[1]),
                        targets,
                    });
                }
                let target = targets.first().copied();
                match segs.last_mut() {
                    Some(last) if last.target == target => last.hi = fmt_rational(&w[1]),
                    _ => segs.push(MapSegment { lo: fmt_rational(&w[0]), hi: fmt_rational(&w[1]), target }),
                }
            }
            edges.push(segs);
        }
        Ok(PointMap { edges, center_to_center: !self.center.is_empty() })
    }

    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            strips: self
                .strips
                .iter()
                .map(|(&(i, j), f)| StripJson { source_edge: i + 1, range_edge: j + 1, function: f.clone() })
                .collect(),
            center: self.center.iter().map(|(&k, v)| (self.groupoid.group().element(k).to_string(), v.clone())).collect(),
        }
    }
}

/// `[I, σx, σy, σxσy]` as permutations of the four half-axes.
pub fn cross_elements() -> [Permutation; 4] {
    let sx = Permutation::from_cycles(4, &[&[0, 1]]).unwrap();
    let sy = Permutation::from_cycles(4, &[&[2, 3]]).unwrap();
    let sxy = sx.compose(&sy);
    [Permutation::identity(4), sx, sy, sxy]
}

/// A point of `(0, 1]` where a nonzero piecewise polynomial does not vanish.
fn nonzero_point(f: &Piecewise) -> Option<Rational> {
    let (lo, hi, p) = f.intervals().find(|(_, _, p)| !p.is_zero())?;
    sample_points(lo, hi, p.degree().unwrap_or(0) + 1).into_iter().find(|t| !p.eval(t).is_zero())
}

/// `count` distinct rationals strictly inside `(lo, hi)`.
pub fn sample_points(lo: &Rational, hi: &Rational, count: usize) -> Vec<Rational> {
    let width = hi - lo;
    (1..=count).map(|k| lo + &width * rat(k as i64, count as i64 + 1)).collect()
}

/// First pair of listed functions both not identically zero on a common
/// subinterval.
fn overlapping_pair(fs: &[(usize, &Piecewise)]) -> Option<(usize, usize, String, String)> {
    for (x, (a, f)) in fs.iter().enumerate() {
        for (b, g) in &fs[x + 1..] {
            let breaks = Piecewise::common_breaks([*f, *g]);
            for w in breaks.windows(2) {
                if !f.poly_on(&w[0], &w[1]).is_zero() && !g.poly_on(&w[0], &w[1]).is_zero() {
                    return Some((*a, *b, fmt_rational(&w[0]), fmt_rational(&w[1])));
                }
            }
        }
    }
    None
}

/// Outcome of testing `g*f = f*g = λ(g) f` for one `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralTest {
    pub lambda: Scalar,
    pub left_holds: bool,
    pub right_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralIdealReport {
    pub tests: Vec<CentralTest>,
    pub all_hold: bool,
    /// A non-unit germ where `f` is nonzero, certifying `f ∉ C₀(X)`.
    pub outside_c0_witness: Option<Germ>,
    /// `span{f} ∩ C₀(X) = {0}`.
    pub meets_c0_trivially: bool,
}

/// Checks that `span{f}` is a two-sided ideal against the given test
/// elements, via `g*f = f*g = λ(g)·f`, and that it avoids `C₀(X)`.
pub fn verify_central_ideal(f: &AlgebraElement, tests: &[AlgebraElement]) -> Result<CentralIdealReport> {
    let mut out = Vec::with_capacity(tests.len());
    for g in tests {
        let lambda = g.lambda_scalar()?;
        let target = f.scale(&lambda);
        out.push(CentralTest { left_holds: g.convolve(f)? == target, right_holds: f.convolve(g)? == target, lambda });
    }
    Ok(central_report(f, out))
}

pub(crate) fn central_report(f: &AlgebraElement, tests: Vec<CentralTest>) -> CentralIdealReport {
    let witness = f.nonunit_witness();
    // c·f ∈ C₀(X) forces c = 0 once f itself is not in C₀(X)
    let meets_c0_trivially = !f.is_zero() && witness.is_some();
    CentralIdealReport {
        all_hold: tests.iter().all(|t| t.left_holds && t.right_holds),
        tests,
        outside_c0_witness: witness,
        meets_c0_trivially,
    }
}

/// Independent evaluation of a product at one germ: enumerate the
/// factorizations `γ = αβ` through the fiber `s⁻¹(s(γ))` and sum
/// `f(α) g(β)`.
pub fn convolve_at(f: &AlgebraElement, g: &AlgebraElement, gamma: &Germ) -> Result<Scalar> {
    let groupoid = f.groupoid();
    let mut acc = Scalar::zero();
    for beta in groupoid.arrows_with_source(&gamma.source()) {
        let alpha = gamma.compose(&beta.inverse())?;
        acc += &(f.evaluate(&alpha)? * g.evaluate(&beta)?);
    }
    Ok(acc)
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<AlgebraElement>();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_cycles;
    use crate::poly::Poly;
    use crate::scalar::rat_int;

    fn cross() -> Arc<GermGroupoid> {
        Arc::new(GermGroupoid::cross())
    }

    #[test]
    fn sheet_constructors() {
        let g = cross();
        let unit = AlgebraElement::unit(&g);
        assert_eq!(unit, AlgebraElement::embed_c0(&g, &PPFun::constant(4, Scalar::one())).unwrap());
        let [_, sx, ..] = cross_elements();
        let fx = AlgebraElement::indicator(&g, &sx).unwrap();
        assert_eq!(fx.center_support(), vec![sx.clone()]);
        let keys: Vec<(usize, usize)> = fx.strips().map(|(k, _)| k).collect();
        assert_eq!(keys, vec![(0, 1), (1, 0), (2, 2), (3, 3)]);
        assert!(AlgebraElement::from_sheet(&g, &sx, &PPFun::zero(4)).unwrap().is_zero());
        assert!(AlgebraElement::indicator(&g, &parse_cycles("(1 3)", 4).unwrap()).is_err());
    }

    #[test]
    fn cross_f_value_table() {
        let g = cross();
        let f = AlgebraElement::cross_f(&g).unwrap();
        let expected = [1, -1, -1, 1];
        for (s, v) in cross_elements().iter().zip(expected) {
            assert_eq!(f.evaluate(&Germ::Center { sigma: s.clone() }).unwrap(), Scalar::int(v));
        }
        assert_eq!(f.strips().count(), 0);
        assert_eq!(f.evaluate(&Germ::edge(rat(1, 2), 0, 0)).unwrap(), Scalar::zero());
        assert!(f.evaluate(&Germ::edge(rat(1, 2), 0, 2)).is_err());
        assert!(f.is_compatible());
        assert_eq!(f.lambda_scalar().unwrap(), Scalar::int(4));
        assert_eq!(f.convolve(&f).unwrap(), f.scale(&Scalar::int(4)));
        let e = f.conditional_expectation();
        assert_eq!(e.center, Scalar::one());
        assert!(e.edges.iter().all(Piecewise::is_zero));
        assert!(!e.is_continuous());
    }

    #[test]
    fn group_relations_of_indicators() {
        let g = Arc::new(GermGroupoid::alternating_star(4));
        let els = g.group().elements().to_vec();
        for s in &els[..4] {
            for t in &els[..4] {
                let lhs = AlgebraElement::indicator(&g, s).unwrap().convolve(&AlgebraElement::indicator(&g, t).unwrap()).unwrap();
                assert_eq!(lhs, AlgebraElement::indicator(&g, &s.compose(t)).unwrap());
            }
        }
    }

    #[test]
    fn lambda_of_generators() {
        let g = cross();
        let [_, sx, ..] = cross_elements();
        assert_eq!(AlgebraElement::unit(&g).lambda_scalar().unwrap(), Scalar::one());
        let fx = AlgebraElement::indicator(&g, &sx).unwrap();
        assert_eq!(fx.lambda_scalar().unwrap(), Scalar::int(-1));
        let f = AlgebraElement::cross_f(&g).unwrap();
        let prod = fx.convolve(&f).unwrap();
        assert_eq!(prod.center_value(&Permutation::identity(4)), Scalar::int(-1));
        assert_eq!(prod, f.scale(&Scalar::int(-1)));
        let a4 = Arc::new(GermGroupoid::alternating_star(4));
        assert!(AlgebraElement::unit(&a4).lambda_scalar().is_err());
    }

    #[test]
    fn compatibility_validator_catches_broken_gluing() {
        let g = cross();
        let mut strips = BTreeMap::new();
        strips.insert((0, 0), Piecewise::constant(Scalar::one()));
        assert!(AlgebraElement::from_parts(&g, strips.clone(), BTreeMap::new()).is_err());
        let mut center = BTreeMap::new();
        center.insert(Permutation::identity(4), Scalar::one());
        center.insert(cross_elements()[2].clone(), Scalar::int(-1));
        // (1,1) is reached by id and σy, whose center values cancel
        strips.clear();
        for (k, v) in [((2, 2), 1), ((3, 3), 1), ((2, 3), -1), ((3, 2), -1)] {
            strips.insert(k, Piecewise::constant(Scalar::int(v)));
        }
        let el = AlgebraElement::from_parts(&g, strips, center).unwrap();
        assert!(el.is_compatible());
    }

    #[test]
    fn support_and_bisection() {
        let g = cross();
        let f = AlgebraElement::cross_f(&g).unwrap();
        let v = f.is_bisection_support();
        assert!(!v.bisection);
        assert!(matches!(v.violation, Some(BisectionViolation::CenterValues { ref germs }) if germs.len() == 4));
        assert_eq!(f.open_support().center.len(), 4);
        let [_, sx, ..] = cross_elements();
        let fx = AlgebraElement::indicator(&g, &sx).unwrap();
        assert!(fx.is_bisection_support().bisection);
        assert_eq!(fx.open_support().strips.len(), 4);
        let sum = fx.add(&AlgebraElement::unit(&g)).unwrap();
        assert!(!sum.is_bisection_support().bisection);
    }

    #[test]
    fn point_maps() {
        let g = Arc::new(GermGroupoid::alternating_star(4));
        let s = parse_cycles("(1 2 3)", 4).unwrap();
        let m = AlgebraElement::indicator(&g, &s).unwrap().induced_point_map().unwrap();
        assert_eq!(m.as_edge_permutation(), Some(s));
        assert!(m.center_to_center);
        let id = AlgebraElement::unit(&g).induced_point_map().unwrap();
        assert!(id.as_edge_permutation().unwrap().is_identity());
        let two = AlgebraElement::unit(&g).scale(&Scalar::int(2));
        assert!(matches!(two.induced_point_map(), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn expectation_of_positive_element() {
        let g = cross();
        let t = Piecewise::from_poly(Poly::identity());
        let h = PPFun::on_edge(4, 0, t).unwrap();
        let [_, sx, ..] = cross_elements();
        let f = AlgebraElement::from_sheet(&g, &sx, &h).unwrap().add(&AlgebraElement::unit(&g)).unwrap();
        let e = f.adjoint().convolve(&f).unwrap().conditional_expectation();
        // edge 1: |1|² + |t|² from the strips (1,1) and (1,2)
        let x = rat(1, 3);
        assert_eq!(e.eval(&StarPoint::edge(0, x.clone()).unwrap()), Scalar::real(rat_int(1) + &x * &x));
        assert_eq!(e.center, Scalar::one());
        assert!(AlgebraElement::unit(&g).conditional_expectation().is_continuous());
    }
}
