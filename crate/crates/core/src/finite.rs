//! Finite (discrete, hence Hausdorff) groupoids and their convolution
//! algebras, realized concretely through the left regular representation.
//!
//! Exact Gaussian-rational arithmetic is used wherever it is cheap; operator
//! norms and the splitting of the center into minimal projections are
//! floating point, and every numeric verdict carries its residual.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::par::{map_indexed, map_slice, Execution};
use crate::perm::{parse_cycles, PermGroup};
use crate::random::{self, trial_rng};
use crate::scalar::Scalar;

pub type C64 = Complex<f64>;

/// Numeric tolerance for residuals, rank decisions and norm inequalities.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub rng: usize,
}

/// A finite groupoid with explicit composition table. Arrows `0..units` are
/// the identities.
#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    unit_names: Vec<String>,
    arrows: Vec<Arrow>,
    comp: Vec<Option<usize>>,
    inverse: Vec<usize>,
    by_range: Vec<Vec<usize>>,
    by_source: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitArrow {
    pub name: String,
    pub src: String,
    pub rng: String,
}

/// JSON description of a finite groupoid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiniteSpec {
    /// `X ⋊ Γ` for a permutation group acting on `{1..points}`; generators
    /// may move extra points up to `degree`, which lets a group act
    /// non-faithfully on the points.
    Transformation { points: usize, group_generators: Vec<String>, #[serde(default)] degree: Option<usize> },
    /// Equivalence relation with the given classes (1-based points); points
    /// not listed are singletons.
    Equivalence { points: usize, #[serde(default)] classes: Vec<Vec<usize>> },
    /// Units, non-unit arrows and composition triples `[a, b, a∘b]`.
    Explicit { units: Vec<String>, arrows: Vec<ExplicitArrow>, composition: Vec<[String; 3]> },
}

impl FiniteSpec {
    /// Parses a spec file; syntax errors report line and column.
    pub fn parse(text: &str) -> Result<FiniteSpec> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::Spec(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        let obj = v.as_object().ok_or_else(|| Error::Spec("top level must be an object".into()))?;
        let spec = if let Some(t) = obj.get("transformation") {
            serde_json::from_value::<TransformationBody>(t.clone()).map(|b| FiniteSpec::Transformation {
                points: b.points,
                group_generators: b.group_generators,
                degree: b.degree,
            })
        } else if let Some(e) = obj.get("equivalence") {
            serde_json::from_value::<EquivalenceBody>(e.clone())
                .map(|b| FiniteSpec::Equivalence { points: b.points, classes: b.classes })
        } else {
            serde_json::from_value::<ExplicitBody>(v.clone())
                .map(|b| FiniteSpec::Explicit { units: b.units, arrows: b.arrows, composition: b.composition })
        };
        spec.map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn build(&self) -> Result<FiniteGroupoid> {
        match self {
            FiniteSpec::Transformation { points, group_generators, degree } => {
                let degree = degree.unwrap_or(*points);
                let gens = group_generators.iter().map(|g| parse_cycles(g, degree)).collect::<Result<Vec<_>>>()?;
                FiniteGroupoid::transformation(*points, &PermGroup::generate(degree, gens)?)
            }
            FiniteSpec::Equivalence { points, classes } => {
                let classes: Vec<Vec<usize>> = classes.iter().map(|c| c.iter().map(|p| p.wrapping_sub(1)).collect()).collect();
                FiniteGroupoid::equivalence(*points, &classes)
            }
            FiniteSpec::Explicit { units, arrows, composition } => FiniteGroupoid::explicit(units, arrows, composition),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransformationBody {
    points: usize,
    #[serde(default)]
    group_generators: Vec<String>,
    #[serde(default)]
    degree: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EquivalenceBody {
    points: usize,
    #[serde(default)]
    classes: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitBody {
    units: Vec<String>,
    #[serde(default)]
    arrows: Vec<ExplicitArrow>,
    #[serde(default)]
    composition: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSummary {
    pub units: usize,
    pub arrows: usize,
    pub orbits: Vec<Vec<String>>,
    /// Order of the isotropy group at each unit.
    pub isotropy_orders: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Principality {
    pub principal: bool,
    /// Equal to `principal` in the discrete topology.
    pub essentially_principal: bool,
}

impl FiniteGroupoid {
    fn assemble(unit_names: Vec<String>, arrows: Vec<Arrow>, comp: Vec<Option<usize>>) -> Result<Self> {
        let u = unit_names.len();
        let a = arrows.len();
        let mut by_range = vec![Vec::new(); u];
        let mut by_source = vec![Vec::new(); u];
        for (k, ar) in arrows.iter().enumerate() {
            by_range[ar.rng].push(k);
            by_source[ar.src].push(k);
        }
        let mut g = FiniteGroupoid { unit_names, arrows, comp, inverse: vec![usize::MAX; a], by_range, by_source };
        g.validate()?;
        Ok(g)
    }

    /// Checks the groupoid axioms and fills in inverses.
    fn validate(&mut self) -> Result<()> {
        let n = self.arrows.len();
        let name = |k: usize| self.arrows[k].name.clone();
        for a in 0..n {
            for &b in &self.by_range[self.arrows[a].src] {
                let Some(c) = self.comp[a * n + b] else {
                    return Err(Error::Axiom(format!("({}, {}) composable but no composite given", name(a), name(b))));
                };
                if self.arrows[c].src != self.arrows[b].src || self.arrows[c].rng != self.arrows[a].rng {
                    return Err(Error::Axiom(format!(
                        "composite {} of ({}, {}) has wrong source or range",
                        name(c),
                        name(a),
                        name(b)
                    )));
                }
            }
        }
        for a in 0..n {
            let (s, r) = (self.arrows[a].src, self.arrows[a].rng);
            if self.comp[a * n + s] != Some(a) || self.comp[r * n + a] != Some(a) {
                return Err(Error::Axiom(format!("units do not act neutrally on {}", name(a))));
            }
        }
        for a in 0..n {
            for &b in &self.by_range[self.arrows[a].src] {
                let ab = self.comp[a * n + b].unwrap();
                for &c in &self.by_range[self.arrows[b].src] {
                    let bc = self.comp[b * n + c].unwrap();
                    if self.comp[ab * n + c] != self.comp[a * n + bc] {
                        return Err(Error::Axiom(format!(
                            "associativity fails on the triple ({}, {}, {})",
                            name(a),
                            name(b),
                            name(c)
                        )));
                    }
                }
            }
        }
        for a in 0..n {
            let (s, r) = (self.arrows[a].src, self.arrows[a].rng);
            let inv = self.by_source[r]
                .iter()
                .copied()
                .find(|&b| self.arrows[b].rng == s && self.comp[a * n + b] == Some(r) && self.comp[b * n + a] == Some(s))
                .ok_or_else(|| Error::Axiom(format!("{} has no inverse", name(a))))?;
            self.inverse[a] = inv;
        }
        Ok(())
    }

    /// Builds a groupoid from a composition table given by names. Unit
    /// compositions are implicit.
    pub fn explicit(units: &[String], arrows: &[ExplicitArrow], triples: &[[String; 3]]) -> Result<Self> {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut all: Vec<Arrow> = Vec::new();
        for (k, u) in units.iter().enumerate() {
            if index.insert(u.clone(), k).is_some() {
                return Err(Error::Spec(format!("duplicate unit {u}")));
            }
            all.push(Arrow { name: u.clone(), src: k, rng: k });
        }
        for a in arrows {
            let unit = |n: &str| {
                units.iter().position(|u| u == n).ok_or_else(|| Error::Spec(format!("arrow {} refers to unknown unit {n}", a.name)))
            };
            let (src, rng) = (unit(&a.src)?, unit(&a.rng)?);
            if index.insert(a.name.clone(), all.len()).is_some() {
                return Err(Error::Spec(format!("duplicate arrow {}", a.name)));
            }
            all.push(Arrow { name: a.name.clone(), src, rng });
        }
        let n = all.len();
        let mut comp = vec![None; n * n];
        for (k, a) in all.iter().enumerate() {
            comp[a.rng * n + k] = Some(k);
            comp[k * n + a.src] = Some(k);
        }
        for [a, b, c] in triples {
            let look = |s: &String| index.get(s).copied().ok_or_else(|| Error::Spec(format!("unknown arrow {s} in composition")));
            let (ia, ib, ic) = (look(a)?, look(b)?, look(c)?);
            if all[ia].src != all[ib].rng {
                return Err(Error::Axiom(format!("({a}, {b}, {c}): {a} and {b} are not composable")));
            }
            match comp[ia * n + ib] {
                Some(prev) if prev != ic => {
                    return Err(Error::Axiom(format!("({a}, {b}, {c}): composite already defined as {}", all[prev].name)))
                }
                _ => comp[ia * n + ib] = Some(ic),
            }
        }
        Self::assemble(units.to_vec(), all, comp)
    }

    /// The transformation groupoid `X ⋊ Γ` with arrows `(σ, x): x → σx`.
    pub fn transformation(points: usize, group: &PermGroup) -> Result<Self> {
        if group.degree() < points {
            return Err(Error::EdgeCountMismatch { left: points, right: group.degree() });
        }
        for s in group.elements() {
            if (0..points).any(|x| s.apply(x) >= points) {
                return Err(Error::Spec(format!("{s} does not preserve the {points} points")));
            }
        }
        let id = group.identity_index();
        // unit arrows first: (id, x) gets index x
        let mut order: Vec<usize> = vec![id];
        order.extend((0..group.order()).filter(|&k| k != id));
        let mut slot = vec![0; group.order()];
        for (pos, &k) in order.iter().enumerate() {
            slot[k] = pos;
        }
        let idx = |k: usize, x: usize| slot[k] * points + x;
        let mut arrows = Vec::with_capacity(points * group.order());
        for &k in &order {
            let s = group.element(k);
            for x in 0..points {
                let name = if k == id { format!("{}", x + 1) } else { format!("{s}@{}", x + 1) };
                arrows.push(Arrow { name, src: x, rng: s.apply(x) });
            }
        }
        let n = arrows.len();
        let mut comp = vec![None; n * n];
        for a in 0..group.order() {
            for b in 0..group.order() {
                for x in 0..points {
                    // (a, b x)(b, x) = (ab, x)
                    let bx = group.element(b).apply(x);
                    comp[idx(a, bx) * n + idx(b, x)] = Some(idx(group.mul_index(a, b), x));
                }
            }
        }
        let units = (1..=points).map(|x| x.to_string()).collect();
        Self::assemble(units, arrows, comp)
    }

    /// The equivalence relation whose classes are given (0-based points).
    pub fn equivalence(points: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut class_of: Vec<usize> = (0..points).collect();
        let mut seen = vec![false; points];
        for (c, members) in classes.iter().enumerate() {
            for &p in members {
                if p >= points || seen[p] {
                    return Err(Error::Spec(format!("point {} invalid or repeated in the classes", p.wrapping_add(1))));
                }
                seen[p] = true;
                class_of[p] = points + c;
            }
        }
        let mut arrows: Vec<Arrow> = (0..points).map(|x| Arrow { name: (x + 1).to_string(), src: x, rng: x }).collect();
        let mut index: HashMap<(usize, usize), usize> = (0..points).map(|x| ((x, x), x)).collect();
        for x in 0..points {
            for y in 0..points {
                if x != y && class_of[x] == class_of[y] {
                    index.insert((y, x), arrows.len());
                    arrows.push(Arrow { name: format!("{}<-{}", y + 1, x + 1), src: x, rng: y });
                }
            }
        }
        let n = arrows.len();
        let mut comp = vec![None; n * n];
        for (&(z, y), &a) in &index {
            for (&(y2, x), &b) in &index {
                if y == y2 {
                    comp[a * n + b] = Some(index[&(z, x)]);
                }
            }
        }
        let units = (1..=points).map(|x| x.to_string()).collect();
        Self::assemble(units, arrows, comp)
    }

    pub fn full_equivalence(points: usize) -> Self {
        Self::equivalence(points, &[(0..points).collect()]).expect("one class")
    }

    pub fn units_only(points: usize) -> Self {
        Self::equivalence(points, &[]).expect("no classes")
    }

    pub fn unit_count(&self) -> usize {
        self.unit_names.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn unit_names(&self) -> &[String] {
        &self.unit_names
    }

    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.comp[a * self.arrows.len() + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `s⁻¹(x)`.
    pub fn fiber(&self, x: usize) -> &[usize] {
        &self.by_source[x]
    }

    /// Isotropy arrows `G(x)` at a unit, the unit included.
    pub fn isotropy(&self, x: usize) -> Vec<usize> {
        self.by_source[x].iter().copied().filter(|&a| self.arrows[a].rng == x).collect()
    }

    pub fn summary(&self) -> FiniteSummary {
        let u = self.unit_count();
        let mut orbit_of = vec![usize::MAX; u];
        let mut orbits = Vec::new();
        for x in 0..u {
            if orbit_of[x] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = self.by_source[x].iter().map(|&a| self.arrows[a].rng).collect();
            let mut names: Vec<usize> = members.clone();
            names.sort();
            names.dedup();
            for &m in &names {
                orbit_of[m] = orbits.len();
            }
            orbits.push(names.iter().map(|&m| self.unit_names[m].clone()).collect());
        }
        FiniteSummary {
            units: u,
            arrows: self.arrow_count(),
            orbits,
            isotropy_orders: (0..u).map(|x| self.isotropy(x).len()).collect(),
        }
    }

    pub fn principality(&self) -> Principality {
        let principal = self.arrows.iter().enumerate().all(|(k, a)| k < self.unit_count() || a.src != a.rng);
        Principality { principal, essentially_principal: principal }
    }

    pub fn zero(&self) -> Vec<Scalar> {
        vec![Scalar::zero(); self.arrow_count()]
    }

    pub fn delta(&self, a: usize) -> Vec<Scalar> {
        let mut v = self.zero();
        v[a] = Scalar::one();
        v
    }

    /// The unit of the algebra, the indicator of the units.
    pub fn identity(&self) -> Vec<Scalar> {
        let mut v = self.zero();
        v[..self.unit_count()].fill(Scalar::one());
        v
    }

    /// `(f * g)(γ) = Σ_{αβ = γ} f(α) g(β)`.
    pub fn convolve(&self, f: &[Scalar], g: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.zero();
        for (a, fa) in f.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for &b in &self.by_range[self.arrows[a].src] {
                if !g[b].is_zero() {
                    out[self.compose(a, b).unwrap()] += &(fa * &g[b]);
                }
            }
        }
        out
    }

    pub fn convolve_num(&self, f: &[C64], g: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.arrow_count()];
        for (a, fa) in f.iter().enumerate() {
            if *fa == C64::new(0.0, 0.0) {
                continue;
            }
            for &b in &self.by_range[self.arrows[a].src] {
                out[self.compose(a, b).unwrap()] += fa * g[b];
            }
        }
        out
    }

    /// `f*(γ) = conj f(γ⁻¹)`.
    pub fn adjoint(&self, f: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.zero();
        for (a, v) in f.iter().enumerate() {
            out[self.inverse[a]] = v.conj();
        }
        out
    }

    pub fn adjoint_num(&self, f: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); f.len()];
        for (a, v) in f.iter().enumerate() {
            out[self.inverse[a]] = v.conj();
        }
        out
    }

    /// Restriction to the units.
    pub fn expectation(&self, f: &[Scalar]) -> Vec<Scalar> {
        f[..self.unit_count()].to_vec()
    }

    /// `λ_x(f)` on `ℓ²(s⁻¹(x))`: entry `(γ, β)` is `f(γβ⁻¹)`.
    pub fn regular_block(&self, f: &[Scalar], x: usize) -> Matrix {
        let fib = &self.by_source[x];
        Matrix::from_fn(fib.len(), fib.len(), |r, c| {
            f[self.compose(fib[r], self.inverse[fib[c]]).unwrap()].clone()
        })
    }

    pub fn regular_rep(&self, f: &[Scalar]) -> Vec<Matrix> {
        (0..self.unit_count()).map(|x| self.regular_block(f, x)).collect()
    }

    fn regular_block_num(&self, f: &[C64], x: usize) -> DMatrix<C64> {
        let fib = &self.by_source[x];
        DMatrix::from_fn(fib.len(), fib.len(), |r, c| f[self.compose(fib[r], self.inverse[fib[c]]).unwrap()])
    }

    /// Operator norm of the regular representation: the largest singular
    /// value over all blocks.
    pub fn operator_norm_num(&self, f: &[C64]) -> f64 {
        (0..self.unit_count())
            .map(|x| largest_singular_value(&self.regular_block_num(f, x)))
            .fold(0.0, f64::max)
    }

    pub fn operator_norm(&self, f: &[Scalar]) -> f64 {
        self.operator_norm_num(&to_num(f))
    }

    /// Dimension of `λ_x(C[G])` as a space of matrices.
    pub fn regular_image_dimension(&self, x: usize) -> usize {
        let rows: Vec<Vec<Scalar>> = (0..self.arrow_count())
            .map(|a| self.regular_block(&self.delta(a), x).entries().to_vec())
            .collect();
        Matrix::from_rows(rows).map(|m| m.rank()).unwrap_or(0)
    }

    /// Exact commutant of the diagonal subalgebra. Since
    /// `(c δ_x − δ_x c)(γ) = c(γ) (1[s(γ) = x] − 1[r(γ) = x])`, the system
    /// decouples into one equation per arrow, nontrivial exactly off the
    /// isotropy.
    pub fn diagonal_commutant_dimension(&self) -> usize {
        let constrained = (0..self.arrow_count())
            .filter(|&g| (0..self.unit_count()).any(|x| (self.arrows[g].src == x) != (self.arrows[g].rng == x)))
            .count();
        self.arrow_count() - constrained
    }

    pub fn diagonal_masa_check(&self) -> MasaReport {
        let dim = self.diagonal_commutant_dimension();
        MasaReport { masa: dim == self.unit_count(), commutant_dimension: dim, units: self.unit_count() }
    }

    /// Conjugacy classes of isotropy arrows (`γ ~ aγa⁻¹`); their indicators
    /// form a basis of the center.
    pub fn center_classes(&self) -> Vec<Vec<usize>> {
        let n = self.arrow_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let iso: Vec<usize> = (0..n).filter(|&g| self.arrows[g].src == self.arrows[g].rng).collect();
        for &g in &iso {
            let x = self.arrows[g].src;
            for &a in &self.by_source[x] {
                let conj = self.compose(self.compose(a, g).unwrap(), self.inverse[a]).unwrap();
                let (ra, rb) = (find(&mut parent, g), find(&mut parent, conj));
                parent[ra] = rb;
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &g in &iso {
            let r = find(&mut parent, g);
            classes.entry(r).or_default().push(g);
        }
        let mut out: Vec<Vec<usize>> = classes.into_values().collect();
        out.sort();
        out
    }

    /// Minimal central projections by spectral splitting of a random
    /// self-adjoint central element.
    pub fn center_decomposition(&self, seed: u64) -> Result<CenterDecomposition> {
        let classes = self.center_classes();
        let m = classes.len();
        let n = self.arrow_count();
        let class_vec = |c: &[usize]| {
            let mut v = vec![C64::new(0.0, 0.0); n];
            for &g in c {
                v[g] = C64::new(1.0, 0.0);
            }
            v
        };
        let mut last_err = String::new();
        for attempt in 0..8u64 {
            let mut rng = trial_rng(seed, attempt);
            let mut h = vec![C64::new(0.0, 0.0); n];
            for c in &classes {
                let b = class_vec(c);
                let bs = self.adjoint_num(&b);
                let (r1, r2): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                for k in 0..n {
                    // r1 (b + b*) + i r2 (b − b*) is self-adjoint
                    h[k] += (b[k] + bs[k]) * r1 + (b[k] - bs[k]) * C64::new(0.0, r2);
                }
            }
            let lh = DMatrix::from_fn(n, n, |r, c| {
                if self.arrows[r].src == self.arrows[c].src {
                    h[self.compose(r, self.inverse[c]).unwrap()]
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let eig = lh.symmetric_eigen();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let mut clusters: Vec<Vec<usize>> = Vec::new();
            for &k in &order {
                match clusters.last_mut() {
                    Some(cl) if (eig.eigenvalues[k] - eig.eigenvalues[*cl.last().unwrap()]).abs() < 1e-6 => cl.push(k),
                    _ => clusters.push(vec![k]),
                }
            }
            if clusters.len() != m {
                last_err = format!("attempt {attempt}: {} eigenvalue clusters for a center of dimension {m}", clusters.len());
                continue;
            }
            let projections: Vec<Vec<C64>> = clusters
                .iter()
                .map(|cl| {
                    (0..n)
                        .map(|g| {
                            let unit = self.arrows[g].src;
                            cl.iter().map(|&k| eig.eigenvectors[(g, k)] * eig.eigenvectors[(unit, k)].conj()).sum()
                        })
                        .collect()
                })
                .collect();
            let residual = self.projection_residual(&projections);
            if residual > TOLERANCE {
                last_err = format!("attempt {attempt}: residual {residual:e}");
                continue;
            }
            let dims = projections
                .iter()
                .map(|z| (0..n).map(|g| z[self.arrows[g].rng].re).sum::<f64>().round() as usize)
                .collect();
            return Ok(CenterDecomposition { projections, block_dimensions: dims, residual, center_dimension: m });
        }
        Err(Error::Numeric(last_err))
    }

    /// Largest deviation from: idempotent, self-adjoint, central, and
    /// summing to the identity.
    fn projection_residual(&self, zs: &[Vec<C64>]) -> f64 {
        let n = self.arrow_count();
        let max_abs = |v: &[C64], w: &[C64]| v.iter().zip(w).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let mut r: f64 = 0.0;
        let mut total = vec![C64::new(0.0, 0.0); n];
        for z in zs {
            r = r.max(max_abs(&self.convolve_num(z, z), z));
            r = r.max(max_abs(&self.adjoint_num(z), z));
            for a in 0..n {
                let mut d = vec![C64::new(0.0, 0.0); n];
                d[a] = C64::new(1.0, 0.0);
                r = r.max(max_abs(&self.convolve_num(z, &d), &self.convolve_num(&d, z)));
            }
            for k in 0..n {
                total[k] += z[k];
            }
        }
        r.max(max_abs(&total, &to_num(&self.identity())))
    }

    /// Dimension of `{c diagonal : z c = c}` and the smallest singular value
    /// of the constraint system.
    fn diagonal_fixed_space(&self, z: &[C64]) -> (usize, f64) {
        let n = self.arrow_count();
        let u = self.unit_count();
        let m = DMatrix::from_fn(n, u, |g, x| {
            let zc = if self.arrows[g].src == x { z[g] } else { C64::new(0.0, 0.0) };
            if g == x {
                zc - C64::new(1.0, 0.0)
            } else {
                zc
            }
        });
        let sv = m.svd(false, false).singular_values;
        let nullity = sv.iter().filter(|s| **s < TOLERANCE).count();
        (nullity, sv.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Every nonzero ideal meets the diagonal, tested on each minimal ideal
    /// `zA`.
    pub fn intersection_property_check(&self, seed: u64) -> Result<IntersectionReport> {
        let dec = self.center_decomposition(seed)?;
        let blocks: Vec<BlockVerdict> = dec
            .projections
            .iter()
            .zip(&dec.block_dimensions)
            .map(|(z, &dimension)| {
                let (nullity, smallest) = self.diagonal_fixed_space(z);
                BlockVerdict { dimension, meets_diagonal: nullity > 0, smallest_singular_value: smallest }
            })
            .collect();
        Ok(IntersectionReport { holds: blocks.iter().all(|b| b.meets_diagonal), blocks, residual: dec.residual })
    }

    /// Kernels of representations are sums of minimal ideals; faithfulness on
    /// the diagonal forces faithfulness iff every nonzero such kernel meets
    /// the diagonal.
    pub fn faithfulness_check(&self, seed: u64) -> Result<FaithfulnessReport> {
        let dec = self.center_decomposition(seed)?;
        let m = dec.projections.len();
        let exhaustive = m <= MAX_EXHAUSTIVE_BLOCKS;
        let subsets: Vec<Vec<usize>> = if exhaustive {
            (1u32..(1 << m)).map(|mask| (0..m).filter(|b| mask & (1 << b) != 0).collect()).collect()
        } else {
            // kernels only grow with the subset, so singletons decide
            (0..m).map(|b| vec![b]).collect()
        };
        let n = self.arrow_count();
        let mut failing = None;
        for s in &subsets {
            let mut z = vec![C64::new(0.0, 0.0); n];
            for &b in s {
                for (zk, pk) in z.iter_mut().zip(&dec.projections[b]) {
                    *zk += pk;
                }
            }
            if self.diagonal_fixed_space(&z).0 == 0 {
                failing = Some(s.clone());
                break;
            }
        }
        Ok(FaithfulnessReport {
            holds: failing.is_none(),
            kernels_checked: subsets.len(),
            exhaustive,
            failing_kernel: failing,
            residual: dec.residual,
        })
    }

    /// `|f(x)| ≤ ‖λ(f)‖` at every unit without isotropy, plus the exact
    /// identity `⟨λ_x(f) δ_x, δ_x⟩ = f(x)`. The inequality is also tested in
    /// every block representation `f ↦ z f` whose restriction to the diagonal
    /// has `x` in its support.
    pub fn key_inequality_check(&self, trials: usize, seed: u64, exec: Execution) -> Result<KeyInequalityReport> {
        let dec = self.center_decomposition(seed)?;
        let u = self.unit_count();
        let free_units: Vec<usize> = (0..u).filter(|&x| self.isotropy(x).len() == 1).collect();
        // units in the support of each block restricted to the diagonal
        let block_support: Vec<Vec<usize>> = dec
            .projections
            .iter()
            .map(|z| (0..u).filter(|&x| self.fiber(x).iter().any(|&g| z[g].norm() > TOLERANCE)).collect())
            .collect();
        let outcomes = map_indexed(exec, trials, |t| {
            let mut rng = trial_rng(seed, t as u64);
            let f: Vec<Scalar> = (0..self.arrow_count()).map(|_| random::scalar(&mut rng)).collect();
            let fnum = to_num(&f);
            let norm = self.operator_norm_num(&fnum);
            let mut out = TrialOutcome::default();
            for x in 0..u {
                let entry = self.fiber(x).iter().position(|&g| g == x).unwrap();
                if self.regular_block(&f, x)[(entry, entry)] != f[x] {
                    out.extraction_failures += 1;
                }
            }
            for &x in &free_units {
                out.checks += 1;
                let fx = f[x].abs_f64();
                if fx > norm + TOLERANCE {
                    out.violations.push(KeyViolation { trial: t, unit: x + 1, value: fx, norm, block: None });
                }
            }
            for (b, z) in dec.projections.iter().enumerate() {
                let zf = self.convolve_num(z, &fnum);
                let bnorm = self.operator_norm_num(&zf);
                for &x in &block_support[b] {
                    let fx = f[x].abs_f64();
                    if fx <= bnorm + TOLERANCE {
                        continue;
                    }
                    if free_units.contains(&x) {
                        out.violations.push(KeyViolation { trial: t, unit: x + 1, value: fx, norm: bnorm, block: Some(b) });
                    } else {
                        out.isotropy_counterexamples += 1;
                    }
                }
                out.checks += block_support[b].iter().filter(|x| free_units.contains(x)).count();
            }
            out
        });
        let mut report = KeyInequalityReport {
            trials,
            units_without_isotropy: free_units.iter().map(|x| x + 1).collect(),
            checks: 0,
            violations: Vec::new(),
            extraction_failures: 0,
            isotropy_counterexamples: 0,
            residual: dec.residual,
        };
        for o in outcomes {
            report.checks += o.checks;
            report.violations.extend(o.violations);
            report.extraction_failures += o.extraction_failures;
            report.isotropy_counterexamples += o.isotropy_counterexamples;
        }
        Ok(report)
    }
}

/// Above this many blocks the kernel enumeration falls back to singletons.
pub const MAX_EXHAUSTIVE_BLOCKS: usize = 12;

#[derive(Default)]
struct TrialOutcome {
    checks: usize,
    violations: Vec<KeyViolation>,
    extraction_failures: usize,
    isotropy_counterexamples: usize,
}

pub fn to_num(f: &[Scalar]) -> Vec<C64> {
    f.iter().map(|s| {
        let (re, im) = s.to_f64();
        C64::new(re, im)
    }).collect()
}

fn largest_singular_value(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct CenterDecomposition {
    pub projections: Vec<Vec<C64>>,
    /// `dim zA` for each minimal projection `z`.
    pub block_dimensions: Vec<usize>,
    pub residual: f64,
    pub center_dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockVerdict {
    pub dimension: usize,
    pub meets_diagonal: bool,
    pub smallest_singular_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub holds: bool,
    pub blocks: Vec<BlockVerdict>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub holds: bool,
    pub kernels_checked: usize,
    pub exhaustive: bool,
    /// Blocks spanning a kernel that misses the diagonal.
    pub failing_kernel: Option<Vec<usize>>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MasaReport {
    pub masa: bool,
    pub commutant_dimension: usize,
    pub units: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyViolation {
    pub trial: usize,
    pub unit: usize,
    pub value: f64,
    pub norm: f64,
    pub block: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyInequalityReport {
    pub trials: usize,
    pub units_without_isotropy: Vec<usize>,
    pub checks: usize,
    pub violations: Vec<KeyViolation>,
    /// Failures of `⟨λ_x(f) δ_x, δ_x⟩ = f(x)`, checked exactly.
    pub extraction_failures: usize,
    /// Block representations where `|f(x)|` exceeds the norm at a unit with
    /// isotropy; expected to occur and not counted as violations.
    pub isotropy_counterexamples: usize,
    pub residual: f64,
}

/// Small transformation groupoids and equivalence relations, up to about
/// 200 arrows.
pub fn corpus() -> Vec<(String, FiniteGroupoid)> {
    let t = |points: usize, degree: usize, gens: &[&str]| {
        let gens = gens.iter().map(|g| parse_cycles(g, degree).unwrap()).collect();
        FiniteGroupoid::transformation(points, &PermGroup::generate(degree, gens).unwrap()).unwrap()
    };
    let mut out = vec![
        ("units only, 3 points".to_string(), FiniteGroupoid::units_only(3)),
        ("Z/3 free on 3 points".into(), t(3, 3, &["(1 2 3)"])),
        ("Z/2 trivial on 1 point".into(), t(1, 3, &["(2 3)"])),
        ("Z/2 swapping 2 points".into(), t(2, 2, &["(1 2)"])),
        ("Z/2 on 3 points, one fixed".into(), t(3, 3, &["(1 2)"])),
        ("S3 on 3 points".into(), t(3, 3, &["(1 2)", "(1 2 3)"])),
        ("Z/3 on 4 points, one fixed".into(), t(4, 4, &["(1 2 3)"])),
        ("Z/4 free on 4 points".into(), t(4, 4, &["(1 2 3 4)"])),
        ("Klein group free on 4 points".into(), t(4, 4, &["(1 2)(3 4)", "(1 3)(2 4)"])),
        ("A4 on 4 points".into(), t(4, 4, &["(1 2 3)", "(2 3 4)"])),
        ("Z/5 free on 5 points".into(), t(5, 5, &["(1 2 3 4 5)"])),
        ("Z/6 free on 6 points".into(), t(6, 6, &["(1 2 3 4 5 6)"])),
        ("Z/2 x Z/3 on 5 points".into(), t(5, 5, &["(1 2)", "(3 4 5)"])),
        ("S4 on 4 points".into(), t(4, 4, &["(1 2)", "(1 2 3 4)"])),
        ("Z/7 free on 7 points".into(), t(7, 7, &["(1 2 3 4 5 6 7)"])),
        ("partition {1,2},{3,4,5}".into(), FiniteGroupoid::equivalence(5, &[vec![0, 1], vec![2, 3, 4]]).unwrap()),
        ("partition {1,3},{2}".into(), FiniteGroupoid::equivalence(3, &[vec![0, 2]]).unwrap()),
    ];
    for k in [1, 2, 3, 4, 6, 10, 14] {
        out.push((format!("full equivalence on {k} points"), FiniteGroupoid::full_equivalence(k)));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub arrows: usize,
    pub principal: bool,
    pub intersection: bool,
    pub faithful: bool,
    pub masa: bool,
}

/// Runs the three structural checks over [`corpus`], one groupoid per task.
pub fn corpus_check(seed: u64, exec: Execution) -> Result<Vec<CorpusEntry>> {
    let groupoids = corpus();
    map_slice(exec, &groupoids, |(name, g)| {
        Ok(CorpusEntry {
            name: name.clone(),
            arrows: g.arrow_count(),
            principal: g.principality().principal,
            intersection: g.intersection_property_check(seed)?.holds,
            faithful: g.faithfulness_check(seed)?.holds,
            masa: g.diagonal_masa_check().masa,
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3_free() -> FiniteGroupoid {
        FiniteSpec::parse(r#"{"transformation": {"points": 3, "group_generators": ["(1 2 3)"]}}"#).unwrap().build().unwrap()
    }

    fn z2_trivial() -> FiniteGroupoid {
        FiniteSpec::parse(r#"{"transformation": {"points": 1, "degree": 3, "group_generators": ["(2 3)"]}}"#)
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn construction_sizes() {
        let g = z3_free();
        assert_eq!(g.arrow_count(), 9);
        assert!(g.principality().principal);
        let h = z2_trivial();
        assert_eq!(h.arrow_count(), 2);
        assert_eq!(h.summary().isotropy_orders, vec![2]);
        assert!(!h.principality().essentially_principal);
        assert!(FiniteGroupoid::full_equivalence(3).principality().principal);
        assert_eq!(g.summary().orbits.len(), 1);
    }

    #[test]
    fn explicit_table_validation() {
        let units = vec!["x".to_string()];
        let arrows = vec![ExplicitArrow { name: "g".into(), src: "x".into(), rng: "x".into() }];
        let good = [["g".to_string(), "g".to_string(), "x".to_string()]];
        let g = FiniteGroupoid::explicit(&units, &arrows, &good).unwrap();
        assert_eq!(g.inverse(1), 1);
        let broken = [["g".to_string(), "g".to_string(), "g".to_string()]];
        let err = FiniteGroupoid::explicit(&units, &arrows, &broken).unwrap_err();
        assert!(matches!(err, Error::Axiom(ref m) if m.contains("(g, g, g)") || m.contains("inverse")), "{err}");
        assert!(FiniteGroupoid::explicit(&units, &arrows, &[]).is_err());
        assert!(matches!(FiniteSpec::parse("{\n \"units\": [\"x\",]\n}"), Err(Error::Spec(m)) if m.contains("line 2")));
    }

    #[test]
    fn regular_representation() {
        let g = z3_free();
        let id = g.identity();
        assert!(g.regular_rep(&id).iter().all(|b| *b == Matrix::identity(3)));
        assert!((g.operator_norm(&id) - 1.0).abs() < TOLERANCE);
        assert_eq!(g.regular_image_dimension(0), 9);
    }

    #[test]
    fn cstar_identity_numeric() {
        let g = FiniteGroupoid::transformation(3, &PermGroup::symmetric(3)).unwrap();
        let mut rng = trial_rng(11, 0);
        for _ in 0..10 {
            let f: Vec<Scalar> = (0..g.arrow_count()).map(|_| random::scalar(&mut rng)).collect();
            let n = g.operator_norm(&f);
            let ff = g.convolve(&g.adjoint(&f), &f);
            assert!((g.operator_norm(&ff) - n * n).abs() < TOLERANCE * (1.0 + n * n));
        }
    }

    #[test]
    fn center_classes_match_exact_center() {
        for (_, g) in corpus().into_iter().filter(|(_, g)| g.arrow_count() <= 30) {
            let classes = g.center_classes();
            for c in &classes {
                let mut v = g.zero();
                for &k in c {
                    v[k] = Scalar::one();
                }
                for a in 0..g.arrow_count() {
                    let d = g.delta(a);
                    assert_eq!(g.convolve(&v, &d), g.convolve(&d, &v));
                }
            }
        }
    }

    #[test]
    fn positive_and_negative_controls() {
        let g = z3_free();
        assert!(g.intersection_property_check(1).unwrap().holds);
        assert!(g.faithfulness_check(1).unwrap().holds);
        assert!(g.diagonal_masa_check().masa);
        let h = z2_trivial();
        let ip = h.intersection_property_check(1).unwrap();
        assert!(!ip.holds);
        assert_eq!(ip.blocks.len(), 2);
        assert!(!h.faithfulness_check(1).unwrap().holds);
        let m = h.diagonal_masa_check();
        assert!(!m.masa);
        assert_eq!(m.commutant_dimension, 2);
        let u = FiniteGroupoid::units_only(2);
        assert!(u.intersection_property_check(1).unwrap().holds);
        assert!(u.diagonal_masa_check().masa);
        let m2 = FiniteGroupoid::full_equivalence(2);
        assert!(m2.faithfulness_check(1).unwrap().holds);
    }

    #[test]
    fn key_inequality_small() {
        let g = z3_free();
        let r = g.key_inequality_check(50, 5, Execution::Sequential).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.extraction_failures, 0);
        let h = z2_trivial();
        let r = h.key_inequality_check(50, 5, Execution::Sequential).unwrap();
        assert!(r.units_without_isotropy.is_empty());
        assert!(r.isotropy_counterexamples > 0);
        let mut single = g.zero();
        single[0] = Scalar::one();
        assert!((g.operator_norm(&single) - 1.0).abs() < TOLERANCE);
    }
}
