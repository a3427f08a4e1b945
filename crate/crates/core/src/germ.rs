//! The groupoid of germs of a permutation group acting on the edges of a
//! star.
//!
//! Away from the center the germ of `σ` at `(t, i)` only remembers
//! `j = σ(i)`, so edge germs are triples `(t, i, j)`. At the center distinct
//! group elements have distinct germs. Composition follows `γ = αβ` with
//! `s(α) = r(β)`; `(t, i, j)` has source `(t, i)` and range `(t, j)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{PermGroup, Permutation};
use crate::scalar::{fmt_rational, rational_serde, Rational};
use crate::star::StarPoint;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Germ {
    Edge {
        #[serde(with = "rational_serde")]
        t: Rational,
        src: usize,
        rng: usize,
    },
    Center { sigma: Permutation },
}

impl Germ {
    pub fn edge(t: Rational, src: usize, rng: usize) -> Germ {
        Germ::Edge { t, src, rng }
    }

    pub fn source(&self) -> StarPoint {
        match self {
            Germ::Edge { t, src, .. } => StarPoint::Edge { edge: *src, t: t.clone() },
            Germ::Center { .. } => StarPoint::Center,
        }
    }

    pub fn range(&self) -> StarPoint {
        match self {
            Germ::Edge { t, rng, .. } => StarPoint::Edge { edge: *rng, t: t.clone() },
            Germ::Center { .. } => StarPoint::Center,
        }
    }

    pub fn inverse(&self) -> Germ {
        match self {
            Germ::Edge { t, src, rng } => Germ::Edge { t: t.clone(), src: *rng, rng: *src },
            Germ::Center { sigma } => Germ::Center { sigma: sigma.inverse() },
        }
    }

    /// `self · other`, defined when `source(self) = range(other)`.
    pub fn compose(&self, other: &Germ) -> Result<Germ> {
        if self.source() != other.range() {
            return Err(Error::NotComposable { left: self.to_string(), right: other.to_string() });
        }
        Ok(match (self, other) {
            (Germ::Edge { t, rng, .. }, Germ::Edge { src, .. }) => Germ::Edge { t: t.clone(), src: *src, rng: *rng },
            (Germ::Center { sigma: a }, Germ::Center { sigma: b }) => Germ::Center { sigma: a.compose(b) },
            _ => unreachable!("sources and ranges of edge and center germs never meet"),
        })
    }

    pub fn is_unit(&self) -> bool {
        match self {
            Germ::Edge { src, rng, .. } => src == rng,
            Germ::Center { sigma } => sigma.is_identity(),
        }
    }
}

impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Germ::Edge { t, src, rng } => write!(f, "({}, {}, {})", fmt_rational(t), src + 1, rng + 1),
            Germ::Center { sigma } => write!(f, "[{sigma}, 0]"),
        }
    }
}

/// `Germ(Γ ↷ Star_n)`. The group may act on more than `n` points as long as it
/// preserves the first `n` (the edges) and acts faithfully on them.
#[derive(Clone, Debug)]
pub struct GermGroupoid {
    edges: usize,
    group: PermGroup,
    edge_perms: Vec<Permutation>,
    // group indices σ with σ(i) = j, at [i * n + j]
    pair_members: Vec<Vec<usize>>,
}

impl PartialEq for GermGroupoid {
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges && self.group == other.group
    }
}

impl Eq for GermGroupoid {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalityReport {
    pub essentially_principal: bool,
    /// Non-unit germs in the interior of the isotropy bundle.
    pub interior_isotropy: Vec<Germ>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InseparablePair {
    pub first: Permutation,
    pub second: Permutation,
    /// Edges (1-based) fixed by `first⁻¹ second`; along them the edge germs
    /// of both converge to both center germs.
    pub common_edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HausdorffReport {
    pub hausdorff: bool,
    pub inseparable_pairs: Vec<InseparablePair>,
}

impl GermGroupoid {
    pub fn new(edges: usize, group: PermGroup) -> Result<Self> {
        if group.degree() < edges {
            return Err(Error::EdgeCountMismatch { left: edges, right: group.degree() });
        }
        let mut edge_perms = Vec::with_capacity(group.order());
        for sigma in group.elements() {
            let images: Vec<usize> = (0..edges).map(|i| sigma.apply(i)).collect();
            let restricted = Permutation::new(images)
                .map_err(|_| Error::InvalidPermutation(format!("{sigma} does not preserve the {edges} edges")))?;
            if restricted.is_identity() && !sigma.is_identity() {
                return Err(Error::NotFaithful(sigma.to_string()));
            }
            edge_perms.push(restricted);
        }
        let mut pair_members = vec![Vec::new(); edges * edges];
        for (k, p) in edge_perms.iter().enumerate() {
            for i in 0..edges {
                pair_members[i * edges + p.apply(i)].push(k);
            }
        }
        Ok(GermGroupoid { edges, group, edge_perms, pair_members })
    }

    /// Reflections of the coordinate cross in its two axes, as the edge
    /// permutations `(1 2)` and `(3 4)` of the 4-edge star.
    pub fn cross() -> Self {
        Self::new(4, PermGroup::klein_cross()).unwrap()
    }

    /// The star with `n` edges under the alternating group.
    pub fn alternating_star(n: usize) -> Self {
        Self::new(n, PermGroup::alternating(n)).unwrap()
    }

    pub fn is_cross(&self) -> bool {
        self.edges == 4 && self.group == PermGroup::klein_cross()
    }

    pub fn edges(&self) -> usize {
        self.edges
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    /// Restriction of the `k`-th group element to the edges.
    pub fn edge_perm(&self, k: usize) -> &Permutation {
        &self.edge_perms[k]
    }

    /// Group indices `σ` with `σ(i) = j`.
    pub fn pair_members(&self, i: usize, j: usize) -> &[usize] {
        &self.pair_members[i * self.edges + j]
    }

    pub fn is_admissible(&self, i: usize, j: usize) -> bool {
        i < self.edges && j < self.edges && !self.pair_members(i, j).is_empty()
    }

    pub fn admissible_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.edges;
        (0..n * n).filter(move |k| !self.pair_members[*k].is_empty()).map(move |k| (k / n, k % n))
    }

    pub fn group_index(&self, sigma: &Permutation) -> Result<usize> {
        self.group.index_of(sigma).ok_or_else(|| Error::NotInGroup(sigma.to_string()))
    }

    pub fn contains_point(&self, p: &StarPoint) -> bool {
        match p {
            StarPoint::Center => true,
            StarPoint::Edge { edge, .. } => *edge < self.edges,
        }
    }

    pub fn contains(&self, g: &Germ) -> bool {
        match g {
            Germ::Edge { t, src, rng } => {
                *t > Rational::from_integer(0.into()) && *t <= Rational::from_integer(1.into()) && self.is_admissible(*src, *rng)
            }
            Germ::Center { sigma } => self.group.contains(sigma),
        }
    }

    /// The germ of `σ` at `p`.
    pub fn germ_of(&self, sigma: &Permutation, p: &StarPoint) -> Result<Germ> {
        let k = self.group_index(sigma)?;
        Ok(match p {
            StarPoint::Center => Germ::Center { sigma: sigma.clone() },
            StarPoint::Edge { edge, t } => Germ::Edge { t: t.clone(), src: *edge, rng: self.edge_perms[k].apply(*edge) },
        })
    }

    pub fn unit_at(&self, p: &StarPoint) -> Germ {
        match p {
            StarPoint::Center => Germ::Center { sigma: Permutation::identity(self.group.degree()) },
            StarPoint::Edge { edge, t } => Germ::Edge { t: t.clone(), src: *edge, rng: *edge },
        }
    }

    /// The fiber `s⁻¹(p)`.
    pub fn arrows_with_source(&self, p: &StarPoint) -> Vec<Germ> {
        match p {
            StarPoint::Center => self.group.elements().iter().map(|s| Germ::Center { sigma: s.clone() }).collect(),
            StarPoint::Edge { edge, t } => (0..self.edges)
                .filter(|&j| self.is_admissible(*edge, j))
                .map(|j| Germ::Edge { t: t.clone(), src: *edge, rng: j })
                .collect(),
        }
    }

    /// Non-unit isotropy germs up to the continuum of edge units: exactly the
    /// center germs of non-identity elements.
    pub fn isotropy_description(&self) -> Vec<Germ> {
        self.group
            .elements()
            .iter()
            .filter(|s| !s.is_identity())
            .map(|s| Germ::Center { sigma: s.clone() })
            .collect()
    }

    /// The interior of the isotropy bundle. A center germ `[σ, 0]` has the
    /// basic neighborhoods `{[σ, x] : x near 0}`, whose edge germs
    /// `(t, i, σ(i))` are all isotropy iff `σ` fixes every edge.
    pub fn essentially_principal_check(&self) -> PrincipalityReport {
        let interior_isotropy: Vec<Germ> = self
            .group
            .elements()
            .iter()
            .enumerate()
            .filter(|(k, s)| !s.is_identity() && self.edge_perms[*k].is_identity())
            .map(|(_, s)| Germ::Center { sigma: s.clone() })
            .collect();
        PrincipalityReport { essentially_principal: interior_isotropy.is_empty(), interior_isotropy }
    }

    /// Edge germs `(t, i, j)` converge as `t → 0` to every `[σ, 0]` with
    /// `σ(i) = j`, so `[σ, 0]` and `[σ', 0]` cannot be separated exactly when
    /// `σ⁻¹σ'` fixes some edge.
    pub fn hausdorff_check(&self) -> HausdorffReport {
        let g = &self.group;
        let mut pairs = Vec::new();
        for a in 0..g.order() {
            for b in a + 1..g.order() {
                let rel = g.mul_index(g.inv_index(a), b);
                let fixed: Vec<usize> = (0..self.edges).filter(|&i| self.edge_perms[rel].fixes(i)).map(|i| i + 1).collect();
                if !fixed.is_empty() {
                    pairs.push(InseparablePair {
                        first: g.element(a).clone(),
                        second: g.element(b).clone(),
                        common_edges: fixed,
                    });
                }
            }
        }
        HausdorffReport { hausdorff: pairs.is_empty(), inseparable_pairs: pairs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_cycles;
    use crate::scalar::{rat, rat_int};

    fn p(s: &str, n: usize) -> Permutation {
        parse_cycles(s, n).unwrap()
    }

    #[test]
    fn germ_of_forgets_all_but_the_image_edge() {
        let g = GermGroupoid::cross();
        let x = StarPoint::edge(0, rat(1, 2)).unwrap();
        let sy = p("(3 4)", 4);
        let id = Permutation::identity(4);
        assert_eq!(g.germ_of(&sy, &x).unwrap(), Germ::edge(rat(1, 2), 0, 0));
        assert_eq!(g.germ_of(&sy, &x).unwrap(), g.germ_of(&id, &x).unwrap());
        assert_eq!(g.germ_of(&id, &StarPoint::Center).unwrap(), Germ::Center { sigma: id.clone() });
        assert_ne!(g.germ_of(&sy, &StarPoint::Center).unwrap(), g.germ_of(&id, &StarPoint::Center).unwrap());
        assert!(g.germ_of(&p("(1 3)", 4), &x).is_err());
        let s4 = GermGroupoid::new(4, PermGroup::symmetric(4)).unwrap();
        assert_eq!(s4.germ_of(&p("(1 2)", 4), &StarPoint::edge(0, rat(1, 3)).unwrap()).unwrap(), Germ::edge(rat(1, 3), 0, 1));
    }

    #[test]
    fn composition_rules() {
        let t = rat(1, 5);
        assert_eq!(Germ::edge(t.clone(), 1, 2).compose(&Germ::edge(t.clone(), 0, 1)).unwrap(), Germ::edge(t.clone(), 0, 2));
        let s = p("(1 2 3)", 4);
        let c = Germ::Center { sigma: s.clone() };
        assert!(c.compose(&c.inverse()).unwrap().is_unit());
        assert!(c.compose(&Germ::edge(t.clone(), 0, 1)).is_err());
        assert!(Germ::edge(t.clone(), 1, 2).compose(&Germ::edge(t, 0, 2)).is_err());
    }

    #[test]
    fn isotropy_lists() {
        assert_eq!(GermGroupoid::cross().isotropy_description().len(), 3);
        assert!(GermGroupoid::new(4, PermGroup::trivial(4)).unwrap().isotropy_description().is_empty());
        assert_eq!(GermGroupoid::alternating_star(4).isotropy_description().len(), 11);
    }

    #[test]
    fn principality() {
        for g in [GermGroupoid::cross(), GermGroupoid::alternating_star(4)] {
            let r = g.essentially_principal_check();
            assert!(r.essentially_principal);
            assert!(r.interior_isotropy.is_empty());
        }
        // (3 4) moves only hidden points, so it acts trivially on 2 edges
        let g = PermGroup::generate(4, vec![p("(3 4)", 4)]).unwrap();
        assert!(matches!(GermGroupoid::new(2, g), Err(Error::NotFaithful(_))));
        let g = PermGroup::generate(4, vec![p("(2 3)", 4)]).unwrap();
        assert!(GermGroupoid::new(2, g).is_err());
    }

    #[test]
    fn hausdorff_diagnostic() {
        let cross = GermGroupoid::cross().hausdorff_check();
        assert!(!cross.hausdorff);
        let id = Permutation::identity(4);
        let sy = p("(3 4)", 4);
        let pair = cross
            .inseparable_pairs
            .iter()
            .find(|q| (q.first == id && q.second == sy) || (q.first == sy && q.second == id))
            .unwrap();
        assert_eq!(pair.common_edges, vec![1, 2]);
        assert!(GermGroupoid::new(4, PermGroup::cyclic(4)).unwrap().hausdorff_check().hausdorff);
        assert!(GermGroupoid::new(4, PermGroup::trivial(4)).unwrap().hausdorff_check().hausdorff);
        assert!(!GermGroupoid::alternating_star(4).hausdorff_check().hausdorff);
    }

    #[test]
    fn fibers() {
        let g = GermGroupoid::cross();
        let x = StarPoint::edge(2, rat_int(1)).unwrap();
        let fiber = g.arrows_with_source(&x);
        assert_eq!(fiber.len(), 2);
        assert!(fiber.iter().all(|a| g.contains(a) && a.source() == x));
        assert_eq!(g.arrows_with_source(&StarPoint::Center).len(), 4);
        assert!(!g.contains(&Germ::edge(rat(1, 2), 0, 2)));
    }
}
