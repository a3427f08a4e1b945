//! The permutation representation of a group on `ℂⁿ`, its integrated form on
//! the group algebra, and the construction of a unitary group-algebra element
//! hitting an arbitrary permutation matrix.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, BisectionVerdict, PointMap, SupportDescriptor};
use crate::error::{Error, Result};
use crate::germ::GermGroupoid;
use crate::linalg::{inner, reduced_span, Matrix};
use crate::perm::{PermGroup, Permutation};
use crate::scalar::Scalar;
use crate::star::PPFun;

/// `π(σ) e_i = e_{σ(i)}`: entry `(j, i)` is 1 iff `j = σ(i)`.
pub fn perm_rep(sigma: &Permutation) -> Matrix {
    Matrix::from_fn(sigma.degree(), sigma.degree(), |j, i| if sigma.apply(i) == j { Scalar::one() } else { Scalar::zero() })
}

/// An element `Σ a_σ δ_σ` of the group algebra `ℂ[Γ]`, stored densely in the
/// group's element order.
#[derive(Clone, Debug)]
pub struct GroupAlgebraElement {
    group: Arc<PermGroup>,
    coeffs: Vec<Scalar>,
}

impl PartialEq for GroupAlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.group, &other.group) || self.group == other.group) && self.coeffs == other.coeffs
    }
}

impl Eq for GroupAlgebraElement {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAlgebraJson {
    pub coefficients: Vec<(Permutation, Scalar)>,
}

impl GroupAlgebraElement {
    pub fn zero(group: &Arc<PermGroup>) -> Self {
        GroupAlgebraElement { group: group.clone(), coeffs: vec![Scalar::zero(); group.order()] }
    }

    pub fn delta(group: &Arc<PermGroup>, sigma: &Permutation) -> Result<Self> {
        let k = group.index_of(sigma).ok_or_else(|| Error::NotInGroup(sigma.to_string()))?;
        let mut a = Self::zero(group);
        a.coeffs[k] = Scalar::one();
        Ok(a)
    }

    pub fn unit(group: &Arc<PermGroup>) -> Self {
        let mut a = Self::zero(group);
        a.coeffs[group.identity_index()] = Scalar::one();
        a
    }

    /// Coefficients in the group's element order.
    pub fn from_coeffs(group: &Arc<PermGroup>, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::Dimension(format!("{} coefficients for a group of order {}", coeffs.len(), group.order())));
        }
        Ok(GroupAlgebraElement { group: group.clone(), coeffs })
    }

    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, sigma: &Permutation) -> Scalar {
        self.group.index_of(sigma).map(|k| self.coeffs[k].clone()).unwrap_or_default()
    }

    /// Elements with a nonzero coefficient.
    pub fn support(&self) -> Vec<Permutation> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, _)| self.group.element(k).clone())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) || self.group == other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(GroupAlgebraElement { group: self.group.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&Scalar::int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        GroupAlgebraElement { group: self.group.clone(), coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// `(a·b)_σ = Σ_β a_{σβ⁻¹} b_β`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let g = &self.group;
        let mut out = Self::zero(g);
        for (x, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (y, b) in other.coeffs.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                out.coeffs[g.mul_index(x, y)] += &(a * b);
            }
        }
        Ok(out)
    }

    /// `(a*)_σ = conj a_{σ⁻¹}`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.group);
        for (k, a) in self.coeffs.iter().enumerate() {
            out.coeffs[self.group.inv_index(k)] = a.conj();
        }
        out
    }

    /// `⟨a, b⟩ = Σ_σ a_σ conj b_σ`, the regular trace of `a b*`.
    pub fn inner(&self, other: &Self) -> Scalar {
        inner(&self.coeffs, &other.coeffs)
    }

    pub fn to_json(&self) -> GroupAlgebraJson {
        GroupAlgebraJson {
            coefficients: self
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (self.group.element(k).clone(), c.clone()))
                .collect(),
        }
    }
}

/// `π̃(a) = Σ_σ a_σ π(σ)`; entry `(j, i)` is `Σ_{σ(i) = j} a_σ`.
pub fn integrated_rep(a: &GroupAlgebraElement) -> Matrix {
    let n = a.group.degree();
    let mut m = Matrix::zeros(n, n);
    for (k, c) in a.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        let sigma = a.group.element(k);
        for i in 0..n {
            m[(sigma.apply(i), i)] += c;
        }
    }
    m
}

/// The linear map `ℂ^Γ → ℂ^{n×n}`, `a ↦ vec π̃(a)`, as an `n² × |Γ|` matrix.
fn integration_matrix(group: &PermGroup) -> Matrix {
    let n = group.degree();
    Matrix::from_fn(n * n, group.order(), |row, k| {
        let (j, i) = (row / n, row % n);
        if group.element(k).apply(i) == j {
            Scalar::one()
        } else {
            Scalar::zero()
        }
    })
}

/// `dim π̃(ℂ[Γ])`.
pub fn image_dimension(group: &PermGroup) -> usize {
    integration_matrix(group).rank()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commutant {
    pub dimension: usize,
    /// Reduced echelon basis, flattened row-major.
    pub basis: Vec<Matrix>,
}

impl Commutant {
    /// Whether the commutant is exactly `{z I + y (J − I)}`.
    pub fn is_zy_pattern(&self) -> bool {
        let Some(first) = self.basis.first() else {
            return false;
        };
        let n = first.rows();
        let expected = if n == 1 {
            vec![Matrix::identity(1)]
        } else {
            vec![Matrix::identity(n), Matrix::ones(n).sub(&Matrix::identity(n)).unwrap()]
        };
        self.basis == expected
    }
}

/// All `X` with `M X = X M` for every listed `M`, by exact nullspace of the
/// commutator system. The basis is canonical (reduced echelon in the
/// row-major entries of `X`).
pub fn commutant_basis(mats: &[Matrix]) -> Result<Commutant> {
    let Some(first) = mats.first() else {
        return Err(Error::Dimension("no matrices given".into()));
    };
    let n = first.rows();
    if mats.iter().any(|m| !m.is_square() || m.rows() != n) {
        return Err(Error::Dimension("commutant needs square matrices of one size".into()));
    }
    let var = |r: usize, c: usize| r * n + c;
    let mut rows = Vec::with_capacity(mats.len() * n * n);
    for m in mats {
        for r in 0..n {
            for c in 0..n {
                // (M X − X M)[r][c]
                let mut eq = vec![Scalar::zero(); n * n];
                for k in 0..n {
                    eq[var(k, c)] += &m[(r, k)];
                    eq[var(r, k)] -= &m[(k, c)];
                }
                rows.push(eq);
            }
        }
    }
    let system = Matrix::from_rows(rows)?;
    let basis: Vec<Matrix> = reduced_span(&system.nullspace())
        .into_iter()
        .map(|v| Matrix::from_fn(n, n, |r, c| v[var(r, c)].clone()))
        .collect();
    Ok(Commutant { dimension: basis.len(), basis })
}

/// Whether for all `i₁ ≠ i₂`, `j₁ ≠ j₂` some `σ ∈ Γ` has `σ(i₁) = j₁` and
/// `σ(i₂) = j₂`.
pub fn bitransitivity_check(group: &PermGroup) -> bool {
    let n = group.degree();
    let mut hit = vec![false; n * n * n * n];
    for s in group.elements() {
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    hit[((a * n + b) * n + s.apply(a)) * n + s.apply(b)] = true;
                }
            }
        }
    }
    (0..n).all(|a| {
        (0..n).all(|b| a == b || (0..n).all(|c| (0..n).all(|d| c == d || hit[((a * n + b) * n + c) * n + d])))
    })
}

/// The solution of `π̃(x) = target` orthogonal to `ker π̃` for the coefficient
/// inner product: any solution minus its projection onto the kernel.
pub fn min_norm_preimage(target: &Matrix, group: &Arc<PermGroup>) -> Result<GroupAlgebraElement> {
    let n = group.degree();
    if target.rows() != n || target.cols() != n {
        return Err(Error::Dimension(format!("target must be {n}x{n}")));
    }
    let a = integration_matrix(group);
    let x0 = a.solve(target.entries())?;
    let kernel = a.nullspace();
    let x = if kernel.is_empty() {
        x0
    } else {
        // Gram system G c = b with G[l][m] = ⟨k_m, k_l⟩ and b[l] = ⟨x0, k_l⟩
        let gram = Matrix::from_fn(kernel.len(), kernel.len(), |l, m| inner(&kernel[m], &kernel[l]));
        let rhs: Vec<Scalar> = kernel.iter().map(|k| inner(&x0, k)).collect();
        let c = gram.solve(&rhs).map_err(|_| Error::Verification("singular Gram matrix of the kernel basis".into()))?;
        let mut x = x0;
        for (cm, km) in c.iter().zip(&kernel) {
            for (xi, ki) in x.iter_mut().zip(km) {
                *xi -= &(cm * ki);
            }
        }
        x
    };
    GroupAlgebraElement::from_coeffs(group, x)
}

/// The pieces of the unitary construction, all verified exactly.
#[derive(Clone, Debug)]
pub struct UnitaryConstruction {
    /// Min-norm preimage of the identity matrix: the support projection of π̃.
    pub q: GroupAlgebraElement,
    /// `δ_id − q`, the central projection generating `ker π̃`.
    pub p: GroupAlgebraElement,
    /// Min-norm preimage of `π(τ)`.
    pub v0: GroupAlgebraElement,
    /// `v0 + p`: unitary with `π̃(v) = π(τ)`.
    pub v: GroupAlgebraElement,
}

fn verify(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Verification(what.to_string()))
    }
}

/// A unitary `v ∈ ℂ[Γ]` with `π̃(v) = π(τ)`.
pub fn build_unitary_v(group: &Arc<PermGroup>, tau: &Permutation) -> Result<UnitaryConstruction> {
    if tau.degree() != group.degree() {
        return Err(Error::Dimension(format!("τ acts on {} points, the group on {}", tau.degree(), group.degree())));
    }
    let n = group.degree();
    let one = GroupAlgebraElement::unit(group);
    let q = min_norm_preimage(&Matrix::identity(n), group)?;
    let p = one.sub(&q)?;
    for s in group.elements() {
        let d = GroupAlgebraElement::delta(group, s)?;
        verify(p.mul(&d)? == d.mul(&p)?, "p is central")?;
    }
    verify(p.mul(&p)? == p, "p is idempotent")?;
    verify(p.adjoint() == p, "p is self-adjoint")?;
    verify(integrated_rep(&p).is_zero(), "π̃(p) = 0")?;
    let target = perm_rep(tau);
    let v0 = min_norm_preimage(&target, group)?;
    let v = v0.add(&p)?;
    verify(v.adjoint().mul(&v)? == one, "v*v = 1")?;
    verify(v.mul(&v.adjoint())? == one, "vv* = 1")?;
    verify(integrated_rep(&v) == target, "π̃(v) = π(τ)")?;
    Ok(UnitaryConstruction { q, p, v0, v })
}

/// `φ(a) = Σ_σ a_σ 1_σ`, the integrated form of `σ ↦ 1_σ`.
pub fn phi(a: &GroupAlgebraElement, groupoid: &Arc<GermGroupoid>) -> Result<AlgebraElement> {
    if **a.group() != *groupoid.group() {
        return Err(Error::GroupMismatch);
    }
    let mut out = AlgebraElement::zero(groupoid);
    for (k, c) in a.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        let sheet = AlgebraElement::indicator(groupoid, a.group().element(k))?;
        out = out.add(&sheet.scale(c))?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizerReport {
    pub tau: Permutation,
    pub tau_even: bool,
    pub unitary: bool,
    /// `u(t, i, j) = [τ(i) = j]` on every strip.
    pub strips_match_tau: bool,
    /// `u*·h·u = h∘τ` for each supplied test function.
    pub conjugation_checks: Vec<bool>,
    pub support: SupportDescriptor,
    pub bisection: BisectionVerdict,
    pub center_support: Vec<Permutation>,
    pub point_map: PointMap,
    /// The induced point map is the edge action of `τ`.
    pub theta_is_tau: bool,
    /// `τ` is itself a group element, so `1_τ` is a normalizer with
    /// bisection support.
    pub tau_in_group: bool,
}

#[derive(Clone, Debug)]
pub struct StrangeNormalizer {
    pub groupoid: Arc<GermGroupoid>,
    pub construction: UnitaryConstruction,
    pub u: AlgebraElement,
    pub report: NormalizerReport,
}

/// `u = φ(v)` on the alternating star with `n ≥ 4` edges, where `v` is the
/// unitary of [`build_unitary_v`] for `τ ∈ S_n`. Unitarity and the strip
/// pattern are hard requirements; the conjugation identity is checked for
/// each function in `tests`.
pub fn build_strange_normalizer(n: usize, tau: &Permutation, tests: &[PPFun]) -> Result<StrangeNormalizer> {
    if n < 4 {
        return Err(Error::TooFewEdges(n));
    }
    if tau.degree() != n {
        return Err(Error::Dimension(format!("τ acts on {} points, expected {n}", tau.degree())));
    }
    let groupoid = Arc::new(GermGroupoid::alternating_star(n));
    let group = Arc::new(groupoid.group().clone());
    let construction = build_unitary_v(&group, tau)?;
    let u = phi(&construction.v, &groupoid)?;
    let unit = AlgebraElement::unit(&groupoid);
    let us = u.adjoint();
    let unitary = us.convolve(&u)? == unit && u.convolve(&us)? == unit;
    verify(unitary, "u*u = uu* = 1")?;
    let strips_match_tau = groupoid.admissible_pairs().all(|(i, j)| {
        let expected = if tau.apply(i) == j { Scalar::one() } else { Scalar::zero() };
        u.strip(i, j).map_or(expected.is_zero(), |f| f.is_constant() == Some(expected.clone()))
    });
    verify(strips_match_tau, "u(t, i, j) = [τ(i) = j]")?;
    let mut conjugation_checks = Vec::with_capacity(tests.len());
    for h in tests {
        let lhs = us.convolve(&AlgebraElement::embed_c0(&groupoid, h)?)?.convolve(&u)?;
        let rhs = AlgebraElement::embed_c0(&groupoid, &h.compose_perm(tau))?;
        conjugation_checks.push(lhs == rhs);
    }
    let point_map = u.induced_point_map()?;
    let report = NormalizerReport {
        tau: tau.clone(),
        tau_even: tau.is_even(),
        unitary,
        strips_match_tau,
        conjugation_checks,
        support: u.open_support(),
        bisection: u.is_bisection_support(),
        center_support: u.center_support(),
        theta_is_tau: point_map.as_edge_permutation().as_ref() == Some(tau),
        point_map,
        tau_in_group: groupoid.group().contains(tau),
    };
    Ok(StrangeNormalizer { groupoid, construction, u, report })
}
