//! Named experiments with machine-readable reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{convolve_at, cross_elements, verify_central_ideal, AlgebraElement};
use crate::error::{Error, Result};
use crate::finite::{corpus_check, FiniteSpec, TOLERANCE};
use crate::germ::{Germ, GermGroupoid};
use crate::par::{map_indexed, Execution};
use crate::perm::{parse_cycles, PermGroup, Permutation};
use crate::random::{self, trial_rng};
use crate::rep::{bitransitivity_check, build_strange_normalizer, commutant_basis, integrated_rep, perm_rep, phi};
use crate::scalar::Scalar;
use crate::star::StarPoint;

pub const SCHEMA_VERSION: u32 = 1;

/// Seed used when neither a flag nor `GERMOID_SEED` supplies one.
pub const DEFAULT_SEED: u64 = 20_231_107;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Exact,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    /// `None` for purely informational observations.
    pub expected: Option<bool>,
    pub observed: bool,
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.expected.is_none_or(|e| e == self.observed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    /// The run hit a documented obstruction and behaved as documented.
    Obstruction,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Obstruction => 2,
            Outcome::Fail => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub seed: Option<u64>,
    pub inputs: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub witnesses: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<String>,
    pub wall_time_ms: f64,
    pub outcome: Outcome,
}

impl ExperimentReport {
    fn new(experiment: &str, seed: Option<u64>) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            seed,
            inputs: BTreeMap::new(),
            checks: Vec::new(),
            witnesses: BTreeMap::new(),
            obstruction: None,
            wall_time_ms: 0.0,
            outcome: Outcome::Pass,
        }
    }

    fn input(&mut self, key: &str, value: impl Serialize) {
        self.inputs.insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }

    fn witness(&mut self, key: &str, value: impl Serialize) {
        self.witnesses.insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }

    fn exact(&mut self, name: &str, expected: Option<bool>, observed: bool) {
        self.checks.push(Check { name: name.into(), kind: CheckKind::Exact, expected, observed, residual: None, detail: None });
    }

    fn numeric(&mut self, name: &str, expected: Option<bool>, observed: bool, residual: f64) {
        self.checks.push(Check {
            name: name.into(),
            kind: CheckKind::Numeric,
            expected,
            observed,
            residual: Some(residual),
            detail: None,
        });
    }

    fn detail(&mut self, text: String) {
        if let Some(c) = self.checks.last_mut() {
            c.detail = Some(text);
        }
    }

    fn finish(mut self, start: Instant) -> Self {
        self.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        self.outcome = if !self.checks.iter().all(Check::passed) {
            Outcome::Fail
        } else if self.obstruction.is_some() {
            Outcome::Obstruction
        } else {
            Outcome::Pass
        };
        self
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    /// Human-readable rendering, one line per check.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let seed = self.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
        writeln!(out, "experiment {} (seed {seed})", self.experiment).unwrap();
        for c in &self.checks {
            let status = match (c.expected, c.passed()) {
                (None, _) => "info",
                (Some(_), true) => "ok",
                (Some(_), false) => "FAIL",
            };
            write!(out, "  [{status:>4}] {}: {}", c.name, c.observed).unwrap();
            if let Some(r) = c.residual {
                write!(out, " (residual {r:.2e})").unwrap();
            }
            if let Some(d) = &c.detail {
                write!(out, " -- {d}").unwrap();
            }
            out.push('\n');
        }
        if let Some(o) = &self.obstruction {
            writeln!(out, "  obstruction: {o}").unwrap();
        }
        writeln!(out, "outcome {:?} in {:.1} ms", self.outcome, self.wall_time_ms).unwrap();
        out
    }
}

/// `GERMOID_SEED` if set and numeric, else [`DEFAULT_SEED`].
pub fn default_seed() -> u64 {
    std::env::var("GERMOID_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

/// The Klein-group cross: the central element `f`, its ideal, and its
/// failure to sit inside the diagonal.
pub fn run_cross(trials: usize, seed: u64, exec: Execution) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut r = ExperimentReport::new("cross", Some(seed));
    r.input("trials", trials);
    let g = Arc::new(GermGroupoid::cross());
    let f = AlgebraElement::cross_f(&g)?;

    let generators = cross_elements().map(|s| AlgebraElement::indicator(&g, &s).unwrap());
    let gen_report = verify_central_ideal(&f, &generators)?;
    r.exact("generators act by λ on f", Some(true), gen_report.all_hold);
    let lambdas: Vec<Scalar> = gen_report.tests.iter().map(|t| t.lambda.clone()).collect();
    r.exact("λ table is (1, -1, -1, 1)", Some(true), lambdas == [1, -1, -1, 1].map(Scalar::int));
    r.witness("lambda_table", &lambdas);

    let values: Vec<Scalar> = cross_elements().iter().map(|s| f.center_value(s)).collect();
    r.exact(
        "f is (1, -1, -1, 1) at the center and 0 elsewhere",
        Some(true),
        values == [1, -1, -1, 1].map(Scalar::int) && f.strips().next().is_none(),
    );
    r.exact("f*f = 4f", Some(true), f.convolve(&f)? == f.scale(&Scalar::int(4)));

    let random_tests = map_indexed(exec, trials, |t| {
        let mut rng = trial_rng(seed, t as u64);
        let el = random::sheet_element(&mut rng, &g, 4);
        let h = AlgebraElement::embed_c0(&g, &random::ppfun(&mut rng, 4)).unwrap();
        let ideal = verify_central_ideal(&f, std::slice::from_ref(&el)).unwrap().all_hold;
        let commutes = f.commutator(&h).unwrap().is_zero();
        (ideal, commutes)
    });
    let ideal_ok = random_tests.iter().filter(|t| t.0).count();
    let comm_ok = random_tests.iter().filter(|t| t.1).count();
    r.exact("random elements act by λ on f", Some(true), ideal_ok == trials);
    r.detail(format!("{ideal_ok}/{trials}"));
    r.exact("span{f} is a two-sided ideal", Some(true), gen_report.all_hold && ideal_ok == trials);
    r.exact("f lies outside C0(X)", Some(true), gen_report.outside_c0_witness.is_some());
    r.witness("outside_c0_witness", gen_report.outside_c0_witness.as_ref().map(Germ::to_string));
    r.exact("span{f} meets C0(X) only in 0", Some(true), gen_report.meets_c0_trivially);
    r.exact("f commutes with random h in C0(X)", Some(true), comm_ok == trials);
    r.detail(format!("{comm_ok}/{trials}"));
    r.exact("C0(X) is not maximal abelian", Some(true), comm_ok == trials && !f.is_in_c0());

    r.witness("support", f.open_support());
    diagnostics(&mut r, &g, Some(true), Some(false));
    Ok(r.finish(start))
}

fn diagnostics(r: &mut ExperimentReport, g: &GermGroupoid, principal: Option<bool>, hausdorff: Option<bool>) {
    let p = g.essentially_principal_check();
    r.exact("essentially principal", principal, p.essentially_principal);
    r.witness("interior_isotropy", p.interior_isotropy.iter().map(Germ::to_string).collect::<Vec<_>>());
    let h = g.hausdorff_check();
    r.exact("Hausdorff", hausdorff, h.hausdorff);
    r.witness("inseparable_pairs", &h.inseparable_pairs);
    r.witness("isotropy_at_center", g.isotropy_description().iter().map(Germ::to_string).collect::<Vec<_>>());
}

/// The alternating star with `n` edges: commutant, bi-transitivity and the
/// normalizer `u` built from `τ`.
pub fn run_star(n: usize, tau: &str, trials: usize, seed: u64) -> Result<ExperimentReport> {
    let start = Instant::now();
    if n < 2 {
        return Err(Error::TooFewEdges(n));
    }
    let tau = parse_cycles(tau, n)?;
    let mut r = ExperimentReport::new("star", Some(seed));
    r.input("n", n);
    r.input("tau", &tau);
    r.input("trials", trials);
    let group = PermGroup::alternating(n);
    let large = n >= 4;
    r.exact("A_n is bi-transitive", Some(large), bitransitivity_check(&group));
    let mats: Vec<_> = group.elements().iter().map(perm_rep).collect();
    let commutant = commutant_basis(&mats)?;
    r.exact("commutant has dimension 2", Some(large), commutant.dimension == 2);
    r.detail(format!("dimension {}", commutant.dimension));
    r.witness("commutant_dimension", commutant.dimension);
    if large {
        r.exact("commutant basis is {z, y}", Some(true), commutant.is_zy_pattern());
    }
    let g = Arc::new(GermGroupoid::alternating_star(n));
    if !large {
        r.obstruction = Some(format!(
            "not true for n < 4: the commutant has dimension {} and the construction of u does not apply",
            commutant.dimension
        ));
        diagnostics(&mut r, &g, None, None);
        return Ok(r.finish(start));
    }

    let tests: Vec<_> = (0..trials).map(|t| random::ppfun(&mut trial_rng(seed, t as u64), n)).collect();
    let sn = build_strange_normalizer(n, &tau, &tests)?;
    let rep = &sn.report;
    r.exact("v*v = vv* = 1", Some(true), rep.unitary);
    r.exact("π̃(v) = π(τ)", Some(true), integrated_rep(&sn.construction.v) == perm_rep(&tau));
    r.exact("u(t, i, j) = [τ(i) = j]", Some(true), rep.strips_match_tau);
    let conj_ok = rep.conjugation_checks.iter().filter(|&&b| b).count();
    r.exact("u* h u = h∘τ for random h", Some(true), conj_ok == trials);
    r.detail(format!("{conj_ok}/{trials}"));
    r.exact("induced point map is τ", Some(true), rep.theta_is_tau);
    r.exact("τ lies in A_n", None, rep.tau_in_group);
    if tau.is_identity() {
        r.exact("u is the unit", Some(true), sn.u == AlgebraElement::unit(&g));
    }
    let expect_bisection = if tau.is_even() { None } else { Some(false) };
    r.exact("supp′(u) is a bisection", expect_bisection, rep.bisection.bisection);
    if tau.is_even() && !tau.is_identity() {
        r.detail("τ is even, so 1_τ is itself a normalizer supported on a bisection".into());
    }
    r.exact("two or more center values", expect_bisection.map(|b| !b), rep.center_support.len() >= 2);
    r.witness("bisection_violation", &rep.bisection.violation);
    r.witness("center_support", &rep.center_support);
    r.witness("center_values", rep.center_support.iter().map(|s| (s.to_string(), sn.u.center_value(s))).collect::<BTreeMap<_, _>>());
    r.witness("v", sn.construction.v.to_json());
    r.witness("point_map", &rep.point_map);

    let group = Arc::new(g.group().clone());
    let mut agree = 0;
    for t in 0..trials {
        let mut rng = trial_rng(seed ^ 0x5eed, t as u64);
        let a = random::group_algebra_element(&mut rng, &group);
        let pa = phi(&a, &g)?;
        let m = integrated_rep(&a);
        let s = random::edge_coordinate(&mut rng);
        let ok = (0..n).all(|i| {
            (0..n).all(|j| {
                let lhs = if g.is_admissible(i, j) { pa.evaluate(&Germ::edge(s.clone(), i, j)).unwrap() } else { Scalar::zero() };
                lhs == m[(j, i)]
            })
        });
        agree += ok as usize;
    }
    r.exact("φ(a)(t, i, j) = ⟨π̃(a) e_i, e_j⟩", Some(true), agree == trials);
    r.detail(format!("{agree}/{trials}"));
    diagnostics(&mut r, &g, Some(true), Some(false));
    Ok(r.finish(start))
}

/// JSON description of a star groupoid: `{"n": 4, "group": "A4"}` or
/// `{"n": 4, "generators": ["(1 2 3 4)"], "degree": 4}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarSpec {
    pub n: usize,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub generators: Option<Vec<String>>,
    #[serde(default)]
    pub degree: Option<usize>,
}

impl StarSpec {
    pub fn parse(text: &str) -> Result<StarSpec> {
        serde_json::from_str(text).map_err(|e| Error::Spec(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn build(&self) -> Result<GermGroupoid> {
        let n = self.n;
        let group = match (&self.group, &self.generators) {
            (Some(_), Some(_)) => return Err(Error::Spec("give either group or generators, not both".into())),
            (Some(name), None) => named_group(name, n)?,
            (None, Some(gens)) => {
                let degree = self.degree.unwrap_or(n);
                PermGroup::generate(degree, gens.iter().map(|g| parse_cycles(g, degree)).collect::<Result<Vec<_>>>()?)?
            }
            (None, None) => return Err(Error::Spec("missing group or generators".into())),
        };
        GermGroupoid::new(n, group)
    }
}

fn named_group(name: &str, n: usize) -> Result<PermGroup> {
    let lower = name.to_ascii_lowercase();
    let order_suffix = |prefix: &str| lower.strip_prefix(prefix).map(|rest| rest.is_empty() || rest.parse() == Ok(n));
    if lower == "klein" {
        return if n == 4 { Ok(PermGroup::klein_cross()) } else { Err(Error::Spec("the Klein cross needs n = 4".into())) };
    }
    if lower == "trivial" {
        return Ok(PermGroup::trivial(n));
    }
    for (prefix, build) in [("a", PermGroup::alternating as fn(usize) -> PermGroup), ("s", PermGroup::symmetric), ("z", PermGroup::cyclic), ("c", PermGroup::cyclic)] {
        match order_suffix(prefix) {
            Some(true) => return Ok(build(n)),
            Some(false) => return Err(Error::Spec(format!("group {name} does not match n = {n}"))),
            None => {}
        }
    }
    Err(Error::Spec(format!("unknown group {name}; use An, Sn, Zn, klein, trivial or generators")))
}

/// Hausdorff, essential principality and isotropy for a star spec.
pub fn run_diagnose(spec_text: &str) -> Result<ExperimentReport> {
    let start = Instant::now();
    let spec = StarSpec::parse(spec_text)?;
    let g = spec.build()?;
    let mut r = ExperimentReport::new("diagnose", None);
    r.input("spec", &spec);
    r.input("group_order", g.group().order());
    diagnostics(&mut r, &g, None, None);
    Ok(r.finish(start))
}

/// The full finite suite on one groupoid. For a finite groupoid both
/// properties and the masa condition hold exactly when it is principal:
/// nontrivial isotropy `H` splits `ℂ[H]`, and no block of it contains the
/// diagonal copy of `1`.
pub fn run_finite(spec_text: &str, trials: usize, seed: u64, exec: Execution) -> Result<ExperimentReport> {
    let start = Instant::now();
    let spec = FiniteSpec::parse(spec_text)?;
    let g = spec.build()?;
    let mut r = ExperimentReport::new("finite", Some(seed));
    r.input("spec", &spec);
    r.input("trials", trials);
    r.witness("summary", g.summary());
    let principal = g.principality().principal;
    r.exact("principal", None, principal);
    r.exact("essentially principal", None, g.principality().essentially_principal);
    let expect = Some(principal);
    let ip = g.intersection_property_check(seed)?;
    r.numeric("(B) nonzero ideals meet the diagonal", expect, ip.holds, ip.residual);
    r.witness("blocks", &ip.blocks);
    let fc = g.faithfulness_check(seed)?;
    r.numeric("(A) faithful on the diagonal implies faithful", expect, fc.holds, fc.residual);
    r.witness("failing_kernel", &fc.failing_kernel);
    r.exact("(A) and (B) agree", Some(true), ip.holds == fc.holds);
    let masa = g.diagonal_masa_check();
    r.exact("diagonal is maximal abelian", expect, masa.masa);
    r.detail(format!("commutant dimension {} for {} units", masa.commutant_dimension, masa.units));
    let key = g.key_inequality_check(trials, seed, exec)?;
    r.numeric("|f(x)| <= ‖λ(f)‖ at units without isotropy", Some(true), key.violations.is_empty(), key.residual);
    r.detail(format!("{} checks, {} violations", key.checks, key.violations.len()));
    r.witness("key_violations", &key.violations);
    r.exact("⟨λ_x(f) δ_x, δ_x⟩ = f(x)", Some(true), key.extraction_failures == 0);

    let mut worst: f64 = 0.0;
    let mut expectation_ok = true;
    for t in 0..trials.min(100) {
        let mut rng = trial_rng(seed ^ 0xe, t as u64);
        let f: Vec<Scalar> = (0..g.arrow_count()).map(|_| random::scalar(&mut rng)).collect();
        let ff = g.convolve(&g.adjoint(&f), &f);
        let e = g.expectation(&ff);
        let positive = e.iter().all(Scalar::is_nonneg_real);
        let faithful = e.iter().any(|v| !v.is_zero()) == f.iter().any(|v| !v.is_zero());
        expectation_ok &= positive && faithful;
        let n = g.operator_norm(&f);
        worst = worst.max((g.operator_norm(&ff) - n * n).abs() / (1.0 + n * n));
    }
    r.exact("E(f* f) is positive and faithful", Some(true), expectation_ok);
    r.numeric("‖f* f‖ = ‖f‖²", Some(true), worst <= TOLERANCE, worst);
    Ok(r.finish(start))
}

/// Every invariant suite at reduced size with a fixed seed.
pub fn run_selftest(seed: u64, exec: Execution) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut r = ExperimentReport::new("selftest", Some(seed));
    let cross = run_cross(25, seed, exec)?;
    r.exact("cross suite", Some(true), cross.all_passed());
    let star = run_star(4, "(1 2)", 10, seed)?;
    r.exact("star suite, n = 4", Some(true), star.all_passed());
    let low = run_star(3, "(1 2)", 0, seed)?;
    r.exact("star obstruction, n = 3", Some(true), low.outcome == Outcome::Obstruction);

    let g = Arc::new(GermGroupoid::alternating_star(4));
    let laws = map_indexed(exec, 10, |t| algebra_laws(&g, seed, t as u64));
    let ok = laws.iter().filter(|l| **l).count();
    r.exact("algebra laws on random triples", Some(true), ok == laws.len());
    r.detail(format!("{ok}/{}", laws.len()));

    let corpus = corpus_check(seed, exec)?;
    let implication = corpus.iter().all(|c| !c.principal || (c.intersection && c.masa));
    r.exact("principal implies (B) and masa over the corpus", Some(true), implication);
    r.exact("(A) and (B) agree over the corpus", Some(true), corpus.iter().all(|c| c.intersection == c.faithful));
    r.witness("corpus", &corpus);
    Ok(r.finish(start))
}

/// Associativity, anti-multiplicativity of the adjoint, compatibility of
/// products, and pointwise agreement with [`convolve_at`] on one random
/// triple.
pub fn algebra_laws(g: &Arc<GermGroupoid>, seed: u64, trial: u64) -> bool {
    let mut rng = trial_rng(seed, trial);
    let [a, b, c] = [0, 1, 2].map(|_| random::sheet_element(&mut rng, g, 3));
    let ab = a.convolve(&b).unwrap();
    let assoc = ab.convolve(&c).unwrap() == a.convolve(&b.convolve(&c).unwrap()).unwrap();
    let inv = ab.adjoint() == b.adjoint().convolve(&a.adjoint()).unwrap();
    let compatible = ab.is_compatible();
    let pointwise = (0..5).all(|_| {
        let germ = random_germ(&mut rng, g);
        ab.evaluate(&germ).unwrap() == convolve_at(&a, &b, &germ).unwrap()
    });
    assoc && inv && compatible && pointwise
}

/// A uniformly chosen germ: at the center with probability 1/4, otherwise on
/// a random admissible strip.
pub fn random_germ<R: Rng>(rng: &mut R, g: &GermGroupoid) -> Germ {
    let group = g.group();
    let sigma: &Permutation = group.element(rng.gen_range(0..group.order()));
    let p = if rng.gen_bool(0.25) {
        StarPoint::Center
    } else {
        StarPoint::edge(rng.gen_range(0..g.edges()), random::edge_coordinate(rng)).unwrap()
    };
    g.germ_of(sigma, &p).unwrap()
}
