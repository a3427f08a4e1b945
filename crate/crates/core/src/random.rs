//! Seeded generators for the randomized checks. Each trial draws from its own
//! stream, so results do not depend on scheduling.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::AlgebraElement;
use crate::germ::GermGroupoid;
use crate::perm::PermGroup;
use crate::poly::{Piecewise, Poly};
use crate::rep::GroupAlgebraElement;
use crate::scalar::{rat, Rational, Scalar};
use crate::star::PPFun;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    // splitmix64 step to decorrelate neighbouring trials
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Small Gaussian rational, real with probability 1/2.
pub fn scalar<R: Rng>(rng: &mut R) -> Scalar {
    let part = |rng: &mut R| rat(rng.gen_range(-4..=4), rng.gen_range(1..=3));
    let re = part(rng);
    let im = if rng.gen_bool(0.5) { part(rng) } else { rat(0, 1) };
    Scalar::new(re, im)
}

/// Nonzero small Gaussian integer.
pub fn unit_scalar<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let s = Scalar::new(rat(rng.gen_range(-2..=2), 1), rat(rng.gen_range(-2..=2), 1));
        if !s.is_zero() {
            return s;
        }
    }
}

/// Random continuous piecewise polynomial on `(0, 1]` tending to `at_zero`:
/// linear interpolation through random node values plus a random quadratic
/// bump on each piece vanishing at both ends.
pub fn piecewise<R: Rng>(rng: &mut R, at_zero: Scalar) -> Piecewise {
    let mut inner: Vec<i64> = (1..8).collect();
    inner.shuffle(rng);
    let k = rng.gen_range(0..=2);
    let mut cuts: Vec<Rational> = inner[..k].iter().map(|&c| rat(c, 8)).collect();
    cuts.sort();
    let mut breaks = vec![rat(0, 1)];
    breaks.extend(cuts);
    breaks.push(rat(1, 1));
    let mut values = vec![at_zero];
    for _ in 1..breaks.len() {
        values.push(scalar(rng));
    }
    let pieces = (0..breaks.len() - 1)
        .map(|p| {
            let (a, b) = (&breaks[p], &breaks[p + 1]);
            let slope = &(&values[p + 1] - &values[p]) / &Scalar::real(b - a);
            // v_p + slope (t - a)
            let line = Poly::new(vec![&values[p] - &(&slope * &Scalar::real(a.clone())), slope]);
            let bump = Poly::new(vec![Scalar::real(-a.clone()), Scalar::one()])
                .mul(&Poly::new(vec![Scalar::real(-b.clone()), Scalar::one()]))
                .scale(&if rng.gen_bool(0.5) { scalar(rng) } else { Scalar::zero() });
            line.add(&bump)
        })
        .collect();
    Piecewise::new(breaks, pieces).expect("interpolant is continuous")
}

pub fn ppfun<R: Rng>(rng: &mut R, n: usize) -> PPFun {
    let c = scalar(rng);
    let edges = (0..n).map(|_| piecewise(rng, c.clone())).collect();
    PPFun::new(c, edges).expect("edges share the center limit")
}

/// A sum of one to `max_sheets` random sheets `h · 1_{U_σ}`.
pub fn sheet_element<R: Rng>(rng: &mut R, groupoid: &Arc<GermGroupoid>, max_sheets: usize) -> AlgebraElement {
    let sheets = rng.gen_range(1..=max_sheets.max(1));
    let mut out = AlgebraElement::zero(groupoid);
    for _ in 0..sheets {
        let sigma = groupoid.group().elements().choose(rng).expect("groups are nonempty").clone();
        let h = ppfun(rng, groupoid.edges());
        out = out.add(&AlgebraElement::from_sheet(groupoid, &sigma, &h).expect("σ is in the group")).unwrap();
    }
    out
}

pub fn group_algebra_element<R: Rng>(rng: &mut R, group: &Arc<PermGroup>) -> GroupAlgebraElement {
    let coeffs = (0..group.order()).map(|_| if rng.gen_bool(0.6) { scalar(rng) } else { Scalar::zero() }).collect();
    GroupAlgebraElement::from_coeffs(group, coeffs).unwrap()
}

/// Random edge coordinate in `(0, 1]` with denominator up to 16.
pub fn edge_coordinate<R: Rng>(rng: &mut R) -> Rational {
    let d = rng.gen_range(1..=16);
    rat(rng.gen_range(1..=d), d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<u32> = (0..4).map(|_| trial_rng(7, 3).gen()).collect();
        let b: Vec<u32> = (0..4).map(|_| trial_rng(7, 3).gen()).collect();
        assert_eq!(a, b);
        assert_ne!(trial_rng(7, 3).gen::<u64>(), trial_rng(7, 4).gen::<u64>());
    }

    #[test]
    fn generated_elements_satisfy_gluing() {
        let g = Arc::new(GermGroupoid::cross());
        let mut rng = trial_rng(1, 0);
        for _ in 0..20 {
            assert!(sheet_element(&mut rng, &g, 3).is_compatible());
        }
    }
}
