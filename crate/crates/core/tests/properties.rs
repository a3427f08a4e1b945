use std::sync::Arc;

use germoid::algebra::AlgebraElement;
use germoid::experiments::algebra_laws;
use germoid::finite::{corpus, FiniteGroupoid, TOLERANCE};
use germoid::germ::GermGroupoid;
use germoid::perm::{parse_cycles, PermGroup, Permutation};
use germoid::random::{self, trial_rng};
use germoid::scalar::{rat, Scalar};
use germoid::star::{Interval, OpenStarSet, StarPoint};
use proptest::prelude::*;
use proptest::sample::Index;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
}

fn point(n: usize) -> impl Strategy<Value = StarPoint> {
    prop_oneof![
        1 => Just(StarPoint::Center),
        4 => (0..n, 1i64..=16, 1i64..=16).prop_map(|(e, a, b)| {
            let (a, b) = (a.min(b), a.max(b));
            StarPoint::edge(e, rat(a, b)).unwrap()
        }),
    ]
}

fn interval() -> impl Strategy<Value = Interval> {
    (0i64..12, 1i64..=12, any::<bool>()).prop_map(|(a, b, to_end)| {
        let (lo, hi) = (rat(a.min(b), 12), rat(a.max(b), 12));
        if to_end {
            Interval::to_end(lo)
        } else {
            Interval::open(lo, hi)
        }
    })
}

fn open_set(n: usize) -> impl Strategy<Value = OpenStarSet> {
    (any::<bool>(), proptest::collection::vec(proptest::collection::vec(interval(), 0..3), n), 1i64..6).prop_map(
        |(center, mut edges, eps)| {
            if center {
                for e in &mut edges {
                    e.push(Interval::open(rat(0, 1), rat(eps, 6)));
                }
            }
            OpenStarSet::new(center, edges).unwrap()
        },
    )
}

fn scalar() -> impl Strategy<Value = Scalar> {
    any::<u64>().prop_map(|s| random::scalar(&mut trial_rng(s, 0)))
}

fn germ_fixture() -> Arc<GermGroupoid> {
    Arc::new(GermGroupoid::alternating_star(4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_is_a_left_action(s in perm(5), t in perm(5), p in point(5)) {
        prop_assert_eq!(p.act(&t).act(&s), p.act(&s.compose(&t)));
        prop_assert_eq!(p.act(&Permutation::identity(5)), p);
    }

    #[test]
    fn cycle_notation_round_trips(s in perm(6)) {
        prop_assert_eq!(parse_cycles(&s.to_string(), 6).unwrap(), s);
    }

    #[test]
    fn open_set_boolean_identities(a in open_set(3), b in open_set(3), c in open_set(3)) {
        let u = |x: &OpenStarSet, y: &OpenStarSet| x.union(y).unwrap();
        let i = |x: &OpenStarSet, y: &OpenStarSet| x.intersection(y).unwrap();
        prop_assert_eq!(u(&a, &b), u(&b, &a));
        prop_assert_eq!(i(&a, &b), i(&b, &a));
        prop_assert_eq!(u(&u(&a, &b), &c), u(&a, &u(&b, &c)));
        prop_assert_eq!(i(&i(&a, &b), &c), i(&a, &i(&b, &c)));
        prop_assert_eq!(u(&a, &i(&a, &b)), a.clone());
        prop_assert_eq!(i(&a, &u(&a, &b)), a.clone());
        prop_assert_eq!(i(&a, &u(&b, &c)), u(&i(&a, &b), &i(&a, &c)));
    }

    #[test]
    fn open_set_operations_stay_open(a in open_set(4), b in open_set(4), s in perm(4)) {
        for set in [a.union(&b).unwrap(), a.intersection(&b).unwrap(), a.act(&s)] {
            let rebuilt = OpenStarSet::new(set.contains_center(), (0..4).map(|e| set.edge_intervals(e).to_vec()).collect());
            prop_assert_eq!(rebuilt.unwrap(), set);
        }
    }

    #[test]
    fn open_set_membership_matches_operations(a in open_set(3), b in open_set(3), p in point(3)) {
        prop_assert_eq!(a.union(&b).unwrap().contains(&p), a.contains(&p) || b.contains(&p));
        prop_assert_eq!(a.intersection(&b).unwrap().contains(&p), a.contains(&p) && b.contains(&p));
    }

    #[test]
    fn ppfun_ring_laws(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let [f, g, h] = [0, 1, 2].map(|_| random::ppfun(&mut rng, 3));
        prop_assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
        prop_assert_eq!(f.mul(&g.add(&h).unwrap()).unwrap(), f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
    }

    #[test]
    fn scalar_field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        if let Some(inv) = a.inv() {
            prop_assert!((&a * &inv).is_one());
        }
        prop_assert_eq!(a.to_string().parse::<Scalar>().unwrap(), a);
    }

    #[test]
    fn germ_composition_is_associative(s1 in 0usize..12, s2 in 0usize..12, s3 in 0usize..12, p in point(4)) {
        let g = germ_fixture();
        let el = |k: usize| g.group().element(k).clone();
        let c = g.germ_of(&el(s3), &p).unwrap();
        let b = g.germ_of(&el(s2), &c.range()).unwrap();
        let a = g.germ_of(&el(s1), &b.range()).unwrap();
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert!(g.contains(&left));
        prop_assert!(a.compose(&a.inverse()).unwrap().is_unit());
    }

    #[test]
    fn germ_of_respects_the_group_product(s in 0usize..12, t in 0usize..12, p in point(4)) {
        let g = germ_fixture();
        let (s, t) = (g.group().element(s).clone(), g.group().element(t).clone());
        let lhs = g.germ_of(&s, &p.act(&t)).unwrap().compose(&g.germ_of(&t, &p).unwrap()).unwrap();
        prop_assert_eq!(lhs, g.germ_of(&s.compose(&t), &p).unwrap());
    }

    #[test]
    fn bisection_indicators_multiply_like_the_group(s in 0usize..12, t in 0usize..12) {
        let g = germ_fixture();
        let (s, t) = (g.group().element(s).clone(), g.group().element(t).clone());
        let one = |x: &Permutation| AlgebraElement::indicator(&g, x).unwrap();
        prop_assert_eq!(one(&s).convolve(&one(&t)).unwrap(), one(&s.compose(&t)));
        prop_assert!(one(&s).is_bisection_support().bisection);
    }

    #[test]
    fn convolution_algebra_laws(seed in any::<u64>()) {
        prop_assert!(algebra_laws(&germ_fixture(), seed, 0));
    }

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>()) {
        let g = Arc::new(GermGroupoid::cross());
        let a = random::sheet_element(&mut trial_rng(seed, 0), &g, 4);
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        let e = a.adjoint().convolve(&a).unwrap().conditional_expectation();
        prop_assert!(e.center.is_nonneg_real());
    }

    #[test]
    fn group_closure_is_closed(s in perm(5), t in perm(5)) {
        let g = PermGroup::generate(5, vec![s.clone(), t.clone()]).unwrap();
        for x in g.elements() {
            prop_assert!(g.contains(&x.compose(&s)) && g.contains(&x.inverse()));
        }
        prop_assert_eq!(120 % g.order(), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn finite_convolution_laws(pick in any::<Index>(), seed in any::<u64>()) {
        let groupoids: Vec<FiniteGroupoid> = corpus().into_iter().map(|(_, g)| g).filter(|g| g.arrow_count() <= 50).collect();
        let g = pick.get(&groupoids);
        let mut rng = trial_rng(seed, 0);
        let [a, b, c] = [0, 1, 2].map(|_| (0..g.arrow_count()).map(|_| random::scalar(&mut rng)).collect::<Vec<_>>());
        prop_assert_eq!(g.convolve(&g.convolve(&a, &b), &c), g.convolve(&a, &g.convolve(&b, &c)));
        prop_assert_eq!(g.adjoint(&g.convolve(&a, &b)), g.convolve(&g.adjoint(&b), &g.adjoint(&a)));
        let n = g.operator_norm(&a);
        let aa = g.convolve(&g.adjoint(&a), &a);
        prop_assert!((g.operator_norm(&aa) - n * n).abs() <= TOLERANCE * (1.0 + n * n));
        let e = g.expectation(&aa);
        prop_assert!(e.iter().all(Scalar::is_nonneg_real));
    }
}
