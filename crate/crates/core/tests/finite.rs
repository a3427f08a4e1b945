use germoid::finite::{corpus, corpus_check, ExplicitArrow, FiniteGroupoid, FiniteSpec};
use germoid::par::Execution;
use germoid::perm::PermGroup;
use germoid::scalar::Scalar;
use germoid::Error;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

#[test]
fn corpus_principal_implies_intersection_and_masa() {
    let entries = corpus_check(3, Execution::default()).unwrap();
    assert_eq!(entries.len(), corpus().len());
    assert!(entries.iter().any(|e| e.arrows >= 190));
    for e in &entries {
        assert_eq!(e.intersection, e.faithful, "{}", e.name);
        if e.principal {
            assert!(e.intersection && e.masa, "{}", e.name);
        } else {
            // isotropy splits the group algebra, and no block holds the diagonal unit
            assert!(!e.intersection && !e.masa, "{}", e.name);
        }
    }
    assert!(entries.iter().any(|e| !e.principal));
}

#[test]
fn sequential_and_parallel_corpus_agree() {
    assert_eq!(corpus_check(9, Execution::Sequential).unwrap(), corpus_check(9, Execution::Parallel).unwrap());
}

#[test]
fn sizes_from_specs() {
    let z3 = FiniteSpec::parse(r#"{"transformation": {"points": 3, "group_generators": ["(1 2 3)"]}}"#).unwrap();
    assert_eq!(z3.build().unwrap().arrow_count(), 9);
    let eq = FiniteSpec::parse(r#"{"equivalence": {"points": 4, "classes": [[1, 2], [3, 4]]}}"#).unwrap();
    let g = eq.build().unwrap();
    assert_eq!(g.arrow_count(), 8);
    assert_eq!(g.summary().orbits.len(), 2);
    let bad = FiniteSpec::parse(r#"{"equivalence": {"points": 2, "classes": [[1, 3]]}}"#).unwrap();
    assert!(bad.build().is_err());
}

#[test]
fn explicit_spec_with_broken_associativity() {
    // a two-unit groupoid with a pair of mutually inverse arrows, then a
    // table that sends a∘b to the wrong unit
    let units = names(&["x", "y"]);
    let arrows = vec![
        ExplicitArrow { name: "a".into(), src: "x".into(), rng: "y".into() },
        ExplicitArrow { name: "b".into(), src: "y".into(), rng: "x".into() },
    ];
    let good = [names(&["a", "b", "y"]), names(&["b", "a", "x"])].map(|v| [v[0].clone(), v[1].clone(), v[2].clone()]);
    let g = FiniteGroupoid::explicit(&units, &arrows, &good).unwrap();
    assert!(g.principality().principal);
    assert_eq!(g.regular_image_dimension(0), 4);
    let bad = [names(&["a", "b", "x"]), names(&["b", "a", "x"])].map(|v| [v[0].clone(), v[1].clone(), v[2].clone()]);
    match FiniteGroupoid::explicit(&units, &arrows, &bad) {
        Err(Error::Axiom(msg)) => assert!(msg.contains("(a, b)"), "{msg}"),
        other => panic!("expected an axiom error, got {other:?}"),
    }
}

#[test]
fn regular_representation_of_free_z3() {
    let g = FiniteGroupoid::transformation(3, &PermGroup::cyclic(3)).unwrap();
    assert_eq!(g.arrow_count(), 9);
    for x in 0..3 {
        assert_eq!(g.regular_image_dimension(x), 9);
        assert_eq!(g.fiber(x).len(), 3);
    }
    let one = g.identity();
    assert!((g.operator_norm(&one) - 1.0).abs() < 1e-12);
    let dec = g.center_decomposition(1).unwrap();
    assert_eq!(dec.block_dimensions, vec![9]);
}

#[test]
fn single_unit_indicator_is_the_equality_case() {
    let g = FiniteGroupoid::transformation(3, &PermGroup::cyclic(3)).unwrap();
    let f = g.delta(1);
    assert!((g.operator_norm(&f) - 1.0).abs() < 1e-12);
    assert_eq!(f[1], Scalar::one());
}

#[test]
fn full_equivalence_is_a_matrix_algebra() {
    let g = FiniteGroupoid::full_equivalence(2);
    assert_eq!(g.arrow_count(), 4);
    let dec = g.center_decomposition(5).unwrap();
    assert_eq!(dec.block_dimensions, vec![4]);
    assert!(g.faithfulness_check(5).unwrap().holds);
}

#[test]
fn trivial_z2_splits_into_two_blocks() {
    let g = FiniteSpec::parse(r#"{"transformation": {"points": 1, "degree": 3, "group_generators": ["(2 3)"]}}"#)
        .unwrap()
        .build()
        .unwrap();
    let dec = g.center_decomposition(2).unwrap();
    assert_eq!(dec.block_dimensions, vec![1, 1]);
    let ip = g.intersection_property_check(2).unwrap();
    assert!(ip.blocks.iter().all(|b| !b.meets_diagonal));
    let fc = g.faithfulness_check(2).unwrap();
    assert!(fc.failing_kernel.is_some() && fc.exhaustive);
}
