mod common;

use std::collections::BTreeMap;

use finmodel::chain::{
    homology, is_fibration, is_quasi_iso, truncate, truncation_map, verify_truncation_colimit,
    verify_truncation_colimit_with, ChainComplex, ChainMap, Matrix, TruncationFailure,
};
use finmodel::Error;
use proptest::prelude::*;
use rand::{rngs::StdRng, SeedableRng};

use common::{brute_homology, brute_rank, random_complex};

fn two_term(p: u64, d: &[i64], rows: usize, cols: usize) -> ChainComplex {
    let mut parts = BTreeMap::new();
    parts.insert(0, (rows, Matrix::zero(p, 0, rows)));
    parts.insert(1, (cols, Matrix::from_rows(p, rows, cols, d).unwrap()));
    ChainComplex::from_degrees(p, &parts).unwrap()
}

#[test]
fn homology_examples() {
    let z = ChainComplex::zero(2).unwrap();
    assert!((-3..=3).all(|n| homology(&z, n) == 0));
    let exact = two_term(2, &[1], 1, 1);
    assert_eq!((homology(&exact, 0), homology(&exact, 1)), (0, 0));
    let split = two_term(2, &[0], 1, 1);
    assert_eq!((homology(&split, 0), homology(&split, 1)), (1, 1));
}

#[test]
fn rejects_nonzero_square() {
    let mut parts = BTreeMap::new();
    parts.insert(0, (1, Matrix::zero(2, 0, 1)));
    parts.insert(1, (1, Matrix::from_rows(2, 1, 1, &[1]).unwrap()));
    parts.insert(2, (1, Matrix::from_rows(2, 1, 1, &[1]).unwrap()));
    match ChainComplex::from_degrees(2, &parts) {
        Err(Error::IllTyped(msg)) => assert!(msg.contains("degree 2"), "{msg}"),
        other => panic!("expected invariant violation, got {other:?}"),
    }
}

#[test]
fn rejects_composite_modulus() {
    assert!(Matrix::from_rows(4, 1, 1, &[1]).is_err());
}

#[test]
fn quasi_iso_examples() {
    let split = two_term(2, &[0], 1, 1);
    assert!(is_quasi_iso(&ChainMap::identity(&split)).unwrap());
    let exact = two_term(2, &[1], 1, 1);
    let zero = ChainComplex::zero(2).unwrap();
    assert!(is_quasi_iso(&ChainMap::zero(&exact, &zero).unwrap()).unwrap());
    assert!(!is_quasi_iso(&ChainMap::zero(&split, &split).unwrap()).unwrap());
}

#[test]
fn fibration_examples() {
    let split = two_term(2, &[0], 1, 1);
    let zero = ChainComplex::zero(2).unwrap();
    assert!(is_fibration(&ChainMap::zero(&split, &zero).unwrap()));
    assert!(is_fibration(&ChainMap::identity(&split)));
    // Inclusion of the line into a plane, concentrated in degree 0.
    let line = two_term(3, &[], 1, 0);
    let plane = two_term(3, &[], 2, 0);
    let inc = ChainMap::new(line, plane, 0, vec![Matrix::from_rows(3, 2, 1, &[1, 0]).unwrap()]).unwrap();
    assert!(!is_fibration(&inc));
}

#[test]
fn truncation_formulas() {
    let zero = ChainComplex::zero(2).unwrap();
    let t = truncate(&zero, 2).unwrap();
    assert!((-4..=3).all(|n| t.dim(n) == 0));

    let c = two_term(2, &[], 2, 0);
    let t0 = truncate(&c, 0).unwrap();
    assert_eq!((t0.dim(0), t0.dim(-1)), (2, 2));
    assert_eq!(t0.d(0), Matrix::identity(2, 2));
    assert!(t0.is_complex());
}

#[test]
fn covering_truncation_matches_complex() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..20 {
        let c = random_complex(&mut rng, 2, -2, 2, 3);
        let t = truncate(&c, 3).unwrap();
        for n in -2..=2 {
            assert_eq!(t.dim(n), c.dim(n));
            assert_eq!(t.d(n), c.d(n));
        }
        assert_eq!(t.dim(-4), 0);
        assert!(t.is_complex());
    }
}

#[test]
fn truncation_colimit_examples() {
    let zero = ChainComplex::zero(2).unwrap();
    assert!(verify_truncation_colimit(&zero, 1).unwrap().passed());

    let mut rng = StdRng::seed_from_u64(11);
    let c = loop {
        let c = random_complex(&mut rng, 2, -2, 2, 3);
        if !c.d(-1).is_zero() {
            break c;
        }
    };
    let report = verify_truncation_colimit(&c, 3).unwrap();
    assert!(report.passed(), "{:?}", report.failure);

    let small = verify_truncation_colimit(&c, 1).unwrap();
    assert!(matches!(small.failure, Some(TruncationFailure::StageTooSmall { needed: 3 })));
}

#[test]
fn corrupted_connecting_map_is_reported() {
    let mut rng = StdRng::seed_from_u64(5);
    let c = loop {
        let c = random_complex(&mut rng, 2, -2, 2, 3);
        if !c.d(-1).is_zero() {
            break c;
        }
    };
    // Replace f_{-2} = d_{-1} by zero in the stage-1 connecting map.
    let corrupt = |k: i64| {
        let good = truncation_map(&c, k, &truncate(&c, k + 1)?)?;
        if k != 1 {
            return Ok(good);
        }
        let maps = (-k - 1..=k)
            .map(|n| if n == -k - 1 { Matrix::zero(2, c.dim(-k - 1), c.dim(-k)) } else { good.at(n) })
            .collect();
        ChainMap::new_graded(good.source().clone(), good.target().clone(), -k - 1, maps)
    };
    let report = verify_truncation_colimit_with(&c, 3, &corrupt).unwrap();
    assert_eq!(report.failure, Some(TruncationFailure::Incoherent { stage: 1, degree: -2 }));
}

#[test]
fn brute_rank_agrees_on_small_cases() {
    let m = Matrix::from_rows(3, 2, 3, &[1, 2, 0, 2, 1, 0]).unwrap();
    assert_eq!(brute_rank(&m, 3), 1);
    assert_eq!(m.rank(), 1);
}

fn complex_strategy() -> impl Strategy<Value = ChainComplex> {
    any::<u64>().prop_map(|seed| random_complex(&mut StdRng::seed_from_u64(seed), 2, -3, 3, 3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_matches_enumeration(seed in any::<u64>(), rows in 0usize..4, cols in 0usize..4, p in prop::sample::select(vec![2u64, 3])) {
        use rand::Rng;
        let mut rng = StdRng::seed_from_u64(seed);
        let e: Vec<i64> = (0..rows * cols).map(|_| rng.gen_range(0..p as i64)).collect();
        let m = Matrix::from_rows(p, rows, cols, &e).unwrap();
        prop_assert_eq!(m.rank(), brute_rank(&m, p));
        let k = m.kernel();
        prop_assert_eq!(k.cols(), cols - m.rank());
        prop_assert!(m.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn homology_matches_brute_force(c in complex_strategy()) {
        for n in -4..=4 {
            prop_assert_eq!(homology(&c, n), brute_homology(&c, n));
        }
    }

    #[test]
    fn truncation_preserves_inner_homology(c in complex_strategy(), k in 0i64..5) {
        let t = truncate(&c, k).unwrap();
        for n in (-k + 1)..k {
            prop_assert_eq!(homology(&t, n), homology(&c, n));
        }
    }

    #[test]
    fn truncation_square_zero_exactly_when_boundary_vanishes(c in complex_strategy(), k in 0i64..5) {
        let t = truncate(&c, k).unwrap();
        let expected = k == 0 || c.d(-k + 1).is_zero();
        prop_assert_eq!(t.is_complex(), expected);
        if !expected {
            prop_assert_eq!(t.square_zero_defects(), vec![-k + 1]);
        }
    }

    #[test]
    fn cocone_components_commute(c in complex_strategy(), k in 0i64..5) {
        let f = truncation_map(&c, k, &c).unwrap();
        prop_assert!(f.commutation_defects().is_empty());
    }

    #[test]
    fn covering_stage_verifies(c in complex_strategy()) {
        let report = verify_truncation_colimit(&c, 4).unwrap();
        prop_assert!(report.passed(), "{:?}", report.failure);
    }

    #[test]
    fn quasi_iso_identity_and_composition(c in complex_strategy()) {
        let id = ChainMap::identity(&c);
        prop_assert!(is_quasi_iso(&id).unwrap());
        prop_assert!(is_quasi_iso(&id.then(&id).unwrap()).unwrap());
    }
}
