use std::sync::Arc;

use finmodel::fincat::{enumerate_maps, has_rlp, Presheaf, PresheafMorphism, DEFAULT_BUDGET};
use finmodel::model::{FactorizationKind, SoaMode};
use finmodel::sset::{discrete, instance, multigraph, multigraph_corpus};
use finmodel::Error;
use proptest::prelude::*;

fn graphs() -> Vec<Arc<Presheaf>> {
    multigraph_corpus(2, 2, 2).unwrap().iter().map(|g| g.presheaf().clone()).collect()
}

fn has_cycle(x: &Presheaf) -> bool {
    // nondegenerate edges beyond a spanning forest
    let edges = x.size(1) - x.size(0);
    edges + finmodel::sset::pi0(x).unwrap().count > x.size(0)
}

fn lawful(kind: FactorizationKind, f: &PresheafMorphism, level: usize) -> bool {
    let m = instance(level).unwrap();
    let t = m.factorize(f, kind).unwrap();
    t.terminated
        && t.left().then(t.right()).unwrap() == *f
        && t.left().is_mono()
        && has_rlp(t.right(), m.generators(kind), DEFAULT_BUDGET).unwrap()
}

#[test]
fn every_map_of_sets_factorizes() {
    for a in 0..4 {
        for b in 0..4 {
            let x = discrete(1, a).unwrap();
            let y = discrete(1, b).unwrap();
            for f in enumerate_maps(x.presheaf(), y.presheaf(), DEFAULT_BUDGET).unwrap() {
                assert!(lawful(FactorizationKind::CofTrivFib, &f, 1));
                assert!(lawful(FactorizationKind::TrivCofFib, &f, 1));
            }
        }
    }
}

#[test]
fn naive_mode_attaches_at_least_as_much() {
    let x = discrete(1, 2).unwrap();
    let y = discrete(1, 3).unwrap();
    for f in enumerate_maps(x.presheaf(), y.presheaf(), DEFAULT_BUDGET).unwrap() {
        for kind in [FactorizationKind::CofTrivFib, FactorizationKind::TrivCofFib] {
            let naive = instance(1).unwrap().with_mode(SoaMode::Naive).factorize(&f, kind).unwrap();
            let marked = instance(1).unwrap().with_mode(SoaMode::Marked).factorize(&f, kind).unwrap();
            assert!(naive.terminated && marked.terminated);
            assert!(naive.middle().size(0) >= marked.middle().size(0));
        }
    }
}

#[test]
fn point_into_loop_keeps_growing() {
    let pt = discrete(2, 1).unwrap();
    let ell = multigraph(2, 1, &[(0, 0)]).unwrap();
    let maps = enumerate_maps(pt.presheaf(), ell.presheaf(), DEFAULT_BUDGET).unwrap();
    assert_eq!(maps.len(), 1);
    let f = &maps[0];
    let m = instance(2).unwrap().with_cap(4).unwrap();
    let t = m.factorize(f, FactorizationKind::TrivCofFib).unwrap();
    assert!(!t.terminated, "{:?}", t.stages.iter().map(|s| s.object.sizes().to_vec()).collect::<Vec<_>>());
    let vertices: Vec<usize> = t.stages.iter().map(|s| s.object.size(0)).collect();
    assert_eq!(vertices, [1, 3, 5, 7, 9]);
}

#[test]
fn cap_is_validated() {
    assert!(matches!(instance(2).unwrap().with_cap(0), Err(Error::OutOfRange(_))));
}

#[test]
fn weak_equivalences_of_graphs_match_components() {
    let m = instance(2).unwrap();
    for x in graphs() {
        for y in graphs() {
            let cx = finmodel::sset::pi0(&x).unwrap().count;
            let cy = finmodel::sset::pi0(&y).unwrap().count;
            assert_eq!(m.weakly_equivalent_objects(&x, &y).unwrap().is_some(), cx == cy);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graph_factorizations_are_lawful(i in 0usize..13, j in 0usize..13, k in 0usize..64) {
        let corpus = graphs();
        let maps = enumerate_maps(&corpus[i], &corpus[j], DEFAULT_BUDGET).unwrap();
        prop_assume!(!maps.is_empty());
        let f = &maps[k % maps.len()];
        prop_assert!(lawful(FactorizationKind::CofTrivFib, f, 2));
        if !has_cycle(&corpus[j]) {
            prop_assert!(lawful(FactorizationKind::TrivCofFib, f, 2));
        }
    }
}
