use std::collections::BTreeSet;
use std::sync::Arc;

use finmodel::fincat::{
    coproduct, enumerate_maps, pushout, validate_category, FinCategory, MapSearch, Presheaf, PresheafMorphism,
    DEFAULT_BUDGET,
};
use finmodel::sset::{discrete, multigraph};
use finmodel::Error;
use proptest::prelude::*;

type Components = Vec<Vec<usize>>;

/// Every family of functions `X(c) -> Y(c)`, kept when natural. Independent of the search.
fn brute_maps(x: &Presheaf, y: &Presheaf) -> BTreeSet<Components> {
    let cat = x.category();
    let slots: Vec<(usize, usize)> =
        (0..cat.object_count()).flat_map(|c| (0..x.size(c)).map(move |e| (c, e))).collect();
    let mut out = BTreeSet::new();
    if slots.iter().any(|&(c, _)| y.size(c) == 0) {
        return out;
    }
    let mut idx = vec![0usize; slots.len()];
    loop {
        let mut comp: Components = (0..cat.object_count()).map(|c| vec![0; x.size(c)]).collect();
        for (&(c, e), &v) in slots.iter().zip(&idx) {
            comp[c][e] = v;
        }
        let natural = (0..cat.arrow_count()).all(|m| {
            let a = cat.arrow(m);
            (0..x.size(a.target)).all(|e| comp[a.source][x.act(m, e)] == y.act(m, comp[a.target][e]))
        });
        if natural {
            out.insert(comp);
        }
        let Some(pos) = (0..idx.len()).rev().find(|&q| idx[q] + 1 < y.size(slots[q].0)) else { break };
        idx[pos] += 1;
        idx[pos + 1..].iter_mut().for_each(|i| *i = 0);
    }
    out
}

fn injective(comp: &Components) -> bool {
    comp.iter().all(|f| f.iter().collect::<BTreeSet<_>>().len() == f.len())
}

fn graph_strategy() -> impl Strategy<Value = Arc<Presheaf>> {
    (1usize..=2)
        .prop_flat_map(|v| (Just(v), prop::collection::vec((0..v, 0..v), 0..=2)))
        .prop_map(|(v, edges)| multigraph(2, v, &edges).unwrap().presheaf().clone())
}

#[test]
fn standard_shapes_are_categories() {
    for c in [FinCategory::terminal(), FinCategory::discrete(3), FinCategory::span(), FinCategory::parallel_pair()] {
        assert!(validate_category(&c).is_empty(), "{:?}", validate_category(&c));
    }
}

#[test]
fn maps_between_sets_count() {
    for a in 0..4 {
        for b in 0..4 {
            let x = discrete(1, a).unwrap();
            let y = discrete(1, b).unwrap();
            let maps = enumerate_maps(x.presheaf(), y.presheaf(), DEFAULT_BUDGET).unwrap();
            assert_eq!(maps.len(), b.pow(a as u32), "{a} -> {b}");
        }
    }
}

#[test]
fn budget_is_enforced() {
    let x = discrete(1, 6).unwrap();
    let y = discrete(1, 6).unwrap();
    let err = enumerate_maps(x.presheaf(), y.presheaf(), 100).unwrap_err();
    assert!(matches!(err, Error::BudgetExhausted { budget: 100 }));
}

#[test]
fn coproduct_sizes_add() {
    let a = multigraph(2, 2, &[(0, 1)]).unwrap();
    let b = multigraph(2, 1, &[(0, 0)]).unwrap();
    let cocone = coproduct(&[a.presheaf().clone(), b.presheaf().clone()], a.presheaf().category()).unwrap();
    for c in 0..2 {
        assert_eq!(cocone.object.size(c), a.presheaf().size(c) + b.presheaf().size(c));
    }
}

#[test]
fn gluing_endpoints_of_an_edge_gives_a_loop() {
    let pt = discrete(2, 1).unwrap();
    let two = discrete(2, 2).unwrap();
    let edge = multigraph(2, 2, &[(0, 1)]).unwrap();
    let ends = enumerate_maps(two.presheaf(), edge.presheaf(), DEFAULT_BUDGET)
        .unwrap()
        .into_iter()
        .find(|f| f.components()[0] == [0, 1])
        .unwrap();
    let fold = PresheafMorphism::to_terminal(two.presheaf(), pt.presheaf());
    let cocone = pushout(&ends, &fold).unwrap();
    assert_eq!(cocone.object.size(0), 1);
    // one degenerate edge plus the loop
    assert_eq!(cocone.object.size(1), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn search_agrees_with_brute_force(x in graph_strategy(), y in graph_strategy()) {
        let found: BTreeSet<Components> = enumerate_maps(&x, &y, DEFAULT_BUDGET)
            .unwrap()
            .iter()
            .map(|f| f.components().to_vec())
            .collect();
        prop_assert_eq!(found, brute_maps(&x, &y));
    }

    #[test]
    fn injective_search_keeps_exactly_the_monos(x in graph_strategy(), y in graph_strategy()) {
        let found: BTreeSet<Components> = MapSearch::new(&x, &y)
            .injective()
            .collect(&x, &y, DEFAULT_BUDGET)
            .unwrap()
            .iter()
            .map(|f| f.components().to_vec())
            .collect();
        let expected: BTreeSet<Components> = brute_maps(&x, &y).into_iter().filter(injective).collect();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn pushout_square_commutes_and_legs_are_natural(x in graph_strategy(), y in graph_strategy(), z in graph_strategy()) {
        let f = enumerate_maps(&x, &y, DEFAULT_BUDGET).unwrap();
        let g = enumerate_maps(&x, &z, DEFAULT_BUDGET).unwrap();
        if let (Some(f), Some(g)) = (f.first(), g.first()) {
            let cocone = pushout(f, g).unwrap();
            let (l, r) = (&cocone.legs[0], &cocone.legs[1]);
            prop_assert!(l.naturality_violations().is_empty());
            prop_assert!(r.naturality_violations().is_empty());
            prop_assert_eq!(f.then(l).unwrap(), g.then(r).unwrap());
        }
    }
}
