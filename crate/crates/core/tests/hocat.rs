use std::sync::Arc;

use finmodel::fincat::{coproduct, enumerate_maps, Diagram, Presheaf, PresheafMorphism, DEFAULT_BUDGET};
use finmodel::hocat::{
    canonical_image, check_a_full_faithful, comparison_morphism, factor_cone, ho_coproduct, ho_hom,
    ho_product, homotopy_pushout, identity, inverse_class, phantom_equivalent, project, pushout_comparison,
    standard_weak_colimit, subcoproduct_support, weak_coequalizer, weakly_initial_phantom_pair,
};
use finmodel::model::ModelInstance;
use finmodel::sset::{discrete, instance, multigraph, multigraph_corpus, pi0, simplex, z2_classifying, Cell, SimplicialSet};

fn point(n: usize) -> SimplicialSet {
    discrete(n, 1).unwrap()
}

/// The map from a point picking vertex `v`.
fn pick(n: usize, target: &SimplicialSet, v: usize) -> PresheafMorphism {
    let mut images = vec![Vec::new(); n];
    images[0].push(Cell::vertex(v));
    point(n).morphism(target, &images).unwrap()
}

fn components(x: &Arc<Presheaf>) -> usize {
    pi0(x).unwrap().count
}

fn small_corpus() -> Vec<Arc<Presheaf>> {
    multigraph_corpus(2, 2, 2).unwrap().iter().map(|g| g.presheaf().clone()).collect()
}

#[test]
fn hom_sets_in_low_levels() {
    let m1 = instance(1).unwrap();
    let (one, two) = (point(1), discrete(1, 2).unwrap());
    assert_eq!(ho_hom(&m1, one.presheaf(), two.presheaf()).unwrap().len(), 1);

    let m2 = instance(2).unwrap();
    let two = discrete(2, 2).unwrap();
    assert_eq!(ho_hom(&m2, point(2).presheaf(), two.presheaf()).unwrap().len(), 2);
    let empty = discrete(2, 0).unwrap();
    assert_eq!(ho_hom(&m2, empty.presheaf(), two.presheaf()).unwrap().len(), 1);
}

#[test]
fn hom_quotient_is_sound_on_small_corpus() {
    let m = instance(2).unwrap();
    let corpus = small_corpus();
    for x in &corpus {
        for y in &corpus {
            let hom = ho_hom(&m, x, y).unwrap();
            for (i, a) in hom.classes.iter().enumerate() {
                for b in &hom.classes[i + 1..] {
                    assert!(!a.equals(&m, b).unwrap());
                }
            }
            let ry = m.full_replacement(y).unwrap();
            for f in enumerate_maps(x, &ry.object, DEFAULT_BUDGET).unwrap() {
                let c = finmodel::hocat::HoClass::from_representative(&m, x, y, f).unwrap();
                assert!(hom.index_of(&m, &c).unwrap().is_some());
            }
            // Hom-set size is the number of component maps.
            let expected = if components(x) == 0 { 1 } else { components(y).pow(components(x) as u32) };
            assert_eq!(hom.len(), expected);
        }
    }
}

#[test]
fn projection_respects_identities_and_inverts_weak_equivalences() {
    let m = instance(2).unwrap();
    let edge = simplex(2, 1).unwrap();
    let id = PresheafMorphism::identity(edge.presheaf());
    assert!(project(&m, &id).unwrap().equals(&m, &identity(&m, edge.presheaf()).unwrap()).unwrap());
    let collapse = m.to_terminal(edge.presheaf());
    let c = project(&m, &collapse).unwrap();
    assert!(inverse_class(&m, &c).unwrap().is_some());
    let two = discrete(2, 2).unwrap();
    let not_weq = project(&m, &m.to_terminal(two.presheaf())).unwrap();
    assert!(inverse_class(&m, &not_weq).unwrap().is_none());
}

#[test]
fn coproducts_and_products() {
    let m2 = instance(2).unwrap();
    let pt = point(2).presheaf().clone();
    let co = ho_coproduct(&m2, &[pt.clone(), pt.clone()]).unwrap();
    assert_eq!(components(&co.object), 2);

    let empty = ho_product(&m2, &[]).unwrap();
    assert_eq!(*empty.object, **m2.terminal());

    let m1 = instance(1).unwrap();
    let (two, three) = (discrete(1, 2).unwrap(), discrete(1, 3).unwrap());
    let p = ho_product(&m1, &[two.presheaf().clone(), three.presheaf().clone()]).unwrap();
    assert!(!p.object.is_empty());
}

#[test]
fn product_cones_factor_uniquely() {
    let m = instance(2).unwrap();
    let family = vec![discrete(2, 2).unwrap().presheaf().clone(), multigraph(2, 2, &[(0, 1)]).unwrap().presheaf().clone()];
    let p = ho_product(&m, &family).unwrap();
    for w in small_corpus() {
        let h0 = ho_hom(&m, &w, &family[0]).unwrap();
        let h1 = ho_hom(&m, &w, &family[1]).unwrap();
        for a in &h0.classes {
            for b in &h1.classes {
                let f = factor_cone(&m, &w, &p.object, &p.projections, &[a.clone(), b.clone()]).unwrap();
                assert_eq!(f.len(), 1);
            }
        }
    }
}

#[test]
fn homotopy_pushout_examples() {
    let m = instance(2).unwrap();
    let pt = point(2);
    let id = PresheafMorphism::identity(pt.presheaf());
    let hp = homotopy_pushout(&m, &id, &id).unwrap();
    assert!(m.weakly_equivalent_objects(&hp.object, pt.presheaf()).unwrap().is_some());

    // Two edges glued at their source vertex.
    let edge = simplex(2, 1).unwrap();
    let f = pick(2, &edge.complex, 0);
    let hp = homotopy_pushout(&m, &f, &f).unwrap();
    assert_eq!(components(&hp.object), 1);
    assert!(hp.commutes(&m, &f, &f).unwrap());

    let to_pt = PresheafMorphism::from_initial(pt.presheaf());
    let hp = homotopy_pushout(&m, &to_pt, &to_pt).unwrap();
    assert_eq!(components(&hp.object), 2);
    let cert = hp.certify(&m, &to_pt, &to_pt, &small_corpus()).unwrap();
    assert!(cert.holds() && cert.cocones > 0);
}

#[test]
fn homotopy_pushout_factorization_is_not_unique_in_level_three() {
    let m = instance(3).unwrap();
    let two = discrete(3, 2).unwrap();
    let collapse = m.to_terminal(two.presheaf());
    let hp = homotopy_pushout(&m, &collapse, &collapse).unwrap();
    let z = z2_classifying().unwrap().presheaf().clone();
    let cert = hp.certify(&m, &collapse, &collapse, &[z]).unwrap();
    assert!(cert.holds());
    assert!(matches!(cert.non_unique, Some((0, _, 2))), "{cert:?}");
}

#[test]
fn weak_coequalizer_glues_components() {
    let m = instance(2).unwrap();
    let two = discrete(2, 2).unwrap();
    let (f, g) = (project(&m, &pick(2, &two, 0)).unwrap(), project(&m, &pick(2, &two, 1)).unwrap());
    let wc = weak_coequalizer(&m, &f, &g).unwrap();
    assert_eq!(components(&wc.object), 1);
    assert!(wc.coequalizes(&m, &f, &g).unwrap());
    assert!(wc.certify(&m, &f, &g, &small_corpus()).unwrap().holds());

    let same = weak_coequalizer(&m, &f, &f).unwrap();
    assert_eq!(components(&same.object), 2);
}

#[test]
fn standard_weak_colimits() {
    let m = instance(2).unwrap();
    let edge = simplex(2, 1).unwrap();
    let one = Diagram::discrete(vec![edge.presheaf().clone()]).unwrap();
    let w = standard_weak_colimit(&m, &one).unwrap();
    assert!(m.weakly_equivalent_objects(&w.object, edge.presheaf()).unwrap().is_some());

    let pt = point(2).presheaf().clone();
    let disc = Diagram::discrete(vec![pt.clone(), pt.clone(), pt]).unwrap();
    let w = standard_weak_colimit(&m, &disc).unwrap();
    assert_eq!(components(&w.object), 3);

    let f = pick(2, &edge.complex, 0);
    let g = pick(2, &edge.complex, 1);
    let span = Diagram::span(&f, &g).unwrap();
    let w = standard_weak_colimit(&m, &span).unwrap();
    let hp = homotopy_pushout(&m, &f, &g).unwrap();
    // Level-2 weak equivalence of objects is equality of component counts.
    assert_eq!(components(&w.object), components(&hp.object));
    // Targets without loops or parallel edges keep Ho(K, W) enumerable for this K.
    let tests: Vec<_> = (0..=3).map(|k| discrete(2, k).unwrap().presheaf().clone()).chain([edge.presheaf().clone()]).collect();
    let cert = w.certify(&m, &span, &tests).unwrap();
    assert!(cert.holds() && cert.cocones > 0, "{cert:?}");
}

#[test]
fn comparison_morphisms() {
    let m = instance(2).unwrap();
    let edge = simplex(2, 1).unwrap();
    let one = Diagram::discrete(vec![edge.presheaf().clone()]).unwrap();
    let c = comparison_morphism(&m, &one).unwrap();
    assert!(c.verify(&m).unwrap());
    assert!(inverse_class(&m, &c.p).unwrap().is_some());

    // Collapsing the edge: pt <- edge -> edge.
    let collapse = m.to_terminal(edge.presheaf());
    let id = PresheafMorphism::identity(edge.presheaf());
    let hp = homotopy_pushout(&m, &collapse, &id).unwrap();
    let pc = pushout_comparison(&hp, &collapse, &id).unwrap();
    assert!(pc.verify(&m, &hp).unwrap());
    let c = comparison_morphism(&m, &Diagram::span(&collapse, &id).unwrap()).unwrap();
    assert!(c.verify(&m).unwrap());

    // A pushout of cofibrations: the comparison is invertible.
    let (a, b) = (pick(2, &edge.complex, 0), pick(2, &edge.complex, 1));
    let hp = homotopy_pushout(&m, &a, &b).unwrap();
    let pc = pushout_comparison(&hp, &a, &b).unwrap();
    assert!(inverse_class(&m, &project(&m, &pc.p).unwrap()).unwrap().is_some());
}

#[test]
fn canonical_images() {
    let m = instance(2).unwrap();
    let pt = point(2).presheaf().clone();
    let k = discrete(2, 3).unwrap().presheaf().clone();
    let img = canonical_image(&m, &k, &[pt.clone()]).unwrap();
    assert_eq!(img.homs[0].len(), 3);

    let empty = discrete(2, 0).unwrap().presheaf().clone();
    assert_eq!(canonical_image(&m, &empty, &[pt.clone()]).unwrap().homs[0].len(), 0);

    let img = canonical_image(&m, &k, &[k.clone()]).unwrap();
    let id = identity(&m, &k).unwrap();
    assert!(img.homs[0].index_of(&m, &id).unwrap().is_some());
}

#[test]
fn canonical_functor_is_full_and_faithful_on_probes() {
    let m = instance(2).unwrap();
    let probes = vec![point(2).presheaf().clone(), simplex(2, 1).unwrap().presheaf().clone()];
    let report = check_a_full_faithful(&m, &probes, &small_corpus()).unwrap();
    assert!(report.passed(), "{report:?}");
    assert!(report.transformations > 0);
}

#[test]
fn phantom_equivalence() {
    let m = instance(2).unwrap();
    let two = discrete(2, 2).unwrap();
    let pt = point(2).presheaf().clone();
    let (f, g) = (project(&m, &pick(2, &two, 0)).unwrap(), project(&m, &pick(2, &two, 1)).unwrap());
    assert!(phantom_equivalent(&m, &f, &f, &[pt.clone()]).unwrap());
    assert!(phantom_equivalent(&m, &f, &g, &[]).unwrap());
    assert!(!phantom_equivalent(&m, &f, &g, &[pt]).unwrap());
}

#[test]
fn phantom_pairs_are_weakly_initial() {
    let m = instance(2).unwrap();
    let pt = point(2).presheaf().clone();
    let x = multigraph(2, 3, &[(0, 1)]).unwrap().presheaf().clone();
    let pair = weakly_initial_phantom_pair(&m, &x, &[pt.clone()]).unwrap();
    assert!(phantom_equivalent(&m, &pair.f, &pair.g, &[pt.clone()]).unwrap());
    let cert = pair.certify(&m, &[pt.clone()], &small_corpus()).unwrap();
    assert!(cert.holds() && cert.pairs > 0, "{cert:?}");

    let empty = discrete(2, 0).unwrap().presheaf().clone();
    let pair = weakly_initial_phantom_pair(&m, &empty, &[pt]).unwrap();
    assert!(pair.f.equals(&m, &pair.g).unwrap());
}

#[test]
fn subcoproduct_supports() {
    let m: ModelInstance = instance(2).unwrap();
    let pt = point(2).presheaf().clone();
    let sum = coproduct(&[pt.clone(), pt.clone(), pt.clone(), pt.clone()], m.base()).unwrap();
    let two = discrete(2, 2).unwrap().presheaf().clone();
    let f = coproduct(&[pt.clone(), pt.clone()], m.base())
        .unwrap()
        .induced(&sum.object, &[sum.legs[1].clone(), sum.legs[3].clone()])
        .unwrap();
    assert_eq!(*f.source(), two);
    let s = subcoproduct_support(&f, &sum).unwrap();
    assert_eq!(s.indices, vec![1, 3]);
    assert_eq!(s.factor.then(&s.injection).unwrap(), f);

    let from_empty = PresheafMorphism::from_initial(&sum.object);
    assert!(subcoproduct_support(&from_empty, &sum).unwrap().indices.is_empty());

    let single = coproduct(&[pt.clone()], m.base()).unwrap();
    let s = subcoproduct_support(&single.legs[0], &single).unwrap();
    assert_eq!(s.indices, vec![0]);
}
