//! Calculus in the homotopy category of a model instance.
//!
//! A morphism `X -> Y` of `Ho` is a left-homotopy class of maps `QX -> RY`. Classes are
//! compared with `left_homotopic`, never by representative. The colimit-style
//! constructions (coproducts, products, homotopy pushouts, weak coequalizers, standard
//! weak colimits, phantom pairs) need every object cofibrant and report
//! [`Error::Precondition`] otherwise.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::fincat::{colimit, coproduct, lift_square, pushout, Cocone, Diagram, Presheaf, PresheafMorphism};
use crate::model::{FactorizationKind, ModelInstance};

/// A morphism of the homotopy category. The representative `QX -> RY` is built on
/// first use from the strict map `QX -> QY` when the class comes from one, so
/// composites starting with a projected map never need `RY`.
#[derive(Clone, Debug)]
pub struct HoClass {
    source: Arc<Presheaf>,
    target: Arc<Presheaf>,
    strict: Option<PresheafMorphism>,
    rep: OnceLock<PresheafMorphism>,
}

impl HoClass {
    fn with_rep(source: &Arc<Presheaf>, target: &Arc<Presheaf>, rep: PresheafMorphism) -> Self {
        Self { source: source.clone(), target: target.clone(), strict: None, rep: OnceLock::from(rep) }
    }

    /// Wraps `rep: QX -> RY` as a class `X -> Y`.
    pub fn from_representative(
        m: &ModelInstance,
        source: &Arc<Presheaf>,
        target: &Arc<Presheaf>,
        rep: PresheafMorphism,
    ) -> Result<Self> {
        let q = m.cofibrant_replacement(source)?;
        let r = m.full_replacement(target)?;
        if **rep.source() != *q.object || **rep.target() != *r.object {
            return Err(Error::ShapeMismatch("representative does not run between the replacements".into()));
        }
        Ok(Self::with_rep(source, target, rep))
    }

    pub fn source(&self) -> &Arc<Presheaf> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presheaf> {
        &self.target
    }

    /// The strict map `QX -> QY` this class was projected from, if any.
    pub fn strict(&self) -> Option<&PresheafMorphism> {
        self.strict.as_ref()
    }

    /// The representative `QX -> RY`.
    pub fn representative(&self, m: &ModelInstance) -> Result<&PresheafMorphism> {
        if let Some(r) = self.rep.get() {
            return Ok(r);
        }
        let s = self.strict.as_ref().expect("class without representative has a strict map");
        let r = m.full_replacement(&self.target)?;
        let rep = s.then(&r.comparison)?;
        Ok(self.rep.get_or_init(|| rep))
    }

    /// Equality in `Ho`: the representatives are left homotopic.
    pub fn equals(&self, m: &ModelInstance, other: &HoClass) -> Result<bool> {
        if *self.source != *other.source || *self.target != *other.target {
            return Err(Error::ShapeMismatch("comparing non-parallel classes".into()));
        }
        if let (Some(a), Some(b)) = (&self.strict, &other.strict) {
            if a == b {
                return Ok(true);
            }
        }
        m.left_homotopic(self.representative(m)?, other.representative(m)?)
    }
}

/// The class of `f`, represented by `QX -> QY -> RY`.
pub fn project(m: &ModelInstance, f: &PresheafMorphism) -> Result<HoClass> {
    let qf = m.cofibrant_lift(f)?;
    Ok(HoClass { source: f.source().clone(), target: f.target().clone(), strict: Some(qf), rep: OnceLock::new() })
}

pub fn identity(m: &ModelInstance, x: &Arc<Presheaf>) -> Result<HoClass> {
    project(m, &PresheafMorphism::identity(x))
}

/// `b ∘ a`. A strict `a` is composed directly; otherwise the representative of `b` is
/// extended along `QY -> RY`.
pub fn compose(m: &ModelInstance, a: &HoClass, b: &HoClass) -> Result<HoClass> {
    if *a.target != *b.source {
        return Err(Error::ShapeMismatch("composing non-matching classes".into()));
    }
    let (source, target) = (&a.source, &b.target);
    match (&a.strict, &b.strict) {
        (Some(sa), Some(sb)) => {
            Ok(HoClass { source: source.clone(), target: target.clone(), strict: Some(sa.then(sb)?), rep: OnceLock::new() })
        }
        (Some(sa), None) => Ok(HoClass::with_rep(source, target, sa.then(b.representative(m)?)?)),
        _ => {
            let ext = m.extend_along_fibrant(b.representative(m)?)?;
            Ok(HoClass::with_rep(source, target, a.representative(m)?.then(&ext)?))
        }
    }
}

/// An inverse of `a` in `Ho`, found among the classes `Y -> X`.
pub fn inverse_class(m: &ModelInstance, a: &HoClass) -> Result<Option<HoClass>> {
    let id_x = identity(m, &a.source)?;
    let id_y = identity(m, &a.target)?;
    for g in ho_hom(m, &a.target, &a.source)?.classes {
        if compose(m, a, &g)?.equals(m, &id_x)? && compose(m, &g, a)?.equals(m, &id_y)? {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// `Ho(X, Y)` with one enumeration-first representative per class.
#[derive(Clone, Debug)]
pub struct HoHomSet {
    pub source: Arc<Presheaf>,
    pub target: Arc<Presheaf>,
    pub classes: Vec<HoClass>,
}

impl HoHomSet {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Position of the class equal to `c`.
    pub fn index_of(&self, m: &ModelInstance, c: &HoClass) -> Result<Option<usize>> {
        for (i, d) in self.classes.iter().enumerate() {
            if d.equals(m, c)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn index_or_fail(&self, m: &ModelInstance, c: &HoClass) -> Result<usize> {
        self.index_of(m, c)?.ok_or_else(|| Error::Precondition("homotopy classes are not exhaustive".into()))
    }
}

pub fn ho_hom(m: &ModelInstance, x: &Arc<Presheaf>, y: &Arc<Presheaf>) -> Result<HoHomSet> {
    let q = m.cofibrant_replacement(x)?;
    let r = m.full_replacement(y)?;
    let classes = m
        .homotopy_classes(&q.object, &r.object)?
        .into_iter()
        .map(|rep| HoClass::with_rep(x, y, rep))
        .collect();
    Ok(HoHomSet { source: x.clone(), target: y.clone(), classes })
}

fn require_cofibrant(m: &ModelInstance) -> Result<()> {
    if !m.all_cofibrant() {
        return Err(Error::Precondition(format!("{} does not declare every object cofibrant", m.name())));
    }
    Ok(())
}

/// A section of a trivial fibration `t: E -> B` with cofibrant `B`.
fn section(m: &ModelInstance, t: &PresheafMorphism) -> Result<PresheafMorphism> {
    let b = t.target();
    lift_square(
        &PresheafMorphism::from_initial(b),
        t,
        &PresheafMorphism::from_initial(t.source()),
        &PresheafMorphism::identity(b),
        m.budget(),
    )?
    .ok_or_else(|| Error::Precondition("map has no section; it is not a trivial fibration".into()))
}

/// Classes `t: E -> W` with `legs[i] ∘ t = cocone[i]`, among all of `Ho(E, W)`.
pub fn factor_cocone(
    m: &ModelInstance,
    object: &Arc<Presheaf>,
    legs: &[HoClass],
    cocone: &[HoClass],
) -> Result<Vec<HoClass>> {
    let w = cocone.first().map(|c| c.target.clone());
    let Some(w) = w else {
        return Err(Error::Precondition("empty cocone has no target".into()));
    };
    let mut out = Vec::new();
    'next: for t in ho_hom(m, object, &w)?.classes {
        for (l, c) in legs.iter().zip(cocone) {
            if !compose(m, l, &t)?.equals(m, c)? {
                continue 'next;
            }
        }
        out.push(t);
    }
    Ok(out)
}

/// Classes `h: W -> P` with `h ∘ legs[i] = cone[i]`, among all of `Ho(W, P)`.
pub fn factor_cone(
    m: &ModelInstance,
    w: &Arc<Presheaf>,
    object: &Arc<Presheaf>,
    legs: &[HoClass],
    cone: &[HoClass],
) -> Result<Vec<HoClass>> {
    let mut out = Vec::new();
    'next: for h in ho_hom(m, w, object)?.classes {
        for (l, c) in legs.iter().zip(cone) {
            if !compose(m, &h, l)?.equals(m, c)? {
                continue 'next;
            }
        }
        out.push(h);
    }
    Ok(out)
}

/// Coproduct in `Ho`: the coproduct in the base category with the classes of its
/// injections.
#[derive(Clone, Debug)]
pub struct HoCoproduct {
    pub object: Arc<Presheaf>,
    pub injections: Vec<HoClass>,
    pub strict: Cocone,
}

pub fn ho_coproduct(m: &ModelInstance, family: &[Arc<Presheaf>]) -> Result<HoCoproduct> {
    require_cofibrant(m)?;
    let strict = coproduct(family, m.base())?;
    let injections = strict.legs.iter().map(|l| project(m, l)).collect::<Result<Vec<_>>>()?;
    Ok(HoCoproduct { object: strict.object.clone(), injections, strict })
}

/// Product in `Ho`: the product of the fibrant replacements, with the projections as
/// classes.
#[derive(Clone, Debug)]
pub struct HoProduct {
    pub object: Arc<Presheaf>,
    pub projections: Vec<HoClass>,
}

pub fn ho_product(m: &ModelInstance, family: &[Arc<Presheaf>]) -> Result<HoProduct> {
    require_cofibrant(m)?;
    let factors = family.iter().map(|x| Ok(m.full_replacement(x)?.object.clone())).collect::<Result<Vec<_>>>()?;
    let (p, projections) = Presheaf::product(&factors, m.base().clone());
    let p = Arc::new(p);
    let projections = projections
        .into_iter()
        .zip(family.iter().zip(&factors))
        .map(|(comps, (x, rx))| {
            let pi = PresheafMorphism::new(p.clone(), rx.clone(), comps)?;
            HoClass::from_representative(m, &p, x, pi)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HoProduct { object: p, projections })
}

/// The homotopy pushout of `B <-f- A -g-> C`: factor `f = f2∘f1`, `g = g2∘g1` as
/// (cofibration, trivial fibration) and push out `f1` against `g1`.
#[derive(Clone, Debug)]
pub struct HomotopyPushout {
    pub object: Arc<Presheaf>,
    /// `B -> E`.
    pub left: HoClass,
    /// `C -> E`.
    pub right: HoClass,
    pub f1: PresheafMorphism,
    pub f2: PresheafMorphism,
    pub g1: PresheafMorphism,
    pub g2: PresheafMorphism,
    /// Pushout of `f1` and `g1`, legs `[B1 -> E, C1 -> E]`.
    pub strict: Cocone,
}

pub fn homotopy_pushout(m: &ModelInstance, f: &PresheafMorphism, g: &PresheafMorphism) -> Result<HomotopyPushout> {
    require_cofibrant(m)?;
    if *f.source() != *g.source() {
        return Err(Error::ShapeMismatch("span legs have different sources".into()));
    }
    let tf = m.factorize_or_fail(f, FactorizationKind::CofTrivFib)?;
    let tg = m.factorize_or_fail(g, FactorizationKind::CofTrivFib)?;
    let (f1, f2) = (tf.left().clone(), tf.right().clone());
    let (g1, g2) = (tg.left().clone(), tg.right().clone());
    let strict = pushout(&f1, &g1)?;
    let left = project(m, &section(m, &f2)?.then(&strict.legs[0])?)?;
    let right = project(m, &section(m, &g2)?.then(&strict.legs[1])?)?;
    Ok(HomotopyPushout { object: strict.object.clone(), left, right, f1, f2, g1, g2, strict })
}

impl HomotopyPushout {
    /// `left ∘ P(f) = right ∘ P(g)` in `Ho`.
    pub fn commutes(&self, m: &ModelInstance, f: &PresheafMorphism, g: &PresheafMorphism) -> Result<bool> {
        let a = compose(m, &project(m, f)?, &self.left)?;
        let b = compose(m, &project(m, g)?, &self.right)?;
        a.equals(m, &b)
    }
}

/// Outcome of checking weak universality against every cocone into a finite list of
/// test objects.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Certificate {
    pub test_objects: usize,
    /// Compatible cocones examined.
    pub cocones: usize,
    /// Cocones with no factorization.
    pub failures: usize,
    /// Test object and class indices of the first cocone without factorization.
    pub first_failure: Option<(usize, Vec<usize>)>,
    /// Test object, class indices and factorization count of the first cocone with
    /// more than one factorization.
    pub non_unique: Option<(usize, Vec<usize>, usize)>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

type Compatible<'a> = dyn Fn(&[HoClass]) -> Result<bool> + 'a;

/// Checks that every compatible cocone `(c_i: X_i -> W)` factors through `legs`.
fn certify(
    m: &ModelInstance,
    object: &Arc<Presheaf>,
    legs: &[HoClass],
    tests: &[Arc<Presheaf>],
    compatible: &Compatible<'_>,
) -> Result<Certificate> {
    let mut cert = Certificate { test_objects: tests.len(), ..Certificate::default() };
    for (wi, w) in tests.iter().enumerate() {
        let homs = legs.iter().map(|l| ho_hom(m, &l.source, w)).collect::<Result<Vec<_>>>()?;
        let mut images: std::collections::HashMap<Vec<usize>, usize> = std::collections::HashMap::new();
        for t in ho_hom(m, object, w)?.classes {
            let image = legs
                .iter()
                .zip(&homs)
                .map(|(l, h)| h.index_or_fail(m, &compose(m, l, &t)?))
                .collect::<Result<Vec<_>>>()?;
            *images.entry(image).or_default() += 1;
        }
        if homs.iter().any(HoHomSet::is_empty) {
            continue;
        }
        let mut idx = vec![0usize; legs.len()];
        loop {
            let classes: Vec<HoClass> = idx.iter().zip(&homs).map(|(&i, h)| h.classes[i].clone()).collect();
            if compatible(&classes)? {
                cert.cocones += 1;
                let count = images.get(&idx).copied().unwrap_or(0);
                if count == 0 {
                    cert.failures += 1;
                    cert.first_failure.get_or_insert((wi, idx.clone()));
                } else if count > 1 && cert.non_unique.is_none() {
                    cert.non_unique = Some((wi, idx.clone(), count));
                }
            }
            let Some(pos) = (0..idx.len()).rev().find(|&p| idx[p] + 1 < homs[p].len()) else { break };
            idx[pos] += 1;
            idx[pos + 1..].iter_mut().for_each(|i| *i = 0);
        }
    }
    Ok(cert)
}

impl HomotopyPushout {
    /// Weak universality against every commuting square into `tests`.
    pub fn certify(
        &self,
        m: &ModelInstance,
        f: &PresheafMorphism,
        g: &PresheafMorphism,
        tests: &[Arc<Presheaf>],
    ) -> Result<Certificate> {
        let (pf, pg) = (project(m, f)?, project(m, g)?);
        let legs = [self.left.clone(), self.right.clone()];
        certify(m, &self.object, &legs, tests, &|c| compose(m, &pf, &c[0])?.equals(m, &compose(m, &pg, &c[1])?))
    }
}

/// A weak coequalizer `h: B -> D` with `h∘f = h∘g` in `Ho`.
#[derive(Clone, Debug)]
pub struct WeakCoequalizer {
    pub object: Arc<Presheaf>,
    pub h: HoClass,
    /// The homotopy pushout of `(f, id)` and `(g, id)` out of `X ⊔ B`.
    pub pushout: HomotopyPushout,
}

/// Weak coequalizer of `P(f), P(g)` for strict `f, g: X -> B`.
pub fn weak_coequalizer_of_maps(m: &ModelInstance, f: &PresheafMorphism, g: &PresheafMorphism) -> Result<WeakCoequalizer> {
    require_cofibrant(m)?;
    if *f.source() != *g.source() || *f.target() != *g.target() {
        return Err(Error::ShapeMismatch("weak coequalizer of non-parallel maps".into()));
    }
    let b = f.target();
    let sum = coproduct(&[f.source().clone(), b.clone()], m.base())?;
    let id = PresheafMorphism::identity(b);
    let ff = sum.induced(b, &[f.clone(), id.clone()])?;
    let gg = sum.induced(b, &[g.clone(), id])?;
    let pushout = homotopy_pushout(m, &ff, &gg)?;
    Ok(WeakCoequalizer { object: pushout.object.clone(), h: pushout.left.clone(), pushout })
}

/// Weak coequalizer of parallel classes `f, g: X -> B`, computed on their
/// representatives `X -> RB`.
pub fn weak_coequalizer(m: &ModelInstance, f: &HoClass, g: &HoClass) -> Result<WeakCoequalizer> {
    require_cofibrant(m)?;
    if *f.source != *g.source || *f.target != *g.target {
        return Err(Error::ShapeMismatch("weak coequalizer of non-parallel classes".into()));
    }
    let inner = weak_coequalizer_of_maps(m, f.representative(m)?, g.representative(m)?)?;
    let v = project(m, &m.full_replacement(&f.target)?.comparison)?;
    let h = compose(m, &v, &inner.h)?;
    Ok(WeakCoequalizer { h, ..inner })
}

impl WeakCoequalizer {
    /// `h∘f = h∘g` in `Ho`.
    pub fn coequalizes(&self, m: &ModelInstance, f: &HoClass, g: &HoClass) -> Result<bool> {
        compose(m, f, &self.h)?.equals(m, &compose(m, g, &self.h)?)
    }

    pub fn certify(&self, m: &ModelInstance, f: &HoClass, g: &HoClass, tests: &[Arc<Presheaf>]) -> Result<Certificate> {
        certify(m, &self.object, std::slice::from_ref(&self.h), tests, &|c| {
            compose(m, f, &c[0])?.equals(m, &compose(m, g, &c[0])?)
        })
    }
}

/// The standard weak colimit: the weak coequalizer of the two maps
/// `⊔_{e: d -> d'} Dd -> ⊔_d Dd` (one along `D(e)`, one along the identity), with
/// `δ_d = h∘v_d`.
#[derive(Clone, Debug)]
pub struct StandardWeakColimit {
    pub object: Arc<Presheaf>,
    pub legs: Vec<HoClass>,
    pub coequalizer: WeakCoequalizer,
}

pub fn standard_weak_colimit(m: &ModelInstance, d: &Diagram) -> Result<StandardWeakColimit> {
    require_cofibrant(m)?;
    let shape = &d.shape;
    let by_arrow: Vec<Arc<Presheaf>> = shape.arrows().iter().map(|a| d.objects[a.source].clone()).collect();
    let arrows_sum = coproduct(&by_arrow, m.base())?;
    let objects_sum = coproduct(&d.objects, m.base())?;
    let along = |e: usize, use_map: bool| -> Result<PresheafMorphism> {
        let a = shape.arrow(e);
        if use_map {
            d.arrows[e].then(&objects_sum.legs[a.target])
        } else {
            Ok(objects_sum.legs[a.source].clone())
        }
    };
    let f_parts = (0..shape.arrow_count()).map(|e| along(e, true)).collect::<Result<Vec<_>>>()?;
    let g_parts = (0..shape.arrow_count()).map(|e| along(e, false)).collect::<Result<Vec<_>>>()?;
    let f = arrows_sum.induced(&objects_sum.object, &f_parts)?;
    let g = arrows_sum.induced(&objects_sum.object, &g_parts)?;
    let coequalizer = weak_coequalizer_of_maps(m, &f, &g)?;
    let legs = objects_sum
        .legs
        .iter()
        .map(|v| compose(m, &project(m, v)?, &coequalizer.h))
        .collect::<Result<Vec<_>>>()?;
    Ok(StandardWeakColimit { object: coequalizer.object.clone(), legs, coequalizer })
}

impl StandardWeakColimit {
    /// Weak universality against every compatible cocone into `tests`.
    pub fn certify(&self, m: &ModelInstance, d: &Diagram, tests: &[Arc<Presheaf>]) -> Result<Certificate> {
        let arrows = d.arrows.iter().map(|a| project(m, a)).collect::<Result<Vec<_>>>()?;
        certify(m, &self.object, &self.legs, tests, &|c| {
            for (e, a) in arrows.iter().enumerate() {
                let arr = d.shape.arrow(e);
                if !compose(m, a, &c[arr.target])?.equals(m, &c[arr.source])? {
                    return Ok(false);
                }
            }
            Ok(true)
        })
    }
}

/// The comparison `p: K -> K̄` from the standard weak colimit to the strict colimit, with
/// `p∘δ_d = P(δ̄_d)`.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub weak: StandardWeakColimit,
    pub strict: Cocone,
    pub p: HoClass,
}

pub fn comparison_morphism(m: &ModelInstance, d: &Diagram) -> Result<Comparison> {
    let weak = standard_weak_colimit(m, d)?;
    let strict = colimit(d)?;
    let targets = strict.legs.iter().map(|l| project(m, l)).collect::<Result<Vec<_>>>()?;
    let p = if targets.is_empty() {
        ho_hom(m, &weak.object, &strict.object)?.classes.into_iter().next()
    } else {
        factor_cocone(m, &weak.object, &weak.legs, &targets)?.into_iter().next()
    };
    let p = p.ok_or_else(|| Error::Precondition("no comparison morphism satisfies the cocone equations".into()))?;
    Ok(Comparison { weak, strict, p })
}

impl Comparison {
    /// Re-checks `p∘δ_d = P(δ̄_d)` for every `d`.
    pub fn verify(&self, m: &ModelInstance) -> Result<bool> {
        for (delta, bar) in self.weak.legs.iter().zip(&self.strict.legs) {
            if !compose(m, delta, &self.p)?.equals(m, &project(m, bar)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The strict comparison out of a homotopy pushout: `p∘ḡ = g'∘f2`, `p∘f̄ = f'∘g2`,
/// where `g', f'` are the legs of the strict pushout of `f, g`.
#[derive(Clone, Debug)]
pub struct PushoutComparison {
    pub p: PresheafMorphism,
    pub strict: Cocone,
}

pub fn pushout_comparison(hp: &HomotopyPushout, f: &PresheafMorphism, g: &PresheafMorphism) -> Result<PushoutComparison> {
    let strict = pushout(f, g)?;
    let p = hp.strict.induced(&strict.object, &[hp.f2.then(&strict.legs[0])?, hp.g2.then(&strict.legs[1])?])?;
    Ok(PushoutComparison { p, strict })
}

impl PushoutComparison {
    /// `P(p)` composed with the homotopy-pushout legs gives the strict legs in `Ho`.
    pub fn verify(&self, m: &ModelInstance, hp: &HomotopyPushout) -> Result<bool> {
        let pp = project(m, &self.p)?;
        Ok(compose(m, &hp.left, &pp)?.equals(m, &project(m, &self.strict.legs[0])?)?
            && compose(m, &hp.right, &pp)?.equals(m, &project(m, &self.strict.legs[1])?)?)
    }
}

/// The restricted hom-functor `Ho(−, K)` on a finite list of probe objects.
#[derive(Clone, Debug)]
pub struct CanonicalImage {
    pub target: Arc<Presheaf>,
    pub probes: Vec<Arc<Presheaf>>,
    /// `Ho(probes[i], K)`.
    pub homs: Vec<HoHomSet>,
    /// Every class `probes[i] -> probes[j]`.
    pub arrows: Vec<(usize, usize, HoClass)>,
    /// For each arrow `a: A_i -> A_j`, the map `homs[j] -> homs[i]`, `x ↦ x∘a`.
    pub precomposition: Vec<Vec<usize>>,
}

/// All classes between probe objects.
pub fn probe_arrows(m: &ModelInstance, probes: &[Arc<Presheaf>]) -> Result<Vec<(usize, usize, HoClass)>> {
    let mut out = Vec::new();
    for (i, a) in probes.iter().enumerate() {
        for (j, b) in probes.iter().enumerate() {
            out.extend(ho_hom(m, a, b)?.classes.into_iter().map(|c| (i, j, c)));
        }
    }
    Ok(out)
}

pub fn canonical_image(m: &ModelInstance, k: &Arc<Presheaf>, probes: &[Arc<Presheaf>]) -> Result<CanonicalImage> {
    canonical_image_with(m, k, probes, probe_arrows(m, probes)?)
}

fn canonical_image_with(
    m: &ModelInstance,
    k: &Arc<Presheaf>,
    probes: &[Arc<Presheaf>],
    arrows: Vec<(usize, usize, HoClass)>,
) -> Result<CanonicalImage> {
    let homs = probes.iter().map(|a| ho_hom(m, a, k)).collect::<Result<Vec<_>>>()?;
    let precomposition = arrows
        .iter()
        .map(|(i, j, a)| {
            homs[*j].classes.iter().map(|x| homs[*i].index_or_fail(m, &compose(m, a, x)?)).collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CanonicalImage { target: k.clone(), probes: probes.to_vec(), homs, arrows, precomposition })
}

impl CanonicalImage {
    /// `E(f)` for `f: X -> K`, where `self` is the image of `X` and `target` that of `K`.
    pub fn push_forward(&self, m: &ModelInstance, f: &HoClass, target: &CanonicalImage) -> Result<Vec<Vec<usize>>> {
        self.homs
            .iter()
            .zip(&target.homs)
            .map(|(src, tgt)| src.classes.iter().map(|x| tgt.index_or_fail(m, &compose(m, x, f)?)).collect())
            .collect()
    }
}

/// Every natural transformation between two canonical images over the same probes, as
/// per-probe index maps.
pub fn natural_transformations(src: &CanonicalImage, tgt: &CanonicalImage, budget: u64) -> Result<Vec<Vec<Vec<usize>>>> {
    let n = src.homs.len();
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut nodes = 0u64;
    fn natural_so_far(src: &CanonicalImage, tgt: &CanonicalImage, current: &[Vec<usize>], upto: usize) -> bool {
        src.arrows.iter().enumerate().all(|(e, (i, j, _))| {
            if *i > upto || *j > upto {
                return true;
            }
            (0..src.homs[*j].len())
                .all(|x| current[*i][src.precomposition[e][x]] == tgt.precomposition[e][current[*j][x]])
        })
    }
    #[allow(clippy::too_many_arguments)]
    fn go(
        src: &CanonicalImage,
        tgt: &CanonicalImage,
        probe: usize,
        current: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<()> {
        if probe == src.homs.len() {
            out.push(current.clone());
            return Ok(());
        }
        let (dom, cod) = (src.homs[probe].len(), tgt.homs[probe].len());
        if dom > 0 && cod == 0 {
            return Ok(());
        }
        let mut f = vec![0usize; dom];
        loop {
            *nodes += 1;
            if *nodes > budget {
                return Err(Error::BudgetExhausted { budget });
            }
            current[probe] = f.clone();
            if natural_so_far(src, tgt, current, probe) {
                go(src, tgt, probe + 1, current, out, nodes, budget)?;
            }
            let Some(p) = (0..dom).rev().find(|&p| f[p] + 1 < cod) else { break };
            f[p] += 1;
            f[p + 1..].iter_mut().for_each(|x| *x = 0);
        }
        Ok(())
    }
    go(src, tgt, 0, &mut current, &mut out, &mut nodes, budget)?;
    Ok(out)
}

/// Fullness and faithfulness of `E` on probe sources and sample targets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FullFaithfulReport {
    pub pairs: usize,
    pub transformations: usize,
    /// `(probe, sample)` pairs with a transformation not of the form `E(f)`.
    pub unrealized: Vec<(usize, usize)>,
    /// `(probe, sample)` pairs where distinct classes have equal images.
    pub collisions: Vec<(usize, usize)>,
}

impl FullFaithfulReport {
    pub fn passed(&self) -> bool {
        self.unrealized.is_empty() && self.collisions.is_empty()
    }
}

/// Checks, for every probe `A` and sample object `K`, that each natural transformation
/// `E(A) -> E(K)` is `E(f)` for some class `f: A -> K`, and that distinct classes give
/// distinct transformations.
pub fn check_a_full_faithful(
    m: &ModelInstance,
    probes: &[Arc<Presheaf>],
    sample: &[Arc<Presheaf>],
) -> Result<FullFaithfulReport> {
    let arrows = probe_arrows(m, probes)?;
    let mut report = FullFaithfulReport::default();
    let images = sample
        .iter()
        .map(|k| canonical_image_with(m, k, probes, arrows.clone()))
        .collect::<Result<Vec<_>>>()?;
    for (ai, a) in probes.iter().enumerate() {
        let src = canonical_image_with(m, a, probes, arrows.clone())?;
        for (ki, k) in sample.iter().enumerate() {
            report.pairs += 1;
            let tgt = &images[ki];
            let realized = ho_hom(m, a, k)?
                .classes
                .iter()
                .map(|f| src.push_forward(m, f, tgt))
                .collect::<Result<Vec<_>>>()?;
            let mut distinct = realized.clone();
            distinct.sort();
            distinct.dedup();
            if distinct.len() != realized.len() {
                report.collisions.push((ai, ki));
            }
            let naturals = natural_transformations(&src, tgt, m.budget())?;
            report.transformations += naturals.len();
            if naturals.iter().any(|t| !realized.contains(t)) {
                report.unrealized.push((ai, ki));
            }
        }
    }
    Ok(report)
}

/// `f∘h = g∘h` in `Ho` for every class `h: A -> X` with `A` among `probes`.
pub fn phantom_equivalent(m: &ModelInstance, f: &HoClass, g: &HoClass, probes: &[Arc<Presheaf>]) -> Result<bool> {
    if *f.source != *g.source || *f.target != *g.target {
        return Err(Error::ShapeMismatch("phantom comparison of non-parallel classes".into()));
    }
    for a in probes {
        for h in ho_hom(m, a, &f.source)?.classes {
            if !compose(m, &h, f)?.equals(m, &compose(m, &h, g)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A phantom-equivalent pair `f, g: X -> L` built as the weak cokernel pair of the map
/// `⊔ A -> X` induced by every class from a probe.
#[derive(Clone, Debug)]
pub struct PhantomPair {
    pub source: Arc<Presheaf>,
    pub object: Arc<Presheaf>,
    pub f: HoClass,
    pub g: HoClass,
    /// Probe index of each covering class, in summand order.
    pub covering: Vec<(usize, HoClass)>,
    pub pushout: HomotopyPushout,
}

pub fn weakly_initial_phantom_pair(m: &ModelInstance, x: &Arc<Presheaf>, probes: &[Arc<Presheaf>]) -> Result<PhantomPair> {
    require_cofibrant(m)?;
    let mut covering = Vec::new();
    for (i, a) in probes.iter().enumerate() {
        covering.extend(ho_hom(m, a, x)?.classes.into_iter().map(|h| (i, h)));
    }
    let summands: Vec<Arc<Presheaf>> = covering.iter().map(|(i, _)| probes[*i].clone()).collect();
    let sum = coproduct(&summands, m.base())?;
    let rx = m.full_replacement(x)?;
    let reps = covering.iter().map(|(_, h)| Ok(h.representative(m)?.clone())).collect::<Result<Vec<_>>>()?;
    let p = sum.induced(&rx.object, &reps)?;
    let pushout = homotopy_pushout(m, &p, &p)?;
    let v = project(m, &rx.comparison)?;
    let f = compose(m, &v, &pushout.left)?;
    let g = compose(m, &v, &pushout.right)?;
    Ok(PhantomPair { source: x.clone(), object: pushout.object.clone(), f, g, covering, pushout })
}

/// Weak initiality of a phantom pair against every phantom pair into `targets`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhantomCertificate {
    pub targets: usize,
    /// Phantom-equivalent pairs examined.
    pub pairs: usize,
    pub failures: usize,
    /// Target index and class indices of the first pair that does not factor.
    pub first_failure: Option<(usize, usize, usize)>,
}

impl PhantomCertificate {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

impl PhantomPair {
    pub fn certify(&self, m: &ModelInstance, probes: &[Arc<Presheaf>], targets: &[Arc<Presheaf>]) -> Result<PhantomCertificate> {
        let mut cert = PhantomCertificate { targets: targets.len(), ..PhantomCertificate::default() };
        for (ti, t) in targets.iter().enumerate() {
            let hom = ho_hom(m, &self.source, t)?;
            let through: Vec<(usize, usize)> = ho_hom(m, &self.object, t)?
                .classes
                .iter()
                .map(|u| Ok((hom.index_or_fail(m, &compose(m, &self.f, u)?)?, hom.index_or_fail(m, &compose(m, &self.g, u)?)?)))
                .collect::<Result<Vec<_>>>()?;
            for (i, fi) in hom.classes.iter().enumerate() {
                for (j, gj) in hom.classes.iter().enumerate() {
                    if !phantom_equivalent(m, fi, gj, probes)? {
                        continue;
                    }
                    cert.pairs += 1;
                    if !through.contains(&(i, j)) {
                        cert.failures += 1;
                        cert.first_failure.get_or_insert((ti, i, j));
                    }
                }
            }
        }
        Ok(cert)
    }
}

/// The least set of summands through which a map into a coproduct factors.
#[derive(Clone, Debug)]
pub struct SubcoproductSupport {
    pub indices: Vec<usize>,
    pub sub: Cocone,
    /// `A -> ⊔_{j∈J} K_j`.
    pub factor: PresheafMorphism,
    /// `⊔_{j∈J} K_j -> ⊔ K_i`.
    pub injection: PresheafMorphism,
}

/// Support of `f: A -> ⊔ K_i`, where `coproduct` presents the target. The answer is
/// exact for this representative; homotopic maps may have different supports.
pub fn subcoproduct_support(f: &PresheafMorphism, coproduct_cocone: &Cocone) -> Result<SubcoproductSupport> {
    let target = &coproduct_cocone.object;
    if **f.target() != **target {
        return Err(Error::ShapeMismatch("map does not land in the given coproduct".into()));
    }
    let cat = target.category().clone();
    let k = cat.object_count();
    let mut owner: Vec<Vec<(usize, usize)>> = (0..k).map(|c| vec![(usize::MAX, 0); target.size(c)]).collect();
    for (i, leg) in coproduct_cocone.legs.iter().enumerate() {
        for (c, comp) in leg.components().iter().enumerate() {
            for (x, &y) in comp.iter().enumerate() {
                owner[c][y] = (i, x);
            }
        }
    }
    if owner.iter().flatten().any(|o| o.0 == usize::MAX) {
        return Err(Error::Precondition("cocone legs do not cover the coproduct".into()));
    }
    let mut indices: Vec<usize> =
        (0..k).flat_map(|c| (0..f.source().size(c)).map(move |x| (c, x))).map(|(c, x)| owner[c][f.apply(c, x)].0).collect();
    indices.sort_unstable();
    indices.dedup();
    let summands: Vec<Arc<Presheaf>> = indices.iter().map(|&i| coproduct_cocone.legs[i].source().clone()).collect();
    let sub = coproduct(&summands, &cat)?;
    let comps = (0..k)
        .map(|c| {
            (0..f.source().size(c))
                .map(|x| {
                    let (i, pre) = owner[c][f.apply(c, x)];
                    let slot = indices.binary_search(&i).expect("index collected above");
                    sub.legs[slot].apply(c, pre)
                })
                .collect()
        })
        .collect();
    let factor = PresheafMorphism::new(f.source().clone(), sub.object.clone(), comps)?;
    let legs: Vec<PresheafMorphism> = indices.iter().map(|&i| coproduct_cocone.legs[i].clone()).collect();
    let injection = sub.induced(target, &legs)?;
    Ok(SubcoproductSupport { indices, sub, factor, injection })
}
