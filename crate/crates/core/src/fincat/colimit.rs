//! Strict finite colimits of presheaves, computed objectwise as disjoint unions
//! followed by union-find quotients. General colimits go through the
//! coproduct-then-coequalizer recipe.

use std::sync::Arc;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::fincat::{FinCategory, Presheaf, PresheafMorphism};

/// A colimit object with one leg per diagram object.
#[derive(Clone, Debug)]
pub struct Cocone {
    pub object: Arc<Presheaf>,
    pub legs: Vec<PresheafMorphism>,
}

impl Cocone {
    /// The map out of the colimit restricting to `maps[i]` along leg `i`. Fails if the
    /// maps do not agree on identified elements.
    pub fn induced(&self, target: &Arc<Presheaf>, maps: &[PresheafMorphism]) -> Result<PresheafMorphism> {
        if maps.len() != self.legs.len() {
            return Err(Error::ShapeMismatch("one map per cocone leg required".into()));
        }
        let k = self.object.category().object_count();
        let mut comps: Vec<Vec<usize>> = (0..k).map(|c| vec![usize::MAX; self.object.size(c)]).collect();
        for (leg, map) in self.legs.iter().zip(maps) {
            if **map.source() != **leg.source() || **map.target() != **target {
                return Err(Error::ShapeMismatch("induced map: leg and map disagree on endpoints".into()));
            }
            for c in 0..k {
                for x in 0..leg.source().size(c) {
                    let slot = &mut comps[c][leg.apply(c, x)];
                    let y = map.apply(c, x);
                    if *slot != usize::MAX && *slot != y {
                        return Err(Error::Precondition("maps do not form a cocone".into()));
                    }
                    *slot = y;
                }
            }
        }
        if comps.iter().flatten().any(|&y| y == usize::MAX) {
            return Err(Error::Precondition("cocone legs are not jointly surjective".into()));
        }
        PresheafMorphism::new(self.object.clone(), target.clone(), comps)
    }
}

/// A diagram `shape -> presheaves`: one presheaf per shape object and one morphism
/// `D(source) -> D(target)` per shape arrow (identities included).
#[derive(Clone, Debug)]
pub struct Diagram {
    pub shape: Arc<FinCategory>,
    pub objects: Vec<Arc<Presheaf>>,
    pub arrows: Vec<PresheafMorphism>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColimitMode {
    Coproduct,
    Pushout,
    Coequalizer,
    General,
}

impl Diagram {
    pub fn new(shape: Arc<FinCategory>, objects: Vec<Arc<Presheaf>>, arrows: Vec<PresheafMorphism>) -> Result<Self> {
        let d = Self { shape, objects, arrows };
        d.check()?;
        Ok(d)
    }

    /// The diagram of a single span `B <-f- A -g-> C` on [`FinCategory::span`].
    pub fn span(f: &PresheafMorphism, g: &PresheafMorphism) -> Result<Self> {
        let (a, b, c) = (f.source().clone(), f.target().clone(), g.target().clone());
        let arrows = vec![
            PresheafMorphism::identity(&a),
            PresheafMorphism::identity(&b),
            PresheafMorphism::identity(&c),
            f.clone(),
            g.clone(),
        ];
        Self::new(Arc::new(FinCategory::span()), vec![a, b, c], arrows)
    }

    /// A discrete diagram.
    pub fn discrete(objects: Vec<Arc<Presheaf>>) -> Result<Self> {
        let arrows = objects.iter().map(PresheafMorphism::identity).collect();
        Self::new(Arc::new(FinCategory::discrete(objects.len())), objects, arrows)
    }

    fn check(&self) -> Result<()> {
        if self.objects.len() != self.shape.object_count() || self.arrows.len() != self.shape.arrow_count() {
            return Err(Error::IllTyped("diagram does not match its shape".into()));
        }
        for (e, m) in self.arrows.iter().enumerate() {
            let a = self.shape.arrow(e);
            if **m.source() != *self.objects[a.source] || **m.target() != *self.objects[a.target] {
                return Err(Error::IllTyped(format!("diagram arrow {} has wrong endpoints", a.name)));
            }
        }
        for (e, m) in self.arrows.iter().enumerate() {
            for (g, n) in self.arrows.iter().enumerate() {
                if let Some(ge) = self.shape.compose(g, e) {
                    if m.then(n)? != self.arrows[ge] {
                        return Err(Error::IllTyped("diagram is not functorial".into()));
                    }
                }
            }
        }
        for (o, x) in self.objects.iter().enumerate() {
            if self.arrows[self.shape.identity(o)] != PresheafMorphism::identity(x) {
                return Err(Error::IllTyped("diagram sends an identity to a non-identity".into()));
            }
        }
        Ok(())
    }
}

/// Disjoint union with its injections. The empty family yields the initial presheaf
/// over `category`.
pub fn coproduct(objects: &[Arc<Presheaf>], category: &Arc<FinCategory>) -> Result<Cocone> {
    if objects.iter().any(|o| !Arc::ptr_eq(o.category(), category) && **o.category() != **category) {
        return Err(Error::ShapeMismatch("coproduct of presheaves over different categories".into()));
    }
    let k = category.object_count();
    let mut offsets = vec![vec![0usize; k]; objects.len()];
    let mut sizes = vec![0usize; k];
    for (i, o) in objects.iter().enumerate() {
        for c in 0..k {
            offsets[i][c] = sizes[c];
            sizes[c] += o.size(c);
        }
    }
    let actions = (0..category.arrow_count())
        .map(|m| {
            let src = category.arrow(m).source;
            objects
                .iter()
                .enumerate()
                .flat_map(|(i, o)| {
                    let off = offsets[i][src];
                    o.action(m).iter().map(move |&x| x + off)
                })
                .collect()
        })
        .collect();
    let object = Arc::new(Presheaf::new(category.clone(), sizes, actions)?);
    let legs = objects
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let comps = (0..k).map(|c| (0..o.size(c)).map(|x| x + offsets[i][c]).collect()).collect();
            PresheafMorphism::from_parts(o.clone(), object.clone(), comps)
        })
        .collect();
    Ok(Cocone { object, legs })
}

/// Quotient of `b` by the smallest congruence identifying `f(a)` with `g(a)`.
pub fn coequalizer(f: &PresheafMorphism, g: &PresheafMorphism) -> Result<(Arc<Presheaf>, PresheafMorphism)> {
    if *f.source() != *g.source() || *f.target() != *g.target() {
        return Err(Error::ShapeMismatch("coequalizer of non-parallel morphisms".into()));
    }
    let b = f.target();
    let pairs: Vec<Vec<(usize, usize)>> = f
        .components()
        .iter()
        .zip(g.components())
        .map(|(fc, gc)| fc.iter().copied().zip(gc.iter().copied()).collect())
        .collect();
    quotient(b, &pairs)
}

/// Quotient of `b` by the equivalence generated by `pairs[c]` at each object. The pairs
/// must already be closed under the action (true for images of parallel natural maps).
pub(crate) fn quotient(b: &Arc<Presheaf>, pairs: &[Vec<(usize, usize)>]) -> Result<(Arc<Presheaf>, PresheafMorphism)> {
    let cat = b.category().clone();
    let k = cat.object_count();
    let mut class_of = Vec::with_capacity(k);
    let mut reps = Vec::with_capacity(k);
    for c in 0..k {
        let mut uf = UnionFind::<usize>::new(b.size(c));
        for &(x, y) in &pairs[c] {
            uf.union(x, y);
        }
        let mut root_class = vec![usize::MAX; b.size(c)];
        let mut cls = vec![0; b.size(c)];
        let mut rep = Vec::new();
        for x in 0..b.size(c) {
            let r = uf.find(x);
            if root_class[r] == usize::MAX {
                root_class[r] = rep.len();
                rep.push(x);
            }
            cls[x] = root_class[r];
        }
        class_of.push(cls);
        reps.push(rep);
    }
    let sizes = reps.iter().map(Vec::len).collect();
    let mut actions = Vec::with_capacity(cat.arrow_count());
    for m in 0..cat.arrow_count() {
        let a = cat.arrow(m);
        let act: Vec<usize> = reps[a.target].iter().map(|&r| class_of[a.source][b.act(m, r)]).collect();
        // Well-definedness: every member of a class must act into the same class.
        for x in 0..b.size(a.target) {
            if class_of[a.source][b.act(m, x)] != act[class_of[a.target][x]] {
                return Err(Error::Precondition("identification is not a congruence".into()));
            }
        }
        actions.push(act);
    }
    let q = Arc::new(Presheaf::new(cat, sizes, actions)?);
    let map = PresheafMorphism::from_parts(b.clone(), q.clone(), class_of);
    Ok((q, map))
}

/// Pushout of `B <-f- A -g-> C`; legs are `[B -> P, C -> P]`.
pub fn pushout(f: &PresheafMorphism, g: &PresheafMorphism) -> Result<Cocone> {
    if *f.source() != *g.source() {
        return Err(Error::ShapeMismatch("pushout legs must share a source".into()));
    }
    let cat = f.source().category().clone();
    let sum = coproduct(&[f.target().clone(), g.target().clone()], &cat)?;
    let (p, q) = coequalizer(&f.then(&sum.legs[0])?, &g.then(&sum.legs[1])?)?;
    let legs = vec![sum.legs[0].then(&q)?, sum.legs[1].then(&q)?];
    Ok(Cocone { object: p, legs })
}

/// Colimit of an arbitrary finite diagram via coproducts and a coequalizer.
pub fn colimit(d: &Diagram) -> Result<Cocone> {
    let cat = category_of(d)?;
    let sources: Vec<Arc<Presheaf>> =
        (0..d.shape.arrow_count()).map(|e| d.objects[d.shape.arrow(e).source].clone()).collect();
    let left = coproduct(&sources, &cat)?;
    let right = coproduct(&d.objects, &cat)?;
    let (f, g) = parallel_pair_of(d, &left, &right)?;
    let (k, q) = coequalizer(&f, &g)?;
    let legs = right.legs.iter().map(|v| v.then(&q)).collect::<Result<_>>()?;
    Ok(Cocone { object: k, legs })
}

/// The pair `f, g: ⊔_e D(dom e) ⇉ ⊔_d Dd` with `f∘u_e = v_{dom e}` and
/// `g∘u_e = v_{cod e}∘De`, given the two coproducts.
pub fn parallel_pair_of(d: &Diagram, left: &Cocone, right: &Cocone) -> Result<(PresheafMorphism, PresheafMorphism)> {
    let cat = left.object.category().clone();
    let objs = cat.object_count();
    let mut fc: Vec<Vec<usize>> = (0..objs).map(|c| vec![0; left.object.size(c)]).collect();
    let mut gc = fc.clone();
    for e in 0..d.shape.arrow_count() {
        let a = d.shape.arrow(e);
        let u = &left.legs[e];
        let via_f = &right.legs[a.source];
        let via_g = d.arrows[e].then(&right.legs[a.target])?;
        for c in 0..objs {
            for x in 0..u.source().size(c) {
                fc[c][u.apply(c, x)] = via_f.apply(c, x);
                gc[c][u.apply(c, x)] = via_g.apply(c, x);
            }
        }
    }
    let f = PresheafMorphism::from_parts(left.object.clone(), right.object.clone(), fc);
    let g = PresheafMorphism::from_parts(left.object.clone(), right.object.clone(), gc);
    Ok((f, g))
}

fn category_of(d: &Diagram) -> Result<Arc<FinCategory>> {
    d.objects
        .first()
        .map(|o| o.category().clone())
        .ok_or_else(|| Error::IllTyped("colimit of an empty diagram needs an explicit base category".into()))
}

/// Colimit dispatch by mode. `Pushout` requires the span shape, `Coequalizer` the
/// parallel-pair shape, `Coproduct` a discrete shape.
pub fn finite_colimit(d: &Diagram, mode: ColimitMode) -> Result<Cocone> {
    match mode {
        ColimitMode::Coproduct => {
            if d.shape.arrows().iter().enumerate().any(|(m, _)| !d.shape.is_identity(m)) {
                return Err(Error::IllTyped("coproduct mode needs a discrete shape".into()));
            }
            coproduct(&d.objects, &category_of(d)?)
        }
        ColimitMode::Pushout => {
            if *d.shape != FinCategory::span() {
                return Err(Error::IllTyped("pushout mode needs the span shape".into()));
            }
            let p = pushout(&d.arrows[3], &d.arrows[4])?;
            let apex = d.arrows[3].then(&p.legs[0])?;
            Ok(Cocone { object: p.object.clone(), legs: vec![apex, p.legs[0].clone(), p.legs[1].clone()] })
        }
        ColimitMode::Coequalizer => {
            if *d.shape != FinCategory::parallel_pair() {
                return Err(Error::IllTyped("coequalizer mode needs the parallel-pair shape".into()));
            }
            let (q, map) = coequalizer(&d.arrows[2], &d.arrows[3])?;
            let first = d.arrows[2].then(&map)?;
            Ok(Cocone { object: q, legs: vec![first, map] })
        }
        ColimitMode::General => colimit(d),
    }
}
