use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::search::MapSearch;
use crate::fincat::{Presheaf, PresheafMorphism};

/// Every natural transformation `x -> y`, in canonical (lexicographic) order.
pub fn enumerate_maps(x: &Arc<Presheaf>, y: &Arc<Presheaf>, budget: u64) -> Result<Vec<PresheafMorphism>> {
    MapSearch::new(x, y).collect(x, y, budget)
}

/// Calls `visit` on each map `x -> y` in canonical order until it returns `false`.
pub fn for_each_map(
    x: &Arc<Presheaf>,
    y: &Arc<Presheaf>,
    budget: u64,
    visit: &mut dyn FnMut(PresheafMorphism) -> bool,
) -> Result<()> {
    MapSearch::new(x, y).run(budget, &mut |comp| {
        visit(PresheafMorphism::from_parts(x.clone(), y.clone(), comp.to_vec()))
    })?;
    Ok(())
}

/// A commutative square
///
/// ```text
///   A --top--> X
///   |          |
///  left      right
///   v          v
///   B -bottom> Y
/// ```
#[derive(Clone, Debug)]
pub struct LiftingProblem {
    pub left: PresheafMorphism,
    pub right: PresheafMorphism,
    pub top: PresheafMorphism,
    pub bottom: PresheafMorphism,
}

impl LiftingProblem {
    pub fn new(
        left: PresheafMorphism,
        right: PresheafMorphism,
        top: PresheafMorphism,
        bottom: PresheafMorphism,
    ) -> Result<Self> {
        let typed = *left.source() == *top.source()
            && *left.target() == *bottom.source()
            && *right.source() == *top.target()
            && *right.target() == *bottom.target();
        if !typed {
            return Err(Error::ShapeMismatch("lifting square is ill-typed".into()));
        }
        if top.then(&right)? != left.then(&bottom)? {
            return Err(Error::Precondition("lifting square does not commute".into()));
        }
        Ok(Self { left, right, top, bottom })
    }

    /// All diagonals `d: B -> X` with `d∘left = top` and `right∘d = bottom`.
    pub fn all_lifts(&self, budget: u64) -> Result<Vec<PresheafMorphism>> {
        let filter = |c: usize, _b: usize, x: usize| -> bool { self.right.apply(c, x) == self.bottom.apply(c, _b) };
        MapSearch::new(self.left.target(), self.right.source())
            .fix_along(&self.left, &self.top)
            .filter(&filter)
            .collect(self.left.target(), self.right.source(), budget)
    }
}

/// First diagonal filler in canonical order, or `None` if none exists (the search is
/// exhaustive).
pub fn find_lift(p: &LiftingProblem, budget: u64) -> Result<Option<PresheafMorphism>> {
    lift_square(&p.left, &p.right, &p.top, &p.bottom, budget)
}

/// Lift search without building a [`LiftingProblem`]; the square is assumed to commute.
pub(crate) fn lift_square(
    left: &PresheafMorphism,
    right: &PresheafMorphism,
    top: &PresheafMorphism,
    bottom: &PresheafMorphism,
    budget: u64,
) -> Result<Option<PresheafMorphism>> {
    let filter = |c: usize, b: usize, x: usize| -> bool { right.apply(c, x) == bottom.apply(c, b) };
    MapSearch::new(left.target(), right.source())
        .fix_along(left, top)
        .filter(&filter)
        .first(left.target(), right.source(), budget)
}

/// Maps `v: gen.target -> f.target` with `v ∘ gen = f ∘ u`, in canonical order.
pub(crate) fn bottoms_for(
    gen: &PresheafMorphism,
    f: &PresheafMorphism,
    u: &PresheafMorphism,
    budget: u64,
    visit: &mut dyn FnMut(PresheafMorphism) -> bool,
) -> Result<()> {
    let fu = u.then(f)?;
    let (b, y) = (gen.target(), f.target());
    MapSearch::new(b, y).fix_along(gen, &fu).run(budget, &mut |comp| {
        visit(PresheafMorphism::from_parts(b.clone(), y.clone(), comp.to_vec()))
    })?;
    Ok(())
}

/// A commuting square from a generator onto `f` that admits no lift.
#[derive(Clone, Debug)]
pub struct UnliftableSquare {
    pub generator: usize,
    pub top: PresheafMorphism,
    pub bottom: PresheafMorphism,
}

/// First square (generator order, then canonical order of `u`, then of `v`) from a
/// generator onto `f` with no diagonal filler.
pub fn find_unliftable_square(
    f: &PresheafMorphism,
    gens: &[PresheafMorphism],
    budget: u64,
) -> Result<Option<UnliftableSquare>> {
    for (gi, gen) in gens.iter().enumerate() {
        if !gen.source().same_category(f.source()) {
            return Err(Error::ShapeMismatch("generator over a different category".into()));
        }
        let tops = enumerate_maps(gen.source(), f.source(), budget)?;
        for u in tops {
            let mut found = None;
            let mut err = None;
            bottoms_for(gen, f, &u, budget, &mut |v| match lift_square(gen, f, &u, &v, budget) {
                Ok(Some(_)) => true,
                Ok(None) => {
                    found = Some(v);
                    false
                }
                Err(e) => {
                    err = Some(e);
                    false
                }
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            if let Some(v) = found {
                return Ok(Some(UnliftableSquare { generator: gi, top: u, bottom: v }));
            }
        }
    }
    Ok(None)
}

/// Whether `f` has the right lifting property against every generator.
pub fn has_rlp(f: &PresheafMorphism, gens: &[PresheafMorphism], budget: u64) -> Result<bool> {
    Ok(find_unliftable_square(f, gens, budget)?.is_none())
}

/// First componentwise bijection `x -> y`, if any.
pub fn find_isomorphism(x: &Arc<Presheaf>, y: &Arc<Presheaf>, budget: u64) -> Result<Option<PresheafMorphism>> {
    if x.sizes() != y.sizes() {
        return Ok(None);
    }
    MapSearch::new(x, y).injective().first(x, y, budget)
}
