use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::FinCategory;

/// A finite-set-valued presheaf on a [`FinCategory`].
///
/// `X(c)` is the index range `0..size(c)`. For an arrow `m: c -> c'` the action is a
/// function `X(c') -> X(c)`, stored for every arrow of the category.
#[derive(Clone, Debug)]
pub struct Presheaf {
    category: Arc<FinCategory>,
    sizes: Vec<usize>,
    actions: Vec<Vec<usize>>,
    labels: BTreeMap<(usize, usize), String>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        self.sizes == other.sizes && self.actions == other.actions && self.same_category(other)
    }
}

impl Eq for Presheaf {}

impl Hash for Presheaf {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sizes.hash(state);
        self.actions.hash(state);
    }
}

/// A failure of functoriality: `X(g∘f) ≠ X(f)∘X(g)` at some element, or an identity
/// acting non-trivially.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorialityViolation {
    Identity { object: usize, element: usize },
    Composition { g: usize, f: usize, element: usize },
}

impl Presheaf {
    /// Builds a presheaf and checks action shapes. Functoriality is checked separately
    /// by [`Presheaf::functoriality_violations`].
    pub fn new(category: Arc<FinCategory>, sizes: Vec<usize>, actions: Vec<Vec<usize>>) -> Result<Self> {
        if sizes.len() != category.object_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} carriers for {} objects",
                sizes.len(),
                category.object_count()
            )));
        }
        if actions.len() != category.arrow_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} actions for {} arrows",
                actions.len(),
                category.arrow_count()
            )));
        }
        for (m, act) in actions.iter().enumerate() {
            let a = category.arrow(m);
            if act.len() != sizes[a.target] || act.iter().any(|&x| x >= sizes[a.source]) {
                return Err(Error::ShapeMismatch(format!(
                    "action of arrow {} is not a function X({}) -> X({})",
                    a.name, a.target, a.source
                )));
            }
        }
        Ok(Self { category, sizes, actions, labels: BTreeMap::new() })
    }

    /// Like [`Presheaf::new`] but also rejects non-functorial data.
    pub fn new_checked(category: Arc<FinCategory>, sizes: Vec<usize>, actions: Vec<Vec<usize>>) -> Result<Self> {
        let p = Self::new(category, sizes, actions)?;
        if let Some(v) = p.functoriality_violations().first() {
            return Err(Error::IllTyped(format!("presheaf is not functorial: {v:?}")));
        }
        Ok(p)
    }

    /// The empty presheaf (initial object).
    pub fn initial(category: Arc<FinCategory>) -> Self {
        let sizes = vec![0; category.object_count()];
        let actions = vec![Vec::new(); category.arrow_count()];
        Self { category, sizes, actions, labels: BTreeMap::new() }
    }

    /// The one-point presheaf (terminal object).
    pub fn terminal(category: Arc<FinCategory>) -> Self {
        let sizes = vec![1; category.object_count()];
        let actions = vec![vec![0]; category.arrow_count()];
        Self { category, sizes, actions, labels: BTreeMap::new() }
    }

    pub fn with_label(mut self, object: usize, element: usize, label: impl Into<String>) -> Self {
        self.labels.insert((object, element), label.into());
        self
    }

    pub fn label(&self, object: usize, element: usize) -> Option<&str> {
        self.labels.get(&(object, element)).map(String::as_str)
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.category
    }

    pub fn size(&self, object: usize) -> usize {
        self.sizes[object]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total_elements(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.iter().all(|&s| s == 0)
    }

    /// Action of arrow `m: c -> c'` on `x ∈ X(c')`.
    pub fn act(&self, m: usize, x: usize) -> usize {
        self.actions[m][x]
    }

    pub fn action(&self, m: usize) -> &[usize] {
        &self.actions[m]
    }

    pub fn same_category(&self, other: &Presheaf) -> bool {
        Arc::ptr_eq(&self.category, &other.category) || self.category == other.category
    }

    pub fn functoriality_violations(&self) -> Vec<FunctorialityViolation> {
        let cat = &self.category;
        let mut out = Vec::new();
        for o in 0..cat.object_count() {
            let id = cat.identity(o);
            for x in 0..self.sizes[o] {
                if self.actions[id][x] != x {
                    out.push(FunctorialityViolation::Identity { object: o, element: x });
                }
            }
        }
        for f in 0..cat.arrow_count() {
            for g in 0..cat.arrow_count() {
                let Some(gf) = cat.compose(g, f) else { continue };
                // X(g∘f) = X(f) ∘ X(g) on X(target g).
                for x in 0..self.sizes[cat.arrow(g).target] {
                    if self.actions[gf][x] != self.actions[f][self.actions[g][x]] {
                        out.push(FunctorialityViolation::Composition { g, f, element: x });
                    }
                }
            }
        }
        out
    }

    /// Objectwise product. Used for products in the homotopy category.
    pub fn product(factors: &[Arc<Presheaf>], category: Arc<FinCategory>) -> (Presheaf, Vec<Vec<Vec<usize>>>) {
        // Elements of the product at c are tuples, encoded in mixed radix (first factor
        // most significant). Returned alongside: per factor, per object, the projection.
        let k = category.object_count();
        let mut sizes = vec![1usize; k];
        for f in factors {
            for c in 0..k {
                sizes[c] *= f.size(c);
            }
        }
        let decode = |c: usize, mut idx: usize| -> Vec<usize> {
            let mut digits = vec![0; factors.len()];
            for (i, f) in factors.iter().enumerate().rev() {
                let s = f.size(c);
                digits[i] = idx % s;
                idx /= s;
            }
            digits
        };
        let encode = |c: usize, digits: &[usize]| -> usize {
            digits
                .iter()
                .zip(factors)
                .fold(0, |acc, (&d, f)| acc * f.size(c) + d)
        };
        let mut actions = Vec::with_capacity(category.arrow_count());
        for m in 0..category.arrow_count() {
            let a = category.arrow(m);
            let act = (0..sizes[a.target])
                .map(|x| {
                    let digits: Vec<usize> = decode(a.target, x)
                        .iter()
                        .zip(factors)
                        .map(|(&d, f)| f.act(m, d))
                        .collect();
                    encode(a.source, &digits)
                })
                .collect();
            actions.push(act);
        }
        let projections = (0..factors.len())
            .map(|i| {
                (0..k)
                    .map(|c| (0..sizes[c]).map(|x| decode(c, x)[i]).collect())
                    .collect()
            })
            .collect();
        let p = Presheaf { category, sizes, actions, labels: BTreeMap::new() };
        (p, projections)
    }
}

/// A natural transformation between presheaves on the same category.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PresheafMorphism {
    source: Arc<Presheaf>,
    target: Arc<Presheaf>,
    components: Vec<Vec<usize>>,
}

/// A naturality square that fails to commute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityViolation {
    pub arrow: usize,
    pub element: usize,
}

impl PresheafMorphism {
    /// Builds a morphism, checking component shapes only.
    pub fn new_unchecked(source: Arc<Presheaf>, target: Arc<Presheaf>, components: Vec<Vec<usize>>) -> Result<Self> {
        if !source.same_category(&target) {
            return Err(Error::ShapeMismatch("source and target live over different categories".into()));
        }
        if components.len() != source.sizes.len() {
            return Err(Error::ShapeMismatch("one component per object required".into()));
        }
        for (c, comp) in components.iter().enumerate() {
            if comp.len() != source.size(c) || comp.iter().any(|&y| y >= target.size(c)) {
                return Err(Error::ShapeMismatch(format!(
                    "component at object {c} is not a function X({c}) -> Y({c})"
                )));
            }
        }
        Ok(Self { source, target, components })
    }

    /// Builds a morphism and rejects it unless natural.
    pub fn new(source: Arc<Presheaf>, target: Arc<Presheaf>, components: Vec<Vec<usize>>) -> Result<Self> {
        let m = Self::new_unchecked(source, target, components)?;
        if let Some(v) = m.naturality_violations().first() {
            let name = &m.source.category.arrow(v.arrow).name;
            return Err(Error::IllTyped(format!(
                "not natural: square for arrow {name} fails at element {}",
                v.element
            )));
        }
        Ok(m)
    }

    pub(crate) fn from_parts(source: Arc<Presheaf>, target: Arc<Presheaf>, components: Vec<Vec<usize>>) -> Self {
        debug_assert!(Self::new_unchecked(source.clone(), target.clone(), components.clone()).is_ok());
        Self { source, target, components }
    }

    pub fn identity(x: &Arc<Presheaf>) -> Self {
        let components = x.sizes.iter().map(|&s| (0..s).collect()).collect();
        Self { source: x.clone(), target: x.clone(), components }
    }

    /// The unique map out of the empty presheaf.
    pub fn from_initial(target: &Arc<Presheaf>) -> Self {
        let source = Arc::new(Presheaf::initial(target.category.clone()));
        let components = vec![Vec::new(); target.sizes.len()];
        Self { source, target: target.clone(), components }
    }

    /// The unique map into a one-point presheaf `terminal`.
    pub fn to_terminal(source: &Arc<Presheaf>, terminal: &Arc<Presheaf>) -> Self {
        let components = source.sizes.iter().map(|&s| vec![0; s]).collect();
        Self { source: source.clone(), target: terminal.clone(), components }
    }

    pub fn source(&self) -> &Arc<Presheaf> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presheaf> {
        &self.target
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn apply(&self, object: usize, x: usize) -> usize {
        self.components[object][x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PresheafMorphism) -> Result<PresheafMorphism> {
        if *self.target != *other.source {
            return Err(Error::ShapeMismatch("composing non-matching morphisms".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(f, g)| f.iter().map(|&x| g[x]).collect())
            .collect();
        Ok(Self { source: self.source.clone(), target: other.target.clone(), components })
    }

    pub fn naturality_violations(&self) -> Vec<NaturalityViolation> {
        let cat = self.source.category.clone();
        let mut out = Vec::new();
        for m in 0..cat.arrow_count() {
            let a = cat.arrow(m);
            for x in 0..self.source.size(a.target) {
                let lhs = self.components[a.source][self.source.act(m, x)];
                let rhs = self.target.act(m, self.components[a.target][x]);
                if lhs != rhs {
                    out.push(NaturalityViolation { arrow: m, element: x });
                }
            }
        }
        out
    }

    pub fn is_mono(&self) -> bool {
        self.components.iter().enumerate().all(|(c, comp)| {
            let mut seen = vec![false; self.target.size(c)];
            comp.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }

    pub fn is_epi(&self) -> bool {
        self.components.iter().enumerate().all(|(c, comp)| {
            let mut seen = vec![false; self.target.size(c)];
            comp.iter().for_each(|&y| seen[y] = true);
            seen.into_iter().all(|b| b)
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }

    /// Same components, reinterpreted with a structurally equal source/target.
    pub fn retarget(&self, source: Arc<Presheaf>, target: Arc<Presheaf>) -> Result<Self> {
        if *source != *self.source || *target != *self.target {
            return Err(Error::ShapeMismatch("retarget requires equal presheaves".into()));
        }
        Ok(Self { source, target, components: self.components.clone() })
    }
}

/// Report entry point for naturality checks, exposing the failing squares.
pub fn check_naturality(m: &PresheafMorphism) -> Vec<NaturalityViolation> {
    m.naturality_violations()
}

pub fn is_mono(m: &PresheafMorphism) -> bool {
    m.is_mono()
}
