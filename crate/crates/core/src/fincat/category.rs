use std::fmt;

use crate::error::{Error, Result};

/// A generating morphism entry: `source -> target`, both object indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A finite category given by an explicit composition table.
///
/// Every morphism is listed (not only generators). `compose(g, f)` is `g ∘ f`
/// and is defined exactly when `target(f) == source(g)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinCategory {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identities: Vec<usize>,
    /// Row-major `[g * n + f]`, `None` where not composable.
    table: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CategoryViolation {
    BadArrow { arrow: usize },
    BadIdentity { object: usize },
    MissingComposite { g: usize, f: usize },
    SpuriousComposite { g: usize, f: usize },
    CompositeTyping { g: usize, f: usize, result: usize },
    LeftUnit { f: usize },
    RightUnit { f: usize },
    Associativity { h: usize, g: usize, f: usize },
}

impl fmt::Display for CategoryViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BadArrow { arrow } => write!(out, "arrow {arrow} has an out-of-range endpoint"),
            Self::BadIdentity { object } => write!(out, "identity of object {object} is not an endomorphism of it"),
            Self::MissingComposite { g, f } => write!(out, "composable pair ({g}, {f}) has no composite"),
            Self::SpuriousComposite { g, f } => write!(out, "non-composable pair ({g}, {f}) has a composite"),
            Self::CompositeTyping { g, f, result } => {
                write!(out, "composite {g}∘{f} = {result} has the wrong endpoints")
            }
            Self::LeftUnit { f } => write!(out, "id∘{f} ≠ {f}"),
            Self::RightUnit { f } => write!(out, "{f}∘id ≠ {f}"),
            Self::Associativity { h, g, f } => write!(out, "({h}∘{g})∘{f} ≠ {h}∘({g}∘{f})"),
        }
    }
}

impl FinCategory {
    /// Builds a category from its parts. Shape errors (wrong table size, bad indices) are
    /// rejected here; algebraic laws are checked by [`FinCategory::validate`].
    pub fn from_parts(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identities: Vec<usize>,
        table: Vec<Option<usize>>,
    ) -> Result<Self> {
        let n = arrows.len();
        if table.len() != n * n {
            return Err(Error::IllTyped(format!(
                "composition table has {} entries, expected {}",
                table.len(),
                n * n
            )));
        }
        if identities.len() != objects.len() {
            return Err(Error::IllTyped("one identity per object required".into()));
        }
        if identities.iter().any(|&i| i >= n) || table.iter().flatten().any(|&c| c >= n) {
            return Err(Error::IllTyped("morphism index out of range".into()));
        }
        Ok(Self { objects, arrows, identities, table })
    }

    /// Builds a category from arrows and a composition function, filling the table by
    /// evaluating `compose` on every composable pair.
    pub fn from_fn(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identities: Vec<usize>,
        mut compose: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self> {
        let n = arrows.len();
        let mut table = vec![None; n * n];
        for g in 0..n {
            for f in 0..n {
                if arrows[f].target == arrows[g].source {
                    table[g * n + f] = Some(compose(g, f));
                }
            }
        }
        Self::from_parts(objects, arrows, identities, table)
    }

    /// The category with a single object and only its identity.
    pub fn terminal() -> Self {
        let arrows = vec![Arrow { name: "id".into(), source: 0, target: 0 }];
        Self::from_parts(vec!["*".into()], arrows, vec![0], vec![Some(0)]).expect("well-formed")
    }

    /// A discrete category on `n` objects.
    pub fn discrete(n: usize) -> Self {
        let objects = (0..n).map(|i| format!("d{i}")).collect();
        let arrows = (0..n)
            .map(|i| Arrow { name: format!("id{i}"), source: i, target: i })
            .collect();
        Self::from_fn(objects, arrows, (0..n).collect(), |g, _| g).expect("well-formed")
    }

    /// The span shape `b <- a -> c` with objects `a = 0`, `b = 1`, `c = 2`.
    /// Arrows: identities `0..3`, then `a->b` (3) and `a->c` (4).
    pub fn span() -> Self {
        let objects = vec!["a".into(), "b".into(), "c".into()];
        let mut arrows: Vec<Arrow> = (0..3)
            .map(|i| Arrow { name: format!("id{i}"), source: i, target: i })
            .collect();
        arrows.push(Arrow { name: "ab".into(), source: 0, target: 1 });
        arrows.push(Arrow { name: "ac".into(), source: 0, target: 2 });
        let arrows_ref = arrows.clone();
        Self::from_fn(objects, arrows, vec![0, 1, 2], |g, f| {
            if g < 3 {
                f
            } else {
                debug_assert!(f < 3 && arrows_ref[f].source == arrows_ref[g].source);
                g
            }
        })
        .expect("well-formed")
    }

    /// The parallel-pair shape `a ⇉ b` with arrows id_a, id_b, u, v.
    pub fn parallel_pair() -> Self {
        let objects = vec!["a".into(), "b".into()];
        let arrows = vec![
            Arrow { name: "id0".into(), source: 0, target: 0 },
            Arrow { name: "id1".into(), source: 1, target: 1 },
            Arrow { name: "u".into(), source: 0, target: 1 },
            Arrow { name: "v".into(), source: 0, target: 1 },
        ];
        Self::from_fn(objects, arrows, vec![0, 1], |g, f| if g < 2 { f } else { g })
            .expect("well-formed")
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, m: usize) -> &Arrow {
        &self.arrows[m]
    }

    pub fn identity(&self, object: usize) -> usize {
        self.identities[object]
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identities[self.arrows[m].source] == m
    }

    /// `g ∘ f`, if composable.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.table[g * self.arrows.len() + f]
    }

    pub fn find_arrow(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    /// Arrows with the given target, in index order.
    pub fn arrows_into(&self, object: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&m| self.arrows[m].target == object)
    }

    /// Every typing, unit and associativity violation; empty iff this is a category.
    pub fn validate(&self) -> Vec<CategoryViolation> {
        let n = self.arrows.len();
        let k = self.objects.len();
        let mut out = Vec::new();
        for (i, a) in self.arrows.iter().enumerate() {
            if a.source >= k || a.target >= k {
                out.push(CategoryViolation::BadArrow { arrow: i });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (o, &id) in self.identities.iter().enumerate() {
            if self.arrows[id].source != o || self.arrows[id].target != o {
                out.push(CategoryViolation::BadIdentity { object: o });
            }
        }
        for g in 0..n {
            for f in 0..n {
                let composable = self.arrows[f].target == self.arrows[g].source;
                match (composable, self.compose(g, f)) {
                    (true, None) => out.push(CategoryViolation::MissingComposite { g, f }),
                    (false, Some(_)) => out.push(CategoryViolation::SpuriousComposite { g, f }),
                    (true, Some(c)) => {
                        if self.arrows[c].source != self.arrows[f].source
                            || self.arrows[c].target != self.arrows[g].target
                        {
                            out.push(CategoryViolation::CompositeTyping { g, f, result: c });
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for f in 0..n {
            let a = &self.arrows[f];
            if self.compose(self.identities[a.target], f) != Some(f) {
                out.push(CategoryViolation::LeftUnit { f });
            }
            if self.compose(f, self.identities[a.source]) != Some(f) {
                out.push(CategoryViolation::RightUnit { f });
            }
        }
        for f in 0..n {
            for g in 0..n {
                let Some(gf) = self.compose(g, f) else { continue };
                for h in 0..n {
                    let Some(hg) = self.compose(h, g) else { continue };
                    if self.compose(hg, f) != self.compose(h, gf) {
                        out.push(CategoryViolation::Associativity { h, g, f });
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_category_is_valid() {
        assert!(FinCategory::terminal().validate().is_empty());
    }

    #[test]
    fn standard_shapes_are_valid() {
        assert!(FinCategory::discrete(3).validate().is_empty());
        assert!(FinCategory::span().validate().is_empty());
        assert!(FinCategory::parallel_pair().validate().is_empty());
    }

    #[test]
    fn broken_associativity_is_reported() {
        // One object, morphisms {1, a, b} with a∘a = b, a∘b = a, b∘a = b, b∘b = b.
        // (a∘a)∘b = b∘b = b but a∘(a∘b) = a∘a = b; (a∘b)∘a = a∘a = b, a∘(b∘a) = a∘b = a.
        let arrows = ["id", "a", "b"]
            .iter()
            .map(|s| Arrow { name: (*s).into(), source: 0, target: 0 })
            .collect();
        let table = vec![
            Some(0), Some(1), Some(2),
            Some(1), Some(2), Some(1),
            Some(2), Some(2), Some(2),
        ];
        let c = FinCategory::from_parts(vec!["*".into()], arrows, vec![0], table).unwrap();
        let report = c.validate();
        assert!(report
            .iter()
            .any(|v| matches!(v, CategoryViolation::Associativity { .. })));
    }

    #[test]
    fn wrong_table_size_rejected() {
        let arrows = vec![Arrow { name: "id".into(), source: 0, target: 0 }];
        assert!(FinCategory::from_parts(vec!["*".into()], arrows, vec![0], vec![]).is_err());
    }
}
