use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::fincat::{find_isomorphism, Presheaf, PresheafMorphism};
use crate::model::{ModelInstance, WeqStrategy};
use crate::sset::complex::{level_of, ordinals};
use crate::sset::standard::{bouquet, discrete, generators, z2_classifying};

/// The model structure on level-`n` truncated simplicial sets. Every object is
/// cofibrant; levels 1 and 2 carry the closed-form weak-equivalence oracle, level 3
/// refutes weak equivalences with the classifying complex of `Z/2` as probe.
pub fn instance(n: usize) -> Result<ModelInstance> {
    static INSTANCES: [OnceLock<ModelInstance>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let ord = ordinals(n)?;
    if let Some(m) = INSTANCES[n - 1].get() {
        return Ok(m.clone());
    }
    let (i, j) = generators(n)?;
    let mut m = ModelInstance::new(format!("sset:{n}"), ord.category().clone(), i, j)?.with_all_cofibrant(true);
    if n < 3 {
        m = m.with_oracle(Arc::new(move |f: &PresheafMorphism| weq_oracle(n, f)));
    } else {
        m = m.with_strategy(WeqStrategy::Search).with_probes(vec![z2_classifying()?.presheaf().clone()]);
    }
    Ok(INSTANCES[n - 1].get_or_init(|| m).clone())
}

/// Connected components of the underlying undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    /// Component of each vertex, numbered by least vertex.
    pub labels: Vec<usize>,
}

pub fn pi0(x: &Presheaf) -> Result<Components> {
    let n = level_of(x).ok_or_else(|| Error::ShapeMismatch("not a truncated simplicial set".into()))?;
    let ord = ordinals(n)?;
    let v = x.size(0);
    let mut uf = UnionFind::<usize>::new(v);
    if n >= 2 {
        let (d0, d1) = (ord.coface(1, 0), ord.coface(1, 1));
        for e in 0..x.size(1) {
            uf.union(x.act(d0, e), x.act(d1, e));
        }
    }
    let mut root_label = vec![usize::MAX; v];
    let mut labels = vec![0; v];
    let mut count = 0;
    for (i, l) in labels.iter_mut().enumerate() {
        let r = uf.find(i);
        if root_label[r] == usize::MAX {
            root_label[r] = count;
            count += 1;
        }
        *l = root_label[r];
    }
    Ok(Components { count, labels })
}

/// Closed-form weak-equivalence test. Level 1: both sets empty or both nonempty.
/// Level 2: bijection on connected components. Level 3 has no closed form and runs
/// the search procedure.
pub fn weq_oracle(n: usize, f: &PresheafMorphism) -> Result<bool> {
    match n {
        1 => Ok(f.source().is_empty() == f.target().is_empty()),
        2 => {
            let (cx, cy) = (pi0(f.source())?, pi0(f.target())?);
            if cx.count != cy.count {
                return Ok(false);
            }
            let mut hit = vec![false; cy.count];
            let mut image = vec![usize::MAX; cx.count];
            for v in 0..f.source().size(0) {
                image[cx.labels[v]] = cy.labels[f.apply(0, v)];
            }
            Ok(image.iter().all(|&c| !std::mem::replace(&mut hit[c], true)))
        }
        3 => instance(3)?.is_weak_equivalence_by_search(f),
        _ => Err(Error::OutOfRange(format!("truncation level {n} is not in 1..=3"))),
    }
}

/// The sub-presheaf of cells whose first vertex lies in the given component.
pub fn component(x: &Arc<Presheaf>, comps: &Components, which: usize) -> Result<Arc<Presheaf>> {
    let n = level_of(x).ok_or_else(|| Error::ShapeMismatch("not a truncated simplicial set".into()))?;
    let ord = ordinals(n)?;
    let keep: Vec<Vec<usize>> = (0..n)
        .map(|k| {
            let first = ord.arrow(k, &[0]);
            (0..x.size(k)).filter(|&e| comps.labels[x.act(first, e)] == which).collect()
        })
        .collect();
    let pos: Vec<Vec<usize>> = (0..n)
        .map(|k| {
            let mut p = vec![usize::MAX; x.size(k)];
            keep[k].iter().enumerate().for_each(|(i, &e)| p[e] = i);
            p
        })
        .collect();
    let cat = x.category();
    let actions = (0..cat.arrow_count())
        .map(|m| {
            let a = cat.arrow(m);
            keep[a.target].iter().map(|&e| pos[a.source][x.act(m, e)]).collect()
        })
        .collect();
    Ok(Arc::new(Presheaf::new(cat.clone(), keep.iter().map(Vec::len).collect(), actions)?))
}

/// A rooted tree with canonically sorted children.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    children: Vec<Tree>,
}

impl Tree {
    pub fn leaf() -> Self {
        Self { children: Vec::new() }
    }

    pub fn with_children(mut children: Vec<Tree>) -> Self {
        children.sort_by_key(|t| t.to_string());
        Self { children }
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    /// Edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for c in &self.children {
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// A multiset of rooted trees, serialized as sorted nested parentheses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Forest {
    trees: Vec<Tree>,
}

impl Forest {
    pub fn new(mut trees: Vec<Tree>) -> Self {
        trees.sort_by_key(|t| t.to_string());
        Self { trees }
    }

    /// `count` isolated roots.
    pub fn roots(count: usize) -> Self {
        Self::new(vec![Tree::leaf(); count])
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn height(&self) -> usize {
        self.trees.iter().map(Tree::height).max().unwrap_or(0)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.trees.iter().try_for_each(|t| write!(f, "{t}"))
    }
}

impl FromStr for Forest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        fn tree(b: &[char], pos: &mut usize) -> Result<Tree> {
            if b.get(*pos) != Some(&'(') {
                return Err(Error::IllTyped(format!("expected '(' at {pos}")));
            }
            *pos += 1;
            let mut children = Vec::new();
            while b.get(*pos) == Some(&'(') {
                children.push(tree(b, pos)?);
            }
            if b.get(*pos) != Some(&')') {
                return Err(Error::IllTyped(format!("expected ')' at {pos}")));
            }
            *pos += 1;
            Ok(Tree::with_children(children))
        }
        let mut trees = Vec::new();
        while pos < bytes.len() {
            trees.push(tree(&bytes, &mut pos)?);
        }
        Ok(Forest::new(trees))
    }
}

/// The level-3 connected representatives and their trees: point, one loop, two loops.
fn level3_representatives() -> Result<Vec<(Arc<Presheaf>, Tree)>> {
    Ok(vec![
        (bouquet(3, 0)?.presheaf().clone(), Tree::leaf()),
        (bouquet(3, 1)?.presheaf().clone(), Tree::with_children(vec![Tree::leaf()])),
        (bouquet(3, 2)?.presheaf().clone(), Tree::with_children(vec![Tree::leaf(), Tree::leaf()])),
    ])
}

/// The forest classifying `x` up to weak equivalence.
///
/// Levels 1 and 2 pick the discrete candidate with the same component count and
/// certify the weak equivalence by search. Level 3 classifies each connected
/// component against the pictured representatives (isomorphism first, then homotopy
/// equivalence search) and fails with [`Error::OutsideCorpus`] when no representative
/// is certified.
pub fn forest_invariant(x: &Arc<Presheaf>) -> Result<Forest> {
    let n = level_of(x).ok_or_else(|| Error::ShapeMismatch("not a truncated simplicial set".into()))?;
    forest_invariant_in(&instance(n)?, x)
}

/// [`forest_invariant`] with the cap, budget and mode of `m`, which must be the
/// instance of the level of `x`.
pub fn forest_invariant_in(m: &ModelInstance, x: &Arc<Presheaf>) -> Result<Forest> {
    let n = level_of(x).ok_or_else(|| Error::ShapeMismatch("not a truncated simplicial set".into()))?;
    if m.name() != format!("sset:{n}") {
        return Err(Error::ShapeMismatch(format!("{} is not the level-{n} instance", m.name())));
    }
    let comps = pi0(x)?;
    match n {
        1 | 2 => {
            let count = if n == 1 { usize::from(!x.is_empty()) } else { comps.count };
            let rep = discrete(n, count)?.presheaf().clone();
            if m.weakly_equivalent_objects(x, &rep)?.is_none() {
                return Err(Error::OutsideCorpus(format!("no discrete representative certified for {count} components")));
            }
            Ok(Forest::roots(count))
        }
        _ => {
            let reps = level3_representatives()?;
            let mut trees = Vec::with_capacity(comps.count);
            for c in 0..comps.count {
                let part = component(x, &comps, c)?;
                let mut found = None;
                for (rep, tree) in &reps {
                    if find_isomorphism(&part, rep, m.budget())?.is_some() {
                        found = Some(tree.clone());
                        break;
                    }
                }
                if found.is_none() {
                    for (rep, tree) in &reps {
                        match m.weakly_equivalent_objects(&part, rep) {
                            Ok(Some(_)) => {
                                found = Some(tree.clone());
                                break;
                            }
                            Ok(None) | Err(Error::CapExhausted { .. }) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
                trees.push(found.ok_or_else(|| {
                    Error::OutsideCorpus(format!("component {c} matches no classified representative"))
                })?);
            }
            Ok(Forest::new(trees))
        }
    }
}
