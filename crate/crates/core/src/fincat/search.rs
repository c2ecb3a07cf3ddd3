//! Exhaustive backtracking search for natural transformations.
//!
//! Elements of the source are visited in canonical order (object index, then element
//! index) and candidates are tried in ascending order, so solutions are produced in
//! lexicographic order of their flattened components. Assigning an element forces the
//! images of all elements reachable from it by the presheaf action; a conflict prunes
//! the branch.

use crate::error::{Error, Result};
use crate::fincat::{Presheaf, PresheafMorphism};

/// Default cap on candidate assignments tried by a single search.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

const UNSET: usize = usize::MAX;

type Filter<'a> = dyn Fn(usize, usize, usize) -> bool + 'a;

pub struct MapSearch<'a> {
    source: &'a Presheaf,
    target: &'a Presheaf,
    fixed: Vec<(usize, usize, usize)>,
    filter: Option<&'a Filter<'a>>,
    injective: bool,
}

struct State<'s, 'a> {
    search: &'s MapSearch<'a>,
    into: Vec<Vec<usize>>,
    assign: Vec<Vec<usize>>,
    used: Vec<Vec<u32>>,
    trail: Vec<(usize, usize)>,
    order: Vec<(usize, usize)>,
    tried: u64,
    budget: u64,
    stop: bool,
    exhausted: bool,
}

impl<'a> MapSearch<'a> {
    pub fn new(source: &'a Presheaf, target: &'a Presheaf) -> Self {
        Self { source, target, fixed: Vec::new(), filter: None, injective: false }
    }

    /// Prescribe the image of one element.
    pub fn fix(mut self, object: usize, element: usize, value: usize) -> Self {
        self.fixed.push((object, element, value));
        self
    }

    /// Prescribe `φ ∘ along = values` for a morphism `along: A -> source`.
    pub fn fix_along(mut self, along: &PresheafMorphism, values: &PresheafMorphism) -> Self {
        for (c, comp) in along.components().iter().enumerate() {
            for (a, &b) in comp.iter().enumerate() {
                self.fixed.push((c, b, values.apply(c, a)));
            }
        }
        self
    }

    /// Restrict candidate images: `filter(object, element, candidate)`.
    pub fn filter(mut self, filter: &'a Filter<'a>) -> Self {
        self.filter = Some(filter);
        self
    }

    /// Only componentwise injective maps.
    pub fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    /// Runs the search; `visit` returns `false` to stop early.
    /// Returns the number of candidate assignments tried.
    pub fn run(&self, budget: u64, visit: &mut dyn FnMut(&[Vec<usize>]) -> bool) -> Result<u64> {
        if !self.source.same_category(self.target) {
            return Err(Error::ShapeMismatch("search between presheaves over different categories".into()));
        }
        let cat = self.source.category();
        let k = cat.object_count();
        let into = (0..k).map(|c| cat.arrows_into(c).collect()).collect();
        let assign = (0..k).map(|c| vec![UNSET; self.source.size(c)]).collect();
        let used = (0..k).map(|c| vec![0u32; self.target.size(c)]).collect();
        let order = (0..k)
            .flat_map(|c| (0..self.source.size(c)).map(move |x| (c, x)))
            .collect();
        let mut st = State {
            search: self,
            into,
            assign,
            used,
            trail: Vec::new(),
            order,
            tried: 0,
            budget,
            stop: false,
            exhausted: false,
        };
        for &(c, x, y) in &self.fixed {
            if c >= k || x >= self.source.size(c) || y >= self.target.size(c) {
                return Err(Error::ShapeMismatch("prescribed value out of range".into()));
            }
            if !st.assign_element(c, x, y) {
                return Ok(0);
            }
        }
        st.dfs(0, visit);
        if st.exhausted {
            return Err(Error::BudgetExhausted { budget });
        }
        Ok(st.tried)
    }

    /// Collects every solution as a morphism.
    pub fn collect(
        &self,
        source: &std::sync::Arc<Presheaf>,
        target: &std::sync::Arc<Presheaf>,
        budget: u64,
    ) -> Result<Vec<PresheafMorphism>> {
        let mut out = Vec::new();
        self.run(budget, &mut |comp| {
            out.push(PresheafMorphism::from_parts(source.clone(), target.clone(), comp.to_vec()));
            true
        })?;
        Ok(out)
    }

    /// First solution in canonical order.
    pub fn first(
        &self,
        source: &std::sync::Arc<Presheaf>,
        target: &std::sync::Arc<Presheaf>,
        budget: u64,
    ) -> Result<Option<PresheafMorphism>> {
        let mut out = None;
        self.run(budget, &mut |comp| {
            out = Some(PresheafMorphism::from_parts(source.clone(), target.clone(), comp.to_vec()));
            false
        })?;
        Ok(out)
    }
}

impl State<'_, '_> {
    fn set(&mut self, c: usize, x: usize, y: usize) -> bool {
        if let Some(f) = self.search.filter {
            if !f(c, x, y) {
                return false;
            }
        }
        if self.search.injective && self.used[c][y] > 0 {
            return false;
        }
        self.assign[c][x] = y;
        self.used[c][y] += 1;
        self.trail.push((c, x));
        true
    }

    fn assign_element(&mut self, c: usize, x: usize, y: usize) -> bool {
        match self.assign[c][x] {
            UNSET => {}
            v => return v == y,
        }
        if !self.set(c, x, y) {
            return false;
        }
        let src = self.search.source;
        let tgt = self.search.target;
        let cat = src.category();
        for i in 0..self.into[c].len() {
            let m = self.into[c][i];
            let c2 = cat.arrow(m).source;
            let z = src.act(m, x);
            let w = tgt.act(m, y);
            match self.assign[c2][z] {
                UNSET => {
                    if !self.set(c2, z, w) {
                        return false;
                    }
                }
                v if v != w => return false,
                _ => {}
            }
        }
        true
    }

    /// Whether `y` is a candidate for `(c, x)` given the current partial assignment.
    fn consistent(&self, c: usize, x: usize, y: usize) -> bool {
        if self.search.filter.is_some_and(|f| !f(c, x, y)) || (self.search.injective && self.used[c][y] > 0) {
            return false;
        }
        let (src, tgt) = (self.search.source, self.search.target);
        self.into[c].iter().all(|&m| {
            let v = self.assign[src.category().arrow(m).source][src.act(m, x)];
            v == UNSET || v == tgt.act(m, y)
        })
    }

    /// Forward check: every unassigned element from `pos` on still has a candidate.
    fn viable(&self, pos: usize) -> bool {
        self.order[pos..].iter().all(|&(c, x)| {
            self.assign[c][x] != UNSET || (0..self.search.target.size(c)).any(|y| self.consistent(c, x, y))
        })
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (c, x) = self.trail.pop().unwrap();
            let y = self.assign[c][x];
            self.used[c][y] -= 1;
            self.assign[c][x] = UNSET;
        }
    }

    fn dfs(&mut self, mut pos: usize, visit: &mut dyn FnMut(&[Vec<usize>]) -> bool) {
        while pos < self.order.len() {
            let (c, x) = self.order[pos];
            if self.assign[c][x] == UNSET {
                break;
            }
            pos += 1;
        }
        if pos == self.order.len() {
            if !visit(&self.assign) {
                self.stop = true;
            }
            return;
        }
        if !self.viable(pos) {
            return;
        }
        let (c, x) = self.order[pos];
        for y in 0..self.search.target.size(c) {
            self.tried += 1;
            if self.tried > self.budget {
                self.exhausted = true;
                self.stop = true;
                return;
            }
            let mark = self.trail.len();
            if self.assign_element(c, x, y) {
                self.dfs(pos + 1, visit);
            }
            self.undo(mark);
            if self.stop {
                return;
            }
        }
    }
}
