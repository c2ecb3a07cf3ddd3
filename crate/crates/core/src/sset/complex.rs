use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::fincat::{Arrow, FinCategory, Presheaf, PresheafMorphism};

/// The category 𝔻_n of ordinals `[0], …, [n-1]` and all order-preserving maps.
/// Object `k` is the ordinal `[k] = {0, …, k}`; an arrow is stored as its image list.
#[derive(Debug)]
pub struct Ordinals {
    n: usize,
    category: Arc<FinCategory>,
    maps: Vec<Vec<usize>>,
    index: HashMap<(usize, Vec<usize>), usize>,
}

fn monotone_maps(a: usize, b: usize) -> Vec<Vec<usize>> {
    // Maps [a] -> [b], lexicographic.
    let mut out = Vec::new();
    let mut cur = vec![0; a + 1];
    fn rec(pos: usize, lo: usize, b: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in lo..=b {
            cur[pos] = v;
            rec(pos + 1, v, b, cur, out);
        }
    }
    rec(0, 0, b, &mut cur, &mut out);
    out
}

/// Monotone surjections `[k] -> [j]`, lexicographic.
pub(crate) fn surjections(k: usize, j: usize) -> Vec<Vec<usize>> {
    monotone_maps(k, j)
        .into_iter()
        .filter(|m| m[0] == 0 && m[k] == j && m.windows(2).all(|w| w[1] <= w[0] + 1))
        .collect()
}

impl Ordinals {
    fn build(n: usize) -> Self {
        let mut arrows = Vec::new();
        let mut maps = Vec::new();
        let mut identities = vec![0; n];
        for a in 0..n {
            for b in 0..n {
                for m in monotone_maps(a, b) {
                    if a == b && m.iter().enumerate().all(|(i, &v)| i == v) {
                        identities[a] = maps.len();
                    }
                    let name = format!("[{a}]->[{b}]:{}", m.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""));
                    arrows.push(Arrow { name, source: a, target: b });
                    maps.push(m);
                }
            }
        }
        let index: HashMap<(usize, Vec<usize>), usize> =
            maps.iter().enumerate().map(|(i, m)| ((arrows[i].target, m.clone()), i)).collect();
        let objects = (0..n).map(|k| format!("[{k}]")).collect();
        let maps_ref = maps.clone();
        let arrows_ref = arrows.clone();
        let category = FinCategory::from_fn(objects, arrows, identities, |g, f| {
            let composite: Vec<usize> = maps_ref[f].iter().map(|&x| maps_ref[g][x]).collect();
            index[&(arrows_ref[g].target, composite)]
        })
        .expect("ordinal category is well-formed");
        Self { n, category: Arc::new(category), maps, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.category
    }

    /// The arrow with image list `map` into `[target]`.
    pub fn arrow(&self, target: usize, map: &[usize]) -> usize {
        self.index[&(target, map.to_vec())]
    }

    pub fn map(&self, m: usize) -> &[usize] {
        &self.maps[m]
    }

    /// Coface `d^i: [k-1] -> [k]` skipping `i`.
    pub fn coface(&self, k: usize, i: usize) -> usize {
        let m: Vec<usize> = (0..k).map(|p| if p < i { p } else { p + 1 }).collect();
        self.arrow(k, &m)
    }

    /// Codegeneracy `s^i: [k+1] -> [k]` hitting `i` twice.
    pub fn codegeneracy(&self, k: usize, i: usize) -> usize {
        let m: Vec<usize> = (0..k + 2).map(|p| if p <= i { p } else { p - 1 }).collect();
        self.arrow(k, &m)
    }
}

/// 𝔻_n for `1 ≤ n ≤ 3`, shared.
pub fn ordinals(n: usize) -> Result<&'static Ordinals> {
    static LEVELS: [OnceLock<Ordinals>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if !(1..=3).contains(&n) {
        return Err(Error::OutOfRange(format!("truncation level {n} is not in 1..=3")));
    }
    Ok(LEVELS[n - 1].get_or_init(|| Ordinals::build(n)))
}

/// The truncation level of a presheaf over one of the shared ordinal categories.
pub fn level_of(x: &Presheaf) -> Option<usize> {
    let n = x.category().object_count();
    let ord = ordinals(n).ok()?;
    (Arc::ptr_eq(x.category(), ord.category()) || **x.category() == **ord.category()).then_some(n)
}

/// A cell in Eilenberg–Zilber normal form: the nondegenerate `dim`-cell `index`
/// pulled back along the surjection `sigma: [k] -> [dim]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub sigma: Vec<usize>,
    pub dim: usize,
    pub index: usize,
}

impl Cell {
    pub fn nondegenerate(dim: usize, index: usize) -> Self {
        Self { sigma: (0..=dim).collect(), dim, index }
    }

    pub fn vertex(v: usize) -> Self {
        Self::nondegenerate(0, v)
    }

    pub fn edge(e: usize) -> Self {
        Self::nondegenerate(1, e)
    }

    /// The degenerate edge at vertex `v`.
    pub fn point_edge(v: usize) -> Self {
        Self { sigma: vec![0, 0], dim: 0, index: v }
    }

    /// `base · sigma` for a nondegenerate `base`; `sigma` must be a monotone surjection.
    pub fn degenerate(sigma: Vec<usize>, dim: usize, index: usize) -> Self {
        Self { sigma, dim, index }
    }

    /// The simplicial level this cell lives at.
    pub fn level(&self) -> usize {
        self.sigma.len() - 1
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.level() == self.dim
    }

    fn is_well_formed(&self) -> bool {
        !self.sigma.is_empty()
            && self.sigma[0] == 0
            && *self.sigma.last().unwrap() == self.dim
            && self.sigma.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1)
    }
}

/// Epi–mono factorization of a monotone map `[a] -> [b]`: `(surjection, injection)`.
fn epi_mono(map: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut image: Vec<usize> = map.to_vec();
    image.dedup();
    let epi = map.iter().map(|v| image.binary_search(v).unwrap()).collect();
    (epi, image)
}

/// Face data of nondegenerate cells, enough to evaluate the simplicial action.
#[derive(Clone, Debug, Default)]
struct FaceData {
    /// `faces[d][i]` lists `d_0 x, …, d_d x` for the nondegenerate `d`-cell `i`.
    faces: Vec<Vec<Vec<Cell>>>,
}

impl FaceData {
    fn count(&self, d: usize) -> usize {
        self.faces.get(d).map_or(0, Vec::len)
    }

    /// `cell · theta` for a monotone `theta: [a] -> [level]`.
    fn act(&self, cell: &Cell, theta: &[usize]) -> Cell {
        let tau: Vec<usize> = theta.iter().map(|&p| cell.sigma[p]).collect();
        let (eps, delta) = epi_mono(&tau);
        let face = self.face(cell.dim, cell.index, &delta);
        Cell { sigma: eps.iter().map(|&p| face.sigma[p]).collect(), dim: face.dim, index: face.index }
    }

    /// `x · delta` for the nondegenerate `j`-cell `x` and an injection `delta: [i] -> [j]`.
    fn face(&self, j: usize, x: usize, delta: &[usize]) -> Cell {
        if delta.len() == j + 1 {
            return Cell::nondegenerate(j, x);
        }
        let t = (0..=j).find(|t| !delta.contains(t)).unwrap();
        let rest: Vec<usize> = delta.iter().map(|&p| if p < t { p } else { p - 1 }).collect();
        self.act(&self.faces[j][x][t], &rest)
    }
}

/// A truncated simplicial set with its cell structure.
#[derive(Clone, Debug)]
pub struct SimplicialSet {
    n: usize,
    presheaf: Arc<Presheaf>,
    data: FaceData,
    cells: Vec<Vec<Cell>>,
    index: Vec<HashMap<Cell, usize>>,
}

/// Incremental description of a level-`n` complex by nondegenerate cells and faces.
#[derive(Clone, Debug)]
pub struct ComplexBuilder {
    n: usize,
    vertices: usize,
    faces: Vec<Vec<Vec<Cell>>>,
    labels: Vec<(usize, usize, String)>,
}

impl ComplexBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, vertices: 0, faces: vec![Vec::new(); n.max(1)], labels: Vec::new() }
    }

    pub fn vertex(&mut self) -> usize {
        self.vertices += 1;
        self.vertices - 1
    }

    pub fn vertices(&mut self, count: usize) -> &mut Self {
        self.vertices += count;
        self
    }

    /// A nondegenerate edge `source -> target` (`d_1 = source`, `d_0 = target`).
    pub fn edge(&mut self, source: usize, target: usize) -> usize {
        self.cell(1, vec![Cell::vertex(target), Cell::vertex(source)])
    }

    /// A nondegenerate triangle with faces `[d_0, d_1, d_2]`.
    pub fn triangle(&mut self, faces: [Cell; 3]) -> usize {
        self.cell(2, faces.to_vec())
    }

    /// A nondegenerate cell of dimension `dim ≥ 1` with faces `d_0, …, d_dim`.
    pub fn cell(&mut self, dim: usize, faces: Vec<Cell>) -> usize {
        if self.faces.len() <= dim {
            self.faces.resize(dim + 1, Vec::new());
        }
        self.faces[dim].push(faces);
        self.faces[dim].len() - 1
    }

    pub fn label(&mut self, dim: usize, index: usize, label: impl Into<String>) -> &mut Self {
        self.labels.push((dim, index, label.into()));
        self
    }

    pub fn build(&self) -> Result<SimplicialSet> {
        let ord = ordinals(self.n)?;
        let mut data = FaceData { faces: self.faces.clone() };
        data.faces.truncate(self.n);
        if self.faces.iter().skip(self.n).any(|f| !f.is_empty()) {
            return Err(Error::OutOfRange(format!("cells above dimension {} in a level-{} complex", self.n - 1, self.n)));
        }
        if data.faces.is_empty() {
            data.faces.push(Vec::new());
        }
        data.faces[0] = vec![Vec::new(); self.vertices];
        for d in 1..data.faces.len() {
            for (i, fs) in data.faces[d].iter().enumerate() {
                if fs.len() != d + 1 {
                    return Err(Error::IllTyped(format!("{d}-cell {i} needs {} faces, got {}", d + 1, fs.len())));
                }
                for c in fs {
                    if !c.is_well_formed() || c.level() != d - 1 || c.index >= data.count(c.dim) {
                        return Err(Error::IllTyped(format!("{d}-cell {i} has an invalid face {c:?}")));
                    }
                }
            }
        }
        // Simplicial identities d_i d_j = d_{j-1} d_i for i < j.
        for d in 2..data.faces.len() {
            for (x, fs) in data.faces[d].iter().enumerate() {
                for j in 1..=d {
                    for i in 0..j {
                        let skip = |t: usize| -> Vec<usize> { (0..d - 1).map(|p| if p < t { p } else { p + 1 }).collect() };
                        let lhs = data.act(&fs[j], &skip(i));
                        let rhs = data.act(&fs[i], &skip(j - 1));
                        if lhs != rhs {
                            return Err(Error::IllTyped(format!(
                                "{d}-cell {x} violates d_{i} d_{j} = d_{} d_{i}",
                                j - 1
                            )));
                        }
                    }
                }
            }
        }
        let mut s = SimplicialSet::from_face_data(ord, data)?;
        if !self.labels.is_empty() {
            let mut p = (*s.presheaf).clone();
            for (dim, idx, l) in &self.labels {
                if *dim >= self.n || *idx >= s.nondegenerate_count(*dim) {
                    return Err(Error::OutOfRange(format!("label on missing cell ({dim}, {idx})")));
                }
                let e = s.element(&Cell::nondegenerate(*dim, *idx)).unwrap();
                p = p.with_label(*dim, e, l.clone());
            }
            s.presheaf = Arc::new(p);
        }
        Ok(s)
    }
}

impl SimplicialSet {
    fn from_face_data(ord: &Ordinals, data: FaceData) -> Result<Self> {
        let n = ord.n();
        let mut cells: Vec<Vec<Cell>> = Vec::with_capacity(n);
        for k in 0..n {
            let mut level: Vec<Cell> = (0..data.count(k)).map(|i| Cell::nondegenerate(k, i)).collect();
            for j in (0..k).rev() {
                for sigma in surjections(k, j) {
                    for x in 0..data.count(j) {
                        level.push(Cell::degenerate(sigma.clone(), j, x));
                    }
                }
            }
            cells.push(level);
        }
        let index: Vec<HashMap<Cell, usize>> =
            cells.iter().map(|l| l.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect()).collect();
        let cat = ord.category();
        let actions = (0..cat.arrow_count())
            .map(|m| {
                let a = cat.arrow(m);
                let theta = ord.map(m);
                cells[a.target].iter().map(|c| index[a.source][&data.act(c, theta)]).collect()
            })
            .collect();
        let sizes = cells.iter().map(Vec::len).collect();
        let presheaf = Arc::new(Presheaf::new_checked(cat.clone(), sizes, actions)?);
        Ok(Self { n, presheaf, data, cells, index })
    }

    /// Recovers the cell structure of an arbitrary presheaf over 𝔻_n: nondegenerate
    /// cells are those outside the images of the degeneracies, numbered in element order.
    pub fn from_presheaf(x: &Arc<Presheaf>) -> Result<Self> {
        let n = level_of(x).ok_or_else(|| Error::ShapeMismatch("presheaf is not over an ordinal category".into()))?;
        let ord = ordinals(n)?;
        let mut nondeg: Vec<Vec<usize>> = Vec::with_capacity(n);
        for k in 0..n {
            let mut degenerate = vec![false; x.size(k)];
            if k > 0 {
                for i in 0..k {
                    for &y in x.action(ord.codegeneracy(k - 1, i)) {
                        degenerate[y] = true;
                    }
                }
            }
            nondeg.push((0..x.size(k)).filter(|&e| !degenerate[e]).collect());
        }
        let mut data = FaceData { faces: vec![Vec::new(); n] };
        data.faces[0] = vec![Vec::new(); nondeg[0].len()];
        // Normal form of every element, found by trying all (surjection, nondegenerate) pairs.
        let mut forms: Vec<HashMap<usize, Cell>> = vec![HashMap::new(); n];
        for k in 0..n {
            for j in 0..=k {
                for sigma in surjections(k, j) {
                    let m = ord.arrow(j, &sigma);
                    for (i, &e) in nondeg[j].iter().enumerate() {
                        forms[k].entry(x.act(m, e)).or_insert_with(|| Cell::degenerate(sigma.clone(), j, i));
                    }
                }
            }
            if forms[k].len() != x.size(k) {
                return Err(Error::IllTyped(format!("level {k} has elements without a normal form")));
            }
        }
        for d in 1..n {
            data.faces[d] = nondeg[d]
                .iter()
                .map(|&e| (0..=d).map(|t| forms[d - 1][&x.act(ord.coface(d, t), e)].clone()).collect())
                .collect();
        }
        let s = Self::from_face_data(ord, data)?;
        let cells: Vec<Vec<Cell>> = (0..n).map(|k| (0..x.size(k)).map(|e| forms[k][&e].clone()).collect()).collect();
        let index = cells.iter().map(|l| l.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect()).collect();
        Ok(Self { n, presheaf: x.clone(), data: s.data, cells, index })
    }

    pub fn level(&self) -> usize {
        self.n
    }

    pub fn presheaf(&self) -> &Arc<Presheaf> {
        &self.presheaf
    }

    pub fn nondegenerate_count(&self, dim: usize) -> usize {
        self.data.count(dim)
    }

    /// Total number of nondegenerate cells.
    pub fn cell_count(&self) -> usize {
        (0..self.n).map(|d| self.data.count(d)).sum()
    }

    /// Faces `d_0, …, d_dim` of a nondegenerate cell.
    pub fn faces(&self, dim: usize, index: usize) -> &[Cell] {
        &self.data.faces[dim][index]
    }

    /// Normal form of element `e` at level `k`.
    pub fn cell(&self, k: usize, e: usize) -> &Cell {
        &self.cells[k][e]
    }

    pub fn element(&self, cell: &Cell) -> Option<usize> {
        self.index.get(cell.level())?.get(cell).copied()
    }

    /// The morphism sending nondegenerate cell `(d, i)` to `images[d][i]`, a cell of
    /// `target` at level `d`. Fails unless the assignment respects faces.
    pub fn morphism(&self, target: &SimplicialSet, images: &[Vec<Cell>]) -> Result<PresheafMorphism> {
        for d in 0..self.n {
            let given = images.get(d).map_or(0, Vec::len);
            if given != self.nondegenerate_count(d) {
                return Err(Error::ShapeMismatch(format!(
                    "{given} images for {} nondegenerate {d}-cells",
                    self.nondegenerate_count(d)
                )));
            }
        }
        let mut comps = Vec::with_capacity(self.n);
        for k in 0..self.n {
            let mut comp = Vec::with_capacity(self.cells[k].len());
            for c in &self.cells[k] {
                let img = &images[c.dim][c.index];
                if img.level() != c.dim || !img.is_well_formed() {
                    return Err(Error::IllTyped(format!("image of {}-cell {} lives at the wrong level", c.dim, c.index)));
                }
                let cell = Cell { sigma: c.sigma.iter().map(|&p| img.sigma[p]).collect(), dim: img.dim, index: img.index };
                let e = target
                    .element(&cell)
                    .ok_or_else(|| Error::OutOfRange(format!("image cell {cell:?} does not exist")))?;
                comp.push(e);
            }
            comps.push(comp);
        }
        PresheafMorphism::new(self.presheaf.clone(), target.presheaf.clone(), comps)
    }

    /// Images of the nondegenerate cells under `f`, as normal forms in `target`.
    pub fn images(&self, target: &SimplicialSet, f: &PresheafMorphism) -> Vec<Vec<Cell>> {
        (0..self.n)
            .map(|d| {
                (0..self.nondegenerate_count(d))
                    .map(|i| {
                        let e = self.element(&Cell::nondegenerate(d, i)).unwrap();
                        target.cell(d, f.apply(d, e)).clone()
                    })
                    .collect()
            })
            .collect()
    }
}
