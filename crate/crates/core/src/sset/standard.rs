use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{Presheaf, PresheafMorphism};
use crate::sset::complex::{Cell, ComplexBuilder, SimplicialSet};

/// A complex spanned by a down-closed family of vertex subsets of `{0, …, m}`, cells of
/// dimension `≥ n` dropped. Returns the complex and the subset behind each cell.
fn subset_complex(n: usize, m: usize, keep: impl Fn(&[usize]) -> bool) -> Result<(SimplicialSet, Vec<Vec<Vec<usize>>>)> {
    let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
    for mask in 1u32..(1 << (m + 1)) {
        let s: Vec<usize> = (0..=m).filter(|&i| mask & (1 << i) != 0).collect();
        if s.len() <= n && keep(&s) {
            by_dim[s.len() - 1].push(s);
        }
    }
    for d in &mut by_dim {
        d.sort();
    }
    let pos: Vec<HashMap<Vec<usize>, usize>> =
        by_dim.iter().map(|d| d.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
    let mut b = ComplexBuilder::new(n);
    b.vertices(by_dim[0].len());
    for d in 1..n {
        for s in &by_dim[d] {
            let faces = (0..=d)
                .map(|t| {
                    let mut f = s.clone();
                    f.remove(t);
                    pos[d - 1].get(&f).map(|&i| Cell::nondegenerate(d - 1, i))
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::IllTyped("subset family is not down-closed".into()))?;
            b.cell(d, faces);
        }
    }
    Ok((b.build()?, by_dim))
}

fn check_level(n: usize) -> Result<()> {
    if !(1..=3).contains(&n) {
        return Err(Error::OutOfRange(format!("truncation level {n} is not in 1..=3")));
    }
    Ok(())
}

/// A sub-complex of the standard `m`-simplex at level `n`, with its inclusion.
#[derive(Clone, Debug)]
pub struct StandardPiece {
    pub complex: SimplicialSet,
    subsets: Vec<Vec<Vec<usize>>>,
}

impl StandardPiece {
    pub fn presheaf(&self) -> &Arc<Presheaf> {
        self.complex.presheaf()
    }

    /// The inclusion into `whole`, matching cells by vertex subset.
    pub fn inclusion(&self, whole: &StandardPiece) -> Result<PresheafMorphism> {
        let images = self
            .subsets
            .iter()
            .enumerate()
            .map(|(d, cells)| {
                cells
                    .iter()
                    .map(|s| {
                        whole.subsets[d]
                            .iter()
                            .position(|t| t == s)
                            .map(|i| Cell::nondegenerate(d, i))
                            .ok_or_else(|| Error::IllTyped("piece is not contained in the target".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        self.complex.morphism(&whole.complex, &images)
    }
}

/// `Δ_m` at level `n`; for `m = n` the top cell is absent.
pub fn simplex(n: usize, m: usize) -> Result<StandardPiece> {
    check_level(n)?;
    if m > n {
        return Err(Error::OutOfRange(format!("Δ_{m} does not exist at level {n}")));
    }
    let (complex, subsets) = subset_complex(n, m, |_| true)?;
    Ok(StandardPiece { complex, subsets })
}

/// `∂Δ_m` at level `n`.
pub fn boundary(n: usize, m: usize) -> Result<StandardPiece> {
    check_level(n)?;
    if m > n {
        return Err(Error::OutOfRange(format!("∂Δ_{m} does not exist at level {n}")));
    }
    let (complex, subsets) = subset_complex(n, m, |s| s.len() <= m)?;
    Ok(StandardPiece { complex, subsets })
}

/// The horn `Λ^k_m` at level `n`: `Δ_m` without its top cell and the face opposite `k`.
pub fn horn(n: usize, m: usize, k: usize) -> Result<StandardPiece> {
    check_level(n)?;
    if m == 0 || m > n || k > m {
        return Err(Error::OutOfRange(format!("horn Λ^{k}_{m} does not exist at level {n}")));
    }
    let (complex, subsets) = subset_complex(n, m, |s| s.len() < m || (s.len() == m && s.contains(&k)))?;
    Ok(StandardPiece { complex, subsets })
}

/// Generating cofibrations `I_n` (boundary inclusions `∂Δ_m → Δ_m`, `m < n`) and
/// generating trivial cofibrations `J_n` (horn inclusions).
///
/// `J_1 = {Λ^0_1 → Δ_1}`. `J_2` holds the outer horns `Λ^0_1, Λ^1_1, Λ^0_2, Λ^2_2`.
/// `J_3` holds every horn `Λ^k_m` with `1 ≤ m ≤ 3`.
pub fn generators(n: usize) -> Result<(Vec<PresheafMorphism>, Vec<PresheafMorphism>)> {
    check_level(n)?;
    let i = (0..n).map(|m| boundary(n, m)?.inclusion(&simplex(n, m)?)).collect::<Result<Vec<_>>>()?;
    let horns: Vec<(usize, usize)> = match n {
        1 => vec![(1, 0)],
        2 => vec![(1, 0), (1, 1), (2, 0), (2, 2)],
        _ => (1..=3).flat_map(|m| (0..=m).map(move |k| (m, k))).collect(),
    };
    let j = horns
        .into_iter()
        .map(|(m, k)| horn(n, m, k)?.inclusion(&simplex(n, m)?))
        .collect::<Result<Vec<_>>>()?;
    Ok((i, j))
}

/// A multigraph at level `n ≥ 2` (level 1 ignores edges): `vertices` points and one
/// nondegenerate edge per `(source, target)` pair.
pub fn multigraph(n: usize, vertices: usize, edges: &[(usize, usize)]) -> Result<SimplicialSet> {
    check_level(n)?;
    if n == 1 && !edges.is_empty() {
        return Err(Error::OutOfRange("level-1 complexes have no edges".into()));
    }
    if edges.iter().any(|&(s, t)| s >= vertices || t >= vertices) {
        return Err(Error::OutOfRange("edge endpoint is not a vertex".into()));
    }
    let mut b = ComplexBuilder::new(n);
    b.vertices(vertices);
    for &(s, t) in edges {
        b.edge(s, t);
    }
    b.build()
}

/// A finite set as a level-`n` complex: `size` isolated points.
pub fn discrete(n: usize, size: usize) -> Result<SimplicialSet> {
    multigraph(n, size, &[])
}

/// One vertex with `loops` nondegenerate loops and nothing else.
pub fn bouquet(n: usize, loops: usize) -> Result<SimplicialSet> {
    multigraph(n, 1, &vec![(0, 0); loops])
}

/// The 3-truncated classifying complex of `Z/2`: one vertex, one loop `g`, and one
/// triangle witnessing `g·g = 1`.
pub fn z2_classifying() -> Result<SimplicialSet> {
    let mut b = ComplexBuilder::new(3);
    let v = b.vertex();
    let g = b.edge(v, v);
    b.triangle([Cell::edge(g), Cell::point_edge(v), Cell::edge(g)]);
    b.build()
}

/// Canonical form of a multigraph under vertex relabelling: the lexicographically least
/// sorted edge list.
fn canonical_edges(vertices: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..vertices).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    loop {
        let mut e: Vec<(usize, usize)> = edges.iter().map(|&(s, t)| (perm[s], perm[t])).collect();
        e.sort();
        if best.as_ref().is_none_or(|b| e < *b) {
            best = Some(e);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else { return false };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// One representative per isomorphism class of multigraphs (loops and parallel edges
/// allowed) with at most `max_vertices` vertices and `max_edges` nondegenerate edges,
/// ordered by vertex count, edge count, then canonical edge list.
pub fn multigraph_corpus(n: usize, max_vertices: usize, max_edges: usize) -> Result<Vec<SimplicialSet>> {
    let mut seen: BTreeSet<(usize, usize, Vec<(usize, usize)>)> = BTreeSet::new();
    for v in 0..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..v).flat_map(|s| (0..v).map(move |t| (s, t))).collect();
        for e in 0..=max_edges {
            if pairs.is_empty() && e > 0 {
                break;
            }
            let mut choice = vec![0usize; e];
            loop {
                let edges: Vec<(usize, usize)> = choice.iter().map(|&i| pairs[i]).collect();
                seen.insert((v, e, canonical_edges(v, &edges)));
                // Next multiset (non-decreasing index sequence).
                let Some(pos) = (0..e).rev().find(|&p| choice[p] + 1 < pairs.len()) else { break };
                choice[pos] += 1;
                let val = choice[pos];
                choice[pos + 1..].iter_mut().for_each(|c| *c = val);
            }
        }
    }
    seen.into_iter().map(|(v, _, edges)| multigraph(n, v, &edges)).collect()
}

/// Sets of size `0..=max` as level-1 complexes.
pub fn set_corpus(max: usize) -> Result<Vec<SimplicialSet>> {
    (0..=max).map(|s| discrete(1, s)).collect()
}
