#![allow(dead_code)]

use std::collections::BTreeMap;

use finmodel::chain::{ChainComplex, Matrix};
use rand::Rng;

/// Rank by enumerating every linear combination of the columns.
pub fn brute_rank(m: &Matrix, p: u64) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut seen = std::collections::HashSet::new();
    let mut coeffs = vec![0u64; cols];
    loop {
        let v: Vec<u64> = (0..rows).map(|r| (0..cols).map(|c| coeffs[c] * m.get(r, c)).sum::<u64>() % p).collect();
        seen.insert(v);
        let Some(i) = (0..cols).find(|&i| coeffs[i] + 1 < p) else { break };
        coeffs[i] += 1;
        coeffs[..i].iter_mut().for_each(|c| *c = 0);
    }
    let mut size = seen.len();
    let mut rank = 0;
    while size > 1 {
        size /= p as usize;
        rank += 1;
    }
    rank
}

/// Homology dimension from brute-force ranks.
pub fn brute_homology(c: &ChainComplex, n: i64) -> usize {
    let p = c.prime();
    c.dim(n) - brute_rank(&c.d(n), p) - brute_rank(&c.d(n + 1), p)
}

fn random_matrix(rng: &mut impl Rng, p: u64, rows: usize, cols: usize) -> Matrix {
    let e: Vec<i64> = (0..rows * cols).map(|_| rng.gen_range(0..p as i64)).collect();
    Matrix::from_rows(p, rows, cols, &e).unwrap()
}

fn random_invertible(rng: &mut impl Rng, p: u64, n: usize) -> (Matrix, Matrix) {
    loop {
        let m = random_matrix(rng, p, n, n);
        if m.rank() == n {
            // Inverse via kernel of [M | -I] is overkill; solve column by column instead.
            let inv = invert(&m, p);
            return (m, inv);
        }
    }
}

fn invert(m: &Matrix, p: u64) -> Matrix {
    let n = m.rows();
    // Kernel of [M | -I] restricted to vectors (x, e_j) gives M x = e_j.
    let mut entries = vec![0i64; n * n];
    for j in 0..n {
        let mut aug = Vec::with_capacity(n * (n + 1));
        for r in 0..n {
            for c in 0..n {
                aug.push(m.get(r, c) as i64);
            }
            aug.push(if r == j { -1 } else { 0 });
        }
        let k = Matrix::from_rows(p, n, n + 1, &aug).unwrap().kernel();
        // One-dimensional kernel; scale so the last coordinate is 1.
        let last = k.get(n, 0);
        let scale = (1..p).find(|s| s * last % p == 1).unwrap();
        for r in 0..n {
            entries[r * n + j] = (k.get(r, 0) * scale % p) as i64;
        }
    }
    Matrix::from_rows(p, n, n, &entries).unwrap()
}

/// A random complex over `F_p` supported in `[lo, hi]` with every dimension at most
/// `max_dim`: a sum of spheres and discs twisted by random changes of basis.
pub fn random_complex(rng: &mut impl Rng, p: u64, lo: i64, hi: i64, max_dim: usize) -> ChainComplex {
    let len = (hi - lo + 1) as usize;
    let mut spheres = vec![0usize; len];
    // discs[i] spans degrees lo+i and lo+i-1.
    let mut discs = vec![0usize; len];
    let dim = |s: &[usize], d: &[usize], i: usize| s[i] + d[i] + d.get(i + 1).copied().unwrap_or(0);
    for _ in 0..rng.gen_range(0..3 * len) {
        let i = rng.gen_range(0..len);
        if rng.gen_bool(0.5) {
            if dim(&spheres, &discs, i) < max_dim {
                spheres[i] += 1;
            }
        } else if i > 0 && dim(&spheres, &discs, i) < max_dim && dim(&spheres, &discs, i - 1) < max_dim {
            discs[i] += 1;
        }
    }
    let dims: Vec<usize> = (0..len).map(|i| dim(&spheres, &discs, i)).collect();
    // Basis at index i: [spheres, disc tops (discs[i]), disc bottoms (discs[i+1])].
    let standard: Vec<Matrix> = (0..len)
        .map(|i| {
            let rows = if i == 0 { 0 } else { dims[i - 1] };
            let mut e = vec![0i64; rows * dims[i]];
            for t in 0..discs[i] {
                let col = spheres[i] + t;
                let row = spheres[i - 1] + discs[i - 1] + t;
                e[row * dims[i] + col] = 1;
            }
            Matrix::from_rows(p, rows, dims[i], &e).unwrap()
        })
        .collect();
    let bases: Vec<(Matrix, Matrix)> = dims.iter().map(|&d| random_invertible(rng, p, d)).collect();
    let mut parts = BTreeMap::new();
    for i in 0..len {
        // d' = B_{i-1} d B_i^{-1}
        let d = if i == 0 {
            standard[0].clone()
        } else {
            bases[i - 1].0.mul(&standard[i]).unwrap().mul(&bases[i].1).unwrap()
        };
        parts.insert(lo + i as i64, (dims[i], d));
    }
    ChainComplex::from_degrees(p, &parts).unwrap()
}
