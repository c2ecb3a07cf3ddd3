//! Bounded chain complexes of finite-dimensional vector spaces over a prime field.
//!
//! Differentials lower degree: `d_n: A_n -> A_{n-1}`, stored as a
//! `dim A_{n-1} × dim A_n` matrix acting on column vectors.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A dense matrix over `F_p`, row-major, entries reduced mod `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) || p >= 1 << 31 {
        return Err(Error::OutOfRange(format!("{p} is not a supported prime")));
    }
    Ok(())
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2).
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

impl Matrix {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        Self { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// From row-major integer entries, reduced mod `p`.
    pub fn from_rows(p: u64, rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        check_prime(p)?;
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} entries for a {rows}×{cols} matrix", entries.len())));
        }
        let data = entries.iter().map(|&e| e.rem_euclid(p as i64) as u64).collect();
        Ok(Self { p, rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// `self · other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows || self.p != other.p {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zero(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = &mut out.data[i * other.cols + j];
                    *v = (*v + a * other.get(k, j)) % self.p;
                }
            }
        }
        Ok(out)
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn hcat(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch("hcat of matrices with different row counts".into()));
        }
        let cols = self.cols + other.cols;
        let mut out = Matrix::zero(self.p, self.rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[r * cols + c] = self.get(r, c);
            }
            for c in 0..other.cols {
                out.data[r * cols + self.cols + c] = other.get(r, c);
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form and its pivot columns.
    fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let p = self.p;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else { continue };
            for c in 0..m.cols {
                m.data.swap(row * m.cols + c, pr * m.cols + c);
            }
            let inv = inv_mod(m.get(row, col), p);
            for c in 0..m.cols {
                m.data[row * m.cols + c] = m.data[row * m.cols + c] * inv % p;
            }
            for r in 0..m.rows {
                let factor = m.get(r, col);
                if r == row || factor == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let sub = factor * m.get(row, c) % p;
                    m.data[r * m.cols + c] = (m.data[r * m.cols + c] + p - sub) % p;
                }
            }
            pivots.push(col);
            row += 1;
            if row == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the null space, as the columns of the returned matrix.
    pub fn kernel(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zero(self.p, self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            out.data[f * free.len() + j] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                out.data[pc * free.len() + j] = (self.p - r.get(i, f)) % self.p;
            }
        }
        out
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|r| {
                let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
                format!("[{}]", row.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// A bounded chain complex over `F_p`. Degrees outside `lo..=hi` are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    p: u64,
    lo: i64,
    dims: Vec<usize>,
    /// `d[i]` is `d_{lo+i}`.
    diffs: Vec<Matrix>,
}

impl ChainComplex {
    /// `dims[i] = dim A_{lo+i}`, `diffs[i] = d_{lo+i}`. The lowest differential maps to
    /// zero and must have no rows. Rejects data with `d∘d ≠ 0`, naming the degree.
    pub fn new(p: u64, lo: i64, dims: Vec<usize>, diffs: Vec<Matrix>) -> Result<Self> {
        let c = Self::new_unchecked(p, lo, dims, diffs)?;
        if let Some(n) = c.square_zero_defects().first() {
            return Err(Error::IllTyped(format!("d_{} ∘ d_{n} ≠ 0 at degree {n}", n - 1)));
        }
        Ok(c)
    }

    /// Shape checks only; `d∘d = 0` is not enforced.
    pub fn new_unchecked(p: u64, lo: i64, dims: Vec<usize>, diffs: Vec<Matrix>) -> Result<Self> {
        check_prime(p)?;
        if diffs.len() != dims.len() {
            return Err(Error::ShapeMismatch("one differential per degree required".into()));
        }
        let c = Self { p, lo, dims, diffs };
        for (i, d) in c.diffs.iter().enumerate() {
            let n = lo + i as i64;
            if d.p != p || d.rows != c.dim(n - 1) || d.cols != c.dim(n) {
                return Err(Error::ShapeMismatch(format!(
                    "d_{n} is {}×{}, expected {}×{}",
                    d.rows,
                    d.cols,
                    c.dim(n - 1),
                    c.dim(n)
                )));
            }
        }
        Ok(c)
    }

    /// The zero complex.
    pub fn zero(p: u64) -> Result<Self> {
        Self::new(p, 0, Vec::new(), Vec::new())
    }

    /// From a map `degree -> (dim, d_degree)`; degrees absent from the map are zero.
    pub fn from_degrees(p: u64, parts: &BTreeMap<i64, (usize, Matrix)>) -> Result<Self> {
        let (Some(&lo), Some(&hi)) = (parts.keys().next(), parts.keys().next_back()) else {
            return Self::zero(p);
        };
        let dims: Vec<usize> = (lo..=hi).map(|n| parts.get(&n).map_or(0, |x| x.0)).collect();
        let dim = |n: i64| if (lo..=hi).contains(&n) { dims[(n - lo) as usize] } else { 0 };
        let diffs = (lo..=hi)
            .map(|n| parts.get(&n).map_or_else(|| Matrix::zero(p, dim(n - 1), dim(n)), |x| x.1.clone()))
            .collect();
        Self::new(p, lo, dims, diffs)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Lowest and highest stored degree (`hi < lo` for the empty range).
    pub fn range(&self) -> (i64, i64) {
        (self.lo, self.lo + self.dims.len() as i64 - 1)
    }

    /// Least interval containing every nonzero degree, if any.
    pub fn support(&self) -> Option<(i64, i64)> {
        let nz: Vec<i64> = (0..self.dims.len()).filter(|&i| self.dims[i] > 0).map(|i| self.lo + i as i64).collect();
        Some((*nz.first()?, *nz.last()?))
    }

    pub fn dim(&self, n: i64) -> usize {
        let i = n - self.lo;
        if i < 0 || i >= self.dims.len() as i64 {
            0
        } else {
            self.dims[i as usize]
        }
    }

    /// `d_n: A_n -> A_{n-1}`.
    pub fn d(&self, n: i64) -> Matrix {
        let i = n - self.lo;
        if i < 0 || i >= self.diffs.len() as i64 {
            Matrix::zero(self.p, self.dim(n - 1), self.dim(n))
        } else {
            self.diffs[i as usize].clone()
        }
    }

    /// Degrees `n` with `d_{n-1} ∘ d_n ≠ 0`.
    pub fn square_zero_defects(&self) -> Vec<i64> {
        let (lo, hi) = self.range();
        (lo..=hi)
            .filter(|&n| !self.d(n - 1).mul(&self.d(n)).map(|m| m.is_zero()).unwrap_or(false))
            .collect()
    }

    pub fn is_complex(&self) -> bool {
        self.square_zero_defects().is_empty()
    }
}

/// `dim ker d_n − rank d_{n+1}`.
pub fn homology(c: &ChainComplex, n: i64) -> usize {
    c.dim(n) - c.d(n).rank() - c.d(n + 1).rank()
}

/// A degreewise linear map `f_n: A_n -> B_n` (`dim B_n × dim A_n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    lo: i64,
    maps: Vec<Matrix>,
}

impl ChainMap {
    /// `maps[i] = f_{lo+i}`; degrees outside are zero. Rejects non-commuting squares.
    pub fn new(source: ChainComplex, target: ChainComplex, lo: i64, maps: Vec<Matrix>) -> Result<Self> {
        let f = Self::new_graded(source, target, lo, maps)?;
        if let Some(n) = f.commutation_defects().first() {
            return Err(Error::IllTyped(format!("f_{} ∘ d_{n} ≠ d_{n} ∘ f_{n}", n - 1)));
        }
        Ok(f)
    }

    /// A graded map; commutation with differentials is not enforced.
    pub fn new_graded(source: ChainComplex, target: ChainComplex, lo: i64, maps: Vec<Matrix>) -> Result<Self> {
        if source.p != target.p {
            return Err(Error::ShapeMismatch("chain map between different fields".into()));
        }
        for (i, m) in maps.iter().enumerate() {
            let n = lo + i as i64;
            if m.p != source.p || m.rows != target.dim(n) || m.cols != source.dim(n) {
                return Err(Error::ShapeMismatch(format!("f_{n} has the wrong shape")));
            }
        }
        Ok(Self { source, target, lo, maps })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let (lo, hi) = c.range();
        let maps = (lo..=hi).map(|n| Matrix::identity(c.p, c.dim(n))).collect();
        Self { source: c.clone(), target: c.clone(), lo, maps }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Result<Self> {
        Self::new(source.clone(), target.clone(), 0, Vec::new())
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn at(&self, n: i64) -> Matrix {
        let i = n - self.lo;
        if i < 0 || i >= self.maps.len() as i64 {
            Matrix::zero(self.source.p, self.target.dim(n), self.source.dim(n))
        } else {
            self.maps[i as usize].clone()
        }
    }

    /// Degrees over which source or target is nonzero, padded by one on each side.
    fn joint_range(&self) -> (i64, i64) {
        let (a, b) = self.source.range();
        let (c, d) = self.target.range();
        (a.min(c).min(self.lo) - 1, b.max(d).max(self.lo + self.maps.len() as i64) + 1)
    }

    /// Degrees `n` with `f_{n-1} ∘ d_n ≠ d_n ∘ f_n`.
    pub fn commutation_defects(&self) -> Vec<i64> {
        let (lo, hi) = self.joint_range();
        (lo..=hi)
            .filter(|&n| {
                let lhs = self.at(n - 1).mul(&self.source.d(n)).ok();
                let rhs = self.target.d(n).mul(&self.at(n)).ok();
                lhs.is_none() || lhs != rhs
            })
            .collect()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.target != other.source {
            return Err(Error::ShapeMismatch("composing non-matching chain maps".into()));
        }
        let (lo, hi) = self.joint_range();
        let maps = (lo..=hi).map(|n| other.at(n).mul(&self.at(n))).collect::<Result<Vec<_>>>()?;
        Self::new_graded(self.source.clone(), other.target.clone(), lo, maps)
    }
}

/// Whether `f` induces isomorphisms on homology in every degree.
pub fn is_quasi_iso(f: &ChainMap) -> Result<bool> {
    let (lo, hi) = f.joint_range();
    for n in lo..=hi {
        let (x, y) = (&f.source, &f.target);
        if homology(x, n) != homology(y, n) {
            return Ok(false);
        }
        // Surjectivity of H_n(f): f(Z_n X) + B_n Y = Z_n Y.
        let zx = x.d(n).kernel();
        let image = f.at(n).mul(&zx)?;
        let span = image.hcat(&y.d(n + 1))?;
        let cycles_y = y.dim(n) - y.d(n).rank();
        if span.rank() != cycles_y {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every component of `f` is surjective.
pub fn is_fibration(f: &ChainMap) -> bool {
    let (lo, hi) = f.joint_range();
    (lo..=hi).all(|n| f.at(n).rank() == f.target.dim(n))
}

/// The stage `(A^k, d^k)` of the truncation chain: `A^k_n = A_n` for `-k ≤ n ≤ k`,
/// `A^k_{-k-1} = A_{-k}`, zero elsewhere; `d^k_n = d_n` for `-k < n ≤ k`,
/// `d^k_{-k} = id`, zero elsewhere.
///
/// The result satisfies `d∘d = 0` exactly when `d_{-k+1} = 0`; use
/// [`ChainComplex::square_zero_defects`] to inspect it.
pub fn truncate(c: &ChainComplex, k: i64) -> Result<ChainComplex> {
    if k < 0 {
        return Err(Error::OutOfRange("truncation index must be non-negative".into()));
    }
    let lo = -k - 1;
    let dim = |n: i64| match n {
        n if n == lo => c.dim(-k),
        n if n < lo || n > k => 0,
        n => c.dim(n),
    };
    let dims: Vec<usize> = (lo..=k).map(dim).collect();
    let diffs = (lo..=k)
        .map(|n| {
            if n == -k {
                Matrix::identity(c.p, c.dim(-k))
            } else if n > -k {
                c.d(n)
            } else {
                Matrix::zero(c.p, dim(n - 1), dim(n))
            }
        })
        .collect();
    ChainComplex::new_unchecked(c.p, lo, dims, diffs)
}

/// The component family `A^k -> target` with `f_n = id` for `-k ≤ n ≤ k`,
/// `f_{-k-1} = d_{-k}`, zero elsewhere. Used both for the cocone into `A` and for the
/// connecting map `A^k -> A^{k+1}`.
pub fn truncation_map(c: &ChainComplex, k: i64, target: &ChainComplex) -> Result<ChainMap> {
    let stage = truncate(c, k)?;
    let maps = (-k - 1..=k)
        .map(|n| if n == -k - 1 { c.d(-k) } else { Matrix::identity(c.p, c.dim(n)) })
        .collect();
    ChainMap::new_graded(stage, target.clone(), -k - 1, maps)
}

/// Outcome of checking that `A` is the colimit of its truncation chain up to stage `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationReport {
    pub stage: i64,
    /// First failed check, if any.
    pub failure: Option<TruncationFailure>,
    /// Stages `k < K` and degrees where `d^k ∘ d^k ≠ 0`.
    pub square_zero_defects: Vec<(i64, i64)>,
    /// Stages `k < K` and degrees where the connecting map fails to commute with `d`.
    pub connecting_defects: Vec<(i64, i64)>,
}

impl TruncationReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TruncationFailure {
    /// `K` does not cover the support of `A`.
    StageTooSmall { needed: i64 },
    /// The cocone component `f^k` does not commute with the differentials at `degree`.
    CoconeNotChainMap { stage: i64, degree: i64 },
    /// `f^{k+1} ∘ c^k ≠ f^k` at `degree`.
    Incoherent { stage: i64, degree: i64 },
    /// The top stage is not a complex or its cocone component is not an isomorphism.
    NotIsomorphic { degree: i64 },
}

impl fmt::Display for TruncationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::StageTooSmall { needed } => write!(f, "stage too small: need K ≥ {needed}"),
            Self::CoconeNotChainMap { stage, degree } => {
                write!(f, "cocone component of stage {stage} fails to commute at degree {degree}")
            }
            Self::Incoherent { stage, degree } => {
                write!(f, "cocone components of stages {stage} and {} disagree at degree {degree}", stage + 1)
            }
            Self::NotIsomorphic { degree } => write!(f, "top cocone component is not an isomorphism at degree {degree}"),
        }
    }
}

/// Checks the colimit presentation of `c` by its truncation chain through stage `K`,
/// using `connecting(k)` as the map `A^k -> A^{k+1}`.
pub fn verify_truncation_colimit_with(
    c: &ChainComplex,
    big_k: i64,
    connecting: &dyn Fn(i64) -> Result<ChainMap>,
) -> Result<TruncationReport> {
    let mut report = TruncationReport {
        stage: big_k,
        failure: None,
        square_zero_defects: Vec::new(),
        connecting_defects: Vec::new(),
    };
    let needed = c.support().map_or(0, |(lo, hi)| lo.abs().max(hi.abs()) + 1);
    if big_k < needed {
        report.failure = Some(TruncationFailure::StageTooSmall { needed });
        return Ok(report);
    }
    for k in 0..=big_k {
        let stage = truncate(c, k)?;
        if k < big_k {
            report.square_zero_defects.extend(stage.square_zero_defects().into_iter().map(|n| (k, n)));
        }
        let f = truncation_map(c, k, c)?;
        if let Some(&degree) = f.commutation_defects().first() {
            report.failure = Some(TruncationFailure::CoconeNotChainMap { stage: k, degree });
            return Ok(report);
        }
        if k < big_k {
            let ck = connecting(k)?;
            report.connecting_defects.extend(ck.commutation_defects().into_iter().map(|n| (k, n)));
            let next = truncation_map(c, k + 1, c)?;
            let composite = ck.then(&next)?;
            let (lo, hi) = (-k - 1, k);
            if let Some(degree) = (lo..=hi).find(|&n| composite.at(n) != f.at(n)) {
                report.failure = Some(TruncationFailure::Incoherent { stage: k, degree });
                return Ok(report);
            }
        } else {
            if let Some(&degree) = stage.square_zero_defects().first() {
                report.failure = Some(TruncationFailure::NotIsomorphic { degree });
                return Ok(report);
            }
            let (lo, hi) = (-big_k - 2, big_k + 1);
            if let Some(degree) = (lo..=hi).find(|&n| {
                let m = f.at(n);
                !(m.rows == m.cols && m.rank() == m.rows && stage.dim(n) == c.dim(n))
            }) {
                report.failure = Some(TruncationFailure::NotIsomorphic { degree });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// [`verify_truncation_colimit_with`] using the prescribed connecting maps.
pub fn verify_truncation_colimit(c: &ChainComplex, big_k: i64) -> Result<TruncationReport> {
    verify_truncation_colimit_with(c, big_k, &|k| truncation_map(c, k, &truncate(c, k + 1)?))
}
