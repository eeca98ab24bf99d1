//! Linear algebra over GF(2) and the combinatorics used to parametrize
//! stabilizer states: subspaces in reduced column echelon form, coset
//! representatives and (strictly) upper-triangular matrices.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{MagicError, Result};

/// Dense bit matrix, row-major, one or more `u64` words per row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64).max(1);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds an `rows x cols` matrix from column bit masks (`rows <= 64`).
    pub fn from_columns(rows: usize, columns: &[u64]) -> Self {
        assert!(rows <= 64);
        let mut m = Self::zeros(rows, columns.len());
        for (j, &col) in columns.iter().enumerate() {
            for i in 0..rows {
                if (col >> i) & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from row bit masks (`cols <= 64`).
    pub fn from_rows(cols: usize, rows: &[u64]) -> Self {
        assert!(cols <= 64);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, &r) in rows.iter().enumerate() {
            m.data[i * m.words_per_row] = r & mask(cols);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words_per_row + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words_per_row + c / 64];
        let b = c % 64;
        *w = (*w & !(1 << b)) | ((v as u64) << b);
    }

    /// Column `c` as a bit mask over rows (`rows <= 64`).
    pub fn column_mask(&self, c: usize) -> u64 {
        assert!(self.rows <= 64);
        (0..self.rows).fold(0, |acc, r| acc | ((self.get(r, c) as u64) << r))
    }

    pub fn column_masks(&self) -> Vec<u64> {
        (0..self.cols).map(|c| self.column_mask(c)).collect()
    }

    /// Row `r` as a bit mask over columns (`cols <= 64`).
    pub fn row_mask(&self, r: usize) -> u64 {
        assert!(self.cols <= 64);
        self.data[r * self.words_per_row]
    }

    pub fn row_masks(&self) -> Vec<u64> {
        (0..self.rows).map(|r| self.row_mask(r)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// GF(2) rank via row elimination.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = (0..self.rows).map(|r| self.row_words(r).to_vec()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let (w, b) = (c / 64, c % 64);
            let Some(p) = (rank..rows.len()).find(|&i| (rows[i][w] >> b) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && (row[w] >> b) & 1 == 1 {
                    row.iter_mut().zip(&pivot).for_each(|(a, p)| *a ^= p);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Reduced column echelon form: nonzero columns first, pivot rows
    /// strictly increasing, each pivot row is a unit row among the columns.
    pub fn rcef(&self) -> Self {
        self.transpose().rref().transpose()
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Self {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            if p != rank {
                for w in 0..m.words_per_row {
                    m.data.swap(rank * m.words_per_row + w, p * m.words_per_row + w);
                }
            }
            let pivot = m.row_words(rank).to_vec();
            for i in 0..m.rows {
                if i != rank && m.get(i, c) {
                    for w in 0..m.words_per_row {
                        m.data[i * m.words_per_row + w] ^= pivot[w];
                    }
                }
            }
            rank += 1;
        }
        m
    }

    /// Pivot row of each column of a matrix in RCEF, or `None` if the
    /// matrix is not in RCEF with full column rank.
    pub fn rcef_pivots(&self) -> Option<Vec<usize>> {
        let mut pivots = Vec::with_capacity(self.cols);
        for c in 0..self.cols {
            let p = (0..self.rows).find(|&r| self.get(r, c))?;
            if pivots.last().is_some_and(|&last| p <= last) {
                return None;
            }
            pivots.push(p);
        }
        for (c, &p) in pivots.iter().enumerate() {
            if (0..self.cols).any(|c2| c2 != c && self.get(p, c2)) {
                return None;
            }
        }
        Some(pivots)
    }
}

#[inline]
pub(crate) fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Scatter the low bits of `value` into the set positions of `positions`.
#[inline]
pub fn deposit_bits(mut value: u64, mut positions: u64) -> u64 {
    let mut out = 0;
    while positions != 0 && value != 0 {
        let low = positions & positions.wrapping_neg();
        if value & 1 == 1 {
            out |= low;
        }
        value >>= 1;
        positions ^= low;
    }
    out
}

/// Number of `k`-dimensional subspaces of GF(2)^n (Gaussian binomial, q = 2).
pub fn q_binomial(n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        return Err(MagicError::Domain(format!("q_binomial: k = {k} > n = {n}")));
    }
    let one = BigUint::from(1u32);
    let mut num = one.clone();
    let mut den = one.clone();
    for i in 0..k {
        num *= (BigUint::from(1u32) << (n - i)) - &one;
        den *= (BigUint::from(1u32) << (k - i)) - &one;
    }
    Ok(num / den)
}

/// `q_binomial` as a `u64`, for sizes that are enumerable anyway.
pub fn q_binomial_u64(n: usize, k: usize) -> Result<u64> {
    let v = q_binomial(n, k)?;
    u64::try_from(v).map_err(|_| MagicError::Domain(format!("q_binomial({n},{k}) overflows u64")))
}

/// One pivot pattern of a `k`-dimensional subspace of GF(2)^n in RCEF.
///
/// Column `j` has its pivot at row `pivots[j]`, zeros above it and at every
/// other pivot row, and free bits at the remaining rows below.
#[derive(Clone, Debug)]
pub struct PivotPattern {
    n: usize,
    pivots: Vec<usize>,
    free_rows: Vec<u64>,
    free_total: u32,
}

impl PivotPattern {
    pub fn new(n: usize, pivots: Vec<usize>) -> Self {
        let pivot_mask = pivots.iter().fold(0u64, |m, &p| m | (1 << p));
        let free_rows: Vec<u64> = pivots.iter().map(|&p| mask(n) & !mask(p + 1) & !pivot_mask).collect();
        let free_total = free_rows.iter().map(|m| m.count_ones()).sum();
        Self {
            n,
            pivots,
            free_rows,
            free_total,
        }
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Number of subspaces sharing this pivot pattern.
    pub fn count(&self) -> u64 {
        1u64 << self.free_total
    }

    /// Column masks of the `index`-th subspace (`index < count()`).
    pub fn columns(&self, mut index: u64) -> Vec<u64> {
        let mut cols = Vec::with_capacity(self.pivots.len());
        for (&p, &free) in self.pivots.iter().zip(&self.free_rows) {
            let nfree = free.count_ones();
            let bits = index & mask(nfree as usize);
            index >>= nfree;
            cols.push((1u64 << p) | deposit_bits(bits, free));
        }
        cols
    }

    pub fn matrix(&self, index: u64) -> BitMatrix {
        BitMatrix::from_columns(self.n, &self.columns(index))
    }
}

/// All pivot patterns for `k`-dimensional subspaces of GF(2)^n, in
/// lexicographic order of the pivot rows.
pub fn pivot_patterns(n: usize, k: usize) -> Vec<PivotPattern> {
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(PivotPattern::new(n, combo.clone()));
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if combo[i] < n - k + i {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Canonical representatives (RCEF, full column rank) of every
/// `k`-dimensional subspace of GF(2)^n, in deterministic order: pivot rows
/// lexicographically, then free bits counting upward.
pub fn enumerate_subspaces(n: usize, k: usize) -> Vec<BitMatrix> {
    pivot_patterns(n, k)
        .iter()
        .flat_map(|pat| (0..pat.count()).map(move |i| pat.matrix(i)))
        .collect()
}

/// Coset representatives of GF(2)^n / Im(R): all vectors vanishing on the
/// pivot rows of `r`, in increasing order.
pub fn coset_reps(r: &BitMatrix) -> Result<Vec<u64>> {
    let pivots = r
        .rcef_pivots()
        .ok_or_else(|| MagicError::Domain("coset_reps: R must be in RCEF with full column rank".into()))?;
    Ok(coset_reps_from_pivots(r.rows(), &pivots))
}

pub(crate) fn coset_reps_from_pivots(n: usize, pivots: &[usize]) -> Vec<u64> {
    let pivot_mask = pivots.iter().fold(0u64, |m, &p| m | (1 << p));
    let free = mask(n) & !pivot_mask;
    (0..1u64 << free.count_ones()).map(|i| deposit_bits(i, free)).collect()
}

/// Upper-triangular `k x k` matrices over GF(2) (zero diagonal when
/// `strict`), ordered by the integer formed from their free entries taken
/// row by row.
pub fn enumerate_upper_triangular(k: usize, strict: bool) -> Vec<BitMatrix> {
    let positions: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| ((if strict { i + 1 } else { i })..k).map(move |j| (i, j)))
        .collect();
    (0..1u64 << positions.len())
        .map(|bits| {
            let mut m = BitMatrix::zeros(k, k);
            for (b, &(i, j)) in positions.iter().enumerate() {
                if (bits >> b) & 1 == 1 {
                    m.set(i, j, true);
                }
            }
            m
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    /// Independent elimination on column masks (oracle for `rank`).
    fn naive_rank(cols: &[u64]) -> usize {
        let mut basis: Vec<u64> = Vec::new();
        for &c in cols {
            let mut v = c;
            for &b in &basis {
                v = v.min(v ^ b);
            }
            if v != 0 {
                basis.push(v);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        basis.len()
    }

    fn span(cols: &[u64]) -> BTreeSet<u64> {
        (0..1u64 << cols.len())
            .map(|x| {
                cols.iter()
                    .enumerate()
                    .filter(|(j, _)| (x >> j) & 1 == 1)
                    .fold(0, |acc, (_, &c)| acc ^ c)
            })
            .collect()
    }

    #[test]
    fn rank_basics() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::zeros(4, 3).rank(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let cols: Vec<u64> = (0..3).map(|_| rng.random_range(0..32)).collect();
            let m = BitMatrix::from_columns(5, &cols);
            assert_eq!(m.rank(), naive_rank(&cols));
            assert_eq!(m.transpose().rank(), m.rank());
        }
    }

    #[test]
    fn rcef_is_idempotent_and_preserves_column_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let cols: Vec<u64> = (0..4).map(|_| rng.random_range(0..64)).collect();
            let m = BitMatrix::from_columns(6, &cols);
            let e = m.rcef();
            assert_eq!(e.rcef(), e);
            assert_eq!(span(&e.column_masks()), span(&cols));
        }
    }

    #[test]
    fn q_binomial_values() {
        assert_eq!(q_binomial(2, 1).unwrap(), BigUint::from(3u32));
        for n in 0..8 {
            assert_eq!(q_binomial(n, 0).unwrap(), BigUint::from(1u32));
            assert_eq!(q_binomial(n, n).unwrap(), BigUint::from(1u32));
        }
        assert!(q_binomial(2, 3).is_err());
        // (4,2): count distinct column spaces of rank-2 4x2 matrices
        let mut spaces = BTreeSet::new();
        for a in 0..16u64 {
            for b in 0..16u64 {
                if naive_rank(&[a, b]) == 2 {
                    spaces.insert(span(&[a, b]));
                }
            }
        }
        assert_eq!(spaces.len(), 35);
        assert_eq!(q_binomial(4, 2).unwrap(), BigUint::from(35u32));
    }

    #[test]
    fn subspaces_small_cases() {
        let s = enumerate_subspaces(2, 1);
        let cols: Vec<u64> = s.iter().map(|m| m.column_mask(0)).collect();
        assert_eq!(cols.len(), 3);
        let set: BTreeSet<u64> = cols.into_iter().collect();
        assert_eq!(set, BTreeSet::from([0b01, 0b10, 0b11]));
        assert_eq!(enumerate_subspaces(3, 2).len(), 7);
    }

    #[test]
    fn subspaces_are_canonical_distinct_and_complete() {
        for n in 0..=5 {
            for k in 0..=n {
                let subs = enumerate_subspaces(n, k);
                assert_eq!(subs.len() as u64, q_binomial_u64(n, k).unwrap());
                let mut seen = BTreeSet::new();
                for m in &subs {
                    assert_eq!(m.rank(), k);
                    assert_eq!(m.rcef(), *m);
                    assert!(m.rcef_pivots().is_some());
                    assert!(seen.insert(span(&m.column_masks())));
                }
            }
        }
    }

    #[test]
    fn coset_reps_cover_space_exactly_once() {
        let e1 = BitMatrix::from_columns(2, &[0b01]);
        assert_eq!(coset_reps(&e1).unwrap(), vec![0b00, 0b10]);
        assert_eq!(coset_reps(&BitMatrix::identity(3)).unwrap(), vec![0]);
        for n in 1..=4 {
            for k in 0..=n {
                for r in enumerate_subspaces(n, k) {
                    let reps = coset_reps(&r).unwrap();
                    assert_eq!(reps.len(), 1 << (n - k));
                    let mut hits = vec![0u32; 1 << n];
                    for &t in &reps {
                        for v in span(&r.column_masks()) {
                            hits[(v ^ t) as usize] += 1;
                        }
                    }
                    assert!(hits.iter().all(|&h| h == 1));
                }
            }
        }
        let not_rcef = BitMatrix::from_columns(2, &[0b11, 0b11]);
        assert!(coset_reps(&not_rcef).is_err());
    }

    #[test]
    fn upper_triangular_counts() {
        assert_eq!(enumerate_upper_triangular(1, true).len(), 1);
        assert!(enumerate_upper_triangular(1, true)[0].is_zero());
        assert_eq!(enumerate_upper_triangular(2, false).len(), 8);
        let strict3 = enumerate_upper_triangular(3, true);
        assert_eq!(strict3.len(), 8);
        for m in &strict3 {
            for i in 0..3 {
                for j in 0..=i {
                    assert!(!m.get(i, j));
                }
            }
        }
    }

    #[test]
    fn stabilizer_basis_and_state_counting_identities() {
        for n in 1..=4usize {
            let mut bases = 0u64;
            let mut states = 0u64;
            for k in 0..=n {
                let qb = q_binomial_u64(n, k).unwrap();
                bases += (1 << (k * k.saturating_sub(1) / 2)) * (1 << k) * qb;
                states += (1 << (k * (k + 1) / 2)) * (1 << k) * qb * (1 << (n - k));
            }
            let prod: u64 = (1..=n).map(|j| (1u64 << j) + 1).product();
            assert_eq!(bases, prod);
            assert_eq!(states, prod << n);
        }
    }

    #[test]
    fn deposit_bits_examples() {
        assert_eq!(deposit_bits(0b11, 0b1010), 0b1010);
        assert_eq!(deposit_bits(0b01, 0b1010), 0b0010);
        assert_eq!(deposit_bits(0b10, 0b1010), 0b1000);
    }
}
