//! Dense, bit-packed linear algebra over GF(2).
//!
//! Vectors are packed little-endian into `u64` words: bit `i` of the vector is
//! bit `i % 64` of word `i / 64`. Index 0 is the leftmost character in the
//! string form, so `"1101000"` has bits 0, 1 and 3 set.
//!
//! Matrices are stored as a list of row vectors. Elimination is deterministic:
//! pivots are taken from the leftmost column first, and the pivot row is the
//! lowest-indexed eligible row.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A row vector in `Z_2^len`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinaryVector {
    len: usize,
    words: Vec<u64>,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector from the low `len` bits of `bits`.
    pub fn from_u64(bits: u64, len: usize) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = bits & mask(len);
        }
        v
    }

    /// Builds a vector from 0/1 entries. Any nonzero entry is an error.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => v.set(i, true),
                other => return Err(Error::Parse(format!("binary entry must be 0 or 1, found {other}"))),
            }
        }
        Ok(v)
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Vector with ones exactly at `support`.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let bit = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= bit;
        } else {
            self.words[i / WORD] &= !bit;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of the nonzero entries, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Packed words; bits beyond `len` are always zero.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The vector as a single word. Fails for vectors longer than 64 bits.
    pub fn to_u64(&self) -> Result<u64> {
        if self.len > WORD {
            return Err(Error::TooLarge(format!(
                "vector of length {} does not fit in one word",
                self.len
            )));
        }
        Ok(self.words.first().copied().unwrap_or(0))
    }

    /// In-place addition (XOR).
    pub fn add_assign(&mut self, other: &BinaryVector) -> Result<()> {
        check_len(self.len, other.len)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn add(&self, other: &BinaryVector) -> Result<BinaryVector> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BinaryVector) -> Result<bool> {
        check_len(self.len, other.len)?;
        Ok(self.dot_unchecked(other))
    }

    fn dot_unchecked(&self, other: &BinaryVector) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            & 1
            == 1
    }

    /// Entries of `self` reordered so that output position `j` holds input
    /// position `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<BinaryVector> {
        check_len(self.len, perm.len())?;
        let mut out = BinaryVector::zeros(self.len);
        for (j, &src) in perm.iter().enumerate() {
            if self.get(src) {
                out.set(j, true);
            }
        }
        Ok(out)
    }

    /// Index of the first nonzero entry, if any.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }
}

fn mask(len: usize) -> u64 {
    if len >= WORD {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!(
            "length {a} does not match length {b}"
        )));
    }
    Ok(())
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryVector({self})")
    }
}

impl FromStr for BinaryVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = BinaryVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
            }
        }
        Ok(v)
    }
}

impl Serialize for BinaryVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let bits: Vec<u8> = self.iter().map(u8::from).collect();
        bits.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BinaryVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(deserializer)?;
        BinaryVector::from_bits(&bits).map_err(D::Error::custom)
    }
}

/// A dense `rows x cols` matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    cols: usize,
    rows: Vec<BinaryVector>,
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// The reduced matrix. Zero rows are dropped.
    pub matrix: BinaryMatrix,
    /// Pivot column of each row of `matrix`, strictly increasing.
    pub pivots: Vec<usize>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BinaryVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// An empty matrix with `cols` columns and no rows.
    pub fn empty(cols: usize) -> Self {
        Self::zeros(0, cols)
    }

    /// Builds a matrix from row vectors of equal length. `cols` is needed to
    /// describe a matrix with no rows.
    pub fn from_rows(cols: usize, rows: Vec<BinaryVector>) -> Result<Self> {
        for r in &rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    r.len()
                )));
            }
        }
        Ok(Self { cols, rows })
    }

    /// Builds a matrix from nested 0/1 lists. All rows must have equal length.
    pub fn from_bits(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let rows = rows
            .iter()
            .map(|r| BinaryVector::from_bits(r))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(cols, rows)
    }

    /// Parses rows written as 0/1 strings, e.g. `["110", "101"]`.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| r.parse()).collect::<Result<Vec<BinaryVector>>>()?;
        Self::from_rows(cols, rows)
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BinaryVector {
        &self.rows[i]
    }

    pub fn row_vectors(&self) -> &[BinaryVector] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(BinaryVector::weight).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BinaryVector::is_zero)
    }

    pub fn transpose(&self) -> BinaryMatrix {
        let mut t = BinaryMatrix::zeros(self.cols, self.rows());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.support() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mat_mul(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.cols != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols,
                other.rows(),
                other.cols
            )));
        }
        // Row i of the product is the XOR of the rows of `other` selected by row i of `self`.
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BinaryVector::zeros(other.cols);
                for k in r.support() {
                    for (a, b) in acc.words.iter_mut().zip(&other.rows[k].words) {
                        *a ^= b;
                    }
                }
                acc
            })
            .collect();
        Ok(BinaryMatrix { cols: other.cols, rows })
    }

    /// Computes `v * self^T`, i.e. the inner product of `v` with every row.
    pub fn mul_vec_transpose(&self, v: &BinaryVector) -> Result<BinaryVector> {
        check_len(v.len(), self.cols)?;
        Ok(BinaryVector::from_bools(self.rows.iter().map(|r| r.dot_unchecked(v))))
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        check_len(self.cols, other.cols)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BinaryMatrix { cols: self.cols, rows })
    }

    /// Columns reordered so that output column `j` is input column `perm[j]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<BinaryMatrix> {
        check_len(self.cols, perm.len())?;
        let rows = self.rows.iter().map(|r| r.permuted(perm)).collect::<Result<Vec<_>>>()?;
        Ok(BinaryMatrix { cols: self.cols, rows })
    }

    /// The submatrix formed by the listed columns, in the listed order.
    pub fn select_columns(&self, columns: &[usize]) -> BinaryMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| BinaryVector::from_bools(columns.iter().map(|&c| r.get(c))))
            .collect();
        BinaryMatrix {
            cols: columns.len(),
            rows,
        }
    }

    /// Reduced row echelon form using the column scan order `order`.
    /// Every column in `order` is tried once; the remaining columns are ignored
    /// when choosing pivots but still carried through the row operations.
    fn echelon_in_order(&self, order: &[usize]) -> Echelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for &c in order {
            if next == rows.len() {
                break;
            }
            let Some(p) = (next..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(next, p);
            let pivot = rows[next].clone();
            for (i, r) in rows.iter_mut().enumerate() {
                if i != next && r.get(c) {
                    for (a, b) in r.words.iter_mut().zip(&pivot.words) {
                        *a ^= b;
                    }
                }
            }
            pivots.push(c);
            next += 1;
        }
        rows.truncate(next);
        Echelon {
            matrix: BinaryMatrix { cols: self.cols, rows },
            pivots,
        }
    }

    /// Reduced row echelon form (leftmost pivot first, lowest row first).
    pub fn echelon(&self) -> Echelon {
        let order: Vec<usize> = (0..self.cols).collect();
        self.echelon_in_order(&order)
    }

    /// Row reduction restricted to pivots among `columns` (tried in order).
    pub fn echelon_on_columns(&self, columns: &[usize]) -> Echelon {
        self.echelon_in_order(columns)
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Brings a full-row-rank `H` to the form `[A^T | I_r]`.
    ///
    /// Returns `(H_sys, perm)` where column `j` of `H_sys` is column `perm[j]`
    /// of the row-reduced input. Pivots are chosen scanning from the rightmost
    /// column, so an input already of the form `[A^T | I_r]` comes back
    /// unchanged with the identity permutation.
    pub fn systematic_form(&self) -> Result<(BinaryMatrix, Vec<usize>)> {
        let r = self.rows();
        let order: Vec<usize> = (0..self.cols).rev().collect();
        let ech = self.echelon_in_order(&order);
        if ech.pivots.len() != r {
            return Err(Error::RankDeficient {
                rank: ech.pivots.len(),
                rows: r,
            });
        }
        // Row i pivots on column ech.pivots[i]; sort rows by pivot column so
        // the identity lands in ascending order.
        let mut by_pivot: Vec<(usize, BinaryVector)> = ech.pivots.iter().copied().zip(ech.matrix.rows).collect();
        by_pivot.sort_by_key(|(c, _)| *c);
        let pivot_cols: Vec<usize> = by_pivot.iter().map(|(c, _)| *c).collect();
        let mut perm: Vec<usize> = (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect();
        perm.extend(&pivot_cols);
        let reduced = BinaryMatrix {
            cols: self.cols,
            rows: by_pivot.into_iter().map(|(_, row)| row).collect(),
        };
        Ok((reduced.permute_columns(&perm)?, perm))
    }

    /// A basis of `{ v : self * v^T = 0 }`, one basis vector per free column
    /// (ascending), so the basis has `cols - rank` rows.
    pub fn nullspace_basis(&self) -> BinaryMatrix {
        let ech = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        let rows = free
            .iter()
            .map(|&f| {
                let mut v = BinaryVector::zeros(self.cols);
                v.set(f, true);
                for (row, &p) in ech.matrix.rows.iter().zip(&ech.pivots) {
                    if row.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();
        BinaryMatrix { cols: self.cols, rows }
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BinaryVector) -> Result<bool> {
        check_len(v.len(), self.cols)?;
        Ok(RowSpace::new(self).contains(v))
    }

    /// Whether two matrices have the same row space.
    pub fn same_row_space(&self, other: &BinaryMatrix) -> bool {
        self.cols == other.cols && self.echelon().matrix == other.echelon().matrix
    }

    /// The matrix as one `u64` mask per row. Fails for more than 64 columns.
    pub fn row_masks(&self) -> Result<Vec<u64>> {
        self.rows.iter().map(BinaryVector::to_u64).collect()
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryMatrix {}x{} [", self.rows(), self.cols)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

impl Serialize for BinaryMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BinaryMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(deserializer)?;
        BinaryMatrix::from_bits(&rows).map_err(D::Error::custom)
    }
}

/// Membership oracle for the row space of a matrix.
#[derive(Clone, Debug)]
pub struct RowSpace {
    basis: Echelon,
}

impl RowSpace {
    pub fn new(m: &BinaryMatrix) -> Self {
        Self { basis: m.echelon() }
    }

    pub fn dim(&self) -> usize {
        self.basis.pivots.len()
    }

    /// Reduces `v` against the echelon basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &BinaryVector) -> BinaryVector {
        let mut v = v.clone();
        for (row, &p) in self.basis.matrix.rows.iter().zip(&self.basis.pivots) {
            if v.get(p) {
                for (a, b) in v.words.iter_mut().zip(&row.words) {
                    *a ^= b;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &BinaryVector) -> bool {
        self.reduce(v).is_zero()
    }
}

/// Parity of the set bits of a word.
#[inline]
pub fn parity(word: u64) -> bool {
    word.count_ones() & 1 == 1
}

/// `v * H^T` with `H` given as row masks; bit `i` of the result is row `i`'s parity.
#[inline]
pub fn syndrome_of(rows: &[u64], v: u64) -> u64 {
    rows.iter()
        .enumerate()
        .fold(0, |acc, (i, &r)| acc | (u64::from(parity(r & v)) << i))
}
