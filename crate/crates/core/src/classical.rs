//! Classical binary block codes with exact coset-leader decoding.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::gf2::{syndrome_of, BinaryMatrix, BinaryVector};

/// Largest number of parity checks for which a full syndrome table is built.
pub const MAX_TABLE_CHECKS: usize = 24;

/// Largest code dimension for which the minimum distance is enumerated.
pub const MAX_ENUMERATED_DIMENSION: usize = 24;

/// Minimum-weight coset leaders for every syndrome of a full-rank check matrix.
///
/// Ties between leaders of equal weight go to the vector whose sorted support
/// is lexicographically smallest (i.e. earliest positions win).
#[derive(Clone)]
pub struct SyndromeTable {
    len: usize,
    checks: Vec<u64>,
    leaders: Vec<u64>,
    max_weight: usize,
}

impl SyndromeTable {
    pub fn new(h: &BinaryMatrix) -> Result<Self> {
        let len = h.cols();
        let r = h.rows();
        if len > 64 {
            return Err(Error::TooLarge(format!("{len} bits per word")));
        }
        if r > MAX_TABLE_CHECKS {
            return Err(Error::TooLarge(format!("syndrome table with {r} checks")));
        }
        let rank = h.rank();
        if rank != r {
            return Err(Error::RankDeficient { rank, rows: r });
        }
        let checks = h.row_masks()?;
        let size = 1usize << r;
        let mut leaders = vec![u64::MAX; size];
        let mut filled = 0;
        let mut max_weight = 0;
        'outer: for w in 0..=len {
            for support in (0..len).combinations(w) {
                let v = support.iter().fold(0u64, |acc, &i| acc | 1 << i);
                let s = syndrome_of(&checks, v) as usize;
                if leaders[s] == u64::MAX {
                    leaders[s] = v;
                    filled += 1;
                    max_weight = w;
                    if filled == size {
                        break 'outer;
                    }
                }
            }
        }
        Ok(Self {
            len,
            checks,
            leaders,
            max_weight,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    /// Check rows as bit masks.
    pub fn checks(&self) -> &[u64] {
        &self.checks
    }

    /// Largest coset-leader weight (the covering radius).
    pub fn max_leader_weight(&self) -> usize {
        self.max_weight
    }

    #[inline]
    pub fn syndrome(&self, v: u64) -> u64 {
        syndrome_of(&self.checks, v)
    }

    #[inline]
    pub fn leader(&self, syndrome: u64) -> u64 {
        self.leaders[syndrome as usize]
    }
}

impl fmt::Debug for SyndromeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SyndromeTable")
            .field("len", &self.len)
            .field("checks", &self.checks.len())
            .field("max_leader_weight", &self.max_weight)
            .finish()
    }
}

/// An `[m, k, d]` binary linear code held in systematic form `H = [A^T | I_r]`.
#[derive(Clone, Debug)]
pub struct ClassicalCode {
    name: String,
    m: usize,
    k: usize,
    d: usize,
    h: BinaryMatrix,
    a: BinaryMatrix,
    g: BinaryMatrix,
    col_perm: Vec<usize>,
    table: SyndromeTable,
}

impl ClassicalCode {
    /// Builds a code from a full-rank parity-check matrix.
    ///
    /// The minimum distance is always computed by enumerating codewords; a
    /// declared `d` that disagrees is rejected. Bit positions of the returned
    /// code follow the systematic form, see [`ClassicalCode::col_perm`].
    pub fn from_parity_check(name: &str, h: &BinaryMatrix, d: Option<usize>) -> Result<Self> {
        let m = h.cols();
        let r = h.rows();
        if r == 0 {
            return Err(Error::InvalidCode(format!("{name}: no parity checks")));
        }
        if r >= m {
            return Err(Error::InvalidCode(format!(
                "{name}: dimension k = {} must be at least 1",
                m as isize - r as isize
            )));
        }
        if m > 64 {
            return Err(Error::TooLarge(format!("{name}: block length {m}")));
        }
        let (h_sys, col_perm) = h.systematic_form()?;
        let k = m - r;
        let a = h_sys.select_columns(&(0..k).collect::<Vec<_>>()).transpose();
        let g = h_sys.nullspace_basis();
        let actual = minimum_distance(&g)?;
        if let Some(declared) = d {
            if declared != actual {
                return Err(Error::DistanceMismatch { declared, actual });
            }
        }
        let table = SyndromeTable::new(&h_sys)?;
        Ok(Self {
            name: name.to_string(),
            m,
            k,
            d: actual,
            h: h_sys,
            a,
            g,
            col_perm,
            table,
        })
    }

    /// One of the built-in codes: `rep3`, `rep5`, `hamming74`, `golay23`, or
    /// `rep<n>` for any odd or even `n >= 2`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "hamming74" => {
                let h = BinaryMatrix::from_strs(&["1101100", "1011010", "0111001"])?;
                Self::from_parity_check(name, &h, Some(3))
            }
            "golay23" => {
                // Shifts x^i g(x), i = 0..10, of the Golay generator polynomial
                // g(x) = 1 + x^2 + x^4 + x^5 + x^6 + x^10 + x^11: a [23,11,7] code.
                let g = cyclic_shifts(23, &GOLAY_GENERATOR, 11);
                let h = g.nullspace_basis();
                Self::from_parity_check(name, &h, Some(7))
            }
            _ => match name.strip_prefix("rep").and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if (2..=64).contains(&n) => Self::from_parity_check(name, &repetition_parity_check(n), Some(n)),
                _ => Err(Error::UnknownCode(name.to_string())),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Block length.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of parity checks, `m - k`.
    pub fn r(&self) -> usize {
        self.m - self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of correctable errors, `floor((d - 1) / 2)`.
    pub fn t(&self) -> usize {
        (self.d - 1) / 2
    }

    /// Systematic parity-check matrix `[A^T | I_r]`.
    pub fn parity_check(&self) -> &BinaryMatrix {
        &self.h
    }

    /// The `k x r` coupling matrix `A`.
    pub fn coupling(&self) -> &BinaryMatrix {
        &self.a
    }

    pub fn generator(&self) -> &BinaryMatrix {
        &self.g
    }

    /// Column `j` of the systematic form is column `col_perm[j]` of the
    /// parity-check matrix the code was built from.
    pub fn col_perm(&self) -> &[usize] {
        &self.col_perm
    }

    /// Positions `(i, j)` with `A[i][j] = 1`, row-major.
    pub fn coupling_ones(&self) -> Vec<(usize, usize)> {
        (0..self.k)
            .flat_map(|i| (0..self.r()).map(move |j| (i, j)))
            .filter(|&(i, j)| self.a.get(i, j))
            .collect()
    }

    pub fn table(&self) -> &SyndromeTable {
        &self.table
    }

    pub fn syndrome(&self, v: &BinaryVector) -> Result<BinaryVector> {
        self.h.mul_vec_transpose(v)
    }

    /// Minimum-weight error with syndrome `s`.
    pub fn decode(&self, s: &BinaryVector) -> Result<BinaryVector> {
        if s.len() != self.r() {
            return Err(Error::DimensionMismatch(format!(
                "syndrome of length {} for a code with {} checks",
                s.len(),
                self.r()
            )));
        }
        Ok(BinaryVector::from_u64(self.decode_bits(s.to_u64()?), self.m))
    }

    #[inline]
    pub fn syndrome_bits(&self, v: u64) -> u64 {
        self.table.syndrome(v)
    }

    #[inline]
    pub fn decode_bits(&self, s: u64) -> u64 {
        self.table.leader(s)
    }
}

impl fmt::Display for ClassicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{},{},{}]", self.name, self.m, self.k, self.d)
    }
}

/// Coefficients of the Golay generator polynomial, lowest degree first.
pub(crate) const GOLAY_GENERATOR: [u8; 12] = [1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1];

/// Matrix whose rows are `x^i p(x)` for `i = 0..count`, as length-`n` vectors.
pub(crate) fn cyclic_shifts(n: usize, poly: &[u8], count: usize) -> BinaryMatrix {
    let rows = (0..count)
        .map(|i| {
            let support: Vec<usize> = poly
                .iter()
                .enumerate()
                .filter(|(_, &c)| c == 1)
                .map(|(j, _)| (i + j) % n)
                .collect();
            BinaryVector::from_support(n, &support)
        })
        .collect();
    BinaryMatrix::from_rows(n, rows).expect("rows have length n")
}

/// `H = [1^T | I_{n-1}]`: every bit is checked against bit 0.
fn repetition_parity_check(n: usize) -> BinaryMatrix {
    let mut h = BinaryMatrix::zeros(n - 1, n);
    for j in 0..n - 1 {
        h.set(j, 0, true);
        h.set(j, j + 1, true);
    }
    h
}

/// Minimum weight over all nonzero codewords spanned by `g`.
pub fn minimum_distance(g: &BinaryMatrix) -> Result<usize> {
    let k = g.rows();
    if k > MAX_ENUMERATED_DIMENSION {
        return Err(Error::TooLarge(format!(
            "minimum distance enumeration over 2^{k} codewords"
        )));
    }
    let rows = g.row_masks()?;
    // Gray-code walk: each step adds one generator row.
    let mut word = 0u64;
    let mut best = usize::MAX;
    for step in 1u64..(1 << k) {
        word ^= rows[step.trailing_zeros() as usize];
        best = best.min(word.count_ones() as usize);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> BinaryVector {
        s.parse().unwrap()
    }

    #[test]
    fn repetition_three() {
        let c = ClassicalCode::builtin("rep3").unwrap();
        assert_eq!((c.m(), c.k(), c.d(), c.t()), (3, 1, 3, 1));
        assert_eq!(c.generator(), &BinaryMatrix::from_strs(&["111"]).unwrap());
        assert_eq!(c.parity_check(), &BinaryMatrix::from_strs(&["110", "101"]).unwrap());
        assert_eq!(c.col_perm(), &[0, 1, 2]);
    }

    #[test]
    fn builtin_parameters() {
        let rep5 = ClassicalCode::builtin("rep5").unwrap();
        assert_eq!((rep5.m(), rep5.k(), rep5.d()), (5, 1, 5));
        let ham = ClassicalCode::builtin("hamming74").unwrap();
        assert_eq!((ham.m(), ham.k(), ham.d(), ham.t()), (7, 4, 3, 1));
        let golay = ClassicalCode::builtin("golay23").unwrap();
        assert_eq!((golay.m(), golay.k(), golay.d(), golay.t()), (23, 11, 7, 3));
        assert!(matches!(ClassicalCode::builtin("bch15"), Err(Error::UnknownCode(_))));
    }

    #[test]
    fn hamming_from_standard_column_order() {
        // columns are the binary expansions of 1..=7
        let h = BinaryMatrix::from_strs(&["1010101", "0110011", "0001111"]).unwrap();
        let c = ClassicalCode::from_parity_check("h", &h, None).unwrap();
        assert_eq!((c.m(), c.k(), c.d(), c.t()), (7, 4, 3, 1));
        let gh = c.generator().mat_mul(&c.parity_check().transpose()).unwrap();
        assert!(gh.is_zero());
    }

    #[test]
    fn rejects_degenerate_and_mismatched_codes() {
        let i2 = BinaryMatrix::identity(2);
        assert!(matches!(
            ClassicalCode::from_parity_check("i2", &i2, None),
            Err(Error::InvalidCode(_))
        ));
        let h = BinaryMatrix::from_strs(&["110", "110"]).unwrap();
        assert!(matches!(
            ClassicalCode::from_parity_check("bad", &h, None),
            Err(Error::RankDeficient { .. })
        ));
        let h = BinaryMatrix::from_strs(&["110", "101"]).unwrap();
        assert!(matches!(
            ClassicalCode::from_parity_check("rep", &h, Some(2)),
            Err(Error::DistanceMismatch { declared: 2, actual: 3 })
        ));
    }

    #[test]
    fn rep3_syndromes_and_decoding() {
        let c = ClassicalCode::builtin("rep3").unwrap();
        assert_eq!(c.syndrome(&v("000")).unwrap(), v("00"));
        assert_eq!(c.syndrome(&v("100")).unwrap(), v("11"));
        assert_eq!(c.syndrome(&v("111")).unwrap(), v("00"));
        assert_eq!(c.decode(&v("00")).unwrap(), v("000"));
        assert_eq!(c.decode(&v("01")).unwrap(), v("001"));
        assert_eq!(c.decode(&v("10")).unwrap(), v("010"));
        assert_eq!(c.decode(&v("11")).unwrap(), v("100"));
        assert!(c.syndrome(&v("10")).is_err());
        assert!(c.decode(&v("1")).is_err());
    }

    #[test]
    fn golay_corrects_every_error_up_to_weight_three() {
        let c = ClassicalCode::builtin("golay23").unwrap();
        let mut count = 0;
        for w in 0..=3 {
            for support in (0..23).combinations(w) {
                let e = support.iter().fold(0u64, |a, &i| a | 1 << i);
                assert_eq!(c.decode_bits(c.syndrome_bits(e)), e);
                count += 1;
            }
        }
        assert_eq!(count, 1771 + 253 + 23 + 1);
    }

    #[test]
    fn codewords_have_zero_syndrome() {
        for name in ["rep3", "rep5", "hamming74", "golay23"] {
            let c = ClassicalCode::builtin(name).unwrap();
            let rows = c.generator().row_masks().unwrap();
            for combo in 0u64..(1 << c.k()) {
                let word = (0..c.k()).filter(|i| combo >> i & 1 == 1).fold(0, |a, i| a ^ rows[i]);
                assert_eq!(c.syndrome_bits(word), 0, "{name}");
            }
        }
    }

    #[test]
    fn tie_breaking_prefers_earliest_support() {
        // [4,2] code with checks 1100 and 0011 has four-fold ties at weight 2.
        let h = BinaryMatrix::from_strs(&["1100", "0011"]).unwrap();
        let table = SyndromeTable::new(&h).unwrap();
        // syndrome 11 is reached by {0,2}, {0,3}, {1,2}, {1,3}; {0,2} wins
        assert_eq!(table.leader(0b11), 0b0101);
    }

    #[test]
    fn minimum_distance_of_perfect_golay() {
        let g = cyclic_shifts(23, &GOLAY_GENERATOR, 12);
        assert_eq!(g.rank(), 12);
        assert_eq!(minimum_distance(&g).unwrap(), 7);
    }
}
