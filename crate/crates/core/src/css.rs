//! `[[n,1]]` CSS codes: validation, syndromes, logical operators, the
//! standard-form check matrix and CNOT-only encoder synthesis.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classical::{cyclic_shifts, SyndromeTable, GOLAY_GENERATOR};
use crate::error::{Error, Result};
use crate::frame::{Circuit, Gate, LogicalTarget, PauliError};
use crate::gf2::{parity, BinaryMatrix, BinaryVector, RowSpace};

/// Largest supported block size; frames are packed into one word per part.
pub const MAX_QUBITS: usize = 64;

/// Which logical operator of a one-qubit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalOperator {
    Xbar,
    Zbar,
}

/// Check matrix brought to the form
///
/// ```text
///   [ I_r  A  B | 0   0   0 ]   X-type rows
///   [ 0    0  0 | D  I_s  F ]   Z-type rows
/// ```
///
/// after permuting qubits: column `j` of the blocks is qubit `qubit_perm[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardFormCheck {
    pub r: usize,
    pub s: usize,
    pub a: BinaryMatrix,
    pub b: BinaryMatrix,
    pub d: BinaryMatrix,
    pub f: BinaryMatrix,
    pub qubit_perm: Vec<usize>,
    x_rows: BinaryMatrix,
    z_rows: BinaryMatrix,
}

impl StandardFormCheck {
    /// Works for any number of logical qubits.
    pub fn compute(hx: &BinaryMatrix, hz: &BinaryMatrix) -> Result<Self> {
        let n = hx.cols();
        if hz.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "H_X has {n} columns, H_Z has {}",
                hz.cols()
            )));
        }
        let ex = hx.echelon();
        if ex.pivots.len() != hx.rows() {
            return Err(Error::RankDeficient {
                rank: ex.pivots.len(),
                rows: hx.rows(),
            });
        }
        let rest: Vec<usize> = (0..n).filter(|c| !ex.pivots.contains(c)).collect();
        let ez = hz.echelon_on_columns(&rest);
        if ez.pivots.len() != hz.rows() {
            // Either H_Z is rank deficient or some Z check lives on the X pivots
            // alone, which cannot commute with H_X.
            return Err(Error::InvalidCode(
                "Z checks are not independent outside the X pivot columns".into(),
            ));
        }
        let info: Vec<usize> = rest.iter().copied().filter(|c| !ez.pivots.contains(c)).collect();
        let mut perm = ex.pivots.clone();
        perm.extend(&ez.pivots);
        perm.extend(&info);

        let r = ex.pivots.len();
        let s = ez.pivots.len();
        let xp = ex.matrix.permute_columns(&perm)?;
        let zp = ez.matrix.permute_columns(&perm)?;
        let range = |lo: usize, hi: usize| (lo..hi).collect::<Vec<_>>();
        Ok(Self {
            r,
            s,
            a: xp.select_columns(&range(r, r + s)),
            b: xp.select_columns(&range(r + s, n)),
            d: zp.select_columns(&range(0, r)),
            f: zp.select_columns(&range(r + s, n)),
            qubit_perm: perm,
            x_rows: ex.matrix,
            z_rows: ez.matrix,
        })
    }

    pub fn n(&self) -> usize {
        self.qubit_perm.len()
    }

    /// Number of logical qubits.
    pub fn k(&self) -> usize {
        self.n() - self.r - self.s
    }

    /// Row-reduced X checks in the original qubit order. Row `i` has its pivot
    /// on qubit `qubit_perm[i]`.
    pub fn x_rows(&self) -> &BinaryMatrix {
        &self.x_rows
    }

    /// Row-reduced Z checks in the original qubit order. Row `j` has its pivot
    /// on qubit `qubit_perm[r + j]`.
    pub fn z_rows(&self) -> &BinaryMatrix {
        &self.z_rows
    }

    /// The assembled `(r + s) x 2n` matrix `[X part | Z part]` in permuted order.
    pub fn assembled(&self) -> BinaryMatrix {
        let n = self.n();
        let mut out = BinaryMatrix::zeros(self.r + self.s, 2 * n);
        let xp = self.x_rows.permute_columns(&self.qubit_perm).expect("length n");
        let zp = self.z_rows.permute_columns(&self.qubit_perm).expect("length n");
        for i in 0..self.r {
            for j in xp.row(i).support() {
                out.set(i, j, true);
            }
        }
        for i in 0..self.s {
            for j in zp.row(i).support() {
                out.set(self.r + i, n + j, true);
            }
        }
        out
    }
}

/// A CNOT-only encoder for a CSS code of any dimension.
///
/// Qubits in `x_ancillas` start in `|+>`, qubits in `z_ancillas` in `|0>`, and
/// `info` qubits carry the logical input. Running `gates` in order maps the
/// single-qubit stabilizers of that product state onto the code's check rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssEncoder {
    n: usize,
    gates: Vec<(usize, usize)>,
    x_ancillas: Vec<usize>,
    z_ancillas: Vec<usize>,
    info: Vec<usize>,
}

impl CssEncoder {
    /// Clears `A` and `B` with CNOTs controlled on the X pivots, then clears
    /// `F` with CNOTs from the info columns onto the Z pivots. The encoder is
    /// that sequence reversed.
    pub fn synthesize(form: &StandardFormCheck) -> Result<Self> {
        let n = form.n();
        if n > MAX_QUBITS {
            return Err(Error::TooLarge(format!("{n} qubits")));
        }
        let (r, s) = (form.r, form.s);
        let perm = &form.qubit_perm;
        let xp = form.x_rows.permute_columns(perm)?;
        let zp = form.z_rows.permute_columns(perm)?;

        let mut forward = Vec::new();
        for i in 0..r {
            for t in r..n {
                if xp.get(i, t) {
                    forward.push((i, t));
                }
            }
        }
        let clear_ab = forward.len();
        for j in 0..s {
            for c in r + s..n {
                if zp.get(j, c) {
                    forward.push((c, r + j));
                }
            }
        }

        // After the first stage the Z rows must have lost their D block.
        let z_masks = zp.row_masks()?;
        for &z in &z_masks {
            let mut frame = PauliError::from_bits(n, 0, z);
            for &(c, t) in &forward[..clear_ab] {
                frame.cnot_unchecked(c, t);
            }
            if frame.z_bits() & ((1u64 << r) - 1) != 0 {
                return Err(Error::NotOrthogonal);
            }
        }

        let gates = forward.into_iter().rev().map(|(c, t)| (perm[c], perm[t])).collect();
        Ok(Self {
            n,
            gates,
            x_ancillas: perm[..r].to_vec(),
            z_ancillas: perm[r..r + s].to_vec(),
            info: perm[r + s..].to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// CNOTs `(control, target)` in application order.
    pub fn gates(&self) -> &[(usize, usize)] {
        &self.gates
    }

    pub fn x_ancillas(&self) -> &[usize] {
        &self.x_ancillas
    }

    pub fn z_ancillas(&self) -> &[usize] {
        &self.z_ancillas
    }

    pub fn info(&self) -> &[usize] {
        &self.info
    }

    /// Conjugates a frame by the encoder.
    pub fn push(&self, frame: &mut PauliError) {
        for &(c, t) in &self.gates {
            frame.cnot_unchecked(c, t);
        }
    }

    /// Conjugates a frame by the inverse encoder.
    pub fn pull(&self, frame: &mut PauliError) {
        for &(c, t) in self.gates.iter().rev() {
            frame.cnot_unchecked(c, t);
        }
    }

    /// Images of `Z` on each info qubit under the encoder, as Z-type masks.
    pub fn logical_z_images(&self) -> Vec<u64> {
        self.info
            .iter()
            .map(|&q| {
                let mut p = PauliError::from_bits(self.n, 0, 1 << q);
                self.push(&mut p);
                p.z_bits()
            })
            .collect()
    }

    /// Images of `X` on each info qubit under the encoder, as X-type masks.
    pub fn logical_x_images(&self) -> Vec<u64> {
        self.info
            .iter()
            .map(|&q| {
                let mut p = PauliError::from_bits(self.n, 1 << q, 0);
                self.push(&mut p);
                p.x_bits()
            })
            .collect()
    }

    /// The full preparation circuit with the info qubits prepared for `target`.
    pub fn circuit(&self, target: LogicalTarget) -> Circuit {
        let mut gates = Vec::with_capacity(self.n + self.gates.len());
        for q in 0..self.n {
            let plus = self.x_ancillas.contains(&q) || (self.info.contains(&q) && target == LogicalTarget::Plus);
            gates.push(if plus { Gate::PrepPlus(q) } else { Gate::PrepZero(q) });
        }
        gates.extend(
            self.gates
                .iter()
                .map(|&(control, target)| Gate::Cnot { control, target }),
        );
        Circuit::new(self.n, gates).expect("encoder gates are in range")
    }
}

/// An `[[n,1]]` CSS code.
#[derive(Clone)]
pub struct CssCode {
    name: String,
    n: usize,
    hz: BinaryMatrix,
    hx: BinaryMatrix,
    logical_x: BinaryVector,
    logical_z: BinaryVector,
    lx: u64,
    lz: u64,
    x_table: SyndromeTable,
    z_table: SyndromeTable,
    standard: StandardFormCheck,
    encoder: CssEncoder,
    prep_zero: Circuit,
    prep_plus: Circuit,
}

impl CssCode {
    /// Validates `H_Z`, `H_X` and builds the code. Without a hint the logical
    /// operators are the minimum-weight representatives, ties going to the
    /// earliest support.
    pub fn from_matrices(
        name: &str,
        hz: &BinaryMatrix,
        hx: &BinaryMatrix,
        logical_hint: Option<(BinaryVector, BinaryVector)>,
    ) -> Result<Self> {
        let n = hz.cols();
        if hx.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "H_Z has {n} columns, H_X has {}",
                hx.cols()
            )));
        }
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooLarge(format!("{name}: {n} qubits")));
        }
        for m in [hz, hx] {
            let rank = m.rank();
            if rank != m.rows() {
                return Err(Error::RankDeficient { rank, rows: m.rows() });
            }
        }
        if !hx.mat_mul(&hz.transpose())?.is_zero() {
            return Err(Error::NotOrthogonal);
        }
        if hz.rows() + hx.rows() != n - 1 {
            return Err(Error::UnsupportedDimension {
                got: hz.rows() + hx.rows(),
                expected: n - 1,
            });
        }

        let (logical_x, logical_z) = match logical_hint {
            Some((lx, lz)) => {
                check_logical(&lx, hz, hx, "logical X")?;
                check_logical(&lz, hx, hz, "logical Z")?;
                (lx, lz)
            }
            None => (min_weight_logical(hz, hx)?, min_weight_logical(hx, hz)?),
        };
        if !logical_x.dot(&logical_z)? {
            return Err(Error::InvalidCode(format!("{name}: logical operators commute")));
        }

        let standard = StandardFormCheck::compute(hx, hz)?;
        let encoder = CssEncoder::synthesize(&standard)?;
        Ok(Self {
            name: name.to_string(),
            n,
            lx: logical_x.to_u64()?,
            lz: logical_z.to_u64()?,
            x_table: SyndromeTable::new(hz)?,
            z_table: SyndromeTable::new(hx)?,
            prep_zero: encoder.circuit(LogicalTarget::Zero),
            prep_plus: encoder.circuit(LogicalTarget::Plus),
            hz: hz.clone(),
            hx: hx.clone(),
            logical_x,
            logical_z,
            standard,
            encoder,
        })
    }

    /// `steane` ([[7,1,3]]) or `golay_q` ([[23,1,7]]).
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "steane" => {
                let h = BinaryMatrix::from_strs(&["1001101", "0101011", "0010111"])?;
                let lx: BinaryVector = "1101000".parse()?;
                let lz = lx.clone();
                Self::from_matrices(name, &h, &h, Some((lx, lz)))
            }
            "golay_q" => {
                // (1 + x) g(x) generates the even-weight subcode, which is the
                // dual of the [23,12,7] Golay code.
                let mut poly = [0u8; 13];
                for (i, &c) in GOLAY_GENERATOR.iter().enumerate() {
                    poly[i] ^= c;
                    poly[i + 1] ^= c;
                }
                let h = cyclic_shifts(23, &poly, 11);
                Self::from_matrices(name, &h, &h, None)
            }
            _ => Err(Error::UnknownCode(name.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r_z(&self) -> usize {
        self.hz.rows()
    }

    pub fn r_x(&self) -> usize {
        self.hx.rows()
    }

    pub fn hz(&self) -> &BinaryMatrix {
        &self.hz
    }

    pub fn hx(&self) -> &BinaryMatrix {
        &self.hx
    }

    pub fn logical_x(&self) -> &BinaryVector {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &BinaryVector {
        &self.logical_z
    }

    pub fn logical_x_mask(&self) -> u64 {
        self.lx
    }

    pub fn logical_z_mask(&self) -> u64 {
        self.lz
    }

    pub fn standard_form(&self) -> &StandardFormCheck {
        &self.standard
    }

    pub fn encoder(&self) -> &CssEncoder {
        &self.encoder
    }

    /// The preparation circuit for `|0>_L` or `|+>_L`.
    pub fn encoding_circuit(&self, target: LogicalTarget) -> &Circuit {
        match target {
            LogicalTarget::Zero => &self.prep_zero,
            LogicalTarget::Plus => &self.prep_plus,
        }
    }

    /// X-error syndrome `e * H_Z^T`.
    pub fn syndrome_x(&self, e: &BinaryVector) -> Result<BinaryVector> {
        self.hz.mul_vec_transpose(e)
    }

    /// Z-error syndrome `f * H_X^T`.
    pub fn syndrome_z(&self, f: &BinaryVector) -> Result<BinaryVector> {
        self.hx.mul_vec_transpose(f)
    }

    pub fn logical_parity(&self, v: &BinaryVector, which: LogicalOperator) -> Result<bool> {
        match which {
            LogicalOperator::Zbar => v.dot(&self.logical_z),
            LogicalOperator::Xbar => v.dot(&self.logical_x),
        }
    }

    #[inline]
    pub fn syndrome_x_bits(&self, e: u64) -> u64 {
        self.x_table.syndrome(e)
    }

    #[inline]
    pub fn syndrome_z_bits(&self, f: u64) -> u64 {
        self.z_table.syndrome(f)
    }

    /// Minimum-weight X pattern with X syndrome `s`.
    #[inline]
    pub fn x_correction(&self, s: u64) -> u64 {
        self.x_table.leader(s)
    }

    /// Minimum-weight Z pattern with Z syndrome `s`.
    #[inline]
    pub fn z_correction(&self, s: u64) -> u64 {
        self.z_table.leader(s)
    }

    /// Whether `err` acts trivially on the stabilizer state `target`.
    ///
    /// For `|0>_L` the state's stabilizer is generated by the code's checks and
    /// `Zbar`, so an X part must commute with `H_Z` and `Zbar` while a Z part
    /// only has to commute with `H_X`. `|+>_L` is the mirror image.
    pub fn in_stabilizer(&self, err: &PauliError, target: LogicalTarget) -> bool {
        let (x, z) = (err.x_bits(), err.z_bits());
        if self.syndrome_x_bits(x) != 0 || self.syndrome_z_bits(z) != 0 {
            return false;
        }
        match target {
            LogicalTarget::Zero => !parity(x & self.lz),
            LogicalTarget::Plus => !parity(z & self.lx),
        }
    }

    /// Whether an X error is corrected by coset-leader decoding, up to the
    /// X stabilizers.
    #[inline]
    pub fn x_error_correctable(&self, e: u64) -> bool {
        let residual = e ^ self.x_correction(self.syndrome_x_bits(e));
        !parity(residual & self.lz)
    }
}

impl fmt::Debug for CssCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CssCode")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("hz", &self.hz)
            .field("hx", &self.hx)
            .field("logical_x", &self.logical_x)
            .field("logical_z", &self.logical_z)
            .finish()
    }
}

impl fmt::Display for CssCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [[{},1]]", self.name, self.n)
    }
}

/// `v` must commute with `commute_with` and lie outside `rowspace(not_in)`.
fn check_logical(v: &BinaryVector, commute_with: &BinaryMatrix, not_in: &BinaryMatrix, what: &str) -> Result<()> {
    if !commute_with.mul_vec_transpose(v)?.is_zero() {
        return Err(Error::InvalidCode(format!(
            "{what} {v} does not commute with the checks"
        )));
    }
    if not_in.row_space_contains(v)? {
        return Err(Error::InvalidCode(format!("{what} {v} is a stabilizer")));
    }
    Ok(())
}

/// Minimum-weight vector in `nullspace(commute_with)` outside `rowspace(not_in)`.
fn min_weight_logical(commute_with: &BinaryMatrix, not_in: &BinaryMatrix) -> Result<BinaryVector> {
    let basis = commute_with.nullspace_basis().row_masks()?;
    if basis.len() > 24 {
        return Err(Error::TooLarge(format!(
            "logical search over 2^{} vectors",
            basis.len()
        )));
    }
    let n = commute_with.cols();
    let stabilizers = RowSpace::new(not_in);
    let mut best: Option<u64> = None;
    let mut word = 0u64;
    for step in 1u64..(1 << basis.len()) {
        word ^= basis[step.trailing_zeros() as usize];
        if best.is_some_and(|b| support_order(word, b) != Ordering::Less) {
            continue;
        }
        if !stabilizers.contains(&BinaryVector::from_u64(word, n)) {
            best = Some(word);
        }
    }
    best.map(|b| BinaryVector::from_u64(b, n))
        .ok_or_else(|| Error::InvalidCode("no logical operator exists".into()))
}

/// Orders words by weight, then by sorted support (earliest position first).
pub(crate) fn support_order(a: u64, b: u64) -> Ordering {
    a.count_ones().cmp(&b.count_ones()).then_with(|| {
        let diff = a ^ b;
        if diff == 0 {
            Ordering::Equal
        } else if a & diff & diff.wrapping_neg() != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    })
}
