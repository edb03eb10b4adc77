//! Distillation and syndrome-extraction procedures over Pauli frames.
//!
//! Every block-level operation is a transversal CNOT between code blocks, so
//! a block's frame travels as a single [`PauliError`]. Measurements are
//! perfect and only reveal the parities a bitwise readout would expose.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::classical::{ClassicalCode, SyndromeTable};
use crate::css::{CssCode, CssEncoder, StandardFormCheck};
use crate::error::{Error, Result};
use crate::frame::{measured_parity_bits, transversal_block_cnot, Basis, Circuit, Gate, LogicalTarget, PauliError};
use crate::gf2::{parity, BinaryMatrix, BinaryVector};

/// Which error type a distillation round removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RoundType {
    /// Transversal `U_D`, parity blocks read in the Z basis.
    XRound,
    /// Transversal `U_D^H`, parity blocks read in the X basis.
    ZRound,
}

impl RoundType {
    fn basis(self) -> Basis {
        match self {
            RoundType::XRound => Basis::Z,
            RoundType::ZRound => Basis::X,
        }
    }

    /// The target whose logical parity this round can read.
    fn logical_target(self) -> LogicalTarget {
        match self {
            RoundType::XRound => LogicalTarget::Zero,
            RoundType::ZRound => LogicalTarget::Plus,
        }
    }
}

/// A syndrome vector, optionally followed by a logical parity bit.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SyndromeEstimate {
    pub bits: u64,
    pub len: usize,
    pub logical: Option<bool>,
}

impl SyndromeEstimate {
    pub fn syndrome(&self) -> BinaryVector {
        BinaryVector::from_u64(self.bits, self.len)
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0 && self.logical != Some(true)
    }

    /// Packs the logical bit, if any, at position `len`.
    fn extended_bits(&self) -> u64 {
        self.bits | (self.logical.unwrap_or(false) as u64) << self.len
    }

    fn from_extended(bits: u64, len: usize, has_logical: bool) -> Self {
        Self {
            bits: bits & ((1u64 << len) - 1),
            len,
            logical: has_logical.then_some((bits >> len) & 1 == 1),
        }
    }
}

/// Written as `001|1`, or just `001` without a logical bit.
impl fmt::Display for SyndromeEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.syndrome())?;
        if let Some(l) = self.logical {
            write!(f, "|{}", l as u8)?;
        }
        Ok(())
    }
}

impl fmt::Debug for SyndromeEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SyndromeEstimate({self})")
    }
}

impl Serialize for SyndromeEstimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Estimated syndromes of one block. `x` estimates the X error (length
/// `r_Z`), `z` the Z error (length `r_X`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SyndromeRecord {
    pub x: Option<SyndromeEstimate>,
    pub z: Option<SyndromeEstimate>,
}

/// Codes and target for a two-round run of Protocol I.
#[derive(Clone, Debug)]
pub struct DistillationConfig {
    pub css: CssCode,
    pub code_round1: ClassicalCode,
    pub code_round2: ClassicalCode,
    pub target: LogicalTarget,
    pub correct_logical: bool,
}

impl DistillationConfig {
    pub fn new(css: CssCode, code_round1: ClassicalCode, code_round2: ClassicalCode, target: LogicalTarget) -> Self {
        Self {
            css,
            code_round1,
            code_round2,
            target,
            correct_logical: true,
        }
    }

    /// Blocks consumed by one full run.
    pub fn blocks_per_run(&self) -> usize {
        self.code_round1.m() * self.code_round2.m()
    }

    /// Blocks surviving one full run.
    pub fn survivors_per_run(&self) -> usize {
        self.code_round1.k() * self.code_round2.k()
    }
}

/// Everything a single round did.
#[derive(Clone, Debug)]
pub struct RoundReport {
    /// Frames of the `k` surviving blocks after correction.
    pub survivors: Vec<PauliError>,
    /// Estimated syndromes for all `m` blocks.
    pub records: Vec<SyndromeRecord>,
    /// Parities read off the `r` measured blocks.
    pub measured: Vec<SyndromeEstimate>,
    /// Corrections applied to the survivors.
    pub corrections: Vec<PauliError>,
}

/// Block-level `U_D`: `CX i (k+j)` for every `A[i][j] = 1`.
pub fn build_ud(code: &ClassicalCode) -> Circuit {
    let k = code.k();
    let gates = code
        .coupling_ones()
        .into_iter()
        .map(|(i, j)| Gate::Cnot {
            control: i,
            target: k + j,
        })
        .collect();
    Circuit::new(code.m(), gates).expect("coupling indices are in range")
}

/// Block-level `U_D^H`: `CX (k+j) i` for every `A[i][j] = 1`.
pub fn build_udh(code: &ClassicalCode) -> Circuit {
    let k = code.k();
    let gates = code
        .coupling_ones()
        .into_iter()
        .map(|(i, j)| Gate::Cnot {
            control: k + j,
            target: i,
        })
        .collect();
    Circuit::new(code.m(), gates).expect("coupling indices are in range")
}

/// Decodes each bit position of the measured words separately.
///
/// `measured[j]` holds the bits seen on check `j`; the result holds, for
/// every block `i`, the bits of the decoded error pattern at block `i`.
pub(crate) fn decode_per_bit(measured: &[u64], nbits: usize, table: &SyndromeTable, out: &mut [u64]) {
    out.iter_mut().for_each(|e| *e = 0);
    let mut any = 0u64;
    for &w in measured {
        any |= w;
    }
    for b in 0..nbits {
        if (any >> b) & 1 == 0 {
            continue;
        }
        let pattern = measured
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &w)| acc | ((w >> b) & 1) << j);
        let mut leader = table.leader(pattern);
        while leader != 0 {
            let i = leader.trailing_zeros() as usize;
            out[i] |= 1 << b;
            leader &= leader - 1;
        }
    }
}

/// Correction for one block from its estimated syndrome: the coset-leader
/// lift plus the logical operator when the lift disagrees with the decoded
/// logical bit. Returns the (x, z) masks.
fn lift(css: &CssCode, basis: Basis, est: &SyndromeEstimate, correct_logical: bool) -> (u64, u64) {
    match basis {
        Basis::Z => {
            let mut c = css.x_correction(est.bits);
            if correct_logical && est.logical.is_some_and(|l| l != parity(c & css.logical_z_mask())) {
                c ^= css.logical_x_mask();
            }
            (c, 0)
        }
        Basis::X => {
            let mut c = css.z_correction(est.bits);
            if correct_logical && est.logical.is_some_and(|l| l != parity(c & css.logical_x_mask())) {
                c ^= css.logical_z_mask();
            }
            (0, c)
        }
    }
}

fn check_blocks(blocks: &[PauliError], count: usize, css: &CssCode, what: &str) -> Result<()> {
    if blocks.len() != count {
        return Err(Error::Protocol(format!(
            "{what}: expected {count} blocks, got {}",
            blocks.len()
        )));
    }
    if let Some(b) = blocks.iter().find(|b| b.n() != css.n()) {
        return Err(Error::DimensionMismatch(format!(
            "{what}: block on {} qubits for a code on {}",
            b.n(),
            css.n()
        )));
    }
    Ok(())
}

/// One distillation round on `m` blocks with the classical code `code`.
///
/// The logical parity is decoded alongside the syndrome only when `target`
/// is the state whose logical operator the round measures.
pub fn distill_round(
    blocks: &[PauliError],
    code: &ClassicalCode,
    css: &CssCode,
    round: RoundType,
    target: LogicalTarget,
) -> Result<RoundReport> {
    round_impl(blocks, code, css, round, target, true)
}

fn round_impl(
    blocks: &[PauliError],
    code: &ClassicalCode,
    css: &CssCode,
    round: RoundType,
    target: LogicalTarget,
    correct_logical: bool,
) -> Result<RoundReport> {
    check_blocks(blocks, code.m(), css, "distillation round")?;
    let (k, r) = (code.k(), code.r());
    let mut frames = blocks.to_vec();
    for (i, j) in code.coupling_ones() {
        match round {
            RoundType::XRound => transversal_block_cnot(&mut frames, i, k + j)?,
            RoundType::ZRound => transversal_block_cnot(&mut frames, k + j, i)?,
        }
    }

    let basis = round.basis();
    let with_logical = target == round.logical_target();
    let len = match basis {
        Basis::Z => css.r_z(),
        Basis::X => css.r_x(),
    };
    let measured: Vec<SyndromeEstimate> = frames[k..]
        .iter()
        .map(|f| {
            let (bits, l) = measured_parity_bits(f, css, basis);
            SyndromeEstimate {
                bits,
                len,
                logical: with_logical.then_some(l),
            }
        })
        .collect();
    debug_assert_eq!(measured.len(), r);

    let words: Vec<u64> = measured.iter().map(SyndromeEstimate::extended_bits).collect();
    let mut est = vec![0u64; code.m()];
    decode_per_bit(&words, len + with_logical as usize, code.table(), &mut est);
    let records: Vec<SyndromeRecord> = est
        .iter()
        .map(|&e| {
            let s = SyndromeEstimate::from_extended(e, len, with_logical);
            match basis {
                Basis::Z => SyndromeRecord { x: Some(s), z: None },
                Basis::X => SyndromeRecord { x: None, z: Some(s) },
            }
        })
        .collect();

    let mut survivors = Vec::with_capacity(k);
    let mut corrections = Vec::with_capacity(k);
    for (frame, rec) in frames.iter().take(k).zip(&records) {
        let s = rec.x.or(rec.z).expect("one side is set");
        let (cx, cz) = lift(css, basis, &s, correct_logical);
        let correction = PauliError::from_bits(css.n(), cx, cz);
        survivors.push(frame.compose(&correction)?);
        corrections.push(correction);
    }
    Ok(RoundReport {
        survivors,
        records,
        measured,
        corrections,
    })
}

/// Round-2 groups: group `u` collects survivor `u` of every round-1 group.
///
/// Entries are `(round-1 group, survivor index)`.
pub fn interleave(k1: usize, groups: usize) -> Vec<Vec<(usize, usize)>> {
    (0..k1).map(|u| (0..groups).map(|g| (g, u)).collect()).collect()
}

/// Fails if a round-2 group holds two blocks from the same round-1 group.
pub fn check_interleaving(groups: &[Vec<(usize, usize)>]) -> Result<()> {
    for (idx, group) in groups.iter().enumerate() {
        let mut seen: Vec<usize> = group.iter().map(|&(g, _)| g).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Protocol(format!(
                "round-2 group {idx} reunites round-1 groupmates"
            )));
        }
    }
    Ok(())
}

/// Two-round Protocol I: X round with `code_round1` on groups of `m1`, then a
/// Z round with `code_round2` on interleaved groups of `m2`.
///
/// The pool is processed in independent chunks of `m1 * m2` blocks, each
/// yielding `k1 * k2` survivors.
pub fn distill_protocol_i(pool: &[PauliError], cfg: &DistillationConfig) -> Result<Vec<PauliError>> {
    let (c1, c2) = (&cfg.code_round1, &cfg.code_round2);
    let chunk = cfg.blocks_per_run();
    if pool.is_empty() || !pool.len().is_multiple_of(chunk) {
        return Err(Error::Protocol(format!(
            "pool of {} blocks is not a positive multiple of m1 * m2 = {chunk}",
            pool.len()
        )));
    }
    let groups = interleave(c1.k(), c2.m());
    check_interleaving(&groups)?;

    let mut survivors = Vec::with_capacity(pool.len() / chunk * cfg.survivors_per_run());
    for run in pool.chunks(chunk) {
        let first: Vec<Vec<PauliError>> = run
            .chunks(c1.m())
            .map(|g| {
                round_impl(g, c1, &cfg.css, RoundType::XRound, cfg.target, cfg.correct_logical).map(|r| r.survivors)
            })
            .collect::<Result<_>>()?;
        for group in &groups {
            let blocks: Vec<PauliError> = group.iter().map(|&(g, u)| first[g][u]).collect();
            let report = round_impl(
                &blocks,
                c2,
                &cfg.css,
                RoundType::ZRound,
                cfg.target,
                cfg.correct_logical,
            )?;
            survivors.extend(report.survivors);
        }
    }
    Ok(survivors)
}

/// A CSS code with any number of logical qubits, used as the outer code of
/// Protocol II.
#[derive(Clone, Debug)]
pub struct OuterCode {
    form: StandardFormCheck,
    encoder: CssEncoder,
    z_table: SyndromeTable,
    x_table: SyndromeTable,
    zbar_images: Vec<u64>,
    xbar_images: Vec<u64>,
}

impl OuterCode {
    pub fn from_matrices(hz: &BinaryMatrix, hx: &BinaryMatrix) -> Result<Self> {
        let m = hz.cols();
        if hx.cols() != m {
            return Err(Error::DimensionMismatch(format!(
                "H_Z has {m} columns, H_X has {}",
                hx.cols()
            )));
        }
        if hx.rows() > 0 && hz.rows() > 0 && !hx.mat_mul(&hz.transpose())?.is_zero() {
            return Err(Error::NotOrthogonal);
        }
        let form = StandardFormCheck::compute(hx, hz)?;
        if form.k() == 0 {
            return Err(Error::InvalidCode("outer code encodes no blocks".into()));
        }
        let encoder = CssEncoder::synthesize(&form)?;
        Ok(Self {
            z_table: SyndromeTable::new(form.z_rows())?,
            x_table: SyndromeTable::new(form.x_rows())?,
            zbar_images: encoder.logical_z_images(),
            xbar_images: encoder.logical_x_images(),
            form,
            encoder,
        })
    }

    /// The CSS code with `H_Z = H_X = H` of a dual-containing classical code.
    pub fn from_dual_containing(code: &ClassicalCode) -> Result<Self> {
        let h = code.parity_check();
        if !h.mat_mul(&h.transpose())?.is_zero() {
            return Err(Error::InvalidCode(format!("{} does not contain its dual", code.name())));
        }
        Self::from_matrices(h, h)
    }

    /// X checks only from `H` (no Z checks): corrects X errors like the
    /// classical code itself.
    pub fn x_only(code: &ClassicalCode) -> Result<Self> {
        Self::from_matrices(code.parity_check(), &BinaryMatrix::empty(code.m()))
    }

    pub fn m(&self) -> usize {
        self.form.n()
    }

    pub fn k(&self) -> usize {
        self.form.k()
    }

    pub fn standard_form(&self) -> &StandardFormCheck {
        &self.form
    }

    pub fn encoder(&self) -> &CssEncoder {
        &self.encoder
    }
}

/// Result of Protocol II on one group of blocks.
#[derive(Clone, Debug)]
pub struct ProtocolIIReport {
    /// Corrected frames of the blocks at the encoder's info positions.
    pub survivors: Vec<PauliError>,
    /// Block labels of the survivors.
    pub survivor_blocks: Vec<usize>,
    /// Estimated syndromes for every block before the logical images are
    /// taken into account.
    pub block_records: Vec<SyndromeRecord>,
    /// Estimated syndromes of the survivors.
    pub survivor_records: Vec<SyndromeRecord>,
}

/// Protocol II: undo the outer encoder transversally, read the ancilla
/// positions, decode per bit, and correct the survivors.
pub fn distill_protocol_ii(
    blocks: &[PauliError],
    outer: &OuterCode,
    css: &CssCode,
    target: LogicalTarget,
) -> Result<ProtocolIIReport> {
    check_blocks(blocks, outer.m(), css, "protocol II")?;
    let mut frames = blocks.to_vec();
    for &(c, t) in outer.encoder.gates().iter().rev() {
        transversal_block_cnot(&mut frames, c, t)?;
    }

    let read = |positions: &[usize], basis: Basis, with_logical: bool| -> Vec<u64> {
        positions
            .iter()
            .map(|&q| {
                let (bits, l) = measured_parity_bits(&frames[q], css, basis);
                let len = match basis {
                    Basis::Z => css.r_z(),
                    Basis::X => css.r_x(),
                };
                bits | ((with_logical && l) as u64) << len
            })
            .collect()
    };
    let zero = target == LogicalTarget::Zero;
    let x_words = read(outer.encoder.z_ancillas(), Basis::Z, zero);
    let z_words = read(outer.encoder.x_ancillas(), Basis::X, !zero);

    let m = outer.m();
    let mut ex = vec![0u64; m];
    let mut ez = vec![0u64; m];
    decode_per_bit(&x_words, css.r_z() + zero as usize, &outer.z_table, &mut ex);
    decode_per_bit(&z_words, css.r_x() + !zero as usize, &outer.x_table, &mut ez);

    let record = |x: u64, z: u64| SyndromeRecord {
        x: Some(SyndromeEstimate::from_extended(x, css.r_z(), zero)),
        z: Some(SyndromeEstimate::from_extended(z, css.r_x(), !zero)),
    };
    let block_records = ex.iter().zip(&ez).map(|(&x, &z)| record(x, z)).collect();

    // Per bit position, the survivor's share of a block-error pattern is its
    // overlap with the image of the survivor's logical operator.
    let project = |est: &[u64], image: u64| {
        let mut out = 0u64;
        let mut img = image;
        while img != 0 {
            let q = img.trailing_zeros() as usize;
            out ^= est[q];
            img &= img - 1;
        }
        out
    };

    let mut survivors = Vec::with_capacity(outer.k());
    let mut survivor_records = Vec::with_capacity(outer.k());
    for (u, &q) in outer.encoder.info().iter().enumerate() {
        let rec = record(project(&ex, outer.zbar_images[u]), project(&ez, outer.xbar_images[u]));
        let (cx, _) = lift(css, Basis::Z, &rec.x.expect("set"), true);
        let (_, cz) = lift(css, Basis::X, &rec.z.expect("set"), true);
        let mut f = frames[q];
        f.apply_x(cx);
        f.apply_z(cz);
        survivors.push(f);
        survivor_records.push(rec);
    }
    Ok(ProtocolIIReport {
        survivors,
        survivor_blocks: outer.encoder.info().to_vec(),
        block_records,
        survivor_records,
    })
}

/// Steane extraction with one `|+>_L` and one `|0>_L` ancilla.
///
/// `CX data -> anc_plus` copies the data's X errors out and `CX anc_zero ->
/// data` copies its Z errors out. Returns `(s_X, s_Z)` read from the
/// ancillas; all three frames pick up the back-action.
pub fn steane_extraction(
    data: &mut PauliError,
    anc_plus: &mut PauliError,
    anc_zero: &mut PauliError,
    css: &CssCode,
) -> Result<(BinaryVector, BinaryVector)> {
    check_blocks(&[*data, *anc_plus, *anc_zero], 3, css, "steane extraction")?;
    let mut frames = [*data, *anc_plus, *anc_zero];
    transversal_block_cnot(&mut frames, 0, 1)?;
    transversal_block_cnot(&mut frames, 2, 0)?;
    [*data, *anc_plus, *anc_zero] = frames;
    Ok((
        BinaryVector::from_u64(css.syndrome_x_bits(anc_plus.x_bits()), css.r_z()),
        BinaryVector::from_u64(css.syndrome_z_bits(anc_zero.z_bits()), css.r_x()),
    ))
}

/// Syndrome extraction for `m` data blocks with `r = m - k` ancillas of each
/// type, wired by the coupling matrix of `code`.
///
/// Returns estimated X and Z syndromes for every data block.
pub fn ancilla_saving(
    data: &mut [PauliError],
    anc_plus: &mut [PauliError],
    anc_zero: &mut [PauliError],
    code: &ClassicalCode,
    css: &CssCode,
) -> Result<Vec<SyndromeRecord>> {
    let (m, k, r) = (code.m(), code.k(), code.r());
    check_blocks(data, m, css, "ancilla saving data")?;
    check_blocks(anc_plus, r, css, "ancilla saving |+> ancillas")?;
    check_blocks(anc_zero, r, css, "ancilla saving |0> ancillas")?;
    let coupling = code.coupling_ones();

    // X side: data feeds the |+> ancillas.
    let mut plus_words = vec![0u64; r];
    for j in 0..r {
        let mut frames = [data[k + j], anc_plus[j]];
        transversal_block_cnot(&mut frames, 0, 1)?;
        [data[k + j], anc_plus[j]] = frames;
    }
    for &(i, j) in &coupling {
        let mut frames = [data[i], anc_plus[j]];
        transversal_block_cnot(&mut frames, 0, 1)?;
        [data[i], anc_plus[j]] = frames;
    }
    for (w, a) in plus_words.iter_mut().zip(anc_plus.iter()) {
        *w = css.syndrome_x_bits(a.x_bits());
    }

    // Z side: the |0> ancillas feed the data.
    let mut zero_words = vec![0u64; r];
    for j in 0..r {
        let mut frames = [anc_zero[j], data[k + j]];
        transversal_block_cnot(&mut frames, 0, 1)?;
        [anc_zero[j], data[k + j]] = frames;
    }
    for &(i, j) in &coupling {
        let mut frames = [anc_zero[j], data[i]];
        transversal_block_cnot(&mut frames, 0, 1)?;
        [anc_zero[j], data[i]] = frames;
    }
    for (w, a) in zero_words.iter_mut().zip(anc_zero.iter()) {
        *w = css.syndrome_z_bits(a.z_bits());
    }

    let mut ex = vec![0u64; m];
    let mut ez = vec![0u64; m];
    decode_per_bit(&plus_words, css.r_z(), code.table(), &mut ex);
    decode_per_bit(&zero_words, css.r_x(), code.table(), &mut ez);
    Ok(ex
        .iter()
        .zip(&ez)
        .map(|(&x, &z)| SyndromeRecord {
            x: Some(SyndromeEstimate::from_extended(x, css.r_z(), false)),
            z: Some(SyndromeEstimate::from_extended(z, css.r_x(), false)),
        })
        .collect())
}

/// X-side estimates of ancilla saving for X-only data errors and clean
/// ancillas, without building frames. `errors[i]` is block `i`'s X mask.
pub(crate) fn saving_x_estimates(errors: &[u64], code: &ClassicalCode, css: &CssCode, out: &mut [u64]) {
    let k = code.k();
    let mut words = [0u64; 64];
    let r = code.r();
    for (j, w) in words.iter_mut().enumerate().take(r) {
        *w = css.syndrome_x_bits(errors[k + j]);
    }
    for (i, j) in code.coupling_ones() {
        words[j] ^= css.syndrome_x_bits(errors[i]);
    }
    decode_per_bit(&words[..r], css.r_z(), code.table(), out);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steane() -> CssCode {
        CssCode::builtin("steane").unwrap()
    }

    fn x_err(s: &str) -> PauliError {
        let e: BinaryVector = s.parse().unwrap();
        PauliError::from_vectors(&e, &BinaryVector::zeros(e.len())).unwrap()
    }

    #[test]
    fn rep3_ud_gates() {
        let code = ClassicalCode::builtin("rep3").unwrap();
        assert_eq!(build_ud(&code).to_text(), "# qubits 3\nCX 0 1\nCX 0 2\n");
        assert_eq!(build_udh(&code).to_text(), "# qubits 3\nCX 1 0\nCX 2 0\n");
    }

    #[test]
    fn ud_gate_count_is_coupling_weight() {
        let code = ClassicalCode::builtin("hamming74").unwrap();
        assert_eq!(build_ud(&code).cnot_count(), code.coupling().count_ones());
        // Four distinct rows of weight >= 2 over three bits: 2 + 2 + 2 + 3.
        assert_eq!(build_ud(&code).cnot_count(), 9);
    }

    #[test]
    fn worked_example_round() {
        let css = steane();
        let rep3 = ClassicalCode::builtin("rep3").unwrap();
        let blocks = [x_err("1101000"), x_err("0010000"), x_err("0000011")];
        let rep = distill_round(&blocks, &rep3, &css, RoundType::XRound, LogicalTarget::Zero).unwrap();
        assert_eq!(rep.measured[0].to_string(), "001|1");
        assert_eq!(rep.measured[1].to_string(), "100|1");
        assert_eq!(rep.records[0].x.unwrap().to_string(), "000|1");
        assert_eq!(rep.corrections[0].x_bits(), css.logical_x_mask());
        assert!(rep.survivors[0].is_identity());
    }

    #[test]
    fn clean_round_is_clean() {
        let css = steane();
        let code = ClassicalCode::builtin("hamming74").unwrap();
        let blocks = vec![PauliError::identity(7); 7];
        for round in [RoundType::XRound, RoundType::ZRound] {
            let rep = distill_round(&blocks, &code, &css, round, LogicalTarget::Zero).unwrap();
            assert!(rep.survivors.iter().all(PauliError::is_identity));
            assert!(rep.records.iter().all(|r| r.x.or(r.z).unwrap().is_zero()));
        }
    }

    #[test]
    fn round_rejects_wrong_block_count() {
        let css = steane();
        let rep3 = ClassicalCode::builtin("rep3").unwrap();
        let blocks = vec![PauliError::identity(7); 2];
        assert!(distill_round(&blocks, &rep3, &css, RoundType::XRound, LogicalTarget::Zero).is_err());
        let wrong_n = vec![PauliError::identity(5); 3];
        assert!(distill_round(&wrong_n, &rep3, &css, RoundType::XRound, LogicalTarget::Zero).is_err());
    }

    #[test]
    fn single_corrupted_block_is_fully_corrected() {
        // Any X error of weight <= 2 on any one of three blocks.
        let css = steane();
        let rep3 = ClassicalCode::builtin("rep3").unwrap();
        for block in 0..3 {
            for e in (0u64..128).filter(|e| e.count_ones() <= 2) {
                let mut blocks = vec![PauliError::identity(7); 3];
                blocks[block] = PauliError::from_bits(7, e, 0);
                let rep = distill_round(&blocks, &rep3, &css, RoundType::XRound, LogicalTarget::Zero).unwrap();
                assert!(
                    css.in_stabilizer(&rep.survivors[0], LogicalTarget::Zero),
                    "block {block} e {e:07b}"
                );
            }
        }
    }

    #[test]
    fn z_round_mirrors_x_round_for_plus() {
        let css = steane();
        let rep3 = ClassicalCode::builtin("rep3").unwrap();
        let z = |s: &str| {
            let f: BinaryVector = s.parse().unwrap();
            PauliError::from_vectors(&BinaryVector::zeros(7), &f).unwrap()
        };
        let blocks = [z("1101000"), z("0010000"), z("0000011")];
        let rep = distill_round(&blocks, &rep3, &css, RoundType::ZRound, LogicalTarget::Plus).unwrap();
        assert_eq!(rep.records[0].z.unwrap().to_string(), "000|1");
        assert!(rep.survivors[0].is_identity());
    }

    #[test]
    fn interleaver_never_reunites_groupmates() {
        for k1 in 1..5 {
            for groups in 1..8 {
                let g = interleave(k1, groups);
                assert_eq!(g.len(), k1);
                check_interleaving(&g).unwrap();
            }
        }
        let bad = vec![vec![(0, 0), (0, 1)]];
        assert!(check_interleaving(&bad).is_err());
    }

    #[test]
    fn protocol_one_yield_and_clean_pool() {
        let cfg = DistillationConfig::new(
            steane(),
            ClassicalCode::builtin("hamming74").unwrap(),
            ClassicalCode::builtin("rep3").unwrap(),
            LogicalTarget::Zero,
        );
        let pool = vec![PauliError::identity(7); 2 * 21];
        let out = distill_protocol_i(&pool, &cfg).unwrap();
        assert_eq!(out.len(), 2 * 4);
        assert!(out.iter().all(PauliError::is_identity));
        assert!(distill_protocol_i(&pool[..20], &cfg).is_err());
    }

    #[test]
    fn protocol_two_clean_and_single_errors() {
        let css = steane();
        let outer = OuterCode::from_matrices(css.hz(), css.hx()).unwrap();
        assert_eq!((outer.m(), outer.k()), (7, 1));
        let clean = vec![PauliError::identity(7); 7];
        let rep = distill_protocol_ii(&clean, &outer, &css, LogicalTarget::Zero).unwrap();
        assert!(rep.survivors[0].is_identity());
        for block in 0..7 {
            for e in (1u64..128).filter(|e| e.count_ones() <= 2) {
                let mut blocks = clean.clone();
                blocks[block] = PauliError::from_bits(7, e, 0);
                let rep = distill_protocol_ii(&blocks, &outer, &css, LogicalTarget::Zero).unwrap();
                assert!(
                    css.in_stabilizer(&rep.survivors[0], LogicalTarget::Zero),
                    "block {block} e {e:07b}"
                );
            }
        }
    }

    #[test]
    fn steane_extraction_reads_syndromes() {
        let css = steane();
        let mut data = x_err("0010000");
        let mut plus = PauliError::identity(7);
        let mut zero = PauliError::identity(7);
        let (sx, sz) = steane_extraction(&mut data, &mut plus, &mut zero, &css).unwrap();
        assert_eq!((sx.to_string().as_str(), sz.to_string().as_str()), ("001", "000"));

        let mut data = x_err("0010000");
        let mut plus = x_err("1000000");
        let mut zero = PauliError::identity(7);
        let (sx, _) = steane_extraction(&mut data, &mut plus, &mut zero, &css).unwrap();
        assert_eq!(sx, css.syndrome_x(&"1010000".parse().unwrap()).unwrap());
    }

    #[test]
    fn ancilla_saving_recovers_single_block_syndromes() {
        let css = steane();
        let rep3 = ClassicalCode::builtin("rep3").unwrap();
        for block in 0..3 {
            for e in 0u64..128 {
                let mut data = vec![PauliError::identity(7); 3];
                data[block] = PauliError::from_bits(7, e, 0);
                let mut plus = vec![PauliError::identity(7); 2];
                let mut zero = vec![PauliError::identity(7); 2];
                let recs = ancilla_saving(&mut data, &mut plus, &mut zero, &rep3, &css).unwrap();
                for (i, rec) in recs.iter().enumerate() {
                    let truth = if i == block { css.syndrome_x_bits(e) } else { 0 };
                    assert_eq!(rec.x.unwrap().bits, truth);
                    assert_eq!(rec.z.unwrap().bits, 0);
                }
            }
        }
    }

    #[test]
    fn fast_saving_matches_frames() {
        let css = steane();
        let code = ClassicalCode::builtin("hamming74").unwrap();
        let errors: Vec<u64> = (0..7).map(|i| (i * 37 + 5) % 128).collect();
        let mut fast = vec![0; 7];
        saving_x_estimates(&errors, &code, &css, &mut fast);
        let mut data: Vec<_> = errors.iter().map(|&e| PauliError::from_bits(7, e, 0)).collect();
        let mut plus = vec![PauliError::identity(7); 3];
        let mut zero = vec![PauliError::identity(7); 3];
        let recs = ancilla_saving(&mut data, &mut plus, &mut zero, &code, &css).unwrap();
        let slow: Vec<u64> = recs.iter().map(|r| r.x.unwrap().bits).collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn ancilla_saving_checks_counts() {
        let css = steane();
        let rep3 = ClassicalCode::builtin("rep3").unwrap();
        let mut data = vec![PauliError::identity(7); 3];
        let mut plus = vec![PauliError::identity(7); 3];
        let mut zero = vec![PauliError::identity(7); 2];
        assert!(ancilla_saving(&mut data, &mut plus, &mut zero, &rep3, &css).is_err());
    }
}
