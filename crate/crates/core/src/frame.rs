//! Pauli-frame tracking for CNOT-only circuits under depolarizing noise.
//!
//! A frame is a pair of X and Z masks over at most 64 qubits; phases are
//! dropped. A CNOT copies X from control to target and Z from target to
//! control.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::css::{CssCode, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::gf2::BinaryVector;

/// Which encoded stabilizer state a block is meant to hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogicalTarget {
    Zero,
    Plus,
}

impl fmt::Display for LogicalTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogicalTarget::Zero => "zero",
            LogicalTarget::Plus => "plus",
        })
    }
}

impl FromStr for LogicalTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" | "0" => Ok(LogicalTarget::Zero),
            "plus" | "+" => Ok(LogicalTarget::Plus),
            _ => Err(Error::Parse(format!("unknown target {s:?}"))),
        }
    }
}

/// Measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

/// An n-qubit Pauli operator up to phase: `X^e Z^f`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliError {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliError {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self { n, x: 0, z: 0 }
    }

    /// Bits above `n` are discarded.
    pub fn from_bits(n: usize, x: u64, z: u64) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        let mask = low_mask(n);
        Self {
            n,
            x: x & mask,
            z: z & mask,
        }
    }

    pub fn from_vectors(e: &BinaryVector, f: &BinaryVector) -> Result<Self> {
        if e.len() != f.len() {
            return Err(Error::DimensionMismatch(format!(
                "X part has {} bits, Z part {}",
                e.len(),
                f.len()
            )));
        }
        Ok(Self {
            n: e.len(),
            x: e.to_u64()?,
            z: f.to_u64()?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The X part `e`.
    pub fn e(&self) -> BinaryVector {
        BinaryVector::from_u64(self.x, self.n)
    }

    /// The Z part `f`.
    pub fn f(&self) -> BinaryVector {
        BinaryVector::from_u64(self.z, self.n)
    }

    #[inline]
    pub fn x_bits(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    #[inline]
    pub fn apply_x(&mut self, mask: u64) {
        self.x ^= mask;
    }

    #[inline]
    pub fn apply_z(&mut self, mask: u64) {
        self.z ^= mask;
    }

    /// Product with `other`, ignoring phase.
    pub fn compose(&self, other: &PauliError) -> Result<PauliError> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{} vs {} qubits", self.n, other.n)));
        }
        Ok(Self {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        })
    }

    /// Conjugates the frame by `CNOT(control, target)`.
    pub fn propagate_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        if control >= self.n || target >= self.n {
            return Err(Error::IndexOutOfRange(format!(
                "CX {control} {target} on {} qubits",
                self.n
            )));
        }
        if control == target {
            return Err(Error::InvalidCircuit(format!("CX {control} {target}")));
        }
        self.cnot_unchecked(control, target);
        Ok(())
    }

    #[inline]
    pub(crate) fn cnot_unchecked(&mut self, control: usize, target: usize) {
        self.x ^= ((self.x >> control) & 1) << target;
        self.z ^= ((self.z >> target) & 1) << control;
    }

    /// Letters `I`, `X`, `Y`, `Z` per qubit.
    pub fn pauli_string(&self) -> String {
        (0..self.n)
            .map(|q| match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (1, 1) => 'Y',
                _ => 'Z',
            })
            .collect()
    }
}

impl fmt::Display for PauliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pauli_string())
    }
}

impl fmt::Debug for PauliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliError({})", self.pauli_string())
    }
}

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// One circuit instruction. Qubits are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    PrepZero(usize),
    PrepPlus(usize),
    Cnot { control: usize, target: usize },
    MeasZ(usize),
    MeasX(usize),
}

impl Gate {
    fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::PrepZero(q) | Gate::PrepPlus(q) | Gate::MeasZ(q) | Gate::MeasX(q) => (q, None),
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::PrepZero(q) => write!(f, "P0 {q}"),
            Gate::PrepPlus(q) => write!(f, "P+ {q}"),
            Gate::Cnot { control, target } => write!(f, "CX {control} {target}"),
            Gate::MeasZ(q) => write!(f, "MZ {q}"),
            Gate::MeasX(q) => write!(f, "MX {q}"),
        }
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad qubit index {s:?} in {line:?}")))
        };
        match parts.as_slice() {
            ["P0", q] => Ok(Gate::PrepZero(idx(q)?)),
            ["P+", q] => Ok(Gate::PrepPlus(idx(q)?)),
            ["MZ", q] => Ok(Gate::MeasZ(idx(q)?)),
            ["MX", q] => Ok(Gate::MeasX(idx(q)?)),
            ["CX", c, t] => Ok(Gate::Cnot {
                control: idx(c)?,
                target: idx(t)?,
            }),
            _ => Err(Error::Parse(format!("unrecognised instruction {line:?}"))),
        }
    }
}

/// A validated gate list on `n` qubits.
///
/// The text form is one instruction per line after a `# qubits n` header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooLarge(format!("{n} qubits")));
        }
        let mut measured = vec![false; n];
        for g in &gates {
            let (a, b) = g.qubits();
            for q in std::iter::once(a).chain(b) {
                if q >= n {
                    return Err(Error::IndexOutOfRange(format!("{g} on {n} qubits")));
                }
                if measured[q] {
                    return Err(Error::InvalidCircuit(format!("{g} acts on measured qubit {q}")));
                }
            }
            match *g {
                Gate::Cnot { control, target } if control == target => {
                    return Err(Error::InvalidCircuit(format!("{g}")));
                }
                Gate::MeasZ(q) | Gate::MeasX(q) => measured[q] = true,
                _ => {}
            }
        }
        Ok(Self { n, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits {}\n", self.n);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the text form. Blank lines and other `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut gates = Vec::new();
        for line in text.lines().map(str::trim) {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(count) = rest.trim().strip_prefix("qubits") {
                    let count = count.trim();
                    n = Some(
                        count
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad qubit count {count:?}")))?,
                    );
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            gates.push(line.parse()?);
        }
        let n = n.ok_or_else(|| Error::Parse("missing '# qubits n' header".into()))?;
        Self::new(n, gates)
    }

    /// Runs the circuit on a clean frame with noise after every preparation
    /// and every CNOT. Measurements do not alter the frame.
    pub fn run_noisy<R: Rng + ?Sized>(&self, noise: &NoiseModel, rng: &mut R) -> PauliError {
        let mut frame = PauliError::identity(self.n);
        let p = noise.p();
        for g in &self.gates {
            match *g {
                Gate::PrepZero(q) | Gate::PrepPlus(q) => {
                    let (x, z) = sample_depolarizing_1q(p, rng);
                    frame.x ^= (x as u64) << q;
                    frame.z ^= (z as u64) << q;
                }
                Gate::Cnot { control, target } => {
                    frame.cnot_unchecked(control, target);
                    let ((x1, z1), (x2, z2)) = sample_depolarizing_2q(p, rng);
                    frame.x ^= ((x1 as u64) << control) | ((x2 as u64) << target);
                    frame.z ^= ((z1 as u64) << control) | ((z2 as u64) << target);
                }
                Gate::MeasZ(_) | Gate::MeasX(_) => {}
            }
        }
        frame
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Depolarizing strength shared by all locations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    p: f64,
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// A reproducible random stream: one seed, one stream index per work item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// With probability `p` one of X, Y, Z uniformly, as `(x, z)` flags.
///
/// A single uniform draw decides both whether and which error occurs, so
/// runs at different `p` with the same stream are coupled.
#[inline]
pub fn sample_depolarizing_1q<R: Rng + ?Sized>(p: f64, rng: &mut R) -> (bool, bool) {
    let u: f64 = rng.random();
    if u >= p {
        return (false, false);
    }
    match ((u / p) * 3.0) as usize {
        0 => (true, false),
        1 => (true, true),
        _ => (false, true),
    }
}

/// With probability `p` one of the 15 non-identity two-qubit Paulis uniformly.
#[inline]
pub fn sample_depolarizing_2q<R: Rng + ?Sized>(p: f64, rng: &mut R) -> ((bool, bool), (bool, bool)) {
    let u: f64 = rng.random();
    if u >= p {
        return ((false, false), (false, false));
    }
    let idx = (((u / p) * 15.0) as usize).min(14) + 1;
    ((idx & 8 != 0, idx & 4 != 0), (idx & 2 != 0, idx & 1 != 0))
}

/// Residual frame of one noisy encoding of `target`.
pub fn simulate_noisy_prep<R: Rng + ?Sized>(
    code: &CssCode,
    target: LogicalTarget,
    noise: &NoiseModel,
    rng: &mut R,
) -> PauliError {
    code.encoding_circuit(target).run_noisy(noise, rng)
}

/// Noiseless transversal CNOT from block `control` to block `target`.
pub fn transversal_block_cnot(blocks: &mut [PauliError], control: usize, target: usize) -> Result<()> {
    if control >= blocks.len() || target >= blocks.len() {
        return Err(Error::IndexOutOfRange(format!(
            "block CX {control} {target} over {} blocks",
            blocks.len()
        )));
    }
    if control == target {
        return Err(Error::InvalidCircuit(format!("block CX {control} {target}")));
    }
    let (c, t) = (blocks[control], blocks[target]);
    if c.n != t.n {
        return Err(Error::DimensionMismatch(format!("{} vs {} qubits", c.n, t.n)));
    }
    blocks[target].x ^= c.x;
    blocks[control].z ^= t.z;
    Ok(())
}

/// Syndrome and logical parity revealed by measuring every qubit of a block.
///
/// A Z-basis readout sees the X part: syndrome `e * H_Z^T` and parity with
/// `Zbar`. An X-basis readout sees the Z part against `H_X` and `Xbar`.
pub fn frame_measurement_parities(err: &PauliError, code: &CssCode, basis: Basis) -> (BinaryVector, bool) {
    let (s, l) = measured_parity_bits(err, code, basis);
    let r = match basis {
        Basis::Z => code.r_z(),
        Basis::X => code.r_x(),
    };
    (BinaryVector::from_u64(s, r), l)
}

#[inline]
pub(crate) fn measured_parity_bits(err: &PauliError, code: &CssCode, basis: Basis) -> (u64, bool) {
    match basis {
        Basis::Z => (
            code.syndrome_x_bits(err.x),
            crate::gf2::parity(err.x & code.logical_z_mask()),
        ),
        Basis::X => (
            code.syndrome_z_bits(err.z),
            crate::gf2::parity(err.z & code.logical_x_mask()),
        ),
    }
}
