//! Pauli-frame simulation of stabilizer-state distillation with classical
//! codes, and of ancilla-saving syndrome extraction.
//!
//! The building blocks, bottom up:
//!
//! * [`gf2`]: bit-packed vectors and matrices over GF(2).
//! * [`classical`]: binary linear codes with coset-leader decoding.
//! * [`css`]: `[[n,1]]` CSS codes, standard form and encoder synthesis.
//! * [`frame`]: Pauli frames, circuits and depolarizing noise.
//! * [`protocols`]: distillation rounds, Steane extraction, ancilla saving.
//! * [`montecarlo`]: failure rates, channel fidelities, crossovers, thresholds.

pub mod catalog;
pub mod classical;
pub mod css;
mod error;
pub mod frame;
pub mod gf2;
pub mod montecarlo;
pub mod protocols;
pub mod trace;

pub use catalog::Catalog;
pub use classical::{ClassicalCode, SyndromeTable};
pub use css::{CssCode, CssEncoder, LogicalOperator, StandardFormCheck};
pub use error::{Error, Result};
pub use frame::{Basis, Circuit, Gate, LogicalTarget, NoiseModel, PauliError, RngStream};
pub use gf2::{BinaryMatrix, BinaryVector};
