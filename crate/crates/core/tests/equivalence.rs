//! Ancilla saving and Protocol II against Protocol I round 1.

use itertools::Itertools;
use qdistill::protocols::{ancilla_saving, distill_protocol_ii, distill_round, OuterCode, RoundType};
use qdistill::{ClassicalCode, CssCode, LogicalTarget, PauliError};

fn x_patterns_up_to_weight_2(n: usize) -> Vec<u64> {
    (0..=2)
        .flat_map(|w| (0..n).combinations(w))
        .map(|s| s.iter().fold(0u64, |acc, &q| acc | 1 << q))
        .collect()
}

#[test]
fn saving_matches_round_one_for_single_block_errors() {
    let css = CssCode::builtin("steane").unwrap();
    let patterns = x_patterns_up_to_weight_2(7);
    assert_eq!(patterns.len(), 29);
    for name in ["rep3", "rep5", "hamming74"] {
        let code = ClassicalCode::builtin(name).unwrap();
        let (m, r) = (code.m(), code.r());
        for block in 0..m {
            for &e in &patterns {
                let mut data = vec![PauliError::identity(7); m];
                data[block] = PauliError::from_bits(7, e, 0);
                let round = distill_round(&data, &code, &css, RoundType::XRound, LogicalTarget::Zero).unwrap();
                let mut plus = vec![PauliError::identity(7); r];
                let mut zero = vec![PauliError::identity(7); r];
                let saved = ancilla_saving(&mut data, &mut plus, &mut zero, &code, &css).unwrap();
                for (i, (s, d)) in saved.iter().zip(&round.records).enumerate() {
                    let (s, d) = (s.x.unwrap(), d.x.unwrap());
                    assert_eq!(
                        (s.bits, s.len),
                        (d.bits, d.len),
                        "{name} block {block} e {e:07b}, record {i}"
                    );
                }
            }
        }
    }
}

fn protocol_ii_matches(outer: &OuterCode, code: &ClassicalCode, blocks: &[PauliError], css: &CssCode) {
    let round = distill_round(blocks, code, css, RoundType::XRound, LogicalTarget::Zero).unwrap();
    let report = distill_protocol_ii(blocks, outer, css, LogicalTarget::Zero).unwrap();
    for (a, b) in report.block_records.iter().zip(&round.records) {
        assert_eq!(
            a.x,
            b.x,
            "{} {:?}",
            code.name(),
            blocks.iter().map(|b| b.x_bits()).collect::<Vec<_>>()
        );
    }
}

#[test]
fn protocol_ii_from_hamming_matches_round_one() {
    // Every placement of arbitrary X errors on at most two of the seven blocks.
    let css = CssCode::builtin("steane").unwrap();
    let code = ClassicalCode::builtin("hamming74").unwrap();
    let outer = OuterCode::from_dual_containing(&code).unwrap();
    assert_eq!((outer.m(), outer.k()), (7, 1));
    for pair in (0..7).combinations(2) {
        for ea in 0u64..128 {
            for eb in 0u64..128 {
                let mut blocks = vec![PauliError::identity(7); 7];
                blocks[pair[0]] = PauliError::from_bits(7, ea, 0);
                blocks[pair[1]] = PauliError::from_bits(7, eb, 0);
                protocol_ii_matches(&outer, &code, &blocks, &css);
            }
        }
    }
}

#[test]
fn protocol_ii_x_only_matches_round_one_exhaustively() {
    let css = CssCode::builtin("steane").unwrap();
    let code = ClassicalCode::builtin("rep3").unwrap();
    let outer = OuterCode::x_only(&code).unwrap();
    for (a, b, c) in itertools::iproduct!(0u64..128, 0u64..128, 0u64..128) {
        let blocks = [a, b, c].map(|e| PauliError::from_bits(7, e, 0));
        protocol_ii_matches(&outer, &code, &blocks, &css);
    }
}

#[test]
fn hamming_is_rejected_only_when_not_dual_containing() {
    assert!(OuterCode::from_dual_containing(&ClassicalCode::builtin("rep3").unwrap()).is_err());
    assert!(OuterCode::from_dual_containing(&ClassicalCode::builtin("hamming74").unwrap()).is_ok());
}
