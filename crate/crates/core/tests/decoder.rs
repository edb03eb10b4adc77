use itertools::Itertools;
use qdistill::ClassicalCode;

const CODES: [&str; 4] = ["rep3", "rep5", "hamming74", "golay23"];

#[test]
fn low_weight_errors_decode_to_themselves() {
    for name in CODES {
        let code = ClassicalCode::builtin(name).unwrap();
        let mut checked = 0;
        for w in 0..=code.t() {
            for support in (0..code.m()).combinations(w) {
                let e = support.iter().fold(0u64, |acc, &q| acc | 1 << q);
                assert_eq!(code.decode_bits(code.syndrome_bits(e)), e, "{name}: {support:?}");
                checked += 1;
            }
        }
        assert!(checked > code.m(), "{name}");
    }
}

/// Smallest weight, then smallest sorted support, over every vector.
fn better(a: u64, b: u64) -> bool {
    let (wa, wb) = (a.count_ones(), b.count_ones());
    if wa != wb {
        return wa < wb;
    }
    let supp = |v: u64| (0..64).filter(|q| v >> q & 1 == 1).collect::<Vec<u32>>();
    supp(a) < supp(b)
}

#[test]
fn table_holds_the_coset_leaders() {
    for name in CODES {
        let code = ClassicalCode::builtin(name).unwrap();
        let r = code.r();
        let mut best: Vec<Option<u64>> = vec![None; 1 << r];
        for v in 0u64..1 << code.m() {
            let s = code.syndrome_bits(v) as usize;
            if best[s].is_none_or(|b| better(v, b)) {
                best[s] = Some(v);
            }
        }
        for (s, leader) in best.into_iter().enumerate() {
            let leader = leader.expect("every syndrome is reached");
            assert_eq!(code.decode_bits(s as u64), leader, "{name}: syndrome {s}");
        }
    }
}
