use qdistill::frame::{sample_depolarizing_2q, simulate_noisy_prep};
use qdistill::{CssCode, Gate, LogicalTarget, NoiseModel, PauliError, RngStream};
use rand::Rng;

const PAULI_1Q: [(u64, u64); 3] = [(1, 0), (0, 1), (1, 1)];

#[test]
fn two_qubit_marginal_matches_the_pauli_count() {
    // 12 of the 15 nonidentity two-qubit Paulis act on the first qubit.
    let p = 0.15;
    let mut rng = RngStream::new(11, 0).rng();
    let n = 400_000;
    let hits = (0..n)
        .filter(|_| {
            let ((x1, z1), _) = sample_depolarizing_2q(p, &mut rng);
            x1 || z1
        })
        .count();
    let rate = hits as f64 / n as f64;
    assert!((rate - 0.12).abs() < 0.003, "{rate}");
}

// Measured ratios reach 2.17 on qubit 0: the guide counts only faults at a
// qubit's own locations and misses Z errors copied back onto CNOT controls.
// The first-order test below pins the rates exactly.
#[test]
#[ignore = "(alpha + 1) p undercounts back-propagated errors; see per_qubit_rate_matches_first_order_propagation"]
fn per_qubit_rate_grows_with_cnot_count() {
    let code = CssCode::builtin("steane").unwrap();
    let circuit = code.encoding_circuit(LogicalTarget::Zero);
    let mut alpha = [0usize; 7];
    for g in circuit.gates() {
        if let Gate::Cnot { control, target } = *g {
            alpha[control] += 1;
            alpha[target] += 1;
        }
    }
    let p = 1e-3;
    let noise = NoiseModel::new(p).unwrap();
    let mut rng = RngStream::new(5, 0).rng();
    let samples = 1_000_000u32;
    let mut hits = [0u32; 7];
    for _ in 0..samples {
        let f = simulate_noisy_prep(&code, LogicalTarget::Zero, &noise, &mut rng);
        let touched = f.x_bits() | f.z_bits();
        for (q, h) in hits.iter_mut().enumerate() {
            *h += (touched >> q & 1) as u32;
        }
    }
    for q in 0..7 {
        let rate = hits[q] as f64 / samples as f64;
        let guide = (alpha[q] + 1) as f64 * p;
        assert!(rate > guide / 2.0 && rate < guide * 2.0, "qubit {q}: {rate} vs {guide}");
    }
}

/// Runs the Steane encoder with `faults[i]` injected after gate `i`.
fn run_with_faults(faults: &[PauliError]) -> PauliError {
    let code = CssCode::builtin("steane").unwrap();
    let circuit = code.encoding_circuit(LogicalTarget::Zero);
    let mut frame = PauliError::identity(7);
    for (g, fault) in circuit.gates().iter().zip(faults) {
        if let Gate::Cnot { control, target } = *g {
            frame.propagate_cnot(control, target).unwrap();
        }
        frame = frame.compose(fault).unwrap();
    }
    frame
}

#[test]
fn propagation_is_linear_in_the_fault_layers() {
    let len = CssCode::builtin("steane")
        .unwrap()
        .encoding_circuit(LogicalTarget::Zero)
        .gates()
        .len();
    let mut rng = RngStream::new(3, 0).rng();
    for _ in 0..200 {
        let mut layer = || -> Vec<PauliError> {
            (0..len)
                .map(|_| PauliError::from_bits(7, rng.random::<u64>(), rng.random::<u64>()))
                .collect()
        };
        let (a, b) = (layer(), layer());
        let both: Vec<PauliError> = a.iter().zip(&b).map(|(x, y)| x.compose(y).unwrap()).collect();
        assert_eq!(
            run_with_faults(&both),
            run_with_faults(&a).compose(&run_with_faults(&b)).unwrap()
        );
    }
}

/// Probability that qubit `q` ends up touched when exactly one location
/// faults, every other location staying clean.
fn first_order_rates(code: &CssCode, p: f64) -> [f64; 7] {
    let gates = code.encoding_circuit(LogicalTarget::Zero).gates().to_vec();
    let locations = gates
        .iter()
        .filter(|g| !matches!(g, Gate::MeasZ(_) | Gate::MeasX(_)))
        .count();
    let clean_others = (1.0 - p).powi(locations as i32 - 1);
    let mut rates = [0.0; 7];
    let mut add = |after: usize, x: u64, z: u64, prob: f64| {
        let mut f = PauliError::from_bits(7, x, z);
        for g in &gates[after + 1..] {
            if let Gate::Cnot { control, target } = *g {
                f.propagate_cnot(control, target).unwrap();
            }
        }
        let touched = f.x_bits() | f.z_bits();
        for (q, r) in rates.iter_mut().enumerate() {
            if touched >> q & 1 == 1 {
                *r += prob * clean_others;
            }
        }
    };
    for (i, g) in gates.iter().enumerate() {
        match *g {
            Gate::PrepZero(q) | Gate::PrepPlus(q) => {
                for (x, z) in PAULI_1Q {
                    add(i, x << q, z << q, p / 3.0);
                }
            }
            Gate::Cnot { control, target } => {
                for idx in 1u64..16 {
                    let (a, b) = (idx >> 2, idx & 3);
                    let pick = |pair: u64, qubit: usize| match pair {
                        0 => (0, 0),
                        _ => (
                            PAULI_1Q[pair as usize - 1].0 << qubit,
                            PAULI_1Q[pair as usize - 1].1 << qubit,
                        ),
                    };
                    let ((x1, z1), (x2, z2)) = (pick(a, control), pick(b, target));
                    add(i, x1 | x2, z1 | z2, p / 15.0);
                }
            }
            _ => {}
        }
    }
    rates
}

#[test]
fn per_qubit_rate_matches_first_order_propagation() {
    let code = CssCode::builtin("steane").unwrap();
    let p = 1e-3;
    let expected = first_order_rates(&code, p);
    let noise = NoiseModel::new(p).unwrap();
    let mut rng = RngStream::new(9, 0).rng();
    let samples = 1_000_000u32;
    let mut hits = [0u32; 7];
    for _ in 0..samples {
        let f = simulate_noisy_prep(&code, LogicalTarget::Zero, &noise, &mut rng);
        let touched = f.x_bits() | f.z_bits();
        for (q, h) in hits.iter_mut().enumerate() {
            *h += (touched >> q & 1) as u32;
        }
    }
    for q in 0..7 {
        let rate = hits[q] as f64 / samples as f64;
        let sigma = (expected[q] / samples as f64).sqrt();
        // Two-fault terms shift the rate by about rate * 18 p.
        let slack = 5.0 * sigma + expected[q] * 18.0 * p;
        assert!(
            (rate - expected[q]).abs() < slack,
            "qubit {q}: {rate} vs {}",
            expected[q]
        );
    }
}
