//! Shared fixtures for the throughput benchmarks.

use qdistill::frame::simulate_noisy_prep;
use qdistill::protocols::DistillationConfig;
use qdistill::{ClassicalCode, CssCode, LogicalTarget, NoiseModel, PauliError, RngStream};

/// Steane `|0>_L` distillation with the same classical code in both rounds.
pub fn steane_config(code: &str) -> DistillationConfig {
    let css = CssCode::builtin("steane").expect("built-in CSS code");
    let c = ClassicalCode::builtin(code).expect("built-in classical code");
    DistillationConfig::new(css, c.clone(), c, LogicalTarget::Zero)
}

/// `count` noisy encodings of `target`, reproducible from `seed`.
pub fn noisy_blocks(css: &CssCode, target: LogicalTarget, p: f64, count: usize, seed: u64) -> Vec<PauliError> {
    let noise = NoiseModel::new(p).expect("valid p");
    let mut rng = RngStream::new(seed, 0).rng();
    (0..count)
        .map(|_| simulate_noisy_prep(css, target, &noise, &mut rng))
        .collect()
}
