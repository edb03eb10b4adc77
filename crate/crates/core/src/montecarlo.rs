//! Estimators: post-distillation error rates, average channel fidelity with
//! and without ancilla saving, the exact fidelity oracle, crossover search
//! and threshold extraction.
//!
//! Trial `t` of every estimator draws from stream `t` of the run's seed, so
//! totals do not depend on scheduling and runs at different `p` with the
//! same seed use common random numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::ClassicalCode;
use crate::css::CssCode;
use crate::error::{Error, Result};
use crate::frame::{simulate_noisy_prep, LogicalTarget, NoiseModel, PauliError, RngStream};
use crate::gf2::parity;
use crate::protocols::{distill_protocol_i, saving_x_estimates, DistillationConfig};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// CSV header shared by every sweep.
pub const CSV_HEADER: &str = "p,trials,failures,rate,ci_low,ci_high";

/// Wilson score interval for `successes` out of `n` at the 95% level.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let phat = successes as f64 / n_f;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n_f;
    let centre = (phat + z2 / (2.0 * n_f)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// One row of a sweep.
///
/// `samples` is the denominator of `rate`: trials times the number of blocks
/// judged per trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub samples: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SweepPoint {
    /// A failure-rate point with a Wilson interval.
    pub fn failure_rate(p: f64, trials: u64, failures: u64, samples: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, samples);
        Self {
            p,
            trials,
            failures,
            samples,
            rate: if samples == 0 {
                0.0
            } else {
                failures as f64 / samples as f64
            },
            ci_low,
            ci_high,
        }
    }

    /// A success-rate point: `rate` is the fraction of samples that did not
    /// fail, and `failures` still counts the failures.
    pub fn success_rate(p: f64, trials: u64, failures: u64, samples: u64) -> Self {
        let (lo, hi) = wilson_interval(failures, samples);
        Self {
            p,
            trials,
            failures,
            samples,
            rate: if samples == 0 {
                1.0
            } else {
                1.0 - failures as f64 / samples as f64
            },
            ci_low: 1.0 - hi,
            ci_high: 1.0 - lo,
        }
    }

    /// A value known exactly.
    pub fn exact(p: f64, value: f64) -> Self {
        Self {
            p,
            trials: 0,
            failures: 0,
            samples: 0,
            rate: value,
            ci_low: value,
            ci_high: value,
        }
    }

    /// Binomial standard error of `rate`.
    pub fn std_error(&self) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        (self.rate * (1.0 - self.rate) / self.samples as f64).sqrt()
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.p, self.trials, self.failures, self.rate, self.ci_low, self.ci_high
        )
    }
}

/// What produced a sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub protocol: String,
    pub css: String,
    pub codes: Vec<String>,
    pub target: Option<LogicalTarget>,
    pub seed: u64,
    pub trials: u64,
    /// Blocks judged per trial.
    pub samples_per_trial: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&p.csv_row());
            out.push('\n');
        }
        out
    }

    /// Reads the six CSV columns back; `samples` is taken from `trials` and
    /// metadata is left empty.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header {CSV_HEADER:?}, found {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        let mut points = Vec::new();
        for line in lines {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 6 {
                return Err(Error::Parse(format!("expected 6 columns in {line:?}")));
            }
            let f = |i: usize| {
                cols[i]
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {:?} in {line:?}", cols[i])))
            };
            let u = |i: usize| {
                cols[i]
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad count {:?} in {line:?}", cols[i])))
            };
            points.push(SweepPoint {
                p: f(0)?,
                trials: u(1)?,
                failures: u(2)?,
                samples: u(1)?,
                rate: f(3)?,
                ci_low: f(4)?,
                ci_high: f(5)?,
            });
        }
        Ok(Self {
            points,
            metadata: SweepMetadata::default(),
        })
    }

    /// Path of the JSON metadata written next to `csv_path`.
    pub fn sidecar_path(csv_path: &Path) -> PathBuf {
        csv_path.with_extension("json")
    }

    /// Writes the CSV and its JSON sidecar.
    pub fn write(&self, csv_path: &Path) -> Result<()> {
        fs::write(csv_path, self.to_csv())?;
        let sidecar = serde_json::json!({
            "metadata": self.metadata,
            "points": self.points,
        });
        let mut text = serde_json::to_string_pretty(&sidecar)?;
        text.push('\n');
        fs::write(Self::sidecar_path(csv_path), text)?;
        Ok(())
    }
}

/// A residual frame fails unless it stabilizes the target state.
pub fn is_failure(css: &CssCode, residual: &PauliError, target: LogicalTarget) -> bool {
    !css.in_stabilizer(residual, target)
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::Protocol("at least one trial is required".into()));
    }
    Ok(())
}

/// Sums `f` over trials, each with its own stream of `seed`.
fn sum_over_trials<S, I, F>(trials: u64, seed: u64, init: I, f: F) -> u64
where
    S: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &mut ChaCha8Rng) -> u64 + Sync + Send,
{
    let base = RngStream::new(seed, 0).rng();
    (0..trials)
        .into_par_iter()
        .map_init(
            || (init(), base.clone()),
            |(scratch, rng), t| {
                *rng = base.clone();
                rng.set_stream(t);
                f(scratch, rng)
            },
        )
        .sum()
}

/// Failure rate of Protocol I survivors at noise `p`.
pub fn estimate_distillation_rate(cfg: &DistillationConfig, p: f64, trials: u64, seed: u64) -> Result<SweepPoint> {
    check_trials(trials)?;
    let noise = NoiseModel::new(p)?;
    let blocks = cfg.blocks_per_run();
    let survivors = cfg.survivors_per_run() as u64;
    // Surface configuration errors before fanning out.
    distill_protocol_i(&vec![PauliError::identity(cfg.css.n()); blocks], cfg)?;
    let failures = sum_over_trials(
        trials,
        seed,
        || Vec::with_capacity(blocks),
        |pool: &mut Vec<PauliError>, rng| {
            pool.clear();
            pool.extend((0..blocks).map(|_| simulate_noisy_prep(&cfg.css, cfg.target, &noise, rng)));
            distill_protocol_i(pool, cfg)
                .expect("configuration validated above")
                .iter()
                .filter(|s| is_failure(&cfg.css, s, cfg.target))
                .count() as u64
        },
    );
    Ok(SweepPoint::failure_rate(p, trials, failures, trials * survivors))
}

/// Failure rate of raw noisy preparations.
pub fn no_distillation_reference(
    css: &CssCode,
    target: LogicalTarget,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<SweepPoint> {
    check_trials(trials)?;
    let noise = NoiseModel::new(p)?;
    let failures = sum_over_trials(
        trials,
        seed,
        || (),
        |_, rng| is_failure(css, &simulate_noisy_prep(css, target, &noise, rng), target) as u64,
    );
    Ok(SweepPoint::failure_rate(p, trials, failures, trials))
}

/// Independent X flips with probability `p` on `n` qubits.
#[inline]
fn sample_x_errors<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> u64 {
    let mut e = 0u64;
    for q in 0..n {
        let u: f64 = rng.random();
        e |= ((u < p) as u64) << q;
    }
    e
}

/// Average channel fidelity under the X-flip channel with strength `p`.
///
/// With `saving` set, the syndromes of `m` blocks come from ancilla saving
/// with clean ancillas; otherwise each block's syndrome is exact. The rate
/// of the returned point is the fidelity and `failures` counts uncorrected
/// blocks.
pub fn estimate_avg_channel_fidelity(
    css: &CssCode,
    saving: Option<&ClassicalCode>,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<SweepPoint> {
    check_trials(trials)?;
    NoiseModel::new(p)?;
    let n = css.n();
    let m = saving.map_or(1, ClassicalCode::m);
    let failures = match saving {
        None => sum_over_trials(
            trials,
            seed,
            || (),
            |_, rng| !css.x_error_correctable(sample_x_errors(n, p, rng)) as u64,
        ),
        Some(code) => sum_over_trials(
            trials,
            seed,
            || (vec![0u64; m], vec![0u64; m]),
            |(errors, est), rng| {
                for e in errors.iter_mut() {
                    *e = sample_x_errors(n, p, rng);
                }
                saving_x_estimates(errors, code, css, est);
                errors
                    .iter()
                    .zip(est.iter())
                    .filter(|&(&e, &s)| {
                        let residual = e ^ css.x_correction(s);
                        css.syndrome_x_bits(residual) != 0 || parity(residual & css.logical_z_mask())
                    })
                    .count() as u64
            },
        ),
    };
    Ok(SweepPoint::success_rate(p, trials, failures, trials * m as u64))
}

/// Number of correctable X patterns of each weight.
///
/// Weights above `complete_up_to` were not enumerated; their probability
/// mass bounds the error of [`CorrectableEnumerator::fidelity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectableEnumerator {
    n: usize,
    counts: Vec<u64>,
    complete_up_to: usize,
}

/// Full enumeration is used up to this many qubits.
pub const MAX_EXHAUSTIVE_QUBITS: usize = 24;

impl CorrectableEnumerator {
    /// Enumerates every pattern when `max_weight` is `None` (at most
    /// [`MAX_EXHAUSTIVE_QUBITS`] qubits), otherwise only patterns up to that
    /// weight.
    pub fn new(css: &CssCode, max_weight: Option<usize>) -> Result<Self> {
        let n = css.n();
        let mut counts = vec![0u64; n + 1];
        match max_weight {
            None if n > MAX_EXHAUSTIVE_QUBITS => Err(Error::TooLarge(format!(
                "exhaustive enumeration over 2^{n} patterns; give a weight cutoff"
            ))),
            None => {
                for e in 0u64..(1u64 << n) {
                    if css.x_error_correctable(e) {
                        counts[e.count_ones() as usize] += 1;
                    }
                }
                Ok(Self {
                    n,
                    counts,
                    complete_up_to: n,
                })
            }
            Some(w_max) => {
                let w_max = w_max.min(n);
                for (w, slot) in counts.iter_mut().enumerate().take(w_max + 1) {
                    *slot = itertools::Itertools::combinations(0..n, w)
                        .map(|s| s.iter().fold(0u64, |a, &q| a | 1 << q))
                        .filter(|&e| css.x_error_correctable(e))
                        .count() as u64;
                }
                Ok(Self {
                    n,
                    counts,
                    complete_up_to: w_max,
                })
            }
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn complete_up_to(&self) -> usize {
        self.complete_up_to
    }

    /// Lower bound on the channel fidelity; exact when every weight was
    /// enumerated.
    pub fn fidelity(&self, p: f64) -> f64 {
        let q = 1.0 - p;
        self.counts
            .iter()
            .enumerate()
            .take(self.complete_up_to + 1)
            .map(|(w, &c)| c as f64 * p.powi(w as i32) * q.powi((self.n - w) as i32))
            .sum()
    }

    /// Probability of a pattern heavier than the enumerated weights.
    pub fn tail_bound(&self, p: f64) -> f64 {
        let q = 1.0 - p;
        let mut binom = 1.0f64;
        let mut tail = 0.0;
        for w in 0..=self.n {
            if w > self.complete_up_to {
                tail += binom * p.powi(w as i32) * q.powi((self.n - w) as i32);
            }
            binom = binom * (self.n - w) as f64 / (w + 1) as f64;
        }
        tail
    }
}

/// Exact channel fidelity of `css` under the X-flip channel.
pub fn brute_force_channel_fidelity(css: &CssCode, p: f64) -> Result<f64> {
    NoiseModel::new(p)?;
    Ok(CorrectableEnumerator::new(css, None)?.fidelity(p))
}

/// Comparison of the original scheme at `p` with ancilla saving at the
/// effective rate `r p / m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GainPoint {
    pub p: f64,
    pub effective_p: f64,
    pub original: f64,
    pub combined: SweepPoint,
    /// `combined.rate - original`.
    pub gain: f64,
    pub std_error: f64,
}

impl GainPoint {
    /// Whether the gain is positive beyond `z` standard errors.
    pub fn significant(&self, z: f64) -> bool {
        self.gain > z * self.std_error
    }
}

/// Effective error rate `r p / m` of an ancilla-saving scheme.
pub fn effective_rate(code: &ClassicalCode, p: f64) -> f64 {
    code.r() as f64 * p / code.m() as f64
}

/// Fidelity gain of ancilla saving at each `p`.
pub fn gain_scan(
    css: &CssCode,
    code: &ClassicalCode,
    oracle: &CorrectableEnumerator,
    ps: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<GainPoint>> {
    ps.iter()
        .map(|&p| gain_at(css, code, oracle, p, trials, seed))
        .collect()
}

fn gain_at(
    css: &CssCode,
    code: &ClassicalCode,
    oracle: &CorrectableEnumerator,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<GainPoint> {
    let effective_p = effective_rate(code, p);
    let combined = estimate_avg_channel_fidelity(css, Some(code), effective_p, trials, seed)?;
    let original = oracle.fidelity(p);
    Ok(GainPoint {
        p,
        effective_p,
        original,
        gain: combined.rate - original,
        std_error: combined.std_error(),
        combined,
    })
}

/// Where a bisection stopped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crossover {
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
    pub evaluations: usize,
}

/// Bisects a sign change of `f` on `[lo, hi]` until the bracket is narrower
/// than `tol`.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Crossover>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    let mut evaluations = 2;
    if f_lo == 0.0 && f_hi == 0.0 {
        return Err(Error::NoBracket(format!(
            "difference vanishes at both ends of [{lo}, {hi}]; the compared curves coincide"
        )));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket(format!(
            "f({lo}) = {f_lo} and f({hi}) = {f_hi} have the same sign"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        evaluations += 1;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Crossover {
        p: 0.5 * (lo + hi),
        lo,
        hi,
        evaluations,
    })
}

/// The `p` at which ancilla saving at its effective rate stops beating the
/// original scheme, by bisection with common random numbers.
pub fn find_crossover(
    css: &CssCode,
    code: &ClassicalCode,
    p_range: (f64, f64),
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<Crossover> {
    let oracle = CorrectableEnumerator::new(css, None)?;
    bisect(
        |p| Ok(gain_at(css, code, &oracle, p, trials, seed)?.gain),
        p_range.0,
        p_range.1,
        tol,
    )
}

/// A threshold estimate with the range implied by the curve's interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Threshold {
    pub p: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

/// First upward crossing of `curve` over `reference`, interpolated linearly
/// in log-log coordinates. Both sweeps must share their `p` grid.
pub fn estimate_threshold(curve: &SweepResult, reference: &SweepResult) -> Result<Threshold> {
    if curve.points.len() != reference.points.len()
        || curve
            .points
            .iter()
            .zip(&reference.points)
            .any(|(a, b)| (a.p - b.p).abs() > 1e-12 * a.p.abs().max(1.0))
    {
        return Err(Error::DimensionMismatch(
            "curve and reference use different p grids".into(),
        ));
    }
    let pick = |f: fn(&SweepPoint) -> f64| -> Option<f64> {
        let pts: Vec<(f64, f64, f64)> = curve
            .points
            .iter()
            .zip(&reference.points)
            .map(|(c, r)| (c.p, f(c), r.rate))
            .collect();
        log_log_crossing(&pts)
    };
    let p =
        pick(|c| c.rate).ok_or_else(|| Error::NoBracket("distillation curve never crosses the reference".into()))?;
    Ok(Threshold {
        p,
        // A higher curve crosses earlier.
        ci_low: pick(|c| c.ci_high),
        ci_high: pick(|c| c.ci_low),
    })
}

/// First `p` where `ln(a) - ln(b)` turns from negative to non-negative, given
/// `(p, a, b)` triples in increasing `p`. Points with a zero value are
/// skipped.
pub fn log_log_crossing(points: &[(f64, f64, f64)]) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(p, a, b)| p > 0.0 && a > 0.0 && b > 0.0)
        .map(|&(p, a, b)| (p.ln(), a.ln() - b.ln()))
        .collect();
    usable.windows(2).find_map(|w| {
        let ((x0, d0), (x1, d1)) = (w[0], w[1]);
        (d0 < 0.0 && d1 >= 0.0).then(|| (x0 + (x1 - x0) * (-d0) / (d1 - d0)).exp())
    })
}

/// Least-squares slope of `ln(rate)` against `ln(p)` over points with a
/// positive rate. `None` with fewer than two such points.
pub fn log_log_slope(points: &[SweepPoint]) -> Option<f64> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|pt| pt.p > 0.0 && pt.rate > 0.0)
        .map(|pt| (pt.p.ln(), pt.rate.ln()))
        .collect();
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|v| v.0).sum::<f64>() / n;
    let my = xy.iter().map(|v| v.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|v| (v.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|v| (v.0 - mx) * (v.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Renders points as an aligned text table, for logs.
pub fn describe(points: &[SweepPoint]) -> String {
    let mut out = String::new();
    for pt in points {
        let _ = writeln!(
            out,
            "p={:<12.6e} rate={:<12.6e} [{:.6e}, {:.6e}] ({} / {})",
            pt.p, pt.rate, pt.ci_low, pt.ci_high, pt.failures, pt.samples
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steane() -> CssCode {
        CssCode::builtin("steane").unwrap()
    }

    #[test]
    fn wilson_contains_estimate() {
        for &(k, n) in &[(0u64, 10u64), (3, 10), (10, 10), (1, 1_000_000)] {
            let (lo, hi) = wilson_interval(k, n);
            let phat = k as f64 / n as f64;
            assert!(lo <= phat && phat <= hi, "{k}/{n}");
        }
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn csv_round_trip_and_header() {
        let sweep = SweepResult {
            points: vec![
                SweepPoint::failure_rate(0.01, 100, 3, 100),
                SweepPoint::exact(0.02, 0.5),
            ],
            metadata: SweepMetadata::default(),
        };
        let csv = sweep.to_csv();
        assert!(csv.starts_with("p,trials,failures,rate,ci_low,ci_high\n"));
        let back = SweepResult::from_csv(&csv).unwrap();
        assert_eq!(back.points.len(), 2);
        assert_eq!(back.points[0].rate, 0.03);
        assert!(SweepResult::from_csv("a,b\n").is_err());
    }

    #[test]
    fn zero_noise_gives_zero_rates() {
        let css = steane();
        let rep3 = ClassicalCode::builtin("rep3").unwrap();
        let cfg = DistillationConfig::new(css.clone(), rep3.clone(), rep3.clone(), LogicalTarget::Zero);
        assert_eq!(estimate_distillation_rate(&cfg, 0.0, 100, 1).unwrap().rate, 0.0);
        assert_eq!(
            no_distillation_reference(&css, LogicalTarget::Zero, 0.0, 100, 1)
                .unwrap()
                .rate,
            0.0
        );
        assert_eq!(
            estimate_avg_channel_fidelity(&css, None, 0.0, 100, 1).unwrap().rate,
            1.0
        );
        assert_eq!(
            estimate_avg_channel_fidelity(&css, Some(&rep3), 0.0, 100, 1)
                .unwrap()
                .rate,
            1.0
        );
        assert_eq!(brute_force_channel_fidelity(&css, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let css = steane();
        assert!(no_distillation_reference(&css, LogicalTarget::Zero, 0.1, 0, 1).is_err());
    }

    #[test]
    fn reference_is_monotone_in_p() {
        let css = steane();
        let rates: Vec<f64> = [0.001, 0.005, 0.02]
            .iter()
            .map(|&p| {
                no_distillation_reference(&css, LogicalTarget::Zero, p, 20_000, 5)
                    .unwrap()
                    .rate
            })
            .collect();
        assert!(rates[0] <= rates[1] && rates[1] <= rates[2], "{rates:?}");
    }

    #[test]
    fn steane_oracle_closed_form() {
        // Each of the 8 syndromes has 8 correctable patterns: its leader
        // times each of the 8 X stabilizers.
        let css = steane();
        let oracle = CorrectableEnumerator::new(&css, None).unwrap();
        let total: u64 = oracle.counts().iter().sum();
        assert_eq!(total, 8 * 8);
        assert_eq!(&oracle.counts()[..2], &[1, 7]);
        let p: f64 = 0.01;
        let independent: f64 = (0..=7)
            .map(|w| oracle.counts()[w] as f64 * p.powi(w as i32) * (1.0 - p).powi(7 - w as i32))
            .sum();
        assert!((oracle.fidelity(p) - independent).abs() < 1e-15);
        assert!((oracle.fidelity(p) - 0.998).abs() < 5e-4);
    }

    #[test]
    fn truncated_oracle_brackets_exact_value() {
        let css = steane();
        let exact = brute_force_channel_fidelity(&css, 0.05).unwrap();
        let cut = CorrectableEnumerator::new(&css, Some(2)).unwrap();
        let lower = cut.fidelity(0.05);
        assert!(lower <= exact && exact <= lower + cut.tail_bound(0.05) + 1e-15);
    }

    #[test]
    fn fidelity_monte_carlo_matches_oracle() {
        let css = steane();
        for &p in &[0.01, 0.05] {
            let pt = estimate_avg_channel_fidelity(&css, None, p, 100_000, 9).unwrap();
            let exact = brute_force_channel_fidelity(&css, p).unwrap();
            let se = (exact * (1.0 - exact) / 100_000.0).sqrt();
            assert!((pt.rate - exact).abs() < 4.0 * se, "p={p}: {} vs {exact}", pt.rate);
        }
    }

    #[test]
    fn estimators_are_reproducible() {
        let css = steane();
        let rep3 = ClassicalCode::builtin("rep3").unwrap();
        let a = estimate_avg_channel_fidelity(&css, Some(&rep3), 0.02, 5_000, 77).unwrap();
        let b = estimate_avg_channel_fidelity(&css, Some(&rep3), 0.02, 5_000, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bisect_finds_root_and_flags_degenerate_cases() {
        let c = bisect(|x| Ok(x - 0.3), 0.0, 1.0, 1e-9).unwrap();
        assert!((c.p - 0.3).abs() < 1e-8);
        assert!(matches!(bisect(|_| Ok(0.0), 0.0, 1.0, 1e-3), Err(Error::NoBracket(_))));
        assert!(matches!(
            bisect(|x| Ok(x + 1.0), 0.0, 1.0, 1e-3),
            Err(Error::NoBracket(_))
        ));
    }

    #[test]
    fn threshold_of_synthetic_curves() {
        let ps = log_grid(1e-3, 1e-1, 9);
        let curve = SweepResult {
            points: ps.iter().map(|&p| SweepPoint::exact(p, 100.0 * p * p)).collect(),
            metadata: SweepMetadata::default(),
        };
        let reference = SweepResult {
            points: ps.iter().map(|&p| SweepPoint::exact(p, p)).collect(),
            metadata: SweepMetadata::default(),
        };
        let th = estimate_threshold(&curve, &reference).unwrap();
        assert!((th.p - 0.01).abs() < 1e-12, "{}", th.p);
        let slope = log_log_slope(&curve.points).unwrap();
        assert!((slope - 2.0).abs() < 1e-9);
        assert!(estimate_threshold(&reference, &reference).is_err());
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = log_grid(1e-3, 1e-2, 8);
        assert_eq!(g.len(), 8);
        assert_eq!((g[0], g[7]), (1e-3, 1e-2));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
