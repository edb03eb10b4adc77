//! Run configuration: JSON file values merged under command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use qdistill::montecarlo::log_grid;
use serde::Deserialize;

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;

/// A `p` grid as written in a config file: a string in grid syntax or a
/// list of numbers.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Text(String),
    List(Vec<f64>),
}

/// A trial count as written in a config file: `1000000` or `"1e6"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CountSpec {
    Number(u64),
    Text(String),
}

/// Keys accepted in `--config` files. Every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub css: Option<String>,
    pub code1: Option<String>,
    pub code2: Option<String>,
    pub save: Option<String>,
    pub target: Option<String>,
    pub p: Option<GridSpec>,
    pub trials: Option<CountSpec>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("malformed config {}", path.display()))
    }
}

/// Parses `a:b:logN`, a comma-separated list, or a single value.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        bail!("p list is empty");
    }
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| anyhow!("invalid probability {s:?} in p grid {spec:?}"))
    };
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [lo, hi, count] = parts.as_slice() else {
            bail!("grid {spec:?} must look like a:b:logN");
        };
        let n = count
            .strip_prefix("log")
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .ok_or_else(|| anyhow!("grid {spec:?}: expected logN with N >= 1, got {count:?}"))?;
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if lo > hi {
            bail!("grid {spec:?}: lower end exceeds upper end");
        }
        validate_probabilities(&[lo, hi])?;
        log_grid(lo, hi, n)
    } else {
        spec.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(parse)
            .collect::<Result<Vec<_>>>()?
    };
    validate_probabilities(&values)?;
    Ok(values)
}

pub fn validate_probabilities(ps: &[f64]) -> Result<()> {
    if ps.is_empty() {
        bail!("p list is empty");
    }
    if let Some(p) = ps.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        bail!("p = {p} is outside (0, 1)");
    }
    Ok(())
}

/// Parses a positive count, allowing scientific notation such as `1e6`.
pub fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(n) = s.parse::<u64>() {
        if n == 0 {
            bail!("trials must be at least 1");
        }
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| anyhow!("invalid count {s:?}"))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64) {
        bail!("trials must be a positive integer, got {s:?}");
    }
    Ok(x as u64)
}

/// Resolved settings for one command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub css: String,
    pub code1: String,
    pub code2: String,
    pub save: Option<String>,
    pub target: qdistill::LogicalTarget,
    pub p: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

/// Flag values; `None` means the flag was not given.
#[derive(Clone, Debug, Default)]
pub struct FlagValues {
    pub css: Option<String>,
    pub code1: Option<String>,
    pub code2: Option<String>,
    pub save: Option<String>,
    pub target: Option<String>,
    pub p: Option<String>,
    pub trials: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Flags win over the file, the file over defaults. `needs_p` makes an
    /// empty grid an error.
    pub fn resolve(flags: FlagValues, file: &FileConfig, needs_p: bool) -> Result<Self> {
        let css = flags
            .css
            .or_else(|| file.css.clone())
            .unwrap_or_else(|| "steane".into());
        let code1 = flags
            .code1
            .or_else(|| file.code1.clone())
            .unwrap_or_else(|| "rep3".into());
        let code2 = flags
            .code2
            .or_else(|| file.code2.clone())
            .unwrap_or_else(|| code1.clone());
        let save = flags.save.or_else(|| file.save.clone());
        let target = flags
            .target
            .or_else(|| file.target.clone())
            .unwrap_or_else(|| "zero".into())
            .parse()
            .map_err(|e| anyhow!("{e}"))?;
        let p = match (flags.p, &file.p) {
            (Some(s), _) => parse_grid(&s)?,
            (None, Some(GridSpec::Text(s))) => parse_grid(s)?,
            (None, Some(GridSpec::List(v))) => {
                validate_probabilities(v)?;
                v.clone()
            }
            (None, None) if needs_p => bail!("p list is empty; pass --p"),
            (None, None) => Vec::new(),
        };
        let trials = match (flags.trials, &file.trials) {
            (Some(s), _) => parse_count(&s)?,
            (None, Some(CountSpec::Number(n))) if *n >= 1 => *n,
            (None, Some(CountSpec::Number(_))) => bail!("trials must be at least 1"),
            (None, Some(CountSpec::Text(s))) => parse_count(s)?,
            (None, None) => DEFAULT_TRIALS,
        };
        Ok(Self {
            css,
            code1,
            code2,
            save,
            target,
            p,
            trials,
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: flags.out.or_else(|| file.out.clone()),
        })
    }
}
