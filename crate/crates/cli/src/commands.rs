use std::fs;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use qdistill::montecarlo::{
    estimate_avg_channel_fidelity, estimate_distillation_rate, estimate_threshold, find_crossover, gain_scan,
    log_log_slope, no_distillation_reference, CorrectableEnumerator, SweepMetadata, SweepPoint, SweepResult,
    MAX_EXHAUSTIVE_QUBITS, Z95,
};
use qdistill::protocols::DistillationConfig;
use qdistill::{trace, Catalog, ClassicalCode, CssCode, Error};
use serde_json::json;

use crate::config::{FileConfig, FlagValues, RunConfig};
use crate::{Cli, Command, SweepArgs};

/// An error with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn config(e: impl std::fmt::Display) -> Self {
        Self {
            code: 1,
            error: anyhow!("{e}"),
        }
    }

    pub fn runtime(e: impl std::fmt::Display) -> Self {
        Self {
            code: 2,
            error: anyhow!("{e}"),
        }
    }
}

/// Library errors from bad input are configuration errors; the rest are
/// runtime errors.
impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) | Error::NoBracket(_) | Error::Protocol(_) => Failure::runtime(e),
            _ => Failure::config(e),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn config_err<T>(r: anyhow::Result<T>) -> Outcome<T> {
    r.map_err(|e| Failure { code: 1, error: e })
}

struct Context {
    catalog: Catalog,
    file: FileConfig,
}

impl Context {
    fn resolve(&self, sweep: Option<&SweepArgs>, extra: FlagValues, needs_p: bool) -> Outcome<RunConfig> {
        let mut flags = extra;
        if let Some(s) = sweep {
            flags.css = s.css.clone();
            flags.p = s.p.clone();
            flags.trials = s.trials.clone();
            flags.seed = s.seed;
            flags.out = s.out.clone();
        }
        config_err(RunConfig::resolve(flags, &self.file, needs_p))
    }
}

pub fn run(cli: Cli) -> Outcome {
    let file = match &cli.config {
        Some(path) => config_err(FileConfig::load(path))?,
        None => FileConfig::default(),
    };
    let catalog = match cli.catalog.as_ref().or(file.catalog.as_ref()) {
        Some(path) => Catalog::load(path)?,
        None => Catalog::builtin(),
    };
    let ctx = Context { catalog, file };

    match cli.command {
        Command::Distill {
            sweep,
            code1,
            code2,
            target,
            reference,
        } => {
            let flags = FlagValues {
                code1,
                code2,
                target,
                ..Default::default()
            };
            let cfg = ctx.resolve(Some(&sweep), flags, true)?;
            distill(&ctx, &cfg, reference)
        }
        Command::Fidelity {
            sweep,
            save,
            exact,
            effective,
            crossover,
            tol,
        } => {
            let flags = FlagValues {
                save,
                ..Default::default()
            };
            let cfg = ctx.resolve(Some(&sweep), flags, true)?;
            fidelity(&ctx, &cfg, exact, effective, crossover, tol)
        }
        Command::Threshold {
            sweep,
            code1,
            code2,
            target,
            curve,
            reference_csv,
        } => {
            let flags = FlagValues {
                code1,
                code2,
                target,
                ..Default::default()
            };
            let cfg = ctx.resolve(Some(&sweep), flags, curve.is_none())?;
            threshold(&ctx, &cfg, curve.as_deref(), reference_csv.as_deref())
        }
        Command::TraceExample1 { out } => emit(out.as_deref(), &trace::example1_jsonl()?),
        Command::DumpCircuit { css, target, out } => {
            let flags = FlagValues {
                css,
                target,
                out,
                ..Default::default()
            };
            let cfg = ctx.resolve(None, flags, false)?;
            let code = ctx.catalog.css(&cfg.css)?;
            emit(cfg.out.as_deref(), &code.encoding_circuit(cfg.target).to_text())
        }
        Command::Catalog => list_catalog(&ctx.catalog),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_sweep(sweep: &SweepResult, out: Option<&PathBuf>) -> Outcome {
    match out {
        Some(path) => sweep
            .write(path)
            .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display()))),
        None => emit(None, &sweep.to_csv()),
    }
}

fn distill(ctx: &Context, cfg: &RunConfig, reference: bool) -> Outcome {
    let css = ctx.catalog.css(&cfg.css)?;
    let mut meta = SweepMetadata {
        css: cfg.css.clone(),
        target: Some(cfg.target),
        seed: cfg.seed,
        trials: cfg.trials,
        ..Default::default()
    };
    let points = if reference {
        meta.protocol = "no-distillation".into();
        meta.samples_per_trial = 1;
        cfg.p
            .iter()
            .map(|&p| no_distillation_reference(&css, cfg.target, p, cfg.trials, cfg.seed))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let c1 = ctx.catalog.classical(&cfg.code1)?;
        let c2 = ctx.catalog.classical(&cfg.code2)?;
        let dc = DistillationConfig::new(css, c1, c2, cfg.target);
        meta.protocol = "distill-protocol-i".into();
        meta.codes = vec![cfg.code1.clone(), cfg.code2.clone()];
        meta.samples_per_trial = dc.survivors_per_run() as u64;
        cfg.p
            .iter()
            .map(|&p| estimate_distillation_rate(&dc, p, cfg.trials, cfg.seed))
            .collect::<Result<Vec<_>, _>>()?
    };
    write_sweep(&SweepResult { points, metadata: meta }, cfg.out.as_ref())
}

fn fidelity(ctx: &Context, cfg: &RunConfig, exact: bool, effective: bool, crossover: bool, tol: f64) -> Outcome {
    let css = ctx.catalog.css(&cfg.css)?;
    let save = cfg.save.as_deref().map(|n| ctx.catalog.classical(n)).transpose()?;
    if exact && save.is_some() {
        return Err(Failure::config(
            "--exact evaluates the code without ancilla saving; drop --save",
        ));
    }
    if (effective || crossover) && save.is_none() {
        return Err(Failure::config("--effective and --crossover need --save"));
    }
    if crossover {
        return fidelity_crossover(&css, save.as_ref().expect("checked"), cfg, tol);
    }

    let mut meta = SweepMetadata {
        css: cfg.css.clone(),
        codes: cfg.save.iter().cloned().collect(),
        seed: cfg.seed,
        trials: cfg.trials,
        samples_per_trial: save.as_ref().map_or(1, |c| c.m() as u64),
        ..Default::default()
    };
    meta.extra.insert(
        "quantity".into(),
        json!("rate is the average channel fidelity under X flips; failures count uncorrected blocks"),
    );
    let points = if exact {
        if css.n() > MAX_EXHAUSTIVE_QUBITS {
            return Err(Failure::config(format!(
                "--exact enumerates 2^n patterns and supports at most {MAX_EXHAUSTIVE_QUBITS} qubits"
            )));
        }
        meta.protocol = "fidelity-exact".into();
        meta.trials = 0;
        meta.samples_per_trial = 0;
        let oracle = CorrectableEnumerator::new(&css, None)?;
        cfg.p
            .iter()
            .map(|&p| SweepPoint::exact(p, oracle.fidelity(p)))
            .collect()
    } else if let (true, Some(code)) = (effective, save.as_ref()) {
        meta.protocol = "fidelity-effective".into();
        let factor = code.r() as f64 / code.m() as f64;
        meta.extra.insert("effective_factor".into(), json!(factor));
        meta.extra.insert(
            "p_column".into(),
            json!("physical p; the saving scheme is simulated at r p / m"),
        );
        cfg.p
            .iter()
            .map(|&p| {
                let mut pt = estimate_avg_channel_fidelity(&css, Some(code), factor * p, cfg.trials, cfg.seed)?;
                pt.p = p;
                Ok(pt)
            })
            .collect::<Result<Vec<_>, Error>>()?
    } else {
        meta.protocol = if save.is_some() { "fidelity-saving" } else { "fidelity" }.into();
        cfg.p
            .iter()
            .map(|&p| estimate_avg_channel_fidelity(&css, save.as_ref(), p, cfg.trials, cfg.seed))
            .collect::<Result<Vec<_>, _>>()?
    };
    write_sweep(&SweepResult { points, metadata: meta }, cfg.out.as_ref())
}

fn fidelity_crossover(css: &CssCode, code: &ClassicalCode, cfg: &RunConfig, tol: f64) -> Outcome {
    let oracle = CorrectableEnumerator::new(css, None)?;
    let scan = gain_scan(css, code, &oracle, &cfg.p, cfg.trials, cfg.seed)?;
    let lo = cfg.p.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = cfg.p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (crossover, note) = if lo < hi {
        match find_crossover(css, code, (lo, hi), cfg.trials, cfg.seed, tol) {
            Ok(c) => (Some(c), None),
            Err(Error::NoBracket(msg)) => (None, Some(msg)),
            Err(e) => return Err(e.into()),
        }
    } else {
        (None, Some("a single p cannot bracket a crossover".to_string()))
    };
    let report = json!({
        "css": cfg.css,
        "code": code.name(),
        "effective_factor": code.r() as f64 / code.m() as f64,
        "p_range": [lo, hi],
        "trials": cfg.trials,
        "seed": cfg.seed,
        "significant_gain": scan.iter().any(|g| g.significant(Z95)),
        "scan": scan,
        "crossover": crossover,
        "note": note,
    });
    let mut text = serde_json::to_string_pretty(&report).map_err(Failure::runtime)?;
    text.push('\n');
    emit(cfg.out.as_deref(), &text)
}

fn threshold(ctx: &Context, cfg: &RunConfig, curve: Option<&Path>, reference: Option<&Path>) -> Outcome {
    let (curve, reference) = match (curve, reference) {
        (Some(c), Some(r)) => {
            let read = |p: &Path| -> Outcome<SweepResult> {
                let text =
                    fs::read_to_string(p).map_err(|e| Failure::config(format!("cannot read {}: {e}", p.display())))?;
                Ok(SweepResult::from_csv(&text)?)
            };
            (read(c)?, read(r)?)
        }
        _ => {
            let css = ctx.catalog.css(&cfg.css)?;
            let dc = DistillationConfig::new(
                css.clone(),
                ctx.catalog.classical(&cfg.code1)?,
                ctx.catalog.classical(&cfg.code2)?,
                cfg.target,
            );
            let sweep = |f: &dyn Fn(f64) -> Result<SweepPoint, Error>| -> Outcome<SweepResult> {
                Ok(SweepResult {
                    points: cfg.p.iter().map(|&p| f(p)).collect::<Result<Vec<_>, _>>()?,
                    metadata: SweepMetadata::default(),
                })
            };
            (
                sweep(&|p| estimate_distillation_rate(&dc, p, cfg.trials, cfg.seed))?,
                sweep(&|p| no_distillation_reference(&css, cfg.target, p, cfg.trials, cfg.seed))?,
            )
        }
    };
    let th = estimate_threshold(&curve, &reference)?;
    let report = json!({
        "threshold": th,
        "slope": log_log_slope(&curve.points),
        "curve": curve.points,
        "reference": reference.points,
    });
    let mut text = serde_json::to_string_pretty(&report).map_err(Failure::runtime)?;
    text.push('\n');
    emit(cfg.out.as_deref(), &text)
}

fn list_catalog(catalog: &Catalog) -> Outcome {
    let mut out = String::new();
    for (name, kind) in catalog.names() {
        let line = match kind {
            "classical" => {
                let c = catalog.classical(&name)?;
                format!("{name}\tclassical\t[{},{},{}]\n", c.m(), c.k(), c.d())
            }
            _ => {
                let c = catalog.css(&name)?;
                format!("{name}\tcss\t[[{},1]] r_Z={} r_X={}\n", c.n(), c.r_z(), c.r_x())
            }
        };
        out.push_str(&line);
    }
    emit(None, &out)
}
