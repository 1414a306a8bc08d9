//! TOML run configuration.
//!
//! ```toml
//! pattern = "pattern1"          # or an explicit order: [1, 11, 6, ...]
//! method = "both"               # eicm | tam | both
//!
//! [joint]
//! n_bolts = 20
//! target_load = 200.0
//! unit = "kN"                   # loads below are read in this unit
//!
//! [bench]
//! model = "tetraparametric"     # tetraparametric | kernel | table
//! alpha = -0.147
//! beta = -0.147
//! gamma = -0.018
//! delta = 0.002
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use boltseq::{
    make_pattern, validate_spec, BenchModel, ForceUnit, JointSpec, PatternKind, TamCoefficients,
    TighteningPattern,
};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_TOL: f64 = 1e-3;
pub const DEFAULT_MAX_ITER: usize = 10;
pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    pattern: RawPattern,
    method: Option<String>,
    probe_load: Option<f64>,
    joint: RawJoint,
    bench: RawBench,
    tam: Option<RawCoefficients>,
    iterative: Option<RawIterative>,
    output: Option<RawOutput>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawPattern {
    Kind(String),
    Order(Vec<usize>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJoint {
    n_bolts: usize,
    target_load: f64,
    yield_load: Option<f64>,
    warn_fraction: Option<f64>,
    unit: Option<String>,
    label: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBench {
    model: String,
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    delta: Option<f64>,
    losses: Option<Vec<f64>>,
    influence: Option<Vec<Vec<f64>>>,
    nonlinearity: Option<f64>,
    reference_load: Option<f64>,
    noise: Option<RawNoise>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    rel_std: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficients {
    label: Option<String>,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIterative {
    enabled: Option<bool>,
    tol: Option<f64>,
    max_iter: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    patterns: Option<Vec<RawPattern>>,
    coefficients: Option<Vec<RawCoefficients>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Eicm,
    Tam,
    Both,
}

impl Method {
    pub fn runs_eicm(self) -> bool {
        matches!(self, Method::Eicm | Method::Both)
    }

    pub fn runs_tam(self) -> bool {
        matches!(self, Method::Tam | Method::Both)
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "eicm" => Ok(Method::Eicm),
            "tam" => Ok(Method::Tam),
            "both" => Ok(Method::Both),
            _ => Err(format!("unknown method {s:?} (expected eicm, tam or both)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Eicm => "eicm",
            Method::Tam => "tam",
            Method::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// CSV files plus a plain-text report.
    Csv,
    /// CSV files plus a JSON report.
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterativeSettings {
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedPattern {
    pub name: String,
    pub pattern: TighteningPattern,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedCoefficients {
    pub label: String,
    pub coefficients: TamCoefficients<f64>,
}

/// A fully resolved and validated run configuration. Loads are in kN.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub joint: JointSpec<f64>,
    pub unit: ForceUnit,
    pub bench: BenchModel<f64>,
    pub pattern: NamedPattern,
    pub method: Method,
    pub iterative: Option<IterativeSettings>,
    pub probe_load: Option<f64>,
    pub tam_coefficients: Option<TamCoefficients<f64>>,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub sweep_patterns: Vec<NamedPattern>,
    pub sweep_coefficients: Vec<NamedCoefficients>,
}

pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config_str(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| CliError::Config(with_suggestion(&e.to_string())))?;
    resolve(raw)
}

/// Appends a "did you mean" hint to serde's unknown-field messages.
fn with_suggestion(message: &str) -> String {
    let Some(start) = message.find("unknown field `") else {
        return message.to_string();
    };
    let rest = &message[start + "unknown field `".len()..];
    let Some(end) = rest.find('`') else {
        return message.to_string();
    };
    let unknown = &rest[..end];
    let expected = rest[end + 1..]
        .split('`')
        .skip(1)
        .step_by(2)
        .map(str::to_string)
        .collect::<Vec<_>>();
    match expected
        .iter()
        .map(|k| (strsim::levenshtein(unknown, k), k))
        .filter(|(d, _)| *d <= 3)
        .min()
    {
        Some((_, best)) => format!("{}\ndid you mean `{best}`?", message.trim_end()),
        None => message.to_string(),
    }
}

fn cfg_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn resolve_pattern(raw: &RawPattern, n: usize) -> Result<NamedPattern, CliError> {
    match raw {
        RawPattern::Kind(name) => {
            let kind: PatternKind = name
                .parse()
                .map_err(|e: boltseq::Error| cfg_err(e.to_string()))?;
            if kind == PatternKind::Custom {
                return Err(cfg_err("pattern \"custom\" needs an explicit order list"));
            }
            let pattern = make_pattern(kind, n, None).map_err(|e| cfg_err(e.to_string()))?;
            Ok(NamedPattern {
                name: name.clone(),
                pattern,
            })
        }
        RawPattern::Order(order) => {
            let pattern = make_pattern(PatternKind::Custom, n, Some(order))
                .map_err(|e| cfg_err(e.to_string()))?;
            Ok(NamedPattern {
                name: "custom".into(),
                pattern,
            })
        }
    }
}

fn resolve_coefficients(
    raw: &RawCoefficients,
    index: usize,
) -> Result<NamedCoefficients, CliError> {
    let coefficients = TamCoefficients::new(raw.alpha, raw.beta, raw.gamma, raw.delta);
    coefficients
        .validate()
        .map_err(|e| cfg_err(e.to_string()))?;
    Ok(NamedCoefficients {
        label: raw
            .label
            .clone()
            .unwrap_or_else(|| format!("set{}", index + 1)),
        coefficients,
    })
}

fn resolve_bench(raw: &RawBench, unit: ForceUnit, n: usize) -> Result<BenchModel<f64>, CliError> {
    let unused = |fields: &[(&str, bool)]| -> Result<(), CliError> {
        match fields.iter().find(|(_, present)| *present) {
            Some((name, _)) => Err(cfg_err(format!(
                "bench.{name} does not apply to model {:?}",
                raw.model
            ))),
            None => Ok(()),
        }
    };
    let four = [
        ("alpha", raw.alpha.is_some()),
        ("beta", raw.beta.is_some()),
        ("gamma", raw.gamma.is_some()),
        ("delta", raw.delta.is_some()),
    ];
    let mut model = match raw.model.as_str() {
        "tetraparametric" => {
            unused(&[
                ("losses", raw.losses.is_some()),
                ("influence", raw.influence.is_some()),
            ])?;
            let get = |name: &str, v: Option<f64>| {
                v.ok_or_else(|| {
                    cfg_err(format!(
                        "bench.{name} is required for the tetraparametric model"
                    ))
                })
            };
            let c = TamCoefficients::new(
                get("alpha", raw.alpha)?,
                get("beta", raw.beta)?,
                get("gamma", raw.gamma)?,
                get("delta", raw.delta)?,
            );
            c.validate().map_err(|e| cfg_err(e.to_string()))?;
            BenchModel::tetraparametric(c)
        }
        "kernel" => {
            unused(&four)?;
            unused(&[("influence", raw.influence.is_some())])?;
            let losses = raw
                .losses
                .clone()
                .ok_or_else(|| cfg_err("bench.losses is required for the kernel model"))?;
            BenchModel::kernel(losses)
        }
        "table" => {
            unused(&four)?;
            unused(&[("losses", raw.losses.is_some())])?;
            let rows = raw
                .influence
                .clone()
                .ok_or_else(|| cfg_err("bench.influence is required for the table model"))?;
            BenchModel::table(rows)
        }
        other => {
            return Err(cfg_err(format!(
                "unknown bench model {other:?} (expected tetraparametric, kernel or table)"
            )))
        }
    };
    if let Some(q) = raw.nonlinearity {
        let reference = raw
            .reference_load
            .ok_or_else(|| cfg_err("bench.reference_load is required with bench.nonlinearity"))?;
        model = model.with_nonlinearity(q, unit.to_kn(reference));
    } else if raw.reference_load.is_some() {
        return Err(cfg_err(
            "bench.reference_load is only used with bench.nonlinearity",
        ));
    }
    if let Some(noise) = &raw.noise {
        model = model.with_noise(
            noise
                .rel_std
                .unwrap_or(boltseq::bench::DEFAULT_NOISE_REL_STD),
            noise.seed.unwrap_or(0),
        );
    }
    model.validate(n).map_err(|e| cfg_err(e.to_string()))?;
    Ok(model)
}

fn resolve(raw: RawConfig) -> Result<RunConfig, CliError> {
    let unit: ForceUnit = raw
        .joint
        .unit
        .as_deref()
        .unwrap_or("kN")
        .parse()
        .map_err(|e: boltseq::Error| cfg_err(format!("joint.unit: {e}")))?;
    let n = raw.joint.n_bolts;
    let mut joint = JointSpec::new(n, unit.to_kn(raw.joint.target_load));
    joint.yield_load = raw.joint.yield_load.map(|y| unit.to_kn(y));
    if let Some(f) = raw.joint.warn_fraction {
        joint.warn_fraction = f;
    }
    joint.scenario_label = raw.joint.label.clone();
    let joint = validate_spec(joint).map_err(|e| cfg_err(e.to_string()))?;

    let pattern = resolve_pattern(&raw.pattern, n)?;
    let bench = resolve_bench(&raw.bench, unit, n)?;
    let method = match raw.method.as_deref() {
        Some(m) => m.parse().map_err(cfg_err)?,
        None => Method::Both,
    };

    let probe_load = match raw.probe_load {
        Some(p) if p > 0.0 => Some(unit.to_kn(p)),
        Some(p) => return Err(cfg_err(format!("probe_load must be positive (got {p})"))),
        None => None,
    };

    let iterative = match raw.iterative {
        Some(it) if it.enabled.unwrap_or(true) => {
            let tol = it.tol.unwrap_or(DEFAULT_TOL);
            let max_iter = it.max_iter.unwrap_or(DEFAULT_MAX_ITER);
            if tol.is_nan() || tol <= 0.0 {
                return Err(cfg_err(format!(
                    "iterative.tol must be positive (got {tol})"
                )));
            }
            if max_iter < 1 {
                return Err(cfg_err("iterative.max_iter must be at least 1"));
            }
            Some(IterativeSettings { tol, max_iter })
        }
        _ => None,
    };

    let tam_coefficients = raw
        .tam
        .as_ref()
        .map(|c| resolve_coefficients(c, 0).map(|c| c.coefficients))
        .transpose()?;
    if method.runs_tam() && tam_coefficients.is_none() && n < boltseq::tam::MIN_PROTOCOL_BOLTS {
        return Err(cfg_err(format!(
            "method {method} needs at least {} bolts to measure coefficients, or a [tam] block with known coefficients",
            boltseq::tam::MIN_PROTOCOL_BOLTS
        )));
    }
    if method.runs_tam() && n < boltseq::bench::MIN_TETRAPARAMETRIC_BOLTS {
        return Err(cfg_err(format!(
            "method {method} needs at least {} bolts",
            boltseq::bench::MIN_TETRAPARAMETRIC_BOLTS
        )));
    }

    let (output_dir, format) = match raw.output {
        Some(o) => {
            let format = match o.format.as_deref().unwrap_or("csv") {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                other => {
                    return Err(cfg_err(format!(
                        "output.format must be \"csv\" or \"json\" (got {other:?})"
                    )))
                }
            };
            (o.dir.unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into()), format)
        }
        None => (DEFAULT_OUTPUT_DIR.into(), OutputFormat::Csv),
    };

    let (sweep_patterns, sweep_coefficients) = match raw.sweep {
        Some(s) => (
            s.patterns
                .unwrap_or_default()
                .iter()
                .map(|p| resolve_pattern(p, n))
                .collect::<Result<Vec<_>, _>>()?,
            s.coefficients
                .unwrap_or_default()
                .iter()
                .enumerate()
                .map(|(k, c)| resolve_coefficients(c, k))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => (Vec::new(), Vec::new()),
    };

    Ok(RunConfig {
        joint,
        unit,
        bench,
        pattern,
        method,
        iterative,
        probe_load,
        tam_coefficients,
        output_dir,
        format,
        sweep_patterns,
        sweep_coefficients,
    })
}

impl RunConfig {
    /// Every setting after defaults are applied, as `(key, value)` lines.
    pub fn describe(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_string(), v));
        put("joint.n_bolts", self.joint.n_bolts.to_string());
        put(
            "joint.target_load",
            format!("{} kN", self.joint.target_load),
        );
        put(
            "joint.yield_load",
            self.joint
                .yield_load
                .map_or("none".into(), |y| format!("{y} kN")),
        );
        put("joint.warn_fraction", self.joint.warn_fraction.to_string());
        put("joint.unit", self.unit.to_string());
        put(
            "joint.label",
            self.joint
                .scenario_label
                .clone()
                .unwrap_or_else(|| "none".into()),
        );
        put(
            "pattern",
            format!("{} ({})", self.pattern.name, self.pattern.pattern),
        );
        put("method", self.method.to_string());
        put(
            "probe_load",
            format!("{} kN", self.probe_load.unwrap_or(self.joint.target_load)),
        );
        match &self.bench.variant {
            boltseq::BenchVariant::Tetraparametric(c) => {
                put("bench.model", "tetraparametric".into());
                put(
                    "bench.coefficients",
                    format!(
                        "alpha={} beta={} gamma={} delta={}",
                        c.alpha, c.beta, c.gamma, c.delta
                    ),
                );
            }
            boltseq::BenchVariant::Kernel(k) => {
                put("bench.model", "kernel".into());
                put("bench.losses", format!("{k:?}"));
            }
            boltseq::BenchVariant::Table(_) => put("bench.model", "table".into()),
        }
        put("bench.nonlinearity", self.bench.nonlinearity.to_string());
        put(
            "bench.reference_load",
            self.bench
                .reference_load
                .map_or("none".into(), |r| format!("{r} kN")),
        );
        put("bench.noise.rel_std", self.bench.noise_rel_std.to_string());
        put("bench.noise.seed", self.bench.noise_seed.to_string());
        put(
            "tam.coefficients",
            self.tam_coefficients.map_or("measured".into(), |c| {
                format!(
                    "alpha={} beta={} gamma={} delta={}",
                    c.alpha, c.beta, c.gamma, c.delta
                )
            }),
        );
        match &self.iterative {
            Some(it) => put(
                "iterative",
                format!("enabled (tol={}, max_iter={})", it.tol, it.max_iter),
            ),
            None => put("iterative", "disabled".into()),
        }
        put("output.dir", self.output_dir.display().to_string());
        put(
            "output.format",
            match self.format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            }
            .into(),
        );
        out
    }
}
