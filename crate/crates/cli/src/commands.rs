//! Subcommand execution. Each command produces a report and a set of named
//! output files; nothing is written until [`write_output`].

use std::path::{Path, PathBuf};

use boltseq::io::{
    read_plan_csv, write_coefficients_csv, write_history_csv, write_matrix_csv, write_plan_csv,
};
use boltseq::tam::MIN_PROTOCOL_BOLTS;
use boltseq::{
    avg_relative_error, build_sh, compute_a, design_protocol, execute_protocol,
    extract_coefficients, iterative_eicm, load_stats, matrix_max_abs_diff, run_eicm, run_sequence,
    run_tam, run_tam_with_coefficients, AssemblyPlan, BenchModel, BenchVariant, Coefficient,
    InteractionMatrix, LoadHistory, LoadVector, TamCoefficients, TamExtraction, TighteningPattern,
    TwoStepProtocol,
};
use rayon::prelude::*;

use crate::config::{Method, NamedPattern, OutputFormat, RunConfig};
use crate::error::CliError;
use crate::report::{Report, Section, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Coefficients,
    Matrix,
    Optimize,
    Simulate { loads: PathBuf },
    Validate,
    Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coefficients => "coefficients",
            Command::Matrix => "matrix",
            Command::Optimize => "optimize",
            Command::Simulate { .. } => "simulate",
            Command::Validate => "validate",
            Command::Sweep => "sweep",
        }
    }
}

/// A file to be written into the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

impl CommandOutput {
    fn new(report: Report) -> Self {
        CommandOutput {
            report,
            artifacts: Vec::new(),
        }
    }

    fn add(&mut self, name: impl Into<String>, contents: Vec<u8>) {
        let name = name.into();
        self.report.files.push(name.clone());
        self.artifacts.push(Artifact { name, contents });
    }

    /// The rendered report in the configured format, with its file name.
    pub fn rendered_report(&self, format: OutputFormat) -> (&'static str, String) {
        match format {
            OutputFormat::Csv => ("report.txt", self.report.to_text()),
            OutputFormat::Json => ("report.json", self.report.to_json()),
        }
    }
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let name = command.name();
    let compute = |source: boltseq::Error| CliError::Compute {
        command: name,
        source,
    };
    if *command == Command::Coefficients && cfg.joint.n_bolts < MIN_PROTOCOL_BOLTS {
        return Err(CliError::Input(format!(
            "measuring coefficients needs at least {MIN_PROTOCOL_BOLTS} bolts (got {})",
            cfg.joint.n_bolts
        )));
    }
    let mut out = CommandOutput::new(Report::new(name, cfg.describe()));
    match command {
        Command::Coefficients => coefficients(cfg, &mut out).map_err(compute)?,
        Command::Matrix => matrix(cfg, &mut out).map_err(compute)?,
        Command::Optimize => optimize(cfg, &mut out).map_err(compute)?,
        Command::Simulate { loads } => simulate(cfg, loads, &mut out)?,
        Command::Validate => validate(cfg, &mut out).map_err(compute)?,
        Command::Sweep => sweep(cfg, &mut out).map_err(compute)?,
    }
    Ok(out)
}

/// Writes every artifact and the report into `dir`, returning the report path.
pub fn write_output(
    out: &CommandOutput,
    dir: &Path,
    format: OutputFormat,
) -> Result<PathBuf, CliError> {
    let fail = |path: &Path, e: std::io::Error| CliError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(|e| fail(dir, e))?;
    for a in &out.artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.contents).map_err(|e| fail(&path, e))?;
    }
    let (name, text) = out.rendered_report(format);
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| fail(&path, e))?;
    Ok(path)
}

type CoreResult<T> = boltseq::Result<T>;

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> CoreResult<()>) -> CoreResult<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

struct Measured {
    protocol: TwoStepProtocol<f64>,
    extraction: TamExtraction<f64>,
}

/// Everything one planning method produced for a single configuration.
struct MethodRun {
    method: &'static str,
    plan: AssemblyPlan<f64>,
    matrix: InteractionMatrix<f64>,
    history: Option<LoadHistory<f64>>,
    measured: Option<Measured>,
    iterations: Option<(usize, Vec<f64>)>,
}

fn run_eicm_method(
    cfg: &RunConfig,
    bench: &BenchModel<f64>,
    pattern: &TighteningPattern,
) -> CoreResult<MethodRun> {
    if let Some(it) = &cfg.iterative {
        let outcome = iterative_eicm(&cfg.joint, bench, pattern, it.tol, it.max_iter)?;
        return Ok(MethodRun {
            method: "eicm",
            plan: outcome.plan,
            matrix: outcome.matrix,
            history: None,
            measured: None,
            iterations: Some((outcome.iterations, outcome.residuals)),
        });
    }
    let probe = cfg.probe_load.unwrap_or(cfg.joint.target_load);
    let sh = build_sh(&cfg.joint, bench, pattern, probe)?;
    let matrix = compute_a(&sh)?;
    let plan = run_eicm(&cfg.joint, bench, pattern, Some(probe))?;
    Ok(MethodRun {
        method: "eicm",
        plan,
        matrix,
        history: Some(sh),
        measured: None,
        iterations: None,
    })
}

fn run_tam_method(
    cfg: &RunConfig,
    bench: &BenchModel<f64>,
    pattern: &TighteningPattern,
) -> CoreResult<MethodRun> {
    if let Some(coeffs) = &cfg.tam_coefficients {
        let (plan, matrix) = run_tam_with_coefficients(&cfg.joint, bench, pattern, coeffs)?;
        return Ok(MethodRun {
            method: "tam",
            plan,
            matrix,
            history: None,
            measured: None,
            iterations: None,
        });
    }
    let outcome = run_tam(&cfg.joint, bench, pattern)?;
    Ok(MethodRun {
        method: "tam",
        plan: outcome.plan,
        matrix: outcome.matrix,
        history: None,
        measured: Some(Measured {
            protocol: outcome.protocol,
            extraction: outcome.extraction,
        }),
        iterations: None,
    })
}

fn run_methods(
    cfg: &RunConfig,
    bench: &BenchModel<f64>,
    pattern: &TighteningPattern,
) -> CoreResult<Vec<MethodRun>> {
    let mut runs = Vec::new();
    if cfg.method.runs_eicm() {
        runs.push(run_eicm_method(cfg, bench, pattern)?);
    }
    if cfg.method.runs_tam() {
        runs.push(run_tam_method(cfg, bench, pattern)?);
    }
    Ok(runs)
}

fn coefficient_section(title: &str, c: &TamCoefficients<f64>) -> Section {
    let mut s = Section::new(title);
    for which in Coefficient::ALL {
        s.push(which.name(), Value::Coefficient(c.get(which)));
    }
    s
}

fn measured_sections(m: &Measured) -> Vec<Section> {
    let mut coeffs = coefficient_section("measured coefficients", &m.extraction.coefficients);
    for (k, which) in Coefficient::ALL.into_iter().enumerate() {
        coeffs.push(
            format!("{} spread", which.name()),
            Value::Coefficient(m.extraction.spread.get(which)),
        );
        coeffs.push(
            format!("{} estimates", which.name()),
            Value::Count(m.extraction.estimate_counts[k]),
        );
    }
    let mut proto = Section::new("measurement protocol");
    let ids =
        |v: &mut dyn Iterator<Item = usize>| v.map(|p| p.to_string()).collect::<Vec<_>>().join(" ");
    proto
        .push("level", Value::Load(m.protocol.level))
        .push(
            "first step",
            Value::Text(ids(&mut m.protocol.first_step.iter().map(|&(p, _)| p))),
        )
        .push(
            "second step",
            Value::Text(ids(&mut m.protocol.second_step.iter().copied())),
        )
        .push("tightenings", Value::Count(m.protocol.tightening_count()))
        .push("readings", Value::Count(m.protocol.measurement_count()));
    vec![coeffs, proto]
}

fn coefficients(cfg: &RunConfig, out: &mut CommandOutput) -> CoreResult<()> {
    let protocol = design_protocol(cfg.joint.n_bolts, cfg.joint.target_load)?;
    let log = execute_protocol(&cfg.joint, &cfg.bench, &protocol)?;
    let extraction = extract_coefficients(&log, &protocol)?;
    let measured = Measured {
        protocol,
        extraction,
    };
    out.report.sections.extend(measured_sections(&measured));
    let bytes = csv_bytes(|b| write_coefficients_csv(b, &measured.extraction.coefficients))?;
    out.add("coefficients.csv", bytes);
    Ok(())
}

fn off_diagonal_max(a: &InteractionMatrix<f64>) -> (f64, usize) {
    let mut max = 0.0f64;
    let mut nonzero = 0;
    for (i, row) in a.rows().enumerate() {
        for &v in &row[i + 1..] {
            if v != 0.0 {
                nonzero += 1;
            }
            max = max.max(v.abs());
        }
    }
    (max, nonzero)
}

fn matrix(cfg: &RunConfig, out: &mut CommandOutput) -> CoreResult<()> {
    let runs = run_methods(cfg, &cfg.bench, &cfg.pattern.pattern)?;
    for run in &runs {
        let (max, nonzero) = off_diagonal_max(&run.matrix);
        let mut s = Section::new(format!("{} matrix", run.method));
        s.push("size", Value::Count(run.matrix.n()))
            .push("nonzero off-diagonal entries", Value::Count(nonzero))
            .push("largest |off-diagonal|", Value::Coefficient(max));
        out.report.sections.push(s);
        if let Some(m) = &run.measured {
            out.report.sections.extend(measured_sections(m));
        }
        out.add(
            format!("matrix_{}.csv", run.method),
            csv_bytes(|b| write_matrix_csv(b, &run.matrix))?,
        );
        if let Some(sh) = &run.history {
            out.add(
                format!("history_{}.csv", run.method),
                csv_bytes(|b| write_history_csv(b, sh))?,
            );
        }
    }
    if let [a, b] = runs.as_slice() {
        let mut s = Section::new("comparison");
        s.push(
            format!("max |{} - {}|", a.method, b.method),
            Value::Coefficient(matrix_max_abs_diff(&a.matrix, &b.matrix)?),
        );
        out.report.sections.push(s);
    }
    Ok(())
}

fn stats_items(
    s: &mut Section,
    prefix: &str,
    loads: &LoadVector<f64>,
    target: f64,
) -> CoreResult<()> {
    let stats = load_stats(loads)?;
    let err = avg_relative_error(loads, &LoadVector::uniform(loads.len(), target))?;
    s.push(format!("{prefix} mean"), Value::Load(stats.mean))
        .push(format!("{prefix} std"), Value::Load(stats.std))
        .push(
            format!("{prefix} relative std"),
            Value::Ratio(stats.relative_std()),
        )
        .push(format!("{prefix} min"), Value::Load(stats.min))
        .push(format!("{prefix} max"), Value::Load(stats.max))
        .push(format!("{prefix} avg relative error"), Value::Ratio(err));
    Ok(())
}

fn per_bolt_section(
    title: String,
    pattern: &TighteningPattern,
    initial: &LoadVector<f64>,
    finals: &LoadVector<f64>,
) -> CoreResult<Section> {
    let mut s = Section::new(title);
    for (k, &p) in pattern.order().iter().enumerate() {
        s.push(
            format!("bolt {p} (step {})", k + 1),
            Value::LoadPair {
                initial: initial.get(p)?,
                r#final: finals.get(p)?,
            },
        );
    }
    Ok(s)
}

fn plan_sections(cfg: &RunConfig, run: &MethodRun, out: &mut CommandOutput) -> CoreResult<()> {
    let plan = &run.plan;
    out.report.sections.push(per_bolt_section(
        format!("{} plan", run.method),
        &plan.pattern,
        &plan.initial_loads,
        &plan.predicted_final_loads,
    )?);
    let mut summary = Section::new(format!("{} summary", run.method));
    let initial = load_stats(&plan.initial_loads)?;
    summary
        .push("initial min", Value::Load(initial.min))
        .push("initial max", Value::Load(initial.max));
    stats_items(
        &mut summary,
        "final",
        &plan.predicted_final_loads,
        cfg.joint.target_load,
    )?;
    if let Some((iterations, residuals)) = &run.iterations {
        summary.push("iterations", Value::Count(*iterations));
        for (k, r) in residuals.iter().enumerate() {
            summary.push(format!("residual {}", k + 1), Value::Ratio(*r));
        }
    }
    out.report.sections.push(summary);
    if let Some(m) = &run.measured {
        out.report.sections.extend(measured_sections(m));
    }
    out.report
        .warnings
        .extend(plan.warnings.iter().map(|w| format!("{}: {w}", run.method)));
    out.add(
        format!("plan_{}.csv", run.method),
        csv_bytes(|b| write_plan_csv(b, plan))?,
    );
    Ok(())
}

fn optimize(cfg: &RunConfig, out: &mut CommandOutput) -> CoreResult<()> {
    for run in run_methods(cfg, &cfg.bench, &cfg.pattern.pattern)? {
        plan_sections(cfg, &run, out)?;
        if let Some(m) = &run.measured {
            out.add(
                "coefficients.csv",
                csv_bytes(|b| write_coefficients_csv(b, &m.extraction.coefficients))?,
            );
        }
    }
    Ok(())
}

fn simulate(cfg: &RunConfig, loads: &Path, out: &mut CommandOutput) -> Result<(), CliError> {
    let input = |msg: String| CliError::Input(format!("{}: {msg}", loads.display()));
    let file = std::fs::File::open(loads).map_err(|e| input(e.to_string()))?;
    let parsed = read_plan_csv::<_, f64>(file).map_err(|e| input(e.to_string()))?;
    if parsed.pattern.n_bolts() != cfg.joint.n_bolts {
        return Err(input(format!(
            "file lists {} bolts but the joint has {}",
            parsed.pattern.n_bolts(),
            cfg.joint.n_bolts
        )));
    }
    let compute = |source| CliError::Compute {
        command: "simulate",
        source,
    };
    let mut run = || -> CoreResult<()> {
        let (sh, finals) = run_sequence(&cfg.joint, &cfg.bench, &parsed.pattern, &parsed.initial)?;
        out.report.sections.push(per_bolt_section(
            "simulated sequence".into(),
            &parsed.pattern,
            &parsed.initial,
            &finals,
        )?);
        let mut summary = Section::new("simulated summary");
        summary.push("pattern", Value::Text(parsed.pattern.to_string()));
        stats_items(&mut summary, "final", &finals, cfg.joint.target_load)?;
        if let Some(predicted) = &parsed.finals {
            summary.push(
                "deviation from file final_kn",
                Value::Ratio(avg_relative_error(&finals, predicted)?),
            );
        }
        out.report.sections.push(summary);
        let plan = AssemblyPlan::new(parsed.pattern.clone(), parsed.initial.clone(), finals)?;
        out.add("simulated.csv", csv_bytes(|b| write_plan_csv(b, &plan))?);
        out.add(
            "history_simulated.csv",
            csv_bytes(|b| write_history_csv(b, &sh))?,
        );
        Ok(())
    };
    run().map_err(compute)
}

fn validate(cfg: &RunConfig, out: &mut CommandOutput) -> CoreResult<()> {
    for run in run_methods(cfg, &cfg.bench, &cfg.pattern.pattern)? {
        let (_, finals) = run_sequence(
            &cfg.joint,
            &cfg.bench,
            &run.plan.pattern,
            &run.plan.initial_loads,
        )?;
        let mut s = Section::new(format!("{} validation", run.method));
        stats_items(&mut s, "final", &finals, cfg.joint.target_load)?;
        let max_dev = finals
            .as_slice()
            .iter()
            .map(|l| ((l - cfg.joint.target_load) / cfg.joint.target_load).abs())
            .fold(0.0, f64::max);
        s.push("max relative deviation", Value::Ratio(max_dev));
        out.report.sections.push(s);
        out.report.warnings.extend(
            run.plan
                .warnings
                .iter()
                .map(|w| format!("{}: {w}", run.method)),
        );
        out.add(
            format!("plan_{}.csv", run.method),
            csv_bytes(|b| write_plan_csv(b, &run.plan))?,
        );
    }
    Ok(())
}

/// One row of the sweep table.
struct SweepRow {
    scenario: String,
    pattern: String,
    method: &'static str,
    coefficients: Option<TamCoefficients<f64>>,
    outcome: Result<SweepNumbers, String>,
}

struct SweepNumbers {
    initial_min: f64,
    initial_max: f64,
    final_mean: f64,
    final_std: f64,
    final_rel_std: f64,
}

pub const SWEEP_HEADER: [&str; 13] = [
    "scenario",
    "pattern",
    "method",
    "alpha",
    "beta",
    "gamma",
    "delta",
    "initial_min_kn",
    "initial_max_kn",
    "final_mean_kn",
    "final_std_kn",
    "final_rel_std",
    "status",
];

type MethodFn = fn(&RunConfig, &BenchModel<f64>, &TighteningPattern) -> CoreResult<MethodRun>;

fn sweep_scenario(
    cfg: &RunConfig,
    label: &str,
    bench: &BenchModel<f64>,
    pattern: &NamedPattern,
) -> Vec<SweepRow> {
    let coefficients = match &bench.variant {
        BenchVariant::Tetraparametric(c) => Some(*c),
        _ => None,
    };
    let methods: Vec<(&'static str, MethodFn)> = match cfg.method {
        Method::Eicm => vec![("eicm", run_eicm_method)],
        Method::Tam => vec![("tam", run_tam_method)],
        Method::Both => vec![("eicm", run_eicm_method), ("tam", run_tam_method)],
    };
    methods
        .into_iter()
        .map(|(method, f)| {
            let outcome = f(cfg, bench, &pattern.pattern)
                .and_then(|run| {
                    let initial = load_stats(&run.plan.initial_loads)?;
                    let finals = load_stats(&run.plan.predicted_final_loads)?;
                    Ok(SweepNumbers {
                        initial_min: initial.min,
                        initial_max: initial.max,
                        final_mean: finals.mean,
                        final_std: finals.std,
                        final_rel_std: finals.relative_std(),
                    })
                })
                .map_err(|e| e.to_string());
            SweepRow {
                scenario: label.to_string(),
                pattern: pattern.name.clone(),
                method,
                coefficients,
                outcome,
            }
        })
        .collect()
}

fn sweep(cfg: &RunConfig, out: &mut CommandOutput) -> CoreResult<()> {
    let benches: Vec<(String, BenchModel<f64>)> = if cfg.sweep_coefficients.is_empty() {
        vec![("bench".into(), cfg.bench.clone())]
    } else {
        cfg.sweep_coefficients
            .iter()
            .map(|c| {
                let mut model = cfg.bench.clone();
                model.variant = BenchVariant::Tetraparametric(c.coefficients);
                model
                    .validate(cfg.joint.n_bolts)
                    .map(|_| (c.label.clone(), model))
            })
            .collect::<CoreResult<_>>()?
    };
    let patterns = if cfg.sweep_patterns.is_empty() {
        vec![cfg.pattern.clone()]
    } else {
        cfg.sweep_patterns.clone()
    };
    let scenarios: Vec<(&String, &BenchModel<f64>, &NamedPattern)> = benches
        .iter()
        .flat_map(|(label, bench)| patterns.iter().map(move |p| (label, bench, p)))
        .collect();
    let rows: Vec<SweepRow> = scenarios
        .par_iter()
        .map(|(label, bench, pattern)| sweep_scenario(cfg, label, bench, pattern))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    let mut section = Section::new("sweep");
    let mut failures = 0;
    for row in &rows {
        let coeffs = row
            .coefficients
            .map(|c| c.to_array().map(|v| v.to_string()).to_vec())
            .unwrap_or_else(|| vec![String::new(); 4]);
        let (numbers, status) = match &row.outcome {
            Ok(n) => (
                [
                    n.initial_min,
                    n.initial_max,
                    n.final_mean,
                    n.final_std,
                    n.final_rel_std,
                ]
                .map(|v| v.to_string())
                .to_vec(),
                "ok".to_string(),
            ),
            Err(e) => {
                failures += 1;
                (vec![String::new(); 5], e.clone())
            }
        };
        let mut record = vec![
            row.scenario.clone(),
            row.pattern.clone(),
            row.method.to_string(),
        ];
        record.extend(coeffs);
        record.extend(numbers);
        record.push(status.clone());
        w.write_record(&record)?;
        let key = format!("{} / {} / {}", row.scenario, row.pattern, row.method);
        let value = match &row.outcome {
            Ok(n) => Value::Text(format!(
                "initial {} to {}, final std {}",
                crate::report::kn(n.initial_min),
                crate::report::kn(n.initial_max),
                crate::report::kn(n.final_std),
            )),
            Err(_) => Value::Text(format!("failed: {status}")),
        };
        section.push(key, value);
    }
    section.push("scenarios", Value::Count(scenarios.len()));
    section.push("failed runs", Value::Count(failures));
    out.report.sections.push(section);
    let bytes = w
        .into_inner()
        .map_err(|e| boltseq::Error::Csv(e.to_string()))?;
    out.add("sweep.csv", bytes);
    Ok(())
}
