//! Command-line front end.
//!
//! [`parse_args`] turns an argument list (without the program name) into a
//! validated [`RunConfig`]; [`run`] executes it and returns the exit status
//! with the serialized report. Failures are reported as one JSON object,
//! `{"error": {"kind": ..., "message": ...}}`.
//!
//! Angles are radians by default. Any angle in `(0, π/2)` is accepted and
//! reflected into `(0, π/4]`, since `|Φ_λ>` and `|Φ_{π/2−λ}>` are related by
//! local bit flips.

mod args;
mod report;

use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use args::OutputFormat;
pub use report::{
    BasisReport, BoundOutput, CriterionOutput, OutcomeSummary, RateReport, SimulateReport, SweepRow,
};

use crate::bounds::{achieving_operator, p_max};
use crate::criterion::{built_in, from_kets, is_optimal};
use crate::error::Error;
use crate::qmath::text::{parse_kets, write_kets};
use crate::repeater::{
    build_optimal_basis, compare_with_bell, projection_bounds, run_protocol_analytic_with,
    run_protocol_sampled,
};
use crate::states::{AngleRange, SchmidtState, StateSpec, TwoQubitPure};
use args::{AngleArgs, Cli, OutputArgs, Sub};

/// Seed used when neither `--seed` nor `REPEATERLAB_SEED` is set.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Rate,
    Basis,
    Simulate,
    Criterion,
    Bound,
    Sweep,
    Compare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementSource {
    BuiltIn(String),
    File(PathBuf),
}

/// A validated invocation. Angles are canonical radians in `(0, π/4]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub theta: Option<f64>,
    pub eta: Option<f64>,
    pub n_samples: u64,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    /// `None` selects the command's natural format: matrix text for `basis`,
    /// CSV for `sweep`, JSON otherwise.
    pub output_format: Option<OutputFormat>,
    pub output_path: Option<PathBuf>,
    pub schmidt_a: Option<SchmidtState>,
    pub schmidt_b: Option<SchmidtState>,
    pub measurement: Option<MeasurementSource>,
    pub tolerance: f64,
    pub steps: usize,
}

impl RunConfig {
    fn new(command: Command) -> Self {
        Self {
            command,
            theta: None,
            eta: None,
            n_samples: 0,
            seed: DEFAULT_SEED,
            beta1: 0.0,
            beta2: 0.0,
            output_format: None,
            output_path: None,
            schmidt_a: None,
            schmidt_b: None,
            measurement: None,
            tolerance: crate::criterion::DEFAULT_TOL,
            steps: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Help or version text; printed as is with exit status 0.
    Display(String),
    Failed { kind: String, message: String, exit_code: i32 },
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError::Failed {
            kind: "usage".into(),
            message: message.into(),
            exit_code: 2,
        }
    }

    fn invalid(context: &str, e: Error) -> Self {
        CliError::Failed {
            kind: e.kind().into(),
            message: format!("{context}: {e}"),
            exit_code: 2,
        }
    }

    fn compute(context: &str, e: Error) -> Self {
        CliError::Failed {
            kind: e.kind().into(),
            message: format!("{context}: {e}"),
            exit_code: 1,
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Failed {
            kind: "io".into(),
            message: format!("{}: {e}", path.display()),
            exit_code: 1,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Display(_) => 0,
            CliError::Failed { exit_code, .. } => *exit_code,
        }
    }

    /// Help text, or the machine-readable error object.
    pub fn render(&self) -> String {
        match self {
            CliError::Display(text) => text.clone(),
            CliError::Failed { kind, message, .. } => {
                serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
            }
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    left: Option<StateSpec>,
    right: Option<StateSpec>,
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Failed {
        kind: "config".into(),
        message: format!("{}: {e}", path.display()),
        exit_code: 2,
    })
}

fn canonical(name: &'static str, value: f64) -> Result<f64, CliError> {
    let value = AngleRange::Permissive
        .check(name, value)
        .map_err(|e| CliError::invalid("invalid angle", e))?;
    Ok(TwoQubitPure::new(value)
        .expect("range checked above")
        .canonical_angle())
}

fn resolve_angles(a: &AngleArgs) -> Result<(f64, f64), CliError> {
    let file = match &a.config {
        Some(p) => read_config(p)?,
        None => ConfigFile::default(),
    };
    let scale = if a.degrees { std::f64::consts::PI / 180.0 } else { 1.0 };
    let pick = |name: &'static str, flag: Option<f64>, spec: &Option<StateSpec>| -> Result<f64, CliError> {
        match (flag, spec) {
            (Some(x), _) => canonical(name, x * scale),
            (None, Some(s)) => s.to_angle().map_err(|e| CliError::invalid("config", e)),
            (None, None) => Err(CliError::usage(format!("missing required parameter --{name}"))),
        }
    };
    Ok((pick("theta", a.theta, &file.left)?, pick("eta", a.eta, &file.right)?))
}

fn schmidt_list(name: &str, values: Vec<f64>) -> Result<SchmidtState, CliError> {
    SchmidtState::new(values).map_err(|e| CliError::invalid(&format!("--{name}"), e))
}

fn apply_output(cfg: &mut RunConfig, out: OutputArgs) {
    cfg.output_format = out.format;
    cfg.output_path = out.output;
}

fn with_angles(command: Command, angles: &AngleArgs) -> Result<RunConfig, CliError> {
    let (theta, eta) = resolve_angles(angles)?;
    let mut cfg = RunConfig::new(command);
    cfg.theta = Some(theta);
    cfg.eta = Some(eta);
    Ok(cfg)
}

/// Parses and validates an argument list that excludes the program name.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let full = std::iter::once(std::ffi::OsString::from("repeaterlab")).chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(full).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Display(e.to_string()),
        _ => CliError::usage(e.to_string().trim_end().to_string()),
    })?;

    let cfg = match cli.command {
        Sub::Rate { angles, phases, out } => {
            let mut cfg = with_angles(Command::Rate, &angles)?;
            cfg.beta1 = phases.beta1;
            cfg.beta2 = phases.beta2;
            apply_output(&mut cfg, out);
            cfg
        }
        Sub::Basis { angles, phases, out } => {
            let mut cfg = with_angles(Command::Basis, &angles)?;
            cfg.beta1 = phases.beta1;
            cfg.beta2 = phases.beta2;
            if out.format == Some(OutputFormat::Csv) {
                return Err(CliError::usage("basis supports --format json or the default matrix text"));
            }
            apply_output(&mut cfg, out);
            cfg
        }
        Sub::Simulate { angles, n, seed, out } => {
            if n == 0 {
                return Err(CliError::usage("--n must be positive"));
            }
            let mut cfg = with_angles(Command::Simulate, &angles)?;
            cfg.n_samples = n;
            cfg.seed = seed.unwrap_or(DEFAULT_SEED);
            apply_output(&mut cfg, out);
            cfg
        }
        Sub::Criterion {
            angles,
            measurement,
            measurement_file,
            tol,
            out,
        } => {
            let source = match (measurement, measurement_file) {
                (Some(name), None) => MeasurementSource::BuiltIn(name),
                (None, Some(path)) => MeasurementSource::File(path),
                _ => return Err(CliError::usage("criterion needs --measurement or --measurement-file")),
            };
            if tol.is_nan() || tol < 0.0 {
                return Err(CliError::usage("--tol must be nonnegative"));
            }
            let mut cfg = with_angles(Command::Criterion, &angles)?;
            cfg.measurement = Some(source);
            cfg.tolerance = tol;
            apply_output(&mut cfg, out);
            cfg
        }
        Sub::Bound { a, b, config, out } => {
            let file = match &config {
                Some(p) => read_config(p)?,
                None => ConfigFile::default(),
            };
            let pick = |name: &str, flag: Option<Vec<f64>>, spec: Option<StateSpec>| match (flag, spec) {
                (Some(v), _) => schmidt_list(name, v),
                (None, Some(s)) => s.to_schmidt().map_err(|e| CliError::invalid("config", e)),
                (None, None) => Err(CliError::usage(format!("missing required parameter --{name}"))),
            };
            let mut cfg = RunConfig::new(Command::Bound);
            cfg.schmidt_a = Some(pick("a", a, file.left)?);
            cfg.schmidt_b = Some(pick("b", b, file.right)?);
            apply_output(&mut cfg, out);
            cfg
        }
        Sub::Sweep { steps, out } => {
            if steps == 0 {
                return Err(CliError::usage("--steps must be positive"));
            }
            let mut cfg = RunConfig::new(Command::Sweep);
            cfg.steps = steps;
            apply_output(&mut cfg, out);
            cfg
        }
        Sub::Compare { angles, out } => {
            let mut cfg = with_angles(Command::Compare, &angles)?;
            apply_output(&mut cfg, out);
            cfg
        }
    };
    Ok(cfg)
}

/// Result of [`run`]: exit status and the report text (or error JSON).
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub exit_code: i32,
    pub report: String,
    /// Set when the report went to `--output` instead of stdout.
    pub written_to: Option<PathBuf>,
}

fn emit<T: Serialize>(cfg: &RunConfig, report: &T, csv_rows: Option<&[SweepRow]>) -> Result<String, CliError> {
    let fmt = cfg.output_format.unwrap_or(OutputFormat::Json);
    let ser = |e: String| CliError::Failed {
        kind: "serialization".into(),
        message: e,
        exit_code: 1,
    };
    match (fmt, csv_rows) {
        (OutputFormat::Json, _) => serde_json::to_string_pretty(report).map_err(|e| ser(e.to_string())),
        (OutputFormat::Csv, Some(rows)) => report::rows_csv(rows).map_err(ser),
        (OutputFormat::Csv, None) => report::single_row_csv(report).map_err(ser),
    }
}

fn angles(cfg: &RunConfig) -> (f64, f64) {
    (
        cfg.theta.expect("validated by parse_args"),
        cfg.eta.expect("validated by parse_args"),
    )
}

/// Grid `k·(π/4)/steps`, `k = 1..=steps`.
pub fn sweep_grid(steps: usize) -> Vec<f64> {
    (1..=steps).map(|k| k as f64 * FRAC_PI_4 / steps as f64).collect()
}

/// Rates and bounds on the `steps × steps` grid, rows ordered by `θ` then `η`.
pub fn sweep(steps: usize) -> crate::Result<Vec<SweepRow>> {
    let grid = sweep_grid(steps);
    let cells: Vec<(f64, f64)> = grid.iter().flat_map(|&t| grid.iter().map(move |&e| (t, e))).collect();
    cells
        .par_iter()
        .map(|&(theta, eta)| {
            let c = compare_with_bell(theta, eta)?;
            let (bound_lower, bound_upper) = projection_bounds(theta, eta)?;
            Ok(SweepRow {
                theta,
                eta,
                p_ms: c.optimal.p_ms,
                p_direct: c.optimal.direct_success,
                bound_lower,
                bound_upper,
                p_max: p_max(&SchmidtState::from_angle(theta)?, &SchmidtState::from_angle(eta)?),
                bob_acts_optimal: c.optimal.ledger.bob_acts_probability,
                bob_acts_bell: c.bell.ledger.bob_acts_probability,
            })
        })
        .collect()
}

fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    let ctx = |name: &'static str| move |e: Error| CliError::compute(name, e);
    match cfg.command {
        Command::Rate => {
            let (t, e) = angles(cfg);
            let run = run_protocol_analytic_with(t, e, cfg.beta1, cfg.beta2).map_err(ctx("rate"))?;
            let report = RateReport {
                theta: run.theta,
                eta: run.eta,
                beta1: run.beta1,
                beta2: run.beta2,
                p_ms: run.p_ms,
                optimal_rate: 2.0 * run.theta.min(run.eta).sin().powi(2),
                direct_success: run.direct_success(),
                outcomes: run
                    .per_outcome
                    .iter()
                    .map(|o| OutcomeSummary {
                        outcome: o.outcome,
                        probability: o.probability,
                        maximal: o.maximal,
                        bob_acts: o.bob_acts,
                        bob_success: o.bob_success,
                    })
                    .collect(),
                ledger: run.ledger,
            };
            emit(cfg, &report, None)
        }
        Command::Basis => {
            let (t, e) = angles(cfg);
            let basis = build_optimal_basis(t, e, cfg.beta1, cfg.beta2).map_err(ctx("basis"))?;
            if cfg.output_format.is_none() {
                return Ok(write_kets(&basis.kets));
            }
            let (lower_bound, upper_bound) = projection_bounds(t, e).map_err(ctx("basis"))?;
            let report = BasisReport {
                theta: t,
                eta: e,
                beta1: cfg.beta1,
                beta2: cfg.beta2,
                probabilities: basis.branches().iter().map(|b| b.0).collect(),
                lower_bound,
                upper_bound,
                kets: basis.kets.to_vec(),
            };
            emit(cfg, &report, None)
        }
        Command::Simulate => {
            let (t, e) = angles(cfg);
            let sampled = run_protocol_sampled(t, e, cfg.n_samples, cfg.seed).map_err(ctx("simulate"))?;
            let exact = run_protocol_analytic_with(t, e, 0.0, 0.0).map_err(ctx("simulate"))?;
            let z_score = if sampled.stderr > 0.0 {
                (sampled.estimate - exact.p_ms) / sampled.stderr
            } else {
                0.0
            };
            let report = SimulateReport {
                sampled,
                exact_p_ms: exact.p_ms,
                expected_bob_acts: exact.ledger.bob_acts_probability,
                z_score,
            };
            emit(cfg, &report, None)
        }
        Command::Criterion => {
            let (t, e) = angles(cfg);
            let (label, meas) = match cfg.measurement.as_ref().expect("validated by parse_args") {
                MeasurementSource::BuiltIn(name) => {
                    let m = built_in(name, t, e)
                        .ok_or_else(|| CliError::usage(format!("unknown measurement {name}")))?
                        .map_err(ctx("criterion"))?;
                    (name.clone(), m)
                }
                MeasurementSource::File(path) => {
                    let text = fs::read_to_string(path).map_err(|err| CliError::io(path, err))?;
                    let kets = parse_kets(&text).map_err(|err| CliError::invalid(&path.display().to_string(), err))?;
                    let m = from_kets(&kets).map_err(|err| CliError::invalid(&path.display().to_string(), err))?;
                    (path.display().to_string(), m)
                }
            };
            let report = is_optimal(&meas, t, e, cfg.tolerance).map_err(ctx("criterion"))?;
            emit(
                cfg,
                &CriterionOutput {
                    theta: t,
                    eta: e,
                    measurement: label,
                    report,
                },
                None,
            )
        }
        Command::Bound => {
            let a = cfg.schmidt_a.as_ref().expect("validated by parse_args");
            let b = cfg.schmidt_b.as_ref().expect("validated by parse_args");
            let result = achieving_operator(a, b).map_err(ctx("bound"))?;
            let report = BoundOutput {
                a: a.coefficients().to_vec(),
                b: b.coefficients().to_vec(),
                result,
            };
            emit(cfg, &report, None)
        }
        Command::Compare => {
            let (t, e) = angles(cfg);
            let c = compare_with_bell(t, e).map_err(ctx("compare"))?;
            emit(cfg, &c, None)
        }
        Command::Sweep => {
            let rows = sweep(cfg.steps).map_err(ctx("sweep"))?;
            let mut cfg = cfg.clone();
            cfg.output_format.get_or_insert(OutputFormat::Csv);
            emit(&cfg, &rows, Some(&rows))
        }
    }
}

/// Executes a validated configuration, writing to `output_path` when set.
pub fn run(cfg: &RunConfig) -> RunOutput {
    let result = execute(cfg).and_then(|mut text| {
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &cfg.output_path {
            Some(path) => fs::write(path, &text)
                .map(|_| (text, Some(path.clone())))
                .map_err(|e| CliError::io(path, e)),
            None => Ok((text, None)),
        }
    });
    match result {
        Ok((report, written_to)) => RunOutput {
            exit_code: 0,
            report,
            written_to,
        },
        Err(e) => RunOutput {
            exit_code: e.exit_code(),
            report: e.render() + "\n",
            written_to: None,
        },
    }
}

/// Parses `argv` (without the program name) and runs it.
pub fn main_with<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let mut report = e.render();
            if !report.ends_with('\n') {
                report.push('\n');
            }
            RunOutput {
                exit_code: e.exit_code(),
                report,
                written_to: None,
            }
        }
    }
}
