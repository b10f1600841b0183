//! Command-line front end: reads a JSON input, runs one analysis, writes
//! one JSON report.
//!
//! Exit codes: 0 when every check passes, 2 when a check fails or the
//! numerics give up, 3 when the input or configuration is invalid.

mod commands;
pub mod report;
pub mod schema;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use copolarity_core::numkernel::TolerancePolicy;
use copolarity_core::Error as CoreError;

pub use report::Report;
pub use schema::Input;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Principal orbit type, cohomogeneity and (optionally) one point.
    Analyze,
    /// Canonical or user-supplied section and its copolarity.
    Copolarity,
    /// Normalizer reduction, stability and regularity checks.
    Reduce,
    /// Slice representations at singular points of the section.
    Slice,
    /// Monte-Carlo section axioms and the D/E split at the anchor.
    Verify,
    /// Cartan decomposition, Lie triple system and tangent formula.
    Sympair,
    /// Resolution criteria (linear_rep) or invariant metrics (triple_datum).
    Resolution,
    /// Gram matrix of the gauge family.
    Gauge,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Copolarity => "copolarity",
            Command::Reduce => "reduce",
            Command::Slice => "slice",
            Command::Verify => "verify",
            Command::Sympair => "sympair",
            Command::Resolution => "resolution",
            Command::Gauge => "gauge",
        }
    }
}

#[derive(Clone, Debug, Parser)]
#[command(name = "copolarity-lab", version, about = "Sections and copolarity of isometric Lie group actions")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Input JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Report path; `-` writes to standard output.
    #[arg(long, default_value = "-")]
    pub output: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long)]
    pub rel_rank_tol: Option<f64>,
    #[arg(long)]
    pub abs_zero_tol: Option<f64>,
    #[arg(long)]
    pub containment_tol: Option<f64>,
    /// Comma-separated coordinates of a point (analyze, slice).
    #[arg(long)]
    pub point: Option<String>,
    /// Number of gauge family members.
    #[arg(long, default_value_t = 4)]
    pub terms: usize,
    /// Gauss-Legendre nodes for the gauge Gram quadrature.
    #[arg(long, default_value_t = 64)]
    pub quad_points: usize,
    /// Length of X under the inner product for the gauge family.
    #[arg(long, default_value_t = 1.0)]
    pub x_scale: f64,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        Self {
            command,
            input: input.into(),
            output: PathBuf::from("-"),
            seed: 0,
            samples: 200,
            rel_rank_tol: None,
            abs_zero_tol: None,
            containment_tol: None,
            point: None,
            terms: 4,
            quad_points: 64,
            x_scale: 1.0,
        }
    }

    pub fn policy(&self) -> Result<TolerancePolicy, CliError> {
        let d = TolerancePolicy::default();
        Ok(TolerancePolicy::new(
            self.rel_rank_tol.unwrap_or(d.rel_rank_tol),
            self.abs_zero_tol.unwrap_or(d.abs_zero_tol),
            self.containment_tol.unwrap_or(d.containment_tol),
        )?)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.input.as_os_str().is_empty() || self.output.as_os_str().is_empty() {
            return Err(CliError::Config("paths must be nonempty".into()));
        }
        if self.samples == 0 {
            return Err(CliError::Config("--samples must be at least 1".into()));
        }
        if self.terms == 0 || self.quad_points == 0 {
            return Err(CliError::Config("--terms and --quad-points must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid input: {0}")]
    Schema(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{command} does not accept input of kind {kind}")]
    WrongKind { command: &'static str, kind: &'static str },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// Errors that describe bad input rather than a failed computation.
    pub fn is_input_error(&self) -> bool {
        match self {
            CliError::Core(e) => !matches!(
                e,
                CoreError::NotRegular
                    | CoreError::NotNormal { .. }
                    | CoreError::Decomposition { .. }
                    | CoreError::InfeasibleNumerically { .. }
                    | CoreError::NoConvergence { .. }
            ),
            _ => true,
        }
    }
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

/// Runs one command. Returns the report and its exit code; input errors
/// come back as `Err` and no report is written.
pub fn run(config: &RunConfig) -> Result<(Report, u8), CliError> {
    config.validate()?;
    let policy = config.policy()?;
    let text = std::fs::read_to_string(&config.input).map_err(|source| CliError::Read {
        path: config.input.clone(),
        source,
    })?;
    let input = Input::parse(&text)?;
    let mut report = Report::new(config, &text, input.kind(), policy);
    match commands::dispatch(config, &input, policy) {
        Ok(section) => report.fill(section),
        Err(e) if e.is_input_error() => return Err(e),
        Err(e) => report.fail_with(&e),
    }
    let code = if report.passed { EXIT_PASS } else { EXIT_CHECK_FAILED };
    report.write(&config.output)?;
    Ok((report, code))
}
