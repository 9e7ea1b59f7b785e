//! Driver for gevrey-nets experiments: configuration, commands and report emission.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use gevrey_nets::growth::Mode;
use thiserror::Error;

use crate::config::ExperimentConfig;
use crate::report::{Report, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gevrey_nets::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        use gevrey_nets::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::Saturation { .. } => "saturation",
                E::Aliasing { .. } => "aliasing",
                E::Resolution(_) => "resolution",
                E::InvalidParameter(_) => "invalid_parameter",
                E::Mismatch(_) => "mismatch",
                E::OutsideBox(_) => "outside_box",
                E::Unsupported(_) => "unsupported",
                E::Io(_) => "io",
                E::Json(_) => "json",
            },
            CliError::Config(_) => "config",
            CliError::Output(_) => "output",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check (M.1), (M.2), (M.3)′ of a weight sequence, or (α)–(γ₀) of a weight function.
    WeightsCheck,
    /// Build the mollifier and verify its contract.
    MollifierBuild,
    /// Regularize the distribution and summarize the frames.
    Embed,
    /// Moderate / negligible classification on the box `[-r, r]^d`.
    Classify,
    /// Paley–Wiener regularity test of the windowed net.
    Regularity,
    /// Windowed cone-decay wave front set, compared with the classical one.
    Wavefront,
    /// The failure of `H² = H` in the algebra, evaluated at the origin.
    ImpossibilityDemo,
    /// Classification at `e^{kω(1/ε)}` scales with a weight function.
    BbClassify,
    /// `ω = log(1 + t)` verdicts next to polynomial-scale verdicts.
    Crosscheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::WeightsCheck => "weights-check",
            Command::MollifierBuild => "mollifier-build",
            Command::Embed => "embed",
            Command::Classify => "classify",
            Command::Regularity => "regularity",
            Command::Wavefront => "wavefront",
            Command::ImpossibilityDemo => "impossibility-demo",
            Command::BbClassify => "bb-classify",
            Command::Crosscheck => "crosscheck",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gevrey-nets", version, about = "Embed ultradistributions into ε-nets and classify them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON config, or a MANIFEST.json from an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Catalog distribution name, or `table:PATH` for a JSON spectral table.
    #[arg(long, global = true)]
    pub dist: Option<String>,

    #[arg(long, global = true)]
    pub mode: Option<Mode>,

    /// gevrey:S | omega:log1p | omega:pow:A
    #[arg(long, global = true)]
    pub weight: Option<String>,

    #[arg(long, global = true)]
    pub sigma: Option<f64>,

    /// N,L
    #[arg(long, global = true)]
    pub grid: Option<String>,

    /// EPS0,RATIO,COUNT
    #[arg(long, global = true)]
    pub ladder: Option<String>,
}

fn parse_list(flag: &str, s: &str, len: usize) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("--{flag} expects {len} comma-separated numbers, got '{s}'")))?;
    if v.len() != len {
        return Err(CliError::Config(format!("--{flag} expects {len} comma-separated numbers, got '{s}'")));
    }
    Ok(v)
}

fn whole(flag: &str, v: f64) -> Result<usize, CliError> {
    if v.fract() != 0.0 || v < 0.0 {
        return Err(CliError::Config(format!("--{flag} expects a non-negative integer count, got {v}")));
    }
    Ok(v as usize)
}

impl Cli {
    /// The config file (if any) with every flag applied on top, plus the raw file bytes.
    pub fn effective_config(&self) -> Result<(ExperimentConfig, Option<Vec<u8>>), CliError> {
        let (mut cfg, bytes) = match &self.config {
            Some(p) => {
                let bytes = std::fs::read(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                (ExperimentConfig::load(p)?, Some(bytes))
            }
            None => (ExperimentConfig::default(), None),
        };
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(d) = &self.dist {
            cfg.dist = d.clone();
            cfg.distribution = None;
        }
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(w) = &self.weight {
            cfg.weight = w.clone();
        }
        if let Some(s) = self.sigma {
            cfg.sigma = Some(s);
        }
        if let Some(g) = &self.grid {
            let v = parse_list("grid", g, 2)?;
            cfg.grid.n = whole("grid", v[0])?;
            cfg.grid.half_width = v[1];
        }
        if let Some(l) = &self.ladder {
            let v = parse_list("ladder", l, 3)?;
            cfg.ladder.eps0 = v[0];
            cfg.ladder.ratio = v[1];
            cfg.ladder.count = whole("ladder", v[2])?;
        }
        Ok((cfg, bytes))
    }
}

/// Exit status and the single-line reason printed on precondition failures.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub message: Option<String>,
    pub report: Option<Report>,
}

/// Run one command and write its artifacts: exit 0 when every declared expectation
/// holds, 1 on a mismatch, 2 on precondition errors.
pub fn execute(command: Command, config: &ExperimentConfig, config_file: Option<&[u8]>) -> Outcome {
    match run_and_emit(command, config, config_file) {
        Ok(report) => {
            let code = if report.checks.iter().all(|c| c.ok) { 0 } else { 1 };
            let message = (code == 1).then(|| {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.ok).map(|c| c.name.as_str()).collect();
                format!("mismatch checks={}", failed.join(","))
            });
            Outcome { code, message, report: Some(report) }
        }
        Err(e) => Outcome {
            code: 2,
            message: Some(format!("error kind={} message={}", e.kind(), e.to_string().replace('\n', " "))),
            report: None,
        },
    }
}

fn run_and_emit(command: Command, config: &ExperimentConfig, config_file: Option<&[u8]>) -> Result<Report, CliError> {
    let resolved = config.resolve()?;
    let out = commands::run(command, config, &resolved)?;
    let status = if out.checks.iter().all(|c| c.ok) { "ok" } else { "mismatch" };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: command.name().into(),
        status,
        checks: out.checks,
        result: out.result,
    };
    let mut recorded = config.clone();
    recorded.sigma = Some(resolved.sigma);
    if resolved.table_file.is_some() {
        recorded.distribution = Some(resolved.distribution.clone());
    }
    let inputs: Vec<(String, Vec<u8>)> = resolved.table_file.into_iter().collect();
    report::emit(&config.out, &recorded, config_file, &inputs, &report, &out.tables)?;
    Ok(report)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    match cli.effective_config() {
        Ok((cfg, bytes)) => execute(cli.command, &cfg, bytes.as_deref()),
        Err(e) => Outcome {
            code: 2,
            message: Some(format!("error kind={} message={}", e.kind(), e.to_string().replace('\n', " "))),
            report: None,
        },
    }
}
