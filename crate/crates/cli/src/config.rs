use std::path::{Path, PathBuf};
use std::str::FromStr;

use gevrey_nets::distributions::{ModelDistribution, SpectralTable};
use gevrey_nets::estimators::{Classification, Regularity};
use gevrey_nets::fourier::GridSpec;
use gevrey_nets::growth::Mode;
use gevrey_nets::mollifier::min_admissible_eps;
use gevrey_nets::nets::EpsilonLadder;
use gevrey_nets::weights::{WeightFunction, WeightSequence, DEFAULT_P_MAX};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub n: usize,
    pub half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { dim: 1, n: 32768, half_width: 20.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self { eps0: 0.125, ratio: 0.5, count: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WavefrontConfig {
    /// Defaults to `{-2, 0, 2}` in 1-D and the origin plus `(±2.5, 0)` in 2-D.
    pub centers: Option<Vec<Vec<f64>>>,
    pub radius: f64,
}

impl Default for WavefrontConfig {
    fn default() -> Self {
        Self { centers: None, radius: 0.5 }
    }
}

/// Verdicts a run is expected to reproduce; unset fields are not checked.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Expectations {
    pub conditions_ok: Option<bool>,
    pub contract_ok: Option<bool>,
    pub classification: Option<Classification>,
    pub regularity: Option<Regularity>,
    pub wf_matches_oracle: Option<bool>,
    pub non_negligible: Option<bool>,
    pub crosscheck_agree: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// `gevrey:S`, `omega:log1p` or `omega:pow:A`.
    pub weight: String,
    /// Mollifier order; derived from a Gevrey weight as `(1 + s) / 2` when absent.
    pub sigma: Option<f64>,
    pub grid: GridConfig,
    pub ladder: LadderConfig,
    /// Catalog name, or `table:PATH` for a user spectral table; used when `distribution` is absent.
    pub dist: String,
    pub distribution: Option<ModelDistribution>,
    pub mode: Mode,
    /// Half-width of the box `K` used by `classify` and `embed`.
    pub region_radius: f64,
    /// Radius of the window applied before `regularity`, `bb-classify` and `crosscheck`.
    pub window_radius: f64,
    pub wavefront: WavefrontConfig,
    pub export_frames: bool,
    pub out: PathBuf,
    pub expect: Expectations,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            weight: "gevrey:2".into(),
            sigma: None,
            grid: GridConfig::default(),
            ladder: LadderConfig::default(),
            dist: "delta".into(),
            distribution: None,
            mode: Mode::Beurling,
            region_radius: 5.0,
            window_radius: 16.0,
            wavefront: WavefrontConfig::default(),
            export_frames: false,
            out: PathBuf::from("out"),
            expect: Expectations::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightChoice {
    Sequence(WeightSequence),
    Function(WeightFunction),
}

impl FromStr for WeightChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("unrecognized weight '{s}' (expected gevrey:S, omega:log1p or omega:pow:A)"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["gevrey", order] => {
                let order: f64 = order.parse().map_err(|_| bad())?;
                Ok(Self::Sequence(WeightSequence::gevrey(order, DEFAULT_P_MAX)?))
            }
            ["omega", "log1p"] => Ok(Self::Function(WeightFunction::log_one_plus_t())),
            ["omega", "pow", a] => {
                let a: f64 = a.parse().map_err(|_| bad())?;
                Ok(Self::Function(WeightFunction::power(a)?))
            }
            _ => Err(bad()),
        }
    }
}

/// A validated configuration, ready to run.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub weight: WeightChoice,
    pub sigma: f64,
    pub grid: GridSpec,
    pub ladder: EpsilonLadder,
    pub distribution: ModelDistribution,
    /// Path and contents of a spectral table read through `dist = "table:PATH"`.
    pub table_file: Option<(String, Vec<u8>)>,
}

impl ExperimentConfig {
    /// Read a config file, or the `config` section of a MANIFEST written by a previous run.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_slice(&bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let value = match value.get("config") {
            Some(inner) if value.get("manifest_version").is_some() => inner.clone(),
            _ => value,
        };
        serde_json::from_value(value).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Check every precondition (weights, aliasing, saturation headroom) before any computation.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let weight: WeightChoice = self.weight.parse()?;
        let sigma = match (self.sigma, &weight) {
            (Some(s), _) => s,
            (None, WeightChoice::Sequence(m)) => match m.kind() {
                gevrey_nets::weights::SequenceKind::Gevrey { s } => 0.5 * (1.0 + s),
                gevrey_nets::weights::SequenceKind::Custom => 1.5,
            },
            (None, WeightChoice::Function(_)) => 1.5,
        };
        if !(sigma > 1.0) {
            return Err(CliError::Config(format!("mollifier order must exceed 1, got {sigma}")));
        }
        let grid = GridSpec::new(self.grid.dim, self.grid.half_width, self.grid.n)?;
        let ladder = EpsilonLadder::new(self.ladder.eps0, self.ladder.ratio, self.ladder.count)?;
        let min_eps = min_admissible_eps(&grid);
        if ladder.smallest() < min_eps * (1.0 - 1e-12) {
            return Err(gevrey_nets::Error::Aliasing { eps: ladder.smallest(), min_eps }.into());
        }
        if let WeightChoice::Sequence(m) = &weight {
            m.assoc(1.0 / ladder.smallest())?;
        }
        let mut table_file = None;
        let distribution = match (&self.distribution, self.dist.strip_prefix("table:")) {
            (Some(d), _) => d.clone(),
            (None, Some(path)) => {
                let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
                let table: SpectralTable =
                    serde_json::from_slice(&bytes).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
                table_file = Some((path.to_string(), bytes));
                ModelDistribution::Table(table)
            }
            (None, None) => ModelDistribution::from_name(&self.dist)?,
        };
        distribution.validate()?;
        if distribution.dim() != grid.dim {
            return Err(CliError::Config(format!(
                "distribution '{}' is {}-dimensional but the grid is {}-dimensional",
                distribution.name(),
                distribution.dim(),
                grid.dim
            )));
        }
        if self.region_radius <= 0.0 || self.region_radius >= grid.half_width {
            return Err(CliError::Config(format!("region_radius must lie in (0, {})", grid.half_width)));
        }
        Ok(Resolved { weight, sigma, grid, ladder, distribution, table_file })
    }
}
