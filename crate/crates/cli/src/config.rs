//! Experiment configuration documents.

use std::fs;
use std::path::{Path, PathBuf};

use clonal_recur::inference::ExperimentOptions;
use clonal_recur::simulate::{EarlyRecurrence, StopRule};
use clonal_recur::{presets, RawParams, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: Option<RawParams>,
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub simulate: Option<SimulateBlock>,
    pub analyze: Option<AnalyzeBlock>,
    pub estimate: Option<EstimateBlock>,
    pub table1: Option<Table1Block>,
    pub fig1: Option<Fig1Block>,
    pub fig2: Option<Fig2Block>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    pub replicates: usize,
    #[serde(default = "recurrence_stop")]
    pub stop: StopRule,
    #[serde(default)]
    pub condition: Option<EarlyRecurrence>,
    #[serde(default = "yes")]
    pub write_clones: bool,
    #[serde(default = "default_budget")]
    pub attempt_budget: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeBlock {
    pub y: Vec<f64>,
    #[serde(default)]
    pub windows: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateBlock {
    /// CSV with columns `clone_count,simpson,gamma`; relative to the config file.
    pub observations: PathBuf,
    /// Initial population size; defaults to `params.n`.
    #[serde(default)]
    pub n: Option<u64>,
    #[serde(default = "default_resamples")]
    pub resamples: usize,
    #[serde(default = "default_level")]
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Block {
    #[serde(rename = "M")]
    pub m: usize,
    pub num_estimates: usize,
    #[serde(default = "default_resamples")]
    pub resamples: usize,
    #[serde(default = "default_level")]
    pub level: f64,
    /// Feed the large-`n` moments straight into the estimators instead of simulating.
    #[serde(default)]
    pub noiseless: bool,
}

impl Table1Block {
    pub fn options(&self) -> ExperimentOptions {
        ExperimentOptions { resamples: self.resamples, level: self.level }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig1Block {
    #[serde(default = "fig1_replicates")]
    pub replicates: usize,
    #[serde(default = "fig1_y")]
    pub y: f64,
    #[serde(default = "default_budget")]
    pub attempt_budget: u64,
}

impl Default for Fig1Block {
    fn default() -> Self {
        Fig1Block { replicates: fig1_replicates(), y: fig1_y(), attempt_budget: default_budget() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig2Block {
    #[serde(default = "presets::fig2_grid")]
    pub y: Vec<f64>,
}

impl Default for Fig2Block {
    fn default() -> Self {
        Fig2Block { y: presets::fig2_grid() }
    }
}

fn recurrence_stop() -> StopRule {
    StopRule::RecurrenceThreshold
}
fn yes() -> bool {
    true
}
fn default_budget() -> u64 {
    10_000_000
}
fn default_resamples() -> usize {
    100
}
fn default_level() -> f64 {
    0.95
}
fn fig1_replicates() -> usize {
    presets::FIG1_REPLICATES
}
fn fig1_y() -> f64 {
    presets::FIG1_Y
}

impl ExperimentConfig {
    /// Reads and parses `path`; errors name the offending field and line.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut de = serde_json::Deserializer::from_str(&text);
        let mut config: ExperimentConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let inner = e.inner();
            CliError::Config(format!(
                "{}: field `{}` (line {}, column {}): {inner}",
                path.display(),
                e.path(),
                inner.line(),
                inner.column()
            ))
        })?;
        de.end().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(est) = config.estimate.as_mut() {
            if est.observations.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                est.observations = base.join(&est.observations);
            }
        }
        config.tolerances.validate().map_err(|e| CliError::Config(format!("tolerances: {e}")))?;
        Ok(config)
    }

    pub fn params(&self) -> Result<clonal_recur::Params, CliError> {
        let raw = self.params.ok_or_else(|| CliError::Config("missing `params` block".into()))?;
        raw.validate().map_err(|e| CliError::Config(format!("params: {e}")))
    }

    /// The seed in effect; a config without one is rejected.
    pub fn seed(&self) -> Result<u64, CliError> {
        self.master_seed
            .ok_or_else(|| CliError::Config("missing `master_seed` (set it in the config or pass --seed)".into()))
    }
}

pub fn require<'a, T>(block: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    block.as_ref().ok_or_else(|| CliError::Config(format!("missing `{name}` block")))
}
