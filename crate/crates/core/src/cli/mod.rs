//! Command-line orchestration: configuration, pre-flight validation, output
//! files and run manifests.

mod args;
mod output;
mod run;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use args::{parse_grid, parse_n_list, Cli, GlobalArgs, Subcommand};
pub use run::{rerun, run, validate, RerunOutcome};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_CAP_DENSE: u64 = 1 << 24;
pub const DEFAULT_CAP_SUBSETS: u64 = 1_000_000;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: CommandConfig,
    pub out: PathBuf,
    pub seed: u64,
    /// The seed was drawn from the clock because none was given.
    pub seed_generated: bool,
    pub threads: Option<usize>,
    pub cap_dense: u64,
    pub cap_subsets: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum CommandConfig {
    Exponents {
        joint: PathBuf,
        rate: f64,
        delta: f64,
        n: Option<usize>,
    },
    Softcover {
        joint: PathBuf,
        rate: f64,
        delta: f64,
        n: Vec<usize>,
        trials: usize,
        split: bool,
    },
    Capacity {
        main: PathBuf,
        eave: Option<PathBuf>,
        alpha: Option<f64>,
        u_card: Option<usize>,
        grid: Option<Vec<f64>>,
        restarts: usize,
        compare_cardinality: bool,
    },
    Wiretap {
        main: PathBuf,
        eave: Option<PathBuf>,
        alpha: Option<f64>,
        input: Option<PathBuf>,
        prefix: Option<PathBuf>,
        n: usize,
        rate: f64,
        rtilde: f64,
        eps: f64,
        mode: ErrorModeConfig,
        subsets: SubsetConfig,
        expurgate: bool,
        sanov_beta: Option<f64>,
        sanov_threshold: f64,
    },
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Exponents { .. } => "exponents",
            CommandConfig::Softcover { .. } => "softcover",
            CommandConfig::Capacity { .. } => "capacity",
            CommandConfig::Wiretap { .. } => "wiretap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorModeConfig {
    Exact,
    MonteCarlo { trials: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubsetConfig {
    Exhaustive,
    Sampled { count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    /// Out-of-range or malformed input; exit code 2.
    Invalid,
    /// Predicted to exceed a compute cap; exit code 3.
    Cap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub field: String,
    pub message: String,
    pub kind: FindingKind,
    /// Predicted entry count, for cap findings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub needed: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Manifest written next to the outputs of every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<OutputDigest>,
}
