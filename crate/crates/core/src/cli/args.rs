use std::path::PathBuf;

use clap::{Args, Parser};

use super::{
    CommandConfig, ErrorModeConfig, ExperimentConfig, SubsetConfig, DEFAULT_CAP_DENSE,
    DEFAULT_CAP_SUBSETS,
};
use crate::error::{Error, Result};
use crate::wiretap::DEFAULT_TYPICALITY_EPS;

#[derive(Debug, Parser)]
#[command(name = "sscap", version, about = "Soft covering, secrecy capacity and wiretap-code experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Subcommand,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output directory [default: out; for `rerun`, the recorded directory].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed; drawn from the clock and recorded when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest dense enumeration allowed (entries).
    #[arg(long, global = true, default_value_t = DEFAULT_CAP_DENSE)]
    pub cap_dense: u64,
    /// Largest number of (subset, message) evaluations in exhaustive mode.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP_SUBSETS)]
    pub cap_subsets: u64,
    /// Validate only and print the findings.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Debug, clap::Subcommand)]
pub enum Subcommand {
    /// Soft-covering exponents of a joint PMF.
    Exponents {
        #[arg(long)]
        joint: PathBuf,
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        delta: f64,
        /// Blocklength for the threshold and failure bound.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Ensemble of random codebooks with exact divergences.
    Softcover {
        #[arg(long)]
        joint: PathBuf,
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        delta: f64,
        /// Blocklengths: `6,8,10` or `start:end:step`.
        #[arg(long, value_parser = |s: &str| parse_n_list(s).map(Values))]
        n: Values<usize>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Record the typical/atypical split for every codebook.
        #[arg(long)]
        split: bool,
    },
    /// Secrecy capacity of a type I (`--eave`) or type II (`--alpha`) wiretap channel.
    Capacity {
        #[arg(long)]
        main: PathBuf,
        #[arg(long, conflicts_with = "alpha")]
        eave: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        u_card: Option<usize>,
        /// Curve over alpha: `start:end:step`.
        #[arg(long, value_parser = |s: &str| parse_grid(s).map(Values))]
        grid: Option<Values<f64>>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// Also solve with `|U| = |X| - 1` and report the difference.
        #[arg(long)]
        compare_cardinality: bool,
    },
    /// Random wiretap code: error probabilities and exact leakage.
    Wiretap {
        #[arg(long)]
        main: PathBuf,
        #[arg(long, conflicts_with = "alpha")]
        eave: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Codeword letter law (PMF JSON); uniform when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Prefix channel `Q_{X|U}` (channel JSON).
        #[arg(long)]
        prefix: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        rtilde: f64,
        #[arg(long, default_value_t = DEFAULT_TYPICALITY_EPS)]
        eps: f64,
        /// `exact` or `mc:TRIALS`.
        #[arg(long, default_value = "exact", value_parser = parse_mode)]
        mode: ErrorModeConfig,
        /// `exhaustive` or `sampled:K`.
        #[arg(long, default_value = "exhaustive", value_parser = parse_subsets)]
        subsets: SubsetConfig,
        /// Drop the worse half of the messages before measuring leakage.
        #[arg(long)]
        expurgate: bool,
        /// Erasure fraction for the observation-count tail bound.
        #[arg(long)]
        sanov_beta: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        sanov_threshold: f64,
    },
    /// Re-run the configuration stored in a manifest and compare digests.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
    },
}

/// A list given as one argument, kept whole by the parser.
#[derive(Debug, Clone)]
pub struct Values<T>(pub Vec<T>);

pub fn parse_n_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    let bad = |_| format!("`{s}` is not a list like 6,8,10 or a range like 6:14:2");
    if s.contains(':') {
        let parts: Vec<usize> = s.split(':').map(|p| p.trim().parse().map_err(bad)).collect::<std::result::Result<_, _>>()?;
        let [a, b, step] = parts[..] else {
            return Err(format!("`{s}` must be start:end:step"));
        };
        if step == 0 || a > b {
            return Err(format!("`{s}` is an empty range"));
        }
        Ok((a..=b).step_by(step).collect())
    } else {
        s.split(',').map(|p| p.trim().parse().map_err(bad)).collect()
    }
}

pub fn parse_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
        .collect::<std::result::Result<_, _>>()?;
    let [a, b, step] = parts[..] else {
        return Err(format!("`{s}` must be start:end:step"));
    };
    if !(step > 0.0) || !(b >= a) {
        return Err(format!("`{s}` is an empty range"));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize;
    // Endpoints exact; interior points computed from the index to avoid drift.
    Ok((0..=count).map(|i| if i == count && (a + step * count as f64 - b).abs() < 1e-9 { b } else { a + step * i as f64 }).collect())
}

fn parse_mode(s: &str) -> std::result::Result<ErrorModeConfig, String> {
    match s.split_once(':') {
        None if s == "exact" => Ok(ErrorModeConfig::Exact),
        Some(("mc", t)) => t.parse().map(|trials| ErrorModeConfig::MonteCarlo { trials }).map_err(|_| format!("`{t}` is not a trial count")),
        _ => Err(format!("`{s}` must be `exact` or `mc:TRIALS`")),
    }
}

fn parse_subsets(s: &str) -> std::result::Result<SubsetConfig, String> {
    match s.split_once(':') {
        None if s == "exhaustive" => Ok(SubsetConfig::Exhaustive),
        Some(("sampled", k)) => k.parse().map(|count| SubsetConfig::Sampled { count }).map_err(|_| format!("`{k}` is not a count")),
        _ => Err(format!("`{s}` must be `exhaustive` or `sampled:K`")),
    }
}

fn absolute(p: PathBuf) -> PathBuf {
    std::path::absolute(&p).unwrap_or(p)
}

impl Cli {
    /// Builds the run configuration. `None` for `rerun`.
    pub fn into_config(self) -> Result<Option<ExperimentConfig>> {
        let g = self.global;
        let (seed, seed_generated) = match g.seed {
            Some(s) => (s, false),
            None => (clock_seed()?, true),
        };
        let command = match self.command {
            Subcommand::Rerun { .. } => return Ok(None),
            Subcommand::Exponents { joint, rate, delta, n } => CommandConfig::Exponents { joint: absolute(joint), rate, delta, n },
            Subcommand::Softcover { joint, rate, delta, n, trials, split } => CommandConfig::Softcover {
                joint: absolute(joint),
                rate,
                delta,
                n: n.0,
                trials,
                split,
            },
            Subcommand::Capacity { main, eave, alpha, u_card, grid, restarts, compare_cardinality } => CommandConfig::Capacity {
                main: absolute(main),
                eave: eave.map(absolute),
                alpha,
                u_card,
                grid: grid.map(|g| g.0),
                restarts,
                compare_cardinality,
            },
            Subcommand::Wiretap {
                main,
                eave,
                alpha,
                input,
                prefix,
                n,
                rate,
                rtilde,
                eps,
                mode,
                subsets,
                expurgate,
                sanov_beta,
                sanov_threshold,
            } => CommandConfig::Wiretap {
                main: absolute(main),
                eave: eave.map(absolute),
                alpha,
                input: input.map(absolute),
                prefix: prefix.map(absolute),
                n,
                rate,
                rtilde,
                eps,
                mode,
                subsets,
                expurgate,
                sanov_beta,
                sanov_threshold,
            },
        };
        Ok(Some(ExperimentConfig {
            command,
            out: g.out.unwrap_or_else(|| PathBuf::from("out")),
            seed,
            seed_generated,
            threads: g.threads,
            cap_dense: g.cap_dense,
            cap_subsets: g.cap_subsets,
        }))
    }
}

fn clock_seed() -> Result<u64> {
    let d = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_err(|e| Error::validation("seed", format!("system clock before epoch: {e}")))?;
    Ok(d.as_nanos() as u64)
}
