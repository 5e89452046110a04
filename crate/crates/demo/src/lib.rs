//! Browser bindings: every export takes plain numbers and returns a JSON string.

use serde::Serialize;
use sscap::capacity::{capacity_curve, uniform_grid, OptimizerConfig};
use sscap::exponents::ExponentParams;
use sscap::probability::{Channel, JointPmf, Pmf};
use sscap::softcover::{ensemble_experiment, EnsembleConfig, SoftCoveringModel};
use wasm_bindgen::prelude::*;

/// Largest dense `|V|^n` the page will enumerate.
const DENSE_CAP: u64 = 1 << 18;
const MAX_N: usize = 16;
const MAX_TRIALS: usize = 200;
const MAX_POINTS: usize = 50;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn json(value: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(value).map_err(err)
}

/// Uniform input through a BSC with crossover `p`.
fn bsc_joint(p: f64) -> Result<JointPmf, String> {
    let ch = Channel::bsc(p).map_err(err)?;
    JointPmf::from_input_and_channel(&Pmf::uniform(2), &ch).map_err(err)
}

#[derive(Serialize)]
struct ExponentView {
    mutual_information: f64,
    gamma_delta: f64,
    alpha_star: Option<f64>,
    /// `(α, β_{α,δ})` on the logarithmic grid.
    curve: Vec<(f64, f64)>,
}

/// `β_{α,δ}` against `α` for a BSC(`p`) at the given rate.
#[wasm_bindgen]
pub fn exponent_curve(p: f64, rate: f64, delta: f64) -> Result<String, String> {
    let params = ExponentParams::new(&bsc_joint(p)?, rate, delta).map_err(err)?;
    let search = params.gamma_delta();
    let curve = params
        .beta_curve()
        .into_iter()
        .filter(|(_, b)| b.is_finite())
        .collect();
    json(&ExponentView {
        mutual_information: params.mutual_information(),
        gamma_delta: search.value,
        alpha_star: search.alpha_star,
        curve,
    })
}

/// Type II secrecy capacity `C(α)` of a BSC(`p`) main channel on `points + 1`
/// equally spaced erasure fractions.
#[wasm_bindgen]
pub fn capacity_curve_bsc(p: f64, points: usize) -> Result<String, String> {
    if points == 0 || points > MAX_POINTS {
        return Err(format!("points must be in 1..={MAX_POINTS}"));
    }
    let main = Channel::bsc(p).map_err(err)?;
    let cfg = OptimizerConfig {
        restarts: 8,
        ..OptimizerConfig::default()
    };
    let curve = capacity_curve(&main, &uniform_grid(points), 2, &cfg).map_err(err)?;
    json(&curve)
}

#[derive(Serialize)]
struct TrendRow {
    n: usize,
    codebook_size: usize,
    mean: f64,
    max: f64,
    threshold: f64,
}

#[derive(Serialize)]
struct TrendView {
    mutual_information: f64,
    slope_log2_mean: Option<f64>,
    rows: Vec<TrendRow>,
}

/// Mean soft-covering divergence over random codebooks, for even `n` up to `n_max`.
#[wasm_bindgen]
pub fn softcover_trend(p: f64, rate: f64, delta: f64, n_max: usize, trials: usize, seed: u64) -> Result<String, String> {
    if !(2..=MAX_N).contains(&n_max) {
        return Err(format!("n_max must be in 2..={MAX_N}"));
    }
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must be in 1..={MAX_TRIALS}"));
    }
    let model = SoftCoveringModel::from_joint(&bsc_joint(p)?);
    let cfg = EnsembleConfig {
        rate,
        delta,
        n_list: (2..=n_max).step_by(2).collect(),
        trials,
        seed,
        cap: DENSE_CAP,
        with_split: false,
    };
    let report = ensemble_experiment(&model, &cfg).map_err(err)?;
    json(&TrendView {
        mutual_information: report.mutual_information,
        slope_log2_mean: report.slope_log2_mean,
        rows: report
            .per_n
            .iter()
            .map(|s| TrendRow {
                n: s.n,
                codebook_size: s.codebook_size,
                mean: s.mean,
                max: s.max,
                threshold: s.threshold,
            })
            .collect(),
    })
}
