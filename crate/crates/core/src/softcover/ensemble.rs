use serde::Serialize;

use super::{
    induced_distribution, sample_codebook, size_exponent, soft_covering_divergence, split_report,
    SoftCoveringModel,
};
use crate::error::{Error, Result};
use crate::exponents::{c_delta, failure_probability_bound, ClampedBound, ExponentParams};
use crate::numeric::{ls_slope, ser_f64, ser_opt_f64};
use crate::parallel::try_map_indexed;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleConfig {
    pub rate: f64,
    pub delta: f64,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub cap: u64,
    /// Also record the atypical mass of each codebook, at `ε_{α*,δ}`.
    pub with_split: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub codebook_size: usize,
    #[serde(serialize_with = "ser_f64")]
    pub divergence: f64,
    #[serde(serialize_with = "ser_f64")]
    pub threshold: f64,
    pub exceeds: bool,
    #[serde(serialize_with = "ser_opt_f64")]
    pub atypical_mass: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NSummary {
    pub n: usize,
    pub codebook_size: usize,
    #[serde(serialize_with = "ser_f64")]
    pub realized_rate: f64,
    pub delta_in_range: bool,
    #[serde(serialize_with = "ser_f64")]
    pub gamma_delta: f64,
    #[serde(serialize_with = "ser_f64")]
    pub c_delta: f64,
    /// `c_δ n 2^{-nγ_δ}`.
    #[serde(serialize_with = "ser_f64")]
    pub threshold: f64,
    #[serde(serialize_with = "ser_f64")]
    pub mean: f64,
    #[serde(serialize_with = "ser_f64")]
    pub median: f64,
    #[serde(serialize_with = "ser_f64")]
    pub max: f64,
    #[serde(serialize_with = "ser_f64")]
    pub exceed_fraction: f64,
    pub failure_bound: ClampedBound,
    /// `ε_{α,δ}` and `β_{α,δ}` at the optimizing order, when the split is recorded.
    #[serde(serialize_with = "ser_opt_f64")]
    pub split_eps: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub split_beta: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub mean_atypical_mass: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub sd_atypical_mass: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleReport {
    #[serde(serialize_with = "ser_f64")]
    pub mutual_information: f64,
    pub config: EnsembleConfig,
    pub per_n: Vec<NSummary>,
    /// Least-squares slope of `log2(mean D)` against `n`.
    #[serde(serialize_with = "ser_opt_f64")]
    pub slope_log2_mean: Option<f64>,
    pub trials: Vec<TrialResult>,
}

/// Runs `trials` independent codebooks for every blocklength. Trial `t` at
/// blocklength `n` uses seed `derive_seed(seed, n, t)`, so any row can be
/// regenerated alone. Exponents use the realized rate `round(nR)/n`.
pub fn ensemble_experiment(model: &SoftCoveringModel, cfg: &EnsembleConfig) -> Result<EnsembleReport> {
    if cfg.trials == 0 {
        return Err(Error::validation("trials", "must be at least 1"));
    }
    if cfg.n_list.is_empty() {
        return Err(Error::validation("n", "no blocklengths given"));
    }
    if !(cfg.delta >= 0.0) {
        return Err(Error::validation("delta", "must be >= 0"));
    }
    let mut per_n = Vec::new();
    let mut all = Vec::new();
    for &n in &cfg.n_list {
        if n == 0 {
            return Err(Error::validation("n", "blocklength must be >= 1"));
        }
        let k = size_exponent(n, cfg.rate);
        let realized = k as f64 / n as f64;
        let params = ExponentParams::new(&model.joint, realized, cfg.delta)?;
        let search = params.gamma_delta();
        let gamma = search.value;
        let c = c_delta(&model.qv, gamma);
        let threshold = c * n as f64 * (-(n as f64) * gamma).exp2();
        let split = if cfg.with_split {
            let alpha = search.alpha_star.unwrap_or(2.0);
            Some((
                params.epsilon_alpha_delta(alpha)?.max(0.0),
                params.beta_alpha_delta(alpha)?,
            ))
        } else {
            None
        };
        let trials = try_map_indexed(cfg.trials, |t| -> Result<TrialResult> {
            let seed = derive_seed(cfg.seed, n as u64, t as u64);
            let cb = sample_codebook(&model.qu, n, cfg.rate, seed, cfg.cap)?;
            let ind = induced_distribution(&cb, &model.ch, cfg.cap)?;
            let d = soft_covering_divergence(&ind, &model.qv)?.divergence;
            let atypical_mass = match split {
                Some((eps, _)) => Some(split_report(model, &cb, eps, cfg.cap)?.p2_mass),
                None => None,
            };
            Ok(TrialResult {
                n,
                trial: t,
                seed,
                codebook_size: cb.len(),
                divergence: d,
                threshold,
                exceeds: d > threshold,
                atypical_mass,
            })
        })?;
        let mut ds: Vec<f64> = trials.iter().map(|t| t.divergence).collect();
        let count = ds.len() as f64;
        let mean = ds.iter().sum::<f64>() / count;
        ds.sort_by(f64::total_cmp);
        let median = if ds.len() % 2 == 1 {
            ds[ds.len() / 2]
        } else {
            0.5 * (ds[ds.len() / 2 - 1] + ds[ds.len() / 2])
        };
        let exceed = trials.iter().filter(|t| t.exceeds).count() as f64 / count;
        let (mean_p2, sd_p2) = if split.is_some() {
            let xs: Vec<f64> = trials.iter().filter_map(|t| t.atypical_mass).collect();
            let m = xs.iter().sum::<f64>() / count;
            let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (count - 1.0).max(1.0);
            (Some(m), Some(var.sqrt()))
        } else {
            (None, None)
        };
        per_n.push(NSummary {
            n,
            codebook_size: 1 << k,
            realized_rate: realized,
            delta_in_range: params.delta_in_range(),
            gamma_delta: gamma,
            c_delta: c,
            threshold,
            mean,
            median,
            max: *ds.last().expect("trials >= 1"),
            exceed_fraction: exceed,
            failure_bound: failure_probability_bound(n, cfg.delta, model.qv.len()),
            split_eps: split.map(|s| s.0),
            split_beta: split.map(|s| s.1),
            mean_atypical_mass: mean_p2,
            sd_atypical_mass: sd_p2,
        });
        all.extend(trials);
    }
    let xs: Vec<f64> = per_n.iter().map(|s| s.n as f64).collect();
    let ys: Vec<f64> = per_n.iter().map(|s| s.mean.log2()).collect();
    Ok(EnsembleReport {
        mutual_information: model.mutual_info,
        config: cfg.clone(),
        slope_log2_mean: ls_slope(&xs, &ys),
        per_n,
        trials: all,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::{Channel, JointPmf, Pmf};

    fn model() -> SoftCoveringModel {
        SoftCoveringModel::from_joint(
            &JointPmf::from_input_and_channel(&Pmf::uniform(2), &Channel::bsc(0.2).unwrap())
                .unwrap(),
        )
    }

    fn cfg(rate: f64, n_list: Vec<usize>, trials: usize) -> EnsembleConfig {
        EnsembleConfig {
            rate,
            delta: 0.05,
            n_list,
            trials,
            seed: 2024,
            cap: 1 << 24,
            with_split: false,
        }
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(ensemble_experiment(&model(), &cfg(0.8, vec![4], 0)).is_err());
    }

    #[test]
    fn deterministic_and_reproducible_per_trial() {
        let m = model();
        let a = ensemble_experiment(&m, &cfg(0.8, vec![4, 6], 5)).unwrap();
        let b = ensemble_experiment(&m, &cfg(0.8, vec![4, 6], 5)).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let t = &a.trials[7];
        let cb = sample_codebook(&m.qu, t.n, 0.8, t.seed, 1 << 24).unwrap();
        let ind = induced_distribution(&cb, &m.ch, 1 << 24).unwrap();
        let d = soft_covering_divergence(&ind, &m.qv).unwrap().divergence;
        assert_eq!(d, t.divergence);
    }

    #[test]
    fn decay_above_mutual_information_and_none_below() {
        let m = model();
        let above = ensemble_experiment(&m, &cfg(0.8, vec![6, 8, 10], 20)).unwrap();
        assert!(above.slope_log2_mean.unwrap() < 0.0);
        let below = ensemble_experiment(&m, &cfg(0.15, vec![6, 8, 10], 20)).unwrap();
        let means: Vec<f64> = below.per_n.iter().map(|s| s.mean).collect();
        assert!(means[2] >= means[0] - 1e-9, "{means:?}");
    }
}
