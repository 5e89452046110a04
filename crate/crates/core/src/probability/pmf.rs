use serde::Serialize;

use super::Alphabet;
use crate::error::{Error, Result};

/// Construction tolerance on the total mass of a probability vector.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Probability mass function over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    alphabet: Alphabet,
    probs: Vec<f64>,
    /// Set when the supplied vector was off by more than the tolerance and had
    /// to be rescaled.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    renormalized: bool,
}

/// Normalizes non-negative weights into a [`Pmf`] over `{0, .., k-1}`.
pub fn make_pmf(weights: &[f64]) -> Result<Pmf> {
    Pmf::from_weights(Alphabet::indexed(weights.len().max(1)), weights)
}

pub(crate) fn check_weights(field: &str, weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::validation(field, "empty probability vector"));
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::validation(
                format!("{field}[{i}]"),
                format!("weight {w} is negative or not finite"),
            ));
        }
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::validation(field, "all weights are zero"));
    }
    Ok(total)
}

impl Pmf {
    /// Builds a PMF from a probability vector, rescaling (and flagging) it when
    /// the total mass is further than [`NORMALIZATION_TOLERANCE`] from one.
    pub fn new(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if alphabet.len() != probs.len() {
            return Err(Error::validation(
                "probs",
                format!(
                    "{} probabilities for an alphabet of {} symbols",
                    probs.len(),
                    alphabet.len()
                ),
            ));
        }
        let total = check_weights("probs", &probs)?;
        if (total - 1.0).abs() <= NORMALIZATION_TOLERANCE {
            return Ok(Pmf {
                alphabet,
                probs,
                renormalized: false,
            });
        }
        let probs = probs.iter().map(|p| p / total).collect();
        Ok(Pmf {
            alphabet,
            probs,
            renormalized: true,
        })
    }

    /// Always divides by the exact sum of the weights.
    pub fn from_weights(alphabet: Alphabet, weights: &[f64]) -> Result<Self> {
        if alphabet.len() != weights.len() {
            return Err(Error::validation(
                "weights",
                format!(
                    "{} weights for an alphabet of {} symbols",
                    weights.len(),
                    alphabet.len()
                ),
            ));
        }
        let total = check_weights("weights", weights)?;
        Ok(Pmf {
            alphabet,
            probs: weights.iter().map(|w| w / total).collect(),
            renormalized: false,
        })
    }

    /// Rational-valued PMF `counts[i] / sum(counts)`.
    ///
    /// IEEE division is correctly rounded, so equal rationals map to equal
    /// floats; typicality tests against such PMFs are exact.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::validation("counts", "all counts are zero"));
        }
        Ok(Pmf {
            alphabet: Alphabet::indexed(counts.len()),
            probs: counts.iter().map(|&c| c as f64 / total as f64).collect(),
            renormalized: false,
        })
    }

    pub fn uniform(k: usize) -> Self {
        Pmf {
            alphabet: Alphabet::indexed(k),
            probs: vec![1.0 / k as f64; k],
            renormalized: false,
        }
    }

    /// `Ber(p)` over `{0, 1}` with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::validation("p", format!("{p} is not in [0, 1]")));
        }
        Ok(Pmf {
            alphabet: Alphabet::binary(),
            probs: vec![1.0 - p, p],
            renormalized: false,
        })
    }

    /// Point mass on symbol `i` of a `k`-ary alphabet.
    pub fn point_mass(k: usize, i: usize) -> Self {
        let mut probs = vec![0.0; k];
        probs[i] = 1.0;
        Pmf {
            alphabet: Alphabet::indexed(k),
            probs,
            renormalized: false,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    /// Indices with strictly positive probability.
    pub fn support(&self) -> Vec<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Smallest probability on the support.
    pub fn min_support_prob(&self) -> f64 {
        self.probs
            .iter()
            .copied()
            .filter(|&p| p > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Same probabilities relabelled with another alphabet of equal size.
    pub fn relabel(&self, alphabet: Alphabet) -> Result<Self> {
        Pmf::new(alphabet, self.probs.clone())
    }
}
