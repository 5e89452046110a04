//! Exact finite-blocklength soft covering: random codebooks, their induced
//! output distributions, the typical/atypical split, and ensemble statistics.

mod codebook;
mod ensemble;
mod induced;
mod split;

pub use codebook::{sample_codebook, size_exponent, Codebook};
pub use ensemble::{ensemble_experiment, EnsembleConfig, EnsembleReport, NSummary, TrialResult};
pub use induced::{induced_distribution, soft_covering_divergence, DivergenceReport, InducedDistribution};
pub use split::{split_report, split_vectors, GoodSetCheck, SplitReport, SplitVectors};

use crate::info::{density_of, mutual_information};
use crate::probability::{Channel, JointPmf, Pmf};

/// `Q_{U,V}` in the forms the simulations need.
#[derive(Debug, Clone)]
pub struct SoftCoveringModel {
    pub joint: JointPmf,
    pub qu: Pmf,
    pub ch: Channel,
    pub qv: Pmf,
    pub mutual_info: f64,
    /// Per-letter information density, row-major; `-inf` where `Q_{V|U} = 0`.
    pub density: Vec<f64>,
}

impl SoftCoveringModel {
    pub fn from_joint(joint: &JointPmf) -> Self {
        let (qu, ch) = joint.split();
        let qv = joint.col_marginal();
        let vk = qv.len();
        let mut density = vec![f64::NEG_INFINITY; qu.len() * vk];
        for u in 0..qu.len() {
            for v in 0..vk {
                if qv.get(v) > 0.0 {
                    density[u * vk + v] = density_of(ch.prob(u, v), 1.0, qv.get(v));
                }
            }
        }
        SoftCoveringModel {
            joint: joint.clone(),
            mutual_info: mutual_information(joint),
            qu,
            ch,
            qv,
            density,
        }
    }
}
